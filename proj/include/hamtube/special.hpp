#pragma once
#include "hamtube/lie.hpp"

namespace hamtube {

struct ScalarSolveConfig {
  double tol = 1e-14;
  int max_iter = 100;
  bool bracket_fallback = true;
};

// positive solution of exp(-x E) = 1 - x E + x^2/2 on the branch E(0) = 1
double eval_E(double x, const ScalarSolveConfig& cfg = {});
double E_identity_residual(double x, double E);

// arcsin(sqrt x)/sqrt x, arcsinh(sqrt -x)/sqrt -x; defined for x <= 1
double eval_F(double x);

// h(lambda, nu) from the dexp balance equation along the probe direction in q
double m1_balance(const GroupDescriptor& G, const Vec& mu, const Mat& q,
                  const Vec& nu, const Vec& lambda);

// scaling factor m1 > 0 solving h(m1 lambda, nu) m1^2 = 1/2 for dim q = 2.
// nu is a full covector annihilating q. Throws DomainExit when no root is
// found along the scan.
double solve_m1(const GroupDescriptor& G, const Vec& mu, const Mat& q,
                const Vec& nu, const Vec& lambda,
                const ScalarSolveConfig& cfg = {});

}  // namespace hamtube
