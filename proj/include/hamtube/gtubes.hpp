#pragma once
#include <string>

#include "hamtube/special.hpp"
#include "hamtube/splitting.hpp"

namespace hamtube {

// left-trivialized point of T*G
struct CotPoint {
  Mat g;
  Vec nu;
};

Vec momentum_JL(const GroupDescriptor& G, const CotPoint& pt);
Vec momentum_JR(const CotPoint& pt);
// (h g, nu) and (g h^-1, Adstar(h^-1) nu)
CotPoint left_act(const Mat& h, const CotPoint& pt);
CotPoint right_act(const GroupDescriptor& G, const Mat& h, const CotPoint& pt);

enum class Strategy { Auto, Shift, So3Closed, FPath, EPath, Generic };
std::string to_string(Strategy s);
Strategy strategy_from_string(const std::string& s);

// Theta(g, nu, lambda) = (g E, Adstar(E)(nu + mu)), E = exp(m1(nu, lambda) lambda)
// nu is a full covector annihilating q, lambda a vector of q.
class SimpleTube {
 public:
  SimpleTube(const GroupDescriptor& G, const Vec& mu, const Mat& gmu,
             const Mat& q, Strategy s = Strategy::Auto);

  // SO(3), q = mu^perp
  static SimpleTube so3(const Vec& mu, Strategy s = Strategy::Auto);
  // SL(2,R); q is the annihilator of mu when <mu,mu> != 0, otherwise the
  // stabilizer of a line transverse to the image of the nilpotent mu
  static SimpleTube sl2(const Vec& mu, Strategy s = Strategy::Auto);
  // mu identified with c k X k^-1, X = [[0,1],[0,0]]; q = k span{H, Y} k^-1
  static SimpleTube sl2_nilpotent(const Mat& k, double c,
                                  Strategy s = Strategy::Auto);

  const GroupDescriptor& group() const { return G_; }
  const Vec& mu() const { return mu_; }
  Mat gmu() const { return basis_.block("gmu"); }
  const Mat& q() const { return q_; }
  const AdaptedBasis& basis() const { return basis_; }
  Strategy strategy() const { return strategy_; }

  Vec nu_from(const Vec& gmu_coords) const {
    return basis_.extend("gmu", gmu_coords);
  }
  Vec lambda_from(const Vec& q_coords) const { return q_ * q_coords; }

  double scaling(const Vec& nu, const Vec& lambda) const;
  // same value through the dexp balance equation, ignoring the strategy
  double scaling_generic(const Vec& nu, const Vec& lambda) const;
  Mat E(const Vec& nu, const Vec& lambda) const;
  CotPoint eval(const Mat& g, const Vec& nu, const Vec& lambda) const;

  // b with <nu+mu, [x,y]> = b <mu, [x,y]> on q (dim q = 2)
  double ratio_b(const Vec& nu) const;
  // conditions for the F closed form, evaluated numerically
  bool f_conditions_hold() const;
  bool q_is_subalgebra() const;

  // exponent multiplier for negative controls; 1 for the tube itself
  double perturbation = 1.0;

 private:
  GroupDescriptor G_;
  Vec mu_;
  Mat q_;
  AdaptedBasis basis_;
  Strategy strategy_;
};

struct RestrictedResult {
  CotPoint pt;
  Vec zeta;  // element of n
  int iterations = 0;
  double residual = 0.0;  // |J_R|_l + eps|
};

struct NewtonConfig {
  int max_iter = 50;
  double tol = 1e-10;     // required residual
  double target = 1e-14;  // stop once below target * (1 + |mu|)
  double trust = 0.5;     // cap on |delta zeta|
  double fd_step = 1e-7;
};

// Phi(g, nu, lambda; eps) = Theta(g, nu, lambda + zeta), zeta in n chosen so
// that the l-part of the right momentum is -eps. eps holds <eps, l_i>.
class RestrictedTube {
 public:
  RestrictedTube(const GroupDescriptor& G, const AdaptedSplitting& spl,
                 Strategy simple = Strategy::Auto, bool so3_closed = false,
                 NewtonConfig cfg = {});

  const AdaptedSplitting& splitting() const { return spl_; }
  const SimpleTube& simple() const { return simple_; }
  SimpleTube& simple() { return simple_; }
  const SigmaMap& sigma_map() const { return sigma_; }
  bool closed_form() const { return so3_closed_; }

  Vec nu_from(const Vec& gmu_coords) const;
  RestrictedResult eval(const Mat& g, const Vec& nu, const Vec& lambda,
                        const Vec& eps) const;
  // closed form valid for SO(3) with o = 0
  RestrictedResult eval_so3(const Mat& g, const Vec& nu, const Vec& eps) const;
  RestrictedResult eval_newton(const Mat& g, const Vec& nu, const Vec& lambda,
                               const Vec& eps) const;

 private:
  GroupDescriptor G_;
  AdaptedSplitting spl_;
  SimpleTube simple_;
  SigmaMap sigma_;
  bool so3_closed_;
  NewtonConfig cfg_;
};

}  // namespace hamtube
