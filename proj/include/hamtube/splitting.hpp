#pragma once
#include <map>
#include <string>
#include <vector>

#include "hamtube/lie.hpp"

namespace hamtube {

// Omega^mu(e_i, e_j) = -<mu, [e_i, e_j]>
Mat omega_form(const GroupDescriptor& G, const Vec& mu);

// basis of g_mu; throws CertificationError without a clear rank gap
Mat isotropy_algebra(const GroupDescriptor& G, const Vec& mu,
                     double rtol = kRankTol);

// inner product on g invariant under Ad of exp(h). The base metric is
// returned as is when already invariant; a one-dimensional compact h is
// handled by averaging over 64 points of one period.
Mat invariant_metric(const GroupDescriptor& G, const Mat& h, const Mat& base);

// metric on S invariant under rep restricted to span(X)
Mat invariant_metric_rep(const Representation& rep, const Mat& X,
                         const Mat& base);

struct AdaptedSplitting {
  Vec mu;
  Mat metric;
  Mat h, gmu, hmu, l, o, n, p;
  Mat omega;
  // algebra vectors whose exponentials sample H_mu in the checks
  std::vector<Vec> hmu_samples;
  std::map<std::string, double> certificate;

  Mat q() const { return hcat(o, hcat(l, n)); }
};

// rtol: rank threshold; cert_tol: bound on every certified residual
AdaptedSplitting adapted_splitting(const GroupDescriptor& G, const Mat& h,
                                   const Vec& mu, const Mat* metric = nullptr,
                                   double cert_tol = 1e-9);

// recomputes every invariant; entries are residuals (rank checks report
// 0 on success and 1 on failure)
std::map<std::string, double> certify(const GroupDescriptor& G,
                                      const AdaptedSplitting& s);

struct SigmaMap {
  Mat matrix;  // dim l x dim n, entry (i,j) = <ad*_{n_j} mu, l_i>
  double cond = 1.0;
};
SigmaMap sigma(const GroupDescriptor& G, const AdaptedSplitting& s);

struct SliceData {
  Representation rep;  // action of h on S
  Vec alpha;           // element of S*
  Mat metricS;
  Mat gz, s;  // h_mu = g_z + s
  Mat B, C;   // S = B + C
  std::map<std::string, double> certificate;
};

SliceData slice_data(const GroupDescriptor& G, const AdaptedSplitting& spl,
                     const Representation& rep, const Vec& alpha,
                     const Mat* metricS = nullptr, double cert_tol = 1e-9);

// coordinates of J_N(lambda, a, beta) on the columns of X
Vec slice_momentum(const GroupDescriptor& G, const Vec& mu,
                   const Representation& rep, const Vec& lambda, const Vec& a,
                   const Vec& beta, const Mat& X);

// Adapted basis [gz | s | p | o | l | n] of g with its dual basis. Covectors
// on a block are coordinates against that block's basis vectors.
struct AdaptedBasis {
  Mat P, D;
  std::map<std::string, std::pair<int, int>> blocks;  // name -> (offset, dim)

  AdaptedBasis() = default;
  AdaptedBasis(const std::vector<std::pair<std::string, Mat>>& parts);
  Mat block(const std::string& name) const;
  Mat dual(const std::string& name) const;
  int dim(const std::string& name) const;
  // covector on g with the given block coordinates and zero elsewhere
  Vec extend(const std::string& name, const Vec& coords) const;
  Vec restrict(const std::string& name, const Vec& covector) const;
};

AdaptedBasis adapted_basis(const AdaptedSplitting& spl, const SliceData& sd);

nlohmann::json to_json(const AdaptedSplitting& s);
nlohmann::json to_json(const SliceData& s);
AdaptedSplitting splitting_from_json(const nlohmann::json& j);
nlohmann::json mat_to_json(const Mat& M);  // list of columns
Mat mat_from_json(const nlohmann::json& j, int rows);
Vec vec_from_json(const nlohmann::json& j);
nlohmann::json vec_to_json(const Vec& v);

}  // namespace hamtube
