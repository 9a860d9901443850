#pragma once
#include <string>
#include <vector>

#include "json.hpp"

#include "hamtube/linalg.hpp"

namespace hamtube {

enum class PairingKind { DualCoordinates, TraceForm };
enum class Membership { Orthogonal, Unimodular, None };

// Concrete matrix Lie group. Algebra vectors are coordinates in `basis`,
// covectors are coordinates in the dual basis, so <nu, xi> = nu.dot(xi).
class GroupDescriptor {
 public:
  GroupDescriptor(std::string name, std::vector<Mat> basis, PairingKind pk,
                  Membership mem, double member_tol = 1e-10);

  static GroupDescriptor so3();
  static GroupDescriptor sl2r();
  static GroupDescriptor from_json(const nlohmann::json& j);
  static GroupDescriptor builtin(const std::string& name);

  const std::string& name() const { return name_; }
  int dim() const { return n_; }
  int mat_dim() const { return m_; }
  const std::vector<Mat>& basis() const { return basis_; }
  PairingKind pairing() const { return pairing_; }
  double member_tol() const { return member_tol_; }
  // Gram matrix of the invariant form on g (identity for dual coordinates)
  const Mat& gram() const { return gram_; }
  // c^k_ij = structure(i)(k, j)
  const Mat& structure(int i) const { return ad_basis_[i]; }

  Mat hat(const Vec& xi) const;
  Vec vee(const Mat& X) const;

  Vec bracket(const Vec& xi, const Vec& eta) const;
  Mat ad(const Vec& xi) const;
  // <coad(xi, mu), eta> = <mu, [xi, eta]>
  Vec coad(const Vec& xi, const Vec& mu) const;
  Mat Ad(const Mat& g) const;
  // dual map of Ad(g): <Adstar(g) nu, xi> = <nu, Ad(g) xi>
  Mat Adstar(const Mat& g) const;

  Mat exp(const Vec& xi) const;
  // Rodrigues for SO(3), cosh/cos/nilpotent cases for SL(2,R)
  Mat exp_closed(const Vec& xi) const;
  bool has_exp_closed() const;

  // sum_n ad^n v / (n+1)!
  Vec dexp_right(const Vec& lambda, const Vec& v) const;
  // dexp_right(lambda, v) - v, without cancellation
  Vec dexp_right_minus_id(const Vec& lambda, const Vec& v) const;

  // ad^3 + a(xi) ad = 0 holds for every xi
  bool has_cubic_ad() const { return cubic_; }
  double cubic_coeff(const Vec& xi) const;

  double membership_residual(const Mat& g) const;
  void check_member(const Mat& g) const;

  // trace-form identification (TraceForm pairing only)
  Vec covector_from_matrix(const Mat& M) const;
  Mat covector_to_matrix(const Vec& nu) const;

  double jacobi_residual() const;

  nlohmann::json to_json() const;

 private:
  std::string name_;
  int n_ = 0, m_ = 0;
  std::vector<Mat> basis_;
  std::vector<Mat> ad_basis_;
  Mat vee_pinv_;
  Mat gram_;
  PairingKind pairing_;
  Membership membership_;
  double member_tol_;
  bool cubic_ = false;
};

// Linear action of a subalgebra on a vector space V = R^m. gens[i] is the
// action of the algebra vector alg.col(i).
struct Representation {
  Mat alg;                // n x k
  std::vector<Mat> gens;  // k matrices m x m
  int m = 0;

  static Representation zero(const Mat& alg, int m);
  Mat act(const Vec& xi) const;
  Mat group_act(const Vec& xi) const { return expm(act(xi)); }
  // worst |[rho(x_i), rho(x_j)] - rho([x_i, x_j])|
  double homomorphism_residual(const GroupDescriptor& G) const;
};

// j-th entry is <b, X_j . a>
Vec diamond(const Representation& rep, const Vec& a, const Vec& b,
            const Mat& X);

// entries 1/2 <ad*_lambda mu, [X_j, lambda]>, i.e. the o-part of the slice
// momentum restricted to span(X)
Vec half_diamond_coad(const GroupDescriptor& G, const Vec& mu,
                      const Vec& lambda, const Mat& X);

}  // namespace hamtube
