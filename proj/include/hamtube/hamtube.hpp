#pragma once
#include "hamtube/gtubes.hpp"

namespace hamtube {

// representative in T*G x T*S of a point of the cotangent bundle of G x_H S
struct UpPoint {
  Mat g;
  Vec nu;  // g*
  Vec a;   // S
  Vec b;   // S*
};

// model coordinates: nu_s, nu_p, lambda, a, b are block coordinates
// (s*, p*, o, B, B*)
struct ModelPoint {
  Mat g;
  Vec nu_s, nu_p, lambda, a, b;
};

struct BLResult {
  bool pass = false;
  double r_group = 0, r_nu = 0, r_slice = 0;
  double momentum = NAN;  // |J(T0(pt)) - mu| when pass
};

// Cotangent bundle of Q = G x_H S at the orbit through [e, 0] with momentum
// mu and fibre component alpha.
class CotangentModel {
 public:
  CotangentModel(const GroupDescriptor& G, const Mat& h, const Vec& mu,
                 const Representation& rep, const Vec& alpha,
                 const Mat* metric = nullptr,
                 Strategy strategy = Strategy::Auto, bool so3_closed = false);

  const GroupDescriptor& group() const { return G_; }
  const Vec& mu() const { return spl_.mu; }
  const AdaptedSplitting& splitting() const { return spl_; }
  const SliceData& slice() const { return sd_; }
  const AdaptedBasis& basis() const { return ab_; }
  const RestrictedTube& restricted() const { return rt_; }
  RestrictedTube& restricted() { return rt_; }
  const Representation& rep() const { return sd_.rep; }
  const Vec& alpha() const { return sd_.alpha; }
  int dim_S() const { return sd_.rep.m; }

  // S = B + C and its dual basis
  Vec a_to_S(const Vec& aB) const { return sd_.B * aB; }
  Vec b_to_S(const Vec& bB) const;
  Vec lambda_to_g(const Vec& lo) const { return spl_.o * lo; }

  Mat gamma_matrix(const Vec& bB) const;
  // element of C with Gamma . _s (b + alpha) = nu
  Vec gamma(const Vec& nu_s, const Vec& bB) const;

  // a in S, b in S*; alpha is not added
  UpPoint tube0(const Mat& g, const Vec& nu_p, const Vec& lo, const Vec& a,
                const Vec& b) const;
  // covector fed to the restricted tube by tube0
  Vec tube0_nu_tilde(const Vec& nu_p, const Vec& lo, const Vec& a,
                     const Vec& b) const;
  UpPoint general(const ModelPoint& x) const;
  Vec general_nu_tilde(const ModelPoint& x) const;

  // J_N on g_z, block coordinates
  Vec slice_momentum_gz(const ModelPoint& x) const;
  // Adstar(g^-1)(mu + nu + J_N)
  Vec model_momentum(const ModelPoint& x) const;
  Vec momentum(const UpPoint& y) const;
  // |nu|_h - a . _h b|
  double membership_residual(const UpPoint& y) const;
  // twisted H action on representatives, h = exp(eta), eta in h
  UpPoint h_act(const Vec& eta, const UpPoint& y) const;
  UpPoint g_act(const Mat& k, const UpPoint& y) const;

  BLResult bates_lerman(const Mat& g, const Vec& nu_p, const Vec& lo,
                        const Vec& a, const Vec& b, double tol = 1e-10) const;

  // least squares inverse of general(); residual is measured on the
  // upstairs representative modulo H
  struct Inverse {
    ModelPoint x;
    double residual = INFINITY;
    int iterations = 0;
  };
  Inverse invert(const UpPoint& y, const ModelPoint& seed,
                 double tol = 1e-11, int max_iter = 100) const;

  int model_dim() const;

 private:
  GroupDescriptor G_;
  AdaptedSplitting spl_;
  SliceData sd_;
  AdaptedBasis ab_;
  RestrictedTube rt_;
  Mat DS_;  // dual basis of [B | C]
};

// SO(3) acting on R^3, tube at (q, p) with mu = q x p != 0
class So3R3Model {
 public:
  So3R3Model(const Eigen::Vector3d& q, const Eigen::Vector3d& p,
             Strategy strategy = Strategy::Auto, bool so3_closed = false);

  const CotangentModel& model() const { return model_; }
  const Eigen::Vector3d& q() const { return q_; }
  const Eigen::Vector3d& p() const { return p_; }
  double alpha() const { return alpha_; }

  // (Q, P) stacked; nu is the p* coordinate, a and b scalars along q
  Vec direct(const Mat& g, double nu, double a, double b) const;
  Vec via_tube(const Mat& g, double nu, double a, double b) const;
  // cotangent lift of [g, a] -> g (q + a qhat) on J_H^{-1}(0)
  Vec palais(const UpPoint& y) const;

  struct Inverse {
    Mat g;
    double nu = 0, a = 0, b = 0;
    double residual = INFINITY;
    int iterations = 0;
  };
  Inverse invert(const Vec& QP, double tol = 1e-12, int max_iter = 30) const;

 private:
  Eigen::Vector3d q_, p_, qhat_, muhat_;
  double alpha_;
  CotangentModel model_;
};

}  // namespace hamtube
