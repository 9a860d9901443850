#include "hamtube/gtubes.hpp"

#include <cmath>

#include "hamtube/errors.hpp"

namespace hamtube {

Vec momentum_JL(const GroupDescriptor& G, const CotPoint& pt) {
  return G.Adstar(pt.g.inverse()) * pt.nu;
}

Vec momentum_JR(const CotPoint& pt) { return -pt.nu; }

CotPoint left_act(const Mat& h, const CotPoint& pt) {
  return {h * pt.g, pt.nu};
}

CotPoint right_act(const GroupDescriptor& G, const Mat& h, const CotPoint& pt) {
  Mat hi = h.inverse();
  return {pt.g * hi, G.Adstar(hi) * pt.nu};
}

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::Auto: return "auto";
    case Strategy::Shift: return "shift";
    case Strategy::So3Closed: return "so3";
    case Strategy::FPath: return "F";
    case Strategy::EPath: return "E";
    case Strategy::Generic: return "generic";
  }
  return "?";
}

Strategy strategy_from_string(const std::string& s) {
  for (auto st : {Strategy::Auto, Strategy::Shift, Strategy::So3Closed,
                  Strategy::FPath, Strategy::EPath, Strategy::Generic})
    if (to_string(st) == s) return st;
  throw SchemaError("unknown strategy '" + s + "'");
}

SimpleTube::SimpleTube(const GroupDescriptor& G, const Vec& mu, const Mat& gmu,
                       const Mat& q, Strategy s)
    : G_(G), mu_(mu), q_(q), basis_({{"gmu", gmu}, {"q", q}}) {
  const double mn = mu.norm();
  if (s == Strategy::Auto) {
    if (mn < 1e-14 || q.cols() == 0)
      s = Strategy::Shift;
    else if (G.name() == "so3" && q.cols() == 2 &&
             (q.transpose() * mu).norm() < 1e-12 * mn)
      s = Strategy::So3Closed;
    else if (q.cols() == 2 && f_conditions_hold())
      s = Strategy::FPath;
    else if (q.cols() == 2 && q_is_subalgebra())
      s = Strategy::EPath;
    else if (q.cols() == 2)
      s = Strategy::Generic;
    else
      throw PreconditionError(
          "simple tube: only dim q = 2 (or the shift) is constructive");
  }
  if (s == Strategy::Shift && q.cols() != 0 && mn >= 1e-14)
    throw PreconditionError("shift tube needs mu = 0 or q = 0");
  if (s != Strategy::Shift && q.cols() != 2)
    throw PreconditionError("simple tube: strategy needs dim q = 2");
  if (s == Strategy::So3Closed && G.name() != "so3")
    throw PreconditionError("SO(3) closed form on a different group");
  if (s == Strategy::FPath && !f_conditions_hold())
    throw PreconditionError("F closed form: its bracket conditions fail");
  if (s == Strategy::EPath && !q_is_subalgebra())
    throw PreconditionError("E closed form: q is not a subalgebra");
  strategy_ = s;
}

SimpleTube SimpleTube::so3(const Vec& mu, Strategy s) {
  GroupDescriptor G = GroupDescriptor::so3();
  if (mu.norm() < 1e-14)
    return SimpleTube(G, mu, Mat::Identity(3, 3), Mat(3, 0), s);
  Mat gmu = isotropy_algebra(G, mu);
  Mat q = null_space(mu.transpose());
  return SimpleTube(G, mu, gmu, q, s);
}

SimpleTube SimpleTube::sl2(const Vec& mu, Strategy s) {
  GroupDescriptor G = GroupDescriptor::sl2r();
  if (mu.norm() < 1e-14)
    return SimpleTube(G, mu, Mat::Identity(3, 3), Mat(3, 0), s);
  double nn = mu.dot(G.gram().ldlt().solve(mu));
  if (std::abs(nn) > 1e-10 * mu.squaredNorm()) {
    Mat gmu = isotropy_algebra(G, mu);
    Mat q = null_space(mu.transpose());
    return SimpleTube(G, mu, gmu, q, s);
  }
  Mat N = G.covector_to_matrix(mu);
  Eigen::Vector2d v = N.col(0).norm() > N.col(1).norm() ? N.col(0) : N.col(1);
  v.normalize();
  Eigen::Vector2d u(-v(1), v(0));
  // traceless matrices preserving span(u)
  Mat cons(1, 3);
  for (int i = 0; i < 3; ++i) {
    Eigen::Vector2d w = G.basis()[i] * u;
    cons(0, i) = v.dot(w);
  }
  Mat q = null_space(cons.topRows(1));
  return SimpleTube(G, mu, isotropy_algebra(G, mu), q, s);
}

SimpleTube SimpleTube::sl2_nilpotent(const Mat& k, double c, Strategy s) {
  GroupDescriptor G = GroupDescriptor::sl2r();
  Mat X(2, 2), H(2, 2), Y(2, 2);
  X << 0, 1, 0, 0;
  H << 1, 0, 0, -1;
  Y << 0, 0, 1, 0;
  Mat ki = k.inverse();
  Vec mu = G.covector_from_matrix(c * k * X * ki);
  Mat q(3, 2);
  q.col(0) = G.vee(k * H * ki);
  q.col(1) = G.vee(k * Y * ki);
  return SimpleTube(G, mu, isotropy_algebra(G, mu), q, s);
}

double SimpleTube::ratio_b(const Vec& nu) const {
  Vec br = G_.bracket(q_.col(0), q_.col(1));
  double den = mu_.dot(br);
  if (std::abs(den) < 1e-14 * mu_.norm() * br.norm())
    throw PreconditionError("Omega^mu vanishes on q");
  return (nu + mu_).dot(br) / den;
}

bool SimpleTube::f_conditions_hold() const {
  if (!G_.has_cubic_ad() || q_.cols() != 2) return false;
  Mat W = hcat(mu_, basis_.dual("gmu"));
  double scale = 0.0;
  double worst = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) {
        Vec a = q_.col(i), b = q_.col(j), c = q_.col(k);
        Vec v = G_.bracket(a, G_.bracket(b, c)) + G_.bracket(b, G_.bracket(a, c));
        scale = std::max(scale, v.norm());
        worst = std::max(worst, max_abs(W.transpose() * v));
      }
  return worst <= 1e-11 * (1.0 + scale) * (1.0 + W.norm());
}

bool SimpleTube::q_is_subalgebra() const {
  if (q_.cols() == 0) return true;
  for (int i = 0; i < q_.cols(); ++i)
    for (int j = i + 1; j < q_.cols(); ++j) {
      Vec br = G_.bracket(q_.col(i), q_.col(j));
      if (outside_span(q_, br) * br.norm() > 1e-11) return false;
    }
  return true;
}

double SimpleTube::scaling_generic(const Vec& nu, const Vec& lambda) const {
  return solve_m1(G_, mu_, q_, nu, lambda);
}

double SimpleTube::scaling(const Vec& nu, const Vec& lambda) const {
  switch (strategy_) {
    case Strategy::Shift:
      return 1.0;
    case Strategy::So3Closed: {
      double mn = mu_.norm();
      double b = 1.0 + nu.dot(mu_) / (mn * mn);
      if (!(b > 0)) throw DomainExit("SO(3) tube: (mu+nu).mu <= 0");
      double ln = lambda.norm();
      double x = ln / (2.0 * std::sqrt(b));
      if (!(x < 1.0)) throw DomainExit("SO(3) tube: arcsin argument >= 1");
      if (ln < 1e-8) return (1.0 + x * x / 6.0) / std::sqrt(b);
      return 2.0 * std::asin(x) / ln;
    }
    case Strategy::FPath: {
      double b = ratio_b(nu);
      if (!(b > 0)) throw DomainExit("F tube: ratio (mu+nu)/mu <= 0");
      double x = G_.cubic_coeff(lambda) / (4.0 * b);
      if (!(x < 1.0)) throw DomainExit("F tube: argument >= 1");
      return eval_F(x) / std::sqrt(b);
    }
    case Strategy::EPath: {
      Mat A = G_.ad(lambda);
      Mat Aq = q_.completeOrthogonalDecomposition().solve(A * q_);
      return eval_E(-Aq.trace());
    }
    case Strategy::Generic:
    case Strategy::Auto:
      return scaling_generic(nu, lambda);
  }
  return 1.0;
}

Mat SimpleTube::E(const Vec& nu, const Vec& lambda) const {
  if (strategy_ == Strategy::Shift) return Mat::Identity(G_.mat_dim(), G_.mat_dim());
  Vec x = perturbation * scaling(nu, lambda) * lambda;
  if (strategy_ == Strategy::Generic) return G_.exp(x);
  return G_.has_exp_closed() ? G_.exp_closed(x) : G_.exp(x);
}

CotPoint SimpleTube::eval(const Mat& g, const Vec& nu, const Vec& lambda) const {
  Mat E = this->E(nu, lambda);
  return {g * E, G_.Adstar(E) * (nu + mu_)};
}

RestrictedTube::RestrictedTube(const GroupDescriptor& G,
                               const AdaptedSplitting& spl, Strategy simple,
                               bool so3_closed, NewtonConfig cfg)
    : G_(G),
      spl_(spl),
      simple_(G, spl.mu, spl.gmu, spl.q(), simple),
      sigma_(sigma(G, spl)),
      so3_closed_(so3_closed),
      cfg_(cfg) {
  if (so3_closed_ && (G.name() != "so3" || spl.o.cols() != 0 ||
                      spl.l.cols() != 1 || spl.mu.norm() == 0.0))
    throw PreconditionError(
        "SO(3) restricted closed form needs mu != 0, o = 0 and dim l = 1");
}

Vec RestrictedTube::nu_from(const Vec& c) const { return simple_.nu_from(c); }

RestrictedResult RestrictedTube::eval(const Mat& g, const Vec& nu,
                                      const Vec& lambda, const Vec& eps) const {
  if (eps.size() != spl_.l.cols())
    throw SchemaError("eps must have dim l coordinates");
  if (so3_closed_) return eval_so3(g, nu, eps);
  return eval_newton(g, nu, lambda, eps);
}

RestrictedResult RestrictedTube::eval_so3(const Mat& g, const Vec& nu,
                                          const Vec& eps) const {
  const Vec& mu = spl_.mu;
  Eigen::Vector3d xh = spl_.l.col(0).normalized();
  Eigen::Vector3d m3 = mu;
  Eigen::Vector3d nhat = xh.cross(m3).normalized();
  double e = eps(0) * spl_.l.col(0).norm();
  double den = (nu + mu).dot(mu);
  if (!(den > 0)) throw DomainExit("restricted SO(3) tube: (nu+mu).mu <= 0");
  double s = e * mu.norm() / den;
  if (!(std::abs(s) < 1.0))
    throw DomainExit("restricted SO(3) tube: arcsin argument out of range");
  double r = std::asin(s);
  Vec rn = r * Vec(nhat);
  Mat E = G_.exp_closed(rn);
  RestrictedResult out;
  out.pt = {g * E, E.transpose() * (nu + mu)};
  // zeta in n with m1(zeta) zeta = r nhat for the SO(3) simple tube
  double b = den / mu.squaredNorm();
  out.zeta = Vec(nhat) * (2.0 * std::sqrt(b) * std::sin(0.5 * r));
  double rs = std::abs(spl_.l.col(0).dot(out.pt.nu) - eps(0));
  out.residual = rs;
  return out;
}

RestrictedResult RestrictedTube::eval_newton(const Mat& g, const Vec& nu,
                                             const Vec& lambda,
                                             const Vec& eps) const {
  const Mat& L = spl_.l;
  const Mat& Nb = spl_.n;
  const int k = Nb.cols();
  RestrictedResult out;
  auto F = [&](const Vec& z) -> Vec {
    Vec zeta = k ? Vec(Nb * z) : Vec::Zero(G_.dim());
    CotPoint p = simple_.eval(Mat::Identity(G_.mat_dim(), G_.mat_dim()), nu,
                              lambda + zeta);
    return L.transpose() * p.nu - eps;
  };
  Vec z = Vec::Zero(k);
  if (k == 0) {
    out.pt = simple_.eval(g, nu, lambda);
    out.zeta = Vec::Zero(G_.dim());
    out.residual = 0.0;
    return out;
  }
  double scale = 1.0 + spl_.mu.norm();
  Vec r = F(z);
  Mat J = sigma_.matrix;
  double rn = r.norm();
  int it = 0;
  for (; it < cfg_.max_iter && rn > cfg_.target * scale; ++it) {
    if (it > 0) {
      // refresh the Jacobian by central differences
      for (int j = 0; j < k; ++j) {
        Vec dz = Vec::Zero(k);
        dz(j) = cfg_.fd_step;
        J.col(j) = (F(z + dz) - F(z - dz)) / (2.0 * cfg_.fd_step);
      }
    }
    Vec step = J.fullPivLu().solve(-r);
    double sn = (Nb * step).norm();
    if (sn > cfg_.trust) step *= cfg_.trust / sn;
    double t = 1.0;
    bool accepted = false;
    for (int bt = 0; bt < 30; ++bt) {
      Vec zt = z + t * step;
      Vec rt;
      try {
        rt = F(zt);
      } catch (const DomainExit&) {
        t *= 0.5;
        continue;
      }
      if (rt.norm() < rn || rt.norm() <= cfg_.target * scale) {
        z = zt;
        r = rt;
        rn = rt.norm();
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;
  }
  if (!(rn < cfg_.tol))
    throw DomainExit("restricted tube: Newton for zeta did not converge (|r| = " +
                     std::to_string(rn) + ")");
  out.zeta = Nb * z;
  out.pt = simple_.eval(g, nu, lambda + out.zeta);
  out.iterations = it;
  out.residual = rn;
  return out;
}

}  // namespace hamtube
