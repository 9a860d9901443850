#include "hamtube/hamtube.hpp"

#include <cmath>

#include "hamtube/errors.hpp"

namespace hamtube {

CotangentModel::CotangentModel(const GroupDescriptor& G, const Mat& h,
                               const Vec& mu, const Representation& rep,
                               const Vec& alpha, const Mat* metric,
                               Strategy strategy, bool so3_closed)
    : G_(G),
      spl_(adapted_splitting(G, h, mu, metric)),
      sd_(slice_data(G, spl_, rep, alpha)),
      ab_(adapted_basis(spl_, sd_)),
      rt_(G, spl_, strategy, so3_closed) {
  Mat BC = hcat(sd_.B, sd_.C);
  DS_ = BC.cols() ? Mat(BC.inverse().transpose()) : Mat(0, 0);
}

int CotangentModel::model_dim() const {
  return G_.dim() + sd_.s.cols() + spl_.p.cols() + spl_.o.cols() +
         2 * sd_.B.cols();
}

Vec CotangentModel::b_to_S(const Vec& bB) const {
  if (bB.size() != sd_.B.cols()) throw SchemaError("b has wrong dimension");
  if (bB.size() == 0) return Vec::Zero(dim_S());
  return DS_.leftCols(sd_.B.cols()) * bB;
}

Mat CotangentModel::gamma_matrix(const Vec& bB) const {
  const Mat& s = sd_.s;
  const Mat& C = sd_.C;
  Vec w = sd_.alpha + b_to_S(bB);
  Mat M(s.cols(), C.cols());
  for (int j = 0; j < s.cols(); ++j) {
    Mat R = sd_.rep.act(s.col(j));
    for (int i = 0; i < C.cols(); ++i) M(j, i) = w.dot(R * C.col(i));
  }
  return M;
}

Vec CotangentModel::gamma(const Vec& nu_s, const Vec& bB) const {
  if (nu_s.size() != sd_.s.cols()) throw SchemaError("nu_s has wrong dimension");
  if (sd_.s.cols() == 0) return Vec::Zero(dim_S());
  Mat M = gamma_matrix(bB);
  auto sv = Eigen::JacobiSVD<Mat>(M).singularValues();
  if (!(sv(sv.size() - 1) > 1e-12 * std::max(sv(0), 1e-300)))
    throw DomainExit("Gamma: linear system is singular at this b");
  return sd_.C * M.fullPivLu().solve(nu_s);
}

Vec CotangentModel::tube0_nu_tilde(const Vec& nu_p, const Vec& lo,
                                   const Vec& a, const Vec& b) const {
  Vec lam = lambda_to_g(lo);
  const Vec& mu = spl_.mu;
  Vec out = ab_.extend("p", nu_p);
  for (const char* blk : {"gz", "s"}) {
    Mat X = ab_.block(blk);
    out += ab_.extend(blk, half_diamond_coad(G_, mu, lam, X) +
                               diamond(sd_.rep, a, b, X));
  }
  return out;
}

UpPoint CotangentModel::tube0(const Mat& g, const Vec& nu_p, const Vec& lo,
                              const Vec& a, const Vec& b) const {
  if (lo.size() != spl_.o.cols()) throw SchemaError("lambda has wrong dimension");
  Vec nt = tube0_nu_tilde(nu_p, lo, a, b);
  Vec eps = diamond(sd_.rep, a, b, spl_.l);
  RestrictedResult r = rt_.eval(g, nt, lambda_to_g(lo), eps);
  return {r.pt.g, r.pt.nu, a, b};
}

UpPoint CotangentModel::general(const ModelPoint& x) const {
  Vec aS = a_to_S(x.a), bS = b_to_S(x.b);
  Vec lam = lambda_to_g(x.lambda);
  const Mat& s = sd_.s;
  Vec eta = x.nu_s - diamond(sd_.rep, aS, bS, s) -
            half_diamond_coad(G_, spl_.mu, lam, s);
  Vec at = aS + gamma(eta, x.b);
  return tube0(x.g, x.nu_p, x.lambda, at, bS + sd_.alpha);
}

Vec CotangentModel::general_nu_tilde(const ModelPoint& x) const {
  Vec out = ab_.extend("p", x.nu_p) + ab_.extend("s", x.nu_s);
  return out + ab_.extend("gz", slice_momentum_gz(x));
}

Vec CotangentModel::slice_momentum_gz(const ModelPoint& x) const {
  return slice_momentum(G_, spl_.mu, sd_.rep, lambda_to_g(x.lambda),
                        a_to_S(x.a), b_to_S(x.b), sd_.gz);
}

Vec CotangentModel::model_momentum(const ModelPoint& x) const {
  Vec inner = spl_.mu + ab_.extend("s", x.nu_s) + ab_.extend("p", x.nu_p) +
              ab_.extend("gz", slice_momentum_gz(x));
  return G_.Adstar(x.g.inverse()) * inner;
}

Vec CotangentModel::momentum(const UpPoint& y) const {
  return G_.Adstar(y.g.inverse()) * y.nu;
}

double CotangentModel::membership_residual(const UpPoint& y) const {
  if (spl_.h.cols() == 0) return 0.0;
  return (spl_.h.transpose() * y.nu - diamond(sd_.rep, y.a, y.b, spl_.h))
      .norm();
}

UpPoint CotangentModel::h_act(const Vec& eta, const UpPoint& y) const {
  Mat hi = G_.exp(-eta);
  Mat R = sd_.rep.group_act(eta);
  Vec b = R.transpose().fullPivLu().solve(y.b);
  return {y.g * hi, G_.Adstar(hi) * y.nu, R * y.a, b};
}

UpPoint CotangentModel::g_act(const Mat& k, const UpPoint& y) const {
  return {k * y.g, y.nu, y.a, y.b};
}

BLResult CotangentModel::bates_lerman(const Mat& g, const Vec& nu_p,
                                      const Vec& lo, const Vec& a,
                                      const Vec& b, double tol) const {
  BLResult r;
  const Vec& mu = spl_.mu;
  r.r_group = (G_.Adstar(g.inverse()) * mu - mu).norm();
  r.r_nu = nu_p.norm();
  Vec lam = lambda_to_g(lo);
  r.r_slice = spl_.hmu.cols()
                  ? (half_diamond_coad(G_, mu, lam, spl_.hmu) +
                     diamond(sd_.rep, a, b, spl_.hmu))
                        .norm()
                  : 0.0;
  r.pass = r.r_group <= tol && r.r_nu <= tol && r.r_slice <= tol;
  if (r.pass) r.momentum = (momentum(tube0(g, nu_p, lo, a, b)) - mu).norm();
  return r;
}

namespace {

// flat parameter vector for the Gauss-Newton inverse: (dxi, nu_s, nu_p,
// lambda, a, b, eta)
struct Layout {
  int n, s, p, o, B, h;
  int total() const { return n + s + p + o + 2 * B + h; }
};

ModelPoint unpack(const GroupDescriptor& G, const Layout& L, const Mat& g0,
                  const Vec& u, Vec* eta) {
  ModelPoint x;
  int k = 0;
  x.g = g0 * G.exp(u.segment(k, L.n));
  k += L.n;
  x.nu_s = u.segment(k, L.s);
  k += L.s;
  x.nu_p = u.segment(k, L.p);
  k += L.p;
  x.lambda = u.segment(k, L.o);
  k += L.o;
  x.a = u.segment(k, L.B);
  k += L.B;
  x.b = u.segment(k, L.B);
  k += L.B;
  *eta = u.segment(k, L.h);
  return x;
}

}  // namespace

CotangentModel::Inverse CotangentModel::invert(const UpPoint& y,
                                               const ModelPoint& seed,
                                               double tol,
                                               int max_iter) const {
  Layout L{G_.dim(),          int(sd_.s.cols()), int(spl_.p.cols()),
           int(spl_.o.cols()), int(sd_.B.cols()), int(spl_.h.cols())};
  Mat yi = y.g.inverse();
  auto resid = [&](const Mat& g0, const Vec& u) -> Vec {
    Vec eta;
    ModelPoint x = unpack(G_, L, g0, u, &eta);
    UpPoint t = general(x);
    if (L.h) t = h_act(spl_.h * eta, t);
    Vec r(G_.dim() + t.nu.size() + t.a.size() + t.b.size());
    r << G_.vee(yi * t.g - Mat::Identity(G_.mat_dim(), G_.mat_dim())),
        t.nu - y.nu, t.a - y.a, t.b - y.b;
    return r;
  };
  Mat g0 = seed.g;
  Vec u = Vec::Zero(L.total());
  {
    int k = L.n;
    u.segment(k, L.s) = seed.nu_s;
    k += L.s;
    u.segment(k, L.p) = seed.nu_p;
    k += L.p;
    u.segment(k, L.o) = seed.lambda;
    k += L.o;
    u.segment(k, L.B) = seed.a;
    k += L.B;
    u.segment(k, L.B) = seed.b;
  }
  Inverse out;
  Vec r = resid(g0, u);
  double mu_lm = 1e-6;
  int it = 0;
  for (; it < max_iter && r.norm() > tol; ++it) {
    Mat J(r.size(), u.size());
    const double hstep = 1e-7;
    for (int j = 0; j < u.size(); ++j) {
      Vec du = Vec::Zero(u.size());
      du(j) = hstep;
      J.col(j) = (resid(g0, u + du) - resid(g0, u - du)) / (2 * hstep);
    }
    bool improved = false;
    for (int tries = 0; tries < 20; ++tries) {
      Mat A = J.transpose() * J;
      A.diagonal().array() += mu_lm * (1.0 + A.diagonal().array());
      Vec step = A.ldlt().solve(-J.transpose() * r);
      Vec ut = u + step;
      Vec rt;
      try {
        rt = resid(g0, ut);
      } catch (const DomainExit&) {
        mu_lm *= 10;
        continue;
      }
      if (rt.norm() < r.norm()) {
        u = ut;
        r = rt;
        mu_lm = std::max(mu_lm * 0.1, 1e-12);
        improved = true;
        break;
      }
      mu_lm *= 10;
    }
    if (!improved) break;
    // re-centre the group variable
    g0 = g0 * G_.exp(u.head(L.n));
    u.head(L.n).setZero();
  }
  Vec eta;
  out.x = unpack(G_, L, g0, u, &eta);
  out.residual = r.norm();
  out.iterations = it;
  if (!(out.residual < 1e-8))
    throw DomainExit("tube inversion did not converge (residual " +
                     std::to_string(out.residual) + ")");
  return out;
}

namespace {

CotangentModel make_r3_model(const Eigen::Vector3d& q,
                             const Eigen::Vector3d& p, Strategy st,
                             bool closed) {
  if (q.norm() == 0.0) throw PreconditionError("q must be nonzero");
  Eigen::Vector3d mu = q.cross(p);
  if (mu.norm() < 1e-12 * q.norm() * std::max(1.0, p.norm()))
    throw PreconditionError("mu = q x p must be nonzero");
  Mat h = Vec(q.normalized());
  Representation rep = Representation::zero(h, 1);
  Vec alpha(1);
  alpha(0) = p.dot(q.normalized());
  return CotangentModel(GroupDescriptor::so3(), h, Vec(mu), rep, alpha,
                        nullptr, st, closed);
}

}  // namespace

So3R3Model::So3R3Model(const Eigen::Vector3d& q, const Eigen::Vector3d& p,
                       Strategy strategy, bool so3_closed)
    : q_(q),
      p_(p),
      qhat_(q.normalized()),
      muhat_(q.cross(p).normalized()),
      alpha_(p.dot(q.normalized())),
      model_(make_r3_model(q, p, strategy, so3_closed)) {}

Vec So3R3Model::direct(const Mat& g, double nu, double a, double b) const {
  if (!(std::abs(a) < q_.norm()))
    throw DomainExit("so3r3: |a| must stay below |q|");
  Vec nv = model_.basis().extend("p", Vec::Constant(1, nu));
  Eigen::Vector3d w = nv + model_.mu();
  Eigen::Vector3d x = q_ + a * qhat_;
  Eigen::Vector3d Pb = w.cross(x) / x.squaredNorm() + (b + alpha_) * x.normalized();
  Vec out(6);
  out << g * x, g * Pb;
  return out;
}

Vec So3R3Model::palais(const UpPoint& y) const {
  double a = y.a(0);
  if (!(std::abs(a) < q_.norm()))
    throw DomainExit("so3r3: |a| must stay below |q|");
  Eigen::Vector3d x = q_ + a * qhat_;
  Eigen::Vector3d nv = y.nu;
  Eigen::Vector3d Pb = nv.cross(x) / x.squaredNorm() + y.b(0) * x.normalized();
  Vec out(6);
  out << y.g * x, y.g * Pb;
  return out;
}

Vec So3R3Model::via_tube(const Mat& g, double nu, double a, double b) const {
  if (!(std::abs(a) < q_.norm()))
    throw DomainExit("so3r3: |a| must stay below |q|");
  ModelPoint x{g, Vec(0), Vec::Constant(1, nu), Vec(0), Vec::Constant(1, a),
               Vec::Constant(1, b)};
  return palais(model_.general(x));
}

So3R3Model::Inverse So3R3Model::invert(const Vec& QP, double tol,
                                       int max_iter) const {
  Eigen::Vector3d Q = QP.head(3), P = QP.tail(3);
  Inverse out;
  double qn = q_.norm();
  out.a = Q.norm() - qn;
  if (!(std::abs(out.a) < qn)) throw DomainExit("so3r3: point outside |a| < |q|");
  Eigen::Vector3d w = Q.cross(P);
  if (w.norm() < 1e-14) throw DomainExit("so3r3: Q x P vanishes");
  Eigen::Vector3d Qh = Q.normalized(), wh = w.normalized();
  Eigen::Matrix3d Fs, Ft;
  Fs << qhat_, muhat_, qhat_.cross(muhat_);
  Ft << Qh, wh, Qh.cross(wh);
  Mat g = Ft * Fs.transpose();
  Eigen::Vector3d pcol = model_.basis().block("p").col(0);
  out.nu = (Eigen::Vector3d(g.transpose() * w) - Eigen::Vector3d(model_.mu()))
               .dot(pcol);
  out.b = P.dot(Qh) - alpha_;
  // Newton polish on (dxi, nu, a, b)
  GroupDescriptor G = GroupDescriptor::so3();
  auto F = [&](const Vec& u) {
    return Vec(direct(g * G.exp(u.head(3)), u(3), u(4), u(5)) - QP);
  };
  Vec u(6);
  u << 0, 0, 0, out.nu, out.a, out.b;
  Vec r = F(u);
  int it = 0;
  for (; it < max_iter && r.norm() > tol; ++it) {
    Mat J(6, 6);
    const double h = 1e-7;
    for (int j = 0; j < 6; ++j) {
      Vec du = Vec::Zero(6);
      du(j) = h;
      J.col(j) = (F(u + du) - F(u - du)) / (2 * h);
    }
    Vec ut = u + J.fullPivLu().solve(-r);
    Vec rt = F(ut);
    if (!(rt.norm() < r.norm())) break;
    u = ut;
    r = rt;
    g = g * G.exp(u.head(3));
    u.head(3).setZero();
  }
  out.g = g;
  out.nu = u(3);
  out.a = u(4);
  out.b = u(5);
  out.residual = r.norm();
  out.iterations = it;
  return out;
}

}  // namespace hamtube
