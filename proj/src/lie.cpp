#include "hamtube/lie.hpp"

#include <cmath>

#include "hamtube/errors.hpp"

namespace hamtube {

namespace {

Mat from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  Mat M(rows.size(), rows.begin()->size());
  int i = 0;
  for (auto& r : rows) {
    int j = 0;
    for (double x : r) M(i, j++) = x;
    ++i;
  }
  return M;
}

// series coefficients of (1 - cos sqrt x)/x and (sqrt x - sin sqrt x)/x^{3/2}
double coefA1(double x) {
  if (std::abs(x) < 1e-3)
    return 0.5 - x / 24.0 + x * x / 720.0 - x * x * x / 40320.0;
  if (x > 0) return (1.0 - std::cos(std::sqrt(x))) / x;
  double s = std::sqrt(-x);
  return (std::cosh(s) - 1.0) / (s * s);
}

double coefA2(double x) {
  if (std::abs(x) < 1e-3)
    return 1.0 / 6.0 - x / 120.0 + x * x / 5040.0 - x * x * x / 362880.0;
  if (x > 0) {
    double s = std::sqrt(x);
    return (s - std::sin(s)) / (x * s);
  }
  double s = std::sqrt(-x);
  return (std::sinh(s) - s) / (s * s * s);
}

}  // namespace

GroupDescriptor::GroupDescriptor(std::string name, std::vector<Mat> basis,
                                 PairingKind pk, Membership mem,
                                 double member_tol)
    : name_(std::move(name)),
      basis_(std::move(basis)),
      pairing_(pk),
      membership_(mem),
      member_tol_(member_tol) {
  n_ = static_cast<int>(basis_.size());
  if (n_ == 0) throw SchemaError("empty basis");
  m_ = basis_[0].rows();
  Mat stacked(m_ * m_, n_);
  for (int i = 0; i < n_; ++i) {
    if (basis_[i].rows() != m_ || basis_[i].cols() != m_)
      throw SchemaError("basis matrices must be square and of equal size");
    stacked.col(i) = Eigen::Map<const Vec>(basis_[i].data(), m_ * m_);
  }
  if (numerical_rank(stacked, 1e-12) != n_)
    throw SchemaError("basis matrices are linearly dependent");
  vee_pinv_ = stacked.completeOrthogonalDecomposition().pseudoInverse();

  ad_basis_.assign(n_, Mat::Zero(n_, n_));
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) {
      Mat C = basis_[i] * basis_[j] - basis_[j] * basis_[i];
      Vec c = vee(C);
      if ((hat(c) - C).norm() > 1e-10 * (1.0 + C.norm()))
        throw SchemaError("basis does not span a Lie subalgebra");
      ad_basis_[i].col(j) = c;
    }

  gram_ = Mat::Identity(n_, n_);
  if (pairing_ == PairingKind::TraceForm) {
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j)
        gram_(i, j) = -2.0 * (basis_[i] * basis_[j]).trace();
    if (std::abs(gram_.determinant()) < 1e-12)
      throw SchemaError("trace form is degenerate on the basis");
  }

  cubic_ = true;
  for (int k = 0; k < 3 && cubic_; ++k) {
    Vec xi(n_);
    for (int i = 0; i < n_; ++i) xi(i) = std::sin(1.3 * (i + 1) + 0.7 * k);
    Mat A = ad(xi);
    double a = cubic_coeff(xi);
    double scale = 1.0 + std::pow(A.norm(), 3);
    if ((A * A * A + a * A).norm() > 1e-10 * scale) cubic_ = false;
  }
}

GroupDescriptor GroupDescriptor::so3() {
  std::vector<Mat> b = {from_rows({{0, 0, 0}, {0, 0, -1}, {0, 1, 0}}),
                        from_rows({{0, 0, 1}, {0, 0, 0}, {-1, 0, 0}}),
                        from_rows({{0, -1, 0}, {1, 0, 0}, {0, 0, 0}})};
  return GroupDescriptor("so3", b, PairingKind::DualCoordinates,
                         Membership::Orthogonal);
}

GroupDescriptor GroupDescriptor::sl2r() {
  // J/2, H/2, X/2; trace-form Gram is diag(1,-1,-1)
  std::vector<Mat> b = {from_rows({{0, 0.5}, {-0.5, 0}}),
                        from_rows({{0.5, 0}, {0, -0.5}}),
                        from_rows({{0, 0.5}, {0.5, 0}})};
  return GroupDescriptor("sl2r", b, PairingKind::TraceForm,
                         Membership::Unimodular);
}

GroupDescriptor GroupDescriptor::builtin(const std::string& name) {
  if (name == "so3") return so3();
  if (name == "sl2r") return sl2r();
  throw SchemaError("unknown built-in group '" + name + "'");
}

GroupDescriptor GroupDescriptor::from_json(const nlohmann::json& j) {
  if (j.is_string()) return builtin(j.get<std::string>());
  if (!j.is_object() || !j.contains("basis"))
    throw SchemaError("group descriptor needs a 'basis' array");
  std::string name = j.value("name", "custom");
  std::vector<Mat> basis;
  for (auto& bm : j.at("basis")) {
    int r = bm.size();
    if (r == 0) throw SchemaError("empty basis matrix");
    Mat M(r, bm[0].size());
    for (int i = 0; i < r; ++i) {
      if ((int)bm[i].size() != M.cols())
        throw SchemaError("ragged basis matrix");
      for (int k = 0; k < M.cols(); ++k) M(i, k) = bm[i][k].get<double>();
    }
    basis.push_back(M);
  }
  std::string pk = j.value("pairing", "dual");
  PairingKind pairing;
  if (pk == "dual")
    pairing = PairingKind::DualCoordinates;
  else if (pk == "trace")
    pairing = PairingKind::TraceForm;
  else
    throw SchemaError("pairing must be 'dual' or 'trace'");
  std::string mm = j.value("membership", "none");
  Membership mem;
  if (mm == "orthogonal")
    mem = Membership::Orthogonal;
  else if (mm == "unimodular")
    mem = Membership::Unimodular;
  else if (mm == "none")
    mem = Membership::None;
  else
    throw SchemaError("membership must be orthogonal, unimodular or none");
  return GroupDescriptor(name, basis, pairing, mem, j.value("tolerance", 1e-10));
}

nlohmann::json GroupDescriptor::to_json() const {
  nlohmann::json j;
  j["name"] = name_;
  j["pairing"] = pairing_ == PairingKind::TraceForm ? "trace" : "dual";
  j["membership"] = membership_ == Membership::Orthogonal   ? "orthogonal"
                    : membership_ == Membership::Unimodular ? "unimodular"
                                                            : "none";
  j["tolerance"] = member_tol_;
  auto& b = j["basis"] = nlohmann::json::array();
  for (auto& M : basis_) {
    nlohmann::json rows = nlohmann::json::array();
    for (int i = 0; i < M.rows(); ++i) {
      nlohmann::json r = nlohmann::json::array();
      for (int k = 0; k < M.cols(); ++k) r.push_back(M(i, k));
      rows.push_back(r);
    }
    b.push_back(rows);
  }
  return j;
}

Mat GroupDescriptor::hat(const Vec& xi) const {
  if (xi.size() != n_) throw SchemaError("algebra vector has wrong dimension");
  Mat X = Mat::Zero(m_, m_);
  for (int i = 0; i < n_; ++i) X += xi(i) * basis_[i];
  return X;
}

Vec GroupDescriptor::vee(const Mat& X) const {
  if (X.rows() != m_ || X.cols() != m_)
    throw SchemaError("matrix has wrong size for this group");
  return vee_pinv_ * Eigen::Map<const Vec>(X.data(), m_ * m_);
}

Mat GroupDescriptor::ad(const Vec& xi) const {
  if (xi.size() != n_) throw SchemaError("algebra vector has wrong dimension");
  Mat A = Mat::Zero(n_, n_);
  for (int i = 0; i < n_; ++i) A += xi(i) * ad_basis_[i];
  return A;
}

Vec GroupDescriptor::bracket(const Vec& xi, const Vec& eta) const {
  if (eta.size() != n_) throw SchemaError("algebra vector has wrong dimension");
  return ad(xi) * eta;
}

Vec GroupDescriptor::coad(const Vec& xi, const Vec& mu) const {
  if (mu.size() != n_) throw SchemaError("covector has wrong dimension");
  return ad(xi).transpose() * mu;
}

Mat GroupDescriptor::Ad(const Mat& g) const {
  Mat gi = g.inverse();
  Mat A(n_, n_);
  for (int i = 0; i < n_; ++i) A.col(i) = vee(g * basis_[i] * gi);
  return A;
}

Mat GroupDescriptor::Adstar(const Mat& g) const { return Ad(g).transpose(); }

Mat GroupDescriptor::exp(const Vec& xi) const { return expm(hat(xi)); }

bool GroupDescriptor::has_exp_closed() const {
  return name_ == "so3" || name_ == "sl2r";
}

Mat GroupDescriptor::exp_closed(const Vec& xi) const {
  Mat X = hat(xi);
  Mat I = Mat::Identity(m_, m_);
  if (name_ == "so3") {
    double th2 = xi.squaredNorm();
    double A, B;
    if (th2 < 1e-8) {
      A = 1.0 - th2 / 6.0 + th2 * th2 / 120.0;
      B = 0.5 - th2 / 24.0 + th2 * th2 / 720.0;
    } else {
      double th = std::sqrt(th2);
      A = std::sin(th) / th;
      B = (1.0 - std::cos(th)) / th2;
    }
    return I + A * X + B * X * X;
  }
  if (name_ == "sl2r") {
    double d = -X.determinant();  // X^2 = d I
    double c, s;
    if (std::abs(d) < 1e-8) {
      c = 1.0 + d / 2.0 + d * d / 24.0;
      s = 1.0 + d / 6.0 + d * d / 120.0;
    } else if (d > 0) {
      double r = std::sqrt(d);
      c = std::cosh(r);
      s = std::sinh(r) / r;
    } else {
      double r = std::sqrt(-d);
      c = std::cos(r);
      s = std::sin(r) / r;
    }
    return c * I + s * X;
  }
  return exp(xi);
}

double GroupDescriptor::cubic_coeff(const Vec& xi) const {
  Mat A = ad(xi);
  return -0.5 * (A * A).trace();
}

Vec GroupDescriptor::dexp_right_minus_id(const Vec& lambda,
                                         const Vec& v) const {
  Mat A = ad(lambda);
  if (cubic_) {
    double a = cubic_coeff(lambda);
    Vec Av = A * v;
    return coefA1(a) * Av + coefA2(a) * (A * Av);
  }
  Vec term = v, sum = Vec::Zero(n_);
  for (int k = 1; k <= 40; ++k) {
    term = A * term / double(k + 1);
    sum += term;
    if (term.norm() <= 1e-16 * (v.norm() + sum.norm())) break;
  }
  return sum;
}

Vec GroupDescriptor::dexp_right(const Vec& lambda, const Vec& v) const {
  return v + dexp_right_minus_id(lambda, v);
}

double GroupDescriptor::membership_residual(const Mat& g) const {
  if (g.rows() != m_ || g.cols() != m_) return INFINITY;
  switch (membership_) {
    case Membership::Orthogonal:
      return (g.transpose() * g - Mat::Identity(m_, m_)).norm() +
             std::abs(g.determinant() - 1.0);
    case Membership::Unimodular:
      return std::abs(g.determinant() - 1.0);
    case Membership::None:
      return std::abs(g.determinant()) > 0 ? 0.0 : INFINITY;
  }
  return INFINITY;
}

void GroupDescriptor::check_member(const Mat& g) const {
  double r = membership_residual(g);
  if (!(r <= member_tol_ * std::max(1.0, g.squaredNorm())))
    throw PreconditionError("matrix is not in " + name_ + " (residual " +
                            std::to_string(r) + ")");
}

Vec GroupDescriptor::covector_from_matrix(const Mat& M) const {
  if (pairing_ != PairingKind::TraceForm)
    throw PreconditionError("trace-form identification needs a trace pairing");
  Vec nu(n_);
  for (int i = 0; i < n_; ++i) nu(i) = -2.0 * (M * basis_[i]).trace();
  return nu;
}

Mat GroupDescriptor::covector_to_matrix(const Vec& nu) const {
  if (pairing_ != PairingKind::TraceForm)
    throw PreconditionError("trace-form identification needs a trace pairing");
  return hat(gram_.ldlt().solve(nu));
}

double GroupDescriptor::jacobi_residual() const {
  double worst = 0.0;
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) {
      worst = std::max(worst, max_abs(ad_basis_[i].col(j) + ad_basis_[j].col(i)));
      for (int k = 0; k < n_; ++k) {
        Vec ei = Vec::Unit(n_, i), ej = Vec::Unit(n_, j), ek = Vec::Unit(n_, k);
        Vec r = bracket(ei, bracket(ej, ek)) + bracket(ej, bracket(ek, ei)) +
                bracket(ek, bracket(ei, ej));
        worst = std::max(worst, max_abs(r));
      }
    }
  return worst;
}

Representation Representation::zero(const Mat& alg, int m) {
  Representation r;
  r.alg = alg;
  r.m = m;
  r.gens.assign(alg.cols(), Mat::Zero(m, m));
  return r;
}

Mat Representation::act(const Vec& xi) const {
  Mat R = Mat::Zero(m, m);
  if (alg.cols() == 0) return R;
  Vec c = coords_in(alg, xi);
  for (int i = 0; i < c.size(); ++i) R += c(i) * gens[i];
  return R;
}

double Representation::homomorphism_residual(const GroupDescriptor& G) const {
  double worst = 0.0;
  for (int i = 0; i < alg.cols(); ++i)
    for (int j = 0; j < alg.cols(); ++j) {
      Vec br = G.bracket(alg.col(i), alg.col(j));
      worst = std::max(worst, outside_span(alg, br) * br.norm());
      Mat lhs = gens[i] * gens[j] - gens[j] * gens[i];
      worst = std::max(worst, max_abs(lhs - act(br)));
    }
  return worst;
}

Vec diamond(const Representation& rep, const Vec& a, const Vec& b,
            const Mat& X) {
  if (a.size() != rep.m || b.size() != rep.m)
    throw SchemaError("diamond: vector dimension does not match representation");
  Vec out(X.cols());
  for (int j = 0; j < X.cols(); ++j) out(j) = b.dot(rep.act(X.col(j)) * a);
  return out;
}

Vec half_diamond_coad(const GroupDescriptor& G, const Vec& mu,
                      const Vec& lambda, const Mat& X) {
  Vec c = G.coad(lambda, mu);
  Vec out(X.cols());
  for (int j = 0; j < X.cols(); ++j)
    out(j) = 0.5 * c.dot(G.bracket(X.col(j), lambda));
  return out;
}

}  // namespace hamtube
