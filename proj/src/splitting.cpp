#include "hamtube/splitting.hpp"

#include <cmath>
#include <complex>
#include <numbers>

#include "hamtube/errors.hpp"

namespace hamtube {

namespace {

// unit columns, sign fixed so the largest entry is positive
Mat canon(const Mat& M) {
  Mat R = M;
  for (int j = 0; j < R.cols(); ++j) {
    R.col(j).normalize();
    int k;
    R.col(j).cwiseAbs().maxCoeff(&k);
    if (R(k, j) < 0) R.col(j) *= -1.0;
  }
  return R;
}

double smallest_rel_sv(const Mat& A, double scale) {
  if (A.rows() == 0 || A.cols() == 0) return INFINITY;
  auto sv = Eigen::JacobiSVD<Mat>(A).singularValues();
  return sv(sv.size() - 1) / std::max(scale, 1e-300);
}


// invariant quadratic form for the one-parameter groups exp(t A_i)
Mat invariant_form(const std::vector<Mat>& gens, const Mat& base) {
  bool inv = true;
  for (auto& A : gens)
    if (max_abs(A.transpose() * base + base * A) >
        1e-12 * (1.0 + A.norm()) * base.norm())
      inv = false;
  if (inv) return base;
  if (gens.size() != 1)
    throw PreconditionError(
        "no invariant metric supplied and averaging is only implemented for "
        "one-dimensional groups");
  const Mat& A = gens[0];
  Eigen::EigenSolver<Mat> es(A);
  double w0 = 0.0, scale = A.norm();
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    auto ev = es.eigenvalues()(i);
    if (std::abs(ev.real()) > 1e-9 * (1.0 + scale))
      throw PreconditionError("group is not compact; cannot average a metric");
    double w = std::abs(ev.imag());
    if (w > 1e-9 * (1.0 + scale) && (w0 == 0.0 || w < w0)) w0 = w;
  }
  if (w0 == 0.0) return base;
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    double r = std::abs(es.eigenvalues()(i).imag()) / w0;
    if (std::abs(r - std::round(r)) > 1e-8)
      throw PreconditionError("incommensurate frequencies; cannot average");
  }
  const int N = 64;
  double T = 2.0 * std::numbers::pi / w0;
  Mat acc = Mat::Zero(base.rows(), base.cols());
  for (int k = 0; k < N; ++k) {
    Mat E = expm((T * k / N) * A);
    acc += E.transpose() * base * E;
  }
  acc /= double(N);
  return 0.5 * (acc + acc.transpose());
}

}  // namespace

Mat omega_form(const GroupDescriptor& G, const Vec& mu) {
  int n = G.dim();
  Mat W(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      W(i, j) = -mu.dot(G.bracket(Vec::Unit(n, i), Vec::Unit(n, j)));
  return W;
}

Mat isotropy_algebra(const GroupDescriptor& G, const Vec& mu, double rtol) {
  int n = G.dim();
  Mat C(n, n);
  for (int i = 0; i < n; ++i) C.col(i) = G.coad(Vec::Unit(n, i), mu);
  return canon(null_space(C, rtol, true));
}

Mat invariant_metric(const GroupDescriptor& G, const Mat& h, const Mat& base) {
  std::vector<Mat> gens;
  for (int i = 0; i < h.cols(); ++i) gens.push_back(G.ad(h.col(i)));
  return invariant_form(gens, base);
}

Mat invariant_metric_rep(const Representation& rep, const Mat& X,
                         const Mat& base) {
  std::vector<Mat> gens;
  for (int i = 0; i < X.cols(); ++i) gens.push_back(rep.act(X.col(i)));
  return invariant_form(gens, base);
}

std::map<std::string, double> certify(const GroupDescriptor& G,
                                      const AdaptedSplitting& s) {
  std::map<std::string, double> c;
  const int n = G.dim();
  const Mat& W = s.omega;
  double wn = std::max(W.norm(), 1e-300);
  Mat all = hcat(hcat(s.gmu, s.o), hcat(s.l, s.n));
  c["direct_sum"] = (all.cols() == n && numerical_rank(all) == n) ? 0.0 : 1.0;
  c["h_equals_hmu_plus_l"] =
      s.h.cols() == 0 ? double(s.hmu.cols() + s.l.cols())
                      : subspace_angle(hcat(s.hmu, s.l), s.h);
  c["gmu_is_kernel"] = std::max(
      max_abs(W * s.gmu),
      (W.norm() == 0.0 ? s.gmu.cols() == n
                       : numerical_rank(W) == n - s.gmu.cols())
          ? 0.0
          : 1.0);
  c["o_nondegenerate"] =
      s.o.cols() == 0 ? 0.0
                      : (smallest_rel_sv(s.o.transpose() * W * s.o, wn) > 1e-8
                             ? 0.0
                             : 1.0);
  c["l_isotropic"] = max_abs(s.l.transpose() * W * s.l);
  c["n_isotropic"] = max_abs(s.n.transpose() * W * s.n);
  c["ln_nondegenerate"] =
      (s.l.cols() != s.n.cols())
          ? 1.0
          : (s.l.cols() == 0 ||
                     smallest_rel_sv(s.l.transpose() * W * s.n, wn) > 1e-8
                 ? 0.0
                 : 1.0);
  c["o_perp_l_plus_n"] = max_abs(s.o.transpose() * W * hcat(s.l, s.n));
  c["p_complements_hmu"] =
      (numerical_rank(hcat(s.hmu, s.p)) == s.gmu.cols() &&
       s.hmu.cols() + s.p.cols() == s.gmu.cols())
          ? 0.0
          : 1.0;
  double inv = 0.0;
  for (auto& xi : s.hmu_samples) {
    Mat A = G.Ad(G.exp(xi));
    for (const Mat* X : {&s.gmu, &s.o, &s.l, &s.n, &s.p, &s.hmu})
      for (int j = 0; j < X->cols(); ++j)
        inv = std::max(inv, outside_span(*X, A * X->col(j)));
  }
  c["hmu_invariance"] = inv;
  double minv = 0.0;
  for (int i = 0; i < s.h.cols(); ++i)
    for (double t : {0.37, 1.9}) {
      Mat A = G.Ad(G.exp(t * s.h.col(i)));
      minv = std::max(minv, max_abs(A.transpose() * s.metric * A - s.metric) /
                                s.metric.norm());
    }
  c["metric_invariance"] = minv;
  return c;
}

AdaptedSplitting adapted_splitting(const GroupDescriptor& G, const Mat& h,
                                   const Vec& mu, const Mat* metric,
                                   double cert_tol) {
  const int n = G.dim();
  if (mu.size() != n) throw SchemaError("mu has wrong dimension");
  if (h.rows() != n) throw SchemaError("h basis has wrong dimension");
  AdaptedSplitting s;
  s.mu = mu;
  s.h = canon(orth(h));
  for (int i = 0; i < s.h.cols(); ++i)
    for (int j = 0; j < s.h.cols(); ++j) {
      Vec br = G.bracket(s.h.col(i), s.h.col(j));
      if (outside_span(s.h, br) * br.norm() > 1e-10)
        throw PreconditionError("h is not a subalgebra");
      if (std::abs(mu.dot(br)) > 1e-10 * (1.0 + mu.norm()))
        throw PreconditionError("[h,h] does not annihilate mu");
    }
  Mat base = metric ? *metric : Mat::Identity(n, n);
  s.metric = invariant_metric(G, s.h, base);
  const Mat& M = s.metric;
  s.omega = omega_form(G, mu);
  const Mat& W = s.omega;

  s.gmu = isotropy_algebra(G, mu);
  s.hmu = canon(intersect(s.h, s.gmu));
  s.l = canon(metric_complement(s.hmu, s.h, M));
  Mat Wp = metric_complement(hcat(s.gmu, s.l), Mat::Identity(n, n), M);
  // o = {x in W' : Omega(x, l) = 0}
  s.o = s.l.cols() ? canon(Wp * null_space(s.l.transpose() * W * Wp))
                   : canon(Wp);
  // V = o^Omega inside l + W'
  Mat U = hcat(s.l, Wp);
  Mat V = s.o.cols() ? Mat(U * null_space(s.o.transpose() * W * U)) : U;
  s.n = Mat(n, 0);
  if (s.l.cols()) {
    // compatible complex structure of Omega on V for the metric, applied to l
    Mat GV = V.transpose() * M * V;
    Mat OV = V.transpose() * W * V;
    Eigen::LLT<Mat> llt(GV);
    Mat R = llt.matrixU();
    Mat Rinv = R.inverse();
    Mat S = Rinv.transpose() * OV * Rinv;
    S = 0.5 * (S - S.transpose());
    Eigen::SelfAdjointEigenSolver<Mat> es(-S * S);
    Vec ev = es.eigenvalues();
    if (ev.minCoeff() <= 1e-14 * std::max(1.0, ev.maxCoeff()))
      throw CertificationError("Omega is degenerate on o^Omega");
    Mat isq = es.eigenvectors() * ev.cwiseSqrt().cwiseInverse().asDiagonal() *
              es.eigenvectors().transpose();
    Mat Jy = S * isq;
    Mat Jx = Rinv * Jy * R;
    Mat cl = V.completeOrthogonalDecomposition().solve(s.l);
    s.n = V * Jx * cl;
    for (int j = 0; j < s.n.cols(); ++j) s.n.col(j).normalize();
  }
  s.p = canon(metric_complement(s.hmu, s.gmu, M));

  for (int i = 0; i < s.hmu.cols(); ++i) {
    s.hmu_samples.push_back(0.7 * s.hmu.col(i));
    s.hmu_samples.push_back(2.3 * s.hmu.col(i));
  }
  if (s.hmu.cols() > 1) s.hmu_samples.push_back(1.1 * s.hmu.rowwise().sum());

  s.certificate = certify(G, s);
  for (auto& [k, v] : s.certificate)
    if (!(v < cert_tol))
      throw CertificationError("adapted splitting failed '" + k +
                               "' (residual " + std::to_string(v) + ")");
  return s;
}

SigmaMap sigma(const GroupDescriptor& G, const AdaptedSplitting& s) {
  SigmaMap m;
  m.matrix = Mat(s.l.cols(), s.n.cols());
  for (int j = 0; j < s.n.cols(); ++j) {
    Vec c = G.coad(s.n.col(j), s.mu);
    for (int i = 0; i < s.l.cols(); ++i) m.matrix(i, j) = c.dot(s.l.col(i));
  }
  if (m.matrix.size() == 0) return m;
  auto sv = Eigen::JacobiSVD<Mat>(m.matrix).singularValues();
  double smin = sv(sv.size() - 1);
  if (m.matrix.rows() != m.matrix.cols() || !(smin > 1e-8 * sv(0)))
    throw CertificationError("sigma is singular; splitting is faulty");
  m.cond = sv(0) / smin;
  return m;
}

SliceData slice_data(const GroupDescriptor& G, const AdaptedSplitting& spl,
                     const Representation& rep, const Vec& alpha,
                     const Mat* metricS, double cert_tol) {
  SliceData d;
  d.rep = rep;
  d.alpha = alpha;
  const int m = rep.m;
  if (alpha.size() != m) throw SchemaError("alpha has wrong dimension");
  if (rep.alg.cols() && subspace_angle(rep.alg, spl.h) > 1e-9)
    throw SchemaError("representation must be given on a basis of h");
  Mat base = metricS ? *metricS : Mat::Identity(m, m);
  d.metricS = invariant_metric_rep(rep, spl.hmu, base);

  // h_mu . alpha = -rho(xi)^T alpha
  const int k = spl.hmu.cols();
  Mat Wa(m, k);
  for (int i = 0; i < k; ++i)
    Wa.col(i) = -rep.act(spl.hmu.col(i)).transpose() * alpha;
  d.gz = k ? canon(spl.hmu * null_space(Wa)) : Mat(G.dim(), 0);
  d.s = canon(metric_complement(d.gz, spl.hmu, spl.metric));
  d.B = canon(m ? null_space(Wa.transpose()) : Mat(0, 0));
  if (k == 0) d.B = Mat::Identity(m, m);
  d.C = canon(metric_complement(d.B, Mat::Identity(m, m), d.metricS));

  auto& c = d.certificate;
  c["dim_C_equals_dim_s"] = d.C.cols() == d.s.cols() ? 0.0 : 1.0;
  c["S_is_B_plus_C"] =
      (m == 0 || numerical_rank(hcat(d.B, d.C)) == m) ? 0.0 : 1.0;
  c["B_annihilates"] = max_abs(Wa.transpose() * d.B);
  double inv = 0.0;
  for (int i = 0; i < d.gz.cols(); ++i)
    for (double t : {0.7, 2.3}) {
      Mat E = rep.group_act(t * d.gz.col(i));
      for (int j = 0; j < d.C.cols(); ++j)
        inv = std::max(inv, outside_span(d.C, E * d.C.col(j)));
    }
  c["C_gz_invariance"] = inv;
  c["representation"] = rep.homomorphism_residual(G);
  for (auto& [key, v] : c)
    if (!(v < cert_tol))
      throw CertificationError("slice data failed '" + key + "' (residual " +
                               std::to_string(v) + ")");
  return d;
}

Vec slice_momentum(const GroupDescriptor& G, const Vec& mu,
                   const Representation& rep, const Vec& lambda, const Vec& a,
                   const Vec& beta, const Mat& X) {
  return half_diamond_coad(G, mu, lambda, X) + diamond(rep, a, beta, X);
}

AdaptedBasis::AdaptedBasis(
    const std::vector<std::pair<std::string, Mat>>& parts) {
  int n = parts.empty() ? 0 : parts[0].second.rows();
  int total = 0;
  for (auto& [name, M] : parts) total += M.cols();
  P = Mat(n, total);
  int off = 0;
  for (auto& [name, M] : parts) {
    if (M.cols()) P.middleCols(off, M.cols()) = M;
    blocks[name] = {off, int(M.cols())};
    off += M.cols();
  }
  if (total != n || numerical_rank(P) != n)
    throw CertificationError("adapted basis is not a basis");
  D = P.inverse().transpose();
}

Mat AdaptedBasis::block(const std::string& name) const {
  auto [o, d] = blocks.at(name);
  return P.middleCols(o, d);
}
Mat AdaptedBasis::dual(const std::string& name) const {
  auto [o, d] = blocks.at(name);
  return D.middleCols(o, d);
}
int AdaptedBasis::dim(const std::string& name) const {
  return blocks.at(name).second;
}
Vec AdaptedBasis::extend(const std::string& name, const Vec& coords) const {
  if (coords.size() != dim(name))
    throw SchemaError("block '" + name + "' expects " +
                      std::to_string(dim(name)) + " coordinates");
  if (coords.size() == 0) return Vec::Zero(P.rows());
  return dual(name) * coords;
}
Vec AdaptedBasis::restrict(const std::string& name, const Vec& cov) const {
  return block(name).transpose() * cov;
}

AdaptedBasis adapted_basis(const AdaptedSplitting& spl, const SliceData& sd) {
  return AdaptedBasis({{"gz", sd.gz},
                       {"s", sd.s},
                       {"p", spl.p},
                       {"o", spl.o},
                       {"l", spl.l},
                       {"n", spl.n}});
}

nlohmann::json vec_to_json(const Vec& v) {
  nlohmann::json a = nlohmann::json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Vec vec_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw SchemaError("expected a numeric array");
  Vec v(j.size());
  for (size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw SchemaError("expected a numeric array");
    v(i) = j[i].get<double>();
  }
  return v;
}

nlohmann::json mat_to_json(const Mat& M) {
  nlohmann::json a = nlohmann::json::array();
  for (int j = 0; j < M.cols(); ++j) a.push_back(vec_to_json(M.col(j)));
  return a;
}

Mat mat_from_json(const nlohmann::json& j, int rows) {
  if (!j.is_array()) throw SchemaError("expected a list of columns");
  Mat M(rows, j.size());
  for (size_t c = 0; c < j.size(); ++c) {
    Vec v = vec_from_json(j[c]);
    if (v.size() != rows) throw SchemaError("column has wrong length");
    M.col(c) = v;
  }
  return M;
}

nlohmann::json to_json(const AdaptedSplitting& s) {
  nlohmann::json j;
  j["mu"] = vec_to_json(s.mu);
  j["metric"] = mat_to_json(s.metric);
  j["h"] = mat_to_json(s.h);
  j["g_mu"] = mat_to_json(s.gmu);
  j["h_mu"] = mat_to_json(s.hmu);
  j["o"] = mat_to_json(s.o);
  j["l"] = mat_to_json(s.l);
  j["n"] = mat_to_json(s.n);
  j["p"] = mat_to_json(s.p);
  j["omega"] = mat_to_json(s.omega);
  j["certificate"] = s.certificate;
  return j;
}

nlohmann::json to_json(const SliceData& s) {
  nlohmann::json j;
  j["alpha"] = vec_to_json(s.alpha);
  j["g_z"] = mat_to_json(s.gz);
  j["s"] = mat_to_json(s.s);
  j["B"] = mat_to_json(s.B);
  j["C"] = mat_to_json(s.C);
  j["certificate"] = s.certificate;
  return j;
}

AdaptedSplitting splitting_from_json(const nlohmann::json& j) {
  AdaptedSplitting s;
  try {
    s.mu = vec_from_json(j.at("mu"));
    int n = s.mu.size();
    s.metric = mat_from_json(j.at("metric"), n);
    s.h = mat_from_json(j.at("h"), n);
    s.gmu = mat_from_json(j.at("g_mu"), n);
    s.hmu = mat_from_json(j.at("h_mu"), n);
    s.o = mat_from_json(j.at("o"), n);
    s.l = mat_from_json(j.at("l"), n);
    s.n = mat_from_json(j.at("n"), n);
    s.p = mat_from_json(j.at("p"), n);
    s.omega = mat_from_json(j.at("omega"), n);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("splitting file: ") + e.what());
  }
  for (int i = 0; i < s.hmu.cols(); ++i) {
    s.hmu_samples.push_back(0.7 * s.hmu.col(i));
    s.hmu_samples.push_back(2.3 * s.hmu.col(i));
  }
  return s;
}

}  // namespace hamtube
