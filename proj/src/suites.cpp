#include "hamtube/suites.hpp"

#include <cmath>

#include "hamtube/errors.hpp"

namespace hamtube {

namespace {

Mat eye(int m) { return Mat::Identity(m, m); }

std::vector<std::string> names(const std::string& base, int k) {
  std::vector<std::string> v;
  for (int i = 0; i < k; ++i) v.push_back(base + std::to_string(i));
  return v;
}

void append_names(std::vector<std::string>& v, const std::string& base, int k) {
  auto w = names(base, k);
  v.insert(v.end(), w.begin(), w.end());
}

SuiteAction left_action(const GroupDescriptor& G, bool dst_has_group) {
  SuiteAction a;
  a.name = "G_left";
  a.dim = G.dim();
  a.radius = 1.0;
  auto Gc = std::make_shared<GroupDescriptor>(G);
  a.on_src = [Gc](const Vec& k, const ChartPoint& p) {
    return ChartPoint{Gc->exp(k) * p.g, p.x};
  };
  if (dst_has_group)
    a.on_dst = a.on_src;
  else
    a.on_dst = [Gc](const Vec& k, const ChartPoint& p) {
      // (Q, P) -> (k Q, k P)
      Mat K = Gc->exp(k);
      int d = p.x.size() / 2;
      Vec y(p.x.size());
      y << K * p.x.head(d), K * p.x.tail(d);
      return ChartPoint{Mat(), y};
    };
  return a;
}

}  // namespace

Mat simple_model_form(const SimpleTube& T, const ChartPoint& p) {
  const auto& G = T.group();
  const int n = G.dim(), k = T.gmu().cols(), d = T.q().cols();
  Vec nu = T.nu_from(p.x.head(k));
  Mat D = T.basis().dual("gmu");
  Mat q = T.q();
  Mat W = Mat::Zero(n + k + d, n + k + d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      W(i, j) = (nu + T.mu()).dot(G.bracket(Vec::Unit(n, i), Vec::Unit(n, j)));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < k; ++j) {
      W(i, n + j) = D(i, j);
      W(n + j, i) = -D(i, j);
    }
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      W(n + k + a, n + k + b) = -T.mu().dot(G.bracket(q.col(a), q.col(b)));
  return W;
}

Mat restricted_model_form(const RestrictedTube& T, const ChartPoint& p) {
  const auto& S = T.simple();
  const auto& G = S.group();
  const auto& spl = T.splitting();
  const int n = G.dim(), k = spl.gmu.cols(), d = spl.o.cols(), e = spl.l.cols();
  Vec nu = T.nu_from(p.x.head(k));
  Mat D = S.basis().dual("gmu");
  Mat W = Mat::Zero(n + k + d + e, n + k + d + e);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      W(i, j) = (nu + spl.mu).dot(G.bracket(Vec::Unit(n, i), Vec::Unit(n, j)));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < k; ++j) {
      W(i, n + j) = D(i, j);
      W(n + j, i) = -D(i, j);
    }
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      W(n + k + a, n + k + b) =
          -spl.mu.dot(G.bracket(spl.o.col(a), spl.o.col(b)));
  return W;
}

namespace {

struct MgsLayout {
  int n, s, p, o, B;
  int dim() const { return n + s + p + o + 2 * B; }
};

MgsLayout mgs_layout(const CotangentModel& M) {
  return {M.group().dim(), int(M.slice().s.cols()),
          int(M.splitting().p.cols()), int(M.splitting().o.cols()),
          int(M.slice().B.cols())};
}

ModelPoint mgs_point(const MgsLayout& L, const ChartPoint& p) {
  ModelPoint x;
  x.g = p.g;
  int k = 0;
  x.nu_s = p.x.segment(k, L.s);
  k += L.s;
  x.nu_p = p.x.segment(k, L.p);
  k += L.p;
  x.lambda = p.x.segment(k, L.o);
  k += L.o;
  x.a = p.x.segment(k, L.B);
  k += L.B;
  x.b = p.x.segment(k, L.B);
  return x;
}

}  // namespace

Mat mgs_model_form(const CotangentModel& M, const ChartPoint& p) {
  const auto& G = M.group();
  const auto& ab = M.basis();
  MgsLayout L = mgs_layout(M);
  const int N = L.n + L.s + L.p + L.o + 2 * L.B;
  ModelPoint x = mgs_point(L, p);
  auto JN = [&](const ModelPoint& y) {
    return ab.extend("gz", M.slice_momentum_gz(y));
  };
  Vec nu = ab.extend("s", x.nu_s) + ab.extend("p", x.nu_p);
  Vec base = nu + JN(x) + M.mu();
  // per direction: xi, nu-dot + TJ_N(v-dot), lambda-dot, a-dot, b-dot
  std::vector<Vec> xi(N), beta(N), lam(N), ad(N), bd(N);
  for (int k = 0; k < N; ++k) {
    Vec u = Vec::Unit(N, k);
    ModelPoint du = mgs_point(L, ChartPoint{Mat(), u.tail(N - L.n)});
    xi[k] = u.head(L.n);
    ModelPoint plus = x, minus = x;
    plus.lambda += du.lambda;
    plus.a += du.a;
    plus.b += du.b;
    minus.lambda -= du.lambda;
    minus.a -= du.a;
    minus.b -= du.b;
    beta[k] = ab.extend("s", du.nu_s) + ab.extend("p", du.nu_p) +
              0.5 * (JN(plus) - JN(minus));
    lam[k] = M.lambda_to_g(du.lambda);
    ad[k] = du.a;
    bd[k] = du.b;
  }
  Mat W(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      W(i, j) = beta[j].dot(xi[i]) - beta[i].dot(xi[j]) +
                base.dot(G.bracket(xi[i], xi[j])) -
                M.mu().dot(G.bracket(lam[i], lam[j])) + bd[j].dot(ad[i]) -
                bd[i].dot(ad[j]);
  return W;
}

Suite simple_suite(std::shared_ptr<SimpleTube> T, const Radii& r,
                   const Mat& hmu) {
  Suite s;
  s.name = "simple";
  s.Gsrc = std::make_shared<GroupDescriptor>(T->group());
  s.Gdst = s.Gsrc;
  const int n = s.Gsrc->dim(), k = T->gmu().cols(), d = T->q().cols();
  const int m = s.Gsrc->mat_dim();
  s.src = {s.Gsrc.get(), k + d};
  s.dst = {s.Gdst.get(), n};
  s.coord_names = names("nu", k);
  append_names(s.coord_names, "lambda", d);
  double scale = std::max(T->mu().norm(), 1.0);
  auto G = s.Gsrc;
  s.sample = [=](Rng& rng) {
    Vec x(k + d);
    x << rng.ball(k, r.nu * scale), rng.ball(d, r.lambda);
    return ChartPoint{G->exp(rng.cube(n, r.g)), x};
  };
  s.map = [=](const ChartPoint& p) {
    CotPoint c = T->eval(p.g, T->nu_from(p.x.head(k)),
                         T->lambda_from(p.x.tail(d)));
    return ChartPoint{c.g, c.nu};
  };
  s.model_form = [=](const ChartPoint& p) { return simple_model_form(*T, p); };
  s.target_form = [=](const ChartPoint& p) {
    return cotangent_form(*G, p.x, 0);
  };
  s.model_momentum = [=](const ChartPoint& p) {
    return Vec(G->Adstar(p.g.inverse()) * (T->mu() + T->nu_from(p.x.head(k))));
  };
  s.target_momentum = [=](const ChartPoint& y) {
    return Vec(G->Adstar(y.g.inverse()) * y.x);
  };
  s.actions.push_back(left_action(*G, true));
  if (hmu.cols()) {
    SuiteAction a;
    a.name = "Hmu_twist";
    a.dim = hmu.cols();
    a.radius = 2.0;
    Mat H = hmu;
    Mat q = T->q();
    auto act_src = [=](const Vec& c, const ChartPoint& p) {
      Mat h = G->exp(H * c), hi = h.inverse();
      Vec nu = G->Adstar(hi) * T->nu_from(p.x.head(k));
      Vec lam = G->Ad(h) * T->lambda_from(p.x.tail(d));
      Vec x(k + d);
      x << T->gmu().transpose() * nu, coords_in(q, lam);
      return ChartPoint{p.g * hi, x};
    };
    a.on_src = act_src;
    a.on_dst = [=](const Vec& c, const ChartPoint& y) {
      Mat h = G->exp(H * c), hi = h.inverse();
      return ChartPoint{y.g * hi, G->Adstar(hi) * y.x};
    };
    s.actions.push_back(a);
    Mat Hm = hmu;
    s.checks.push_back(
        {"hmu_momentum", [=](const ChartPoint& p, const ChartPoint& y) {
           Vec nu = T->nu_from(p.x.head(k));
           Vec lam = T->lambda_from(p.x.tail(d));
           Vec lhs = Hm.transpose() * y.x;
           Vec rhs = Hm.transpose() * (nu + T->mu()) -
                     half_diamond_coad(*G, T->mu(), lam, Hm);
           return (lhs - rhs).norm();
         }});
  }
  s.center = {eye(m), Vec::Zero(k + d)};
  s.center_image = {eye(m), T->mu()};
  s.linearization = [=]() {
    Chart src{G.get(), k + d}, dst{G.get(), n};
    ChartPoint c{eye(m), Vec::Zero(k + d)};
    MapFn f = [&](const ChartPoint& p) {
      CotPoint o = T->eval(p.g, T->nu_from(p.x.head(k)),
                           T->lambda_from(p.x.tail(d)));
      return ChartPoint{o.g, o.nu};
    };
    Mat J = fd_jacobian(src, dst, f, c, 1e-5);
    Mat Jexp = Mat::Zero(2 * n, n + k + d);
    Jexp.topLeftCorner(n, n) = eye(n);
    Jexp.block(n, n, n, k) = T->basis().dual("gmu");
    Mat q = T->q();
    for (int j = 0; j < d; ++j) {
      Jexp.col(n + k + j).head(n) = q.col(j);
      Jexp.col(n + k + j).tail(n) = G->coad(q.col(j), T->mu());
    }
    return max_abs(J - Jexp);
  };
  return s;
}

Suite restricted_suite(std::shared_ptr<RestrictedTube> T, const Radii& r) {
  Suite s;
  s.name = "restricted";
  s.Gsrc = std::make_shared<GroupDescriptor>(T->simple().group());
  s.Gdst = s.Gsrc;
  const auto& spl = T->splitting();
  const int n = s.Gsrc->dim(), k = spl.gmu.cols(), d = spl.o.cols(),
            e = spl.l.cols(), m = s.Gsrc->mat_dim();
  s.src = {s.Gsrc.get(), k + d + e};
  s.dst = {s.Gdst.get(), n};
  s.coord_names = names("nu", k);
  append_names(s.coord_names, "lambda", d);
  append_names(s.coord_names, "eps", e);
  double scale = std::max(spl.mu.norm(), 1.0);
  auto G = s.Gsrc;
  Mat o = spl.o;
  s.sample = [=](Rng& rng) {
    Vec x(k + d + e);
    x << rng.ball(k, r.nu * scale), rng.ball(d, r.lambda),
        rng.ball(e, r.eps * scale);
    return ChartPoint{G->exp(rng.cube(n, r.g)), x};
  };
  s.map = [=](const ChartPoint& p) {
    RestrictedResult c = T->eval(p.g, T->nu_from(p.x.head(k)),
                                 o * p.x.segment(k, d), p.x.tail(e));
    return ChartPoint{c.pt.g, c.pt.nu};
  };
  s.model_form = [=](const ChartPoint& p) {
    return restricted_model_form(*T, p);
  };
  s.target_form = [=](const ChartPoint& p) {
    return cotangent_form(*G, p.x, 0);
  };
  Vec mu = spl.mu;
  s.model_momentum = [=](const ChartPoint& p) {
    return Vec(G->Adstar(p.g.inverse()) * (mu + T->nu_from(p.x.head(k))));
  };
  s.target_momentum = [=](const ChartPoint& y) {
    return Vec(G->Adstar(y.g.inverse()) * y.x);
  };
  Mat l = spl.l;
  s.checks.push_back(
      {"restricted_eps", [=](const ChartPoint& p, const ChartPoint& y) {
         // J_R|_l + eps with J_R = -nu
         return (-(l.transpose() * y.x) + p.x.tail(e)).norm();
       }});
  s.actions.push_back(left_action(*G, true));
  s.center = {eye(m), Vec::Zero(k + d + e)};
  s.center_image = {eye(m), mu};
  return s;
}

Suite mgs_suite(std::shared_ptr<CotangentModel> M, const Radii& r,
                bool use_tube0, const std::string& name) {
  Suite s;
  s.name = name;
  s.Gsrc = std::make_shared<GroupDescriptor>(M->group());
  s.Gdst = s.Gsrc;
  MgsLayout L = mgs_layout(*M);
  const int n = L.n, mS = M->dim_S(), m = s.Gsrc->mat_dim();
  if (use_tube0 && M->alpha().norm() != 0.0)
    throw PreconditionError("tube0 suite needs alpha = 0");
  s.src = {s.Gsrc.get(), L.dim() - n};
  s.dst = {s.Gdst.get(), n + 2 * mS};
  s.coord_names = names("nu_s", L.s);
  append_names(s.coord_names, "nu_p", L.p);
  append_names(s.coord_names, "lambda", L.o);
  append_names(s.coord_names, "a", L.B);
  append_names(s.coord_names, "b", L.B);
  double scale = std::max(M->mu().norm(), 1.0);
  auto G = s.Gsrc;
  s.sample = [=](Rng& rng) {
    Vec x(L.dim() - n);
    x << rng.ball(L.s, r.nu * scale), rng.ball(L.p, r.nu * scale),
        rng.ball(L.o, r.lambda), rng.ball(L.B, r.a), rng.ball(L.B, r.b);
    return ChartPoint{G->exp(rng.cube(n, r.g)), x};
  };
  auto pack = [=](const UpPoint& u) {
    Vec y(n + 2 * mS);
    y << u.nu, u.a, u.b;
    return ChartPoint{u.g, y};
  };
  auto unpack = [=](const ChartPoint& y) {
    return UpPoint{y.g, y.x.head(n), y.x.segment(n, mS), y.x.tail(mS)};
  };
  if (use_tube0)
    s.map = [=](const ChartPoint& p) {
      ModelPoint x = mgs_point(L, p);
      return pack(M->tube0(x.g, x.nu_p, x.lambda, M->a_to_S(x.a),
                           M->b_to_S(x.b)));
    };
  else
    s.map = [=](const ChartPoint& p) { return pack(M->general(mgs_point(L, p))); };
  s.model_form = [=](const ChartPoint& p) { return mgs_model_form(*M, p); };
  s.target_form = [=](const ChartPoint& y) {
    return cotangent_form(*G, y.x.head(n), mS);
  };
  s.model_momentum = [=](const ChartPoint& p) {
    return M->model_momentum(mgs_point(L, p));
  };
  s.target_momentum = [=](const ChartPoint& y) {
    return M->momentum(unpack(y));
  };
  s.checks.push_back(
      {"membership", [=](const ChartPoint&, const ChartPoint& y) {
         return M->membership_residual(unpack(y));
       }});
  if (!use_tube0)
    s.checks.push_back(
        {"nu_tilde", [=](const ChartPoint& p, const ChartPoint&) {
           // the two expressions for the covector handed to the restricted
           // tube must agree
           ModelPoint x = mgs_point(L, p);
           Vec aS = M->a_to_S(x.a), bS = M->b_to_S(x.b);
           const Mat& sb = M->slice().s;
           Vec lam = M->lambda_to_g(x.lambda);
           Vec eta = x.nu_s - diamond(M->rep(), aS, bS, sb) -
                     half_diamond_coad(*G, M->mu(), lam, sb);
           Vec at = aS + M->gamma(eta, x.b);
           Vec v1 = M->tube0_nu_tilde(x.nu_p, x.lambda, at, bS + M->alpha());
           return max_abs(v1 - M->general_nu_tilde(x));
         }});
  s.actions.push_back(left_action(*G, true));
  s.center = {eye(m), Vec::Zero(L.dim() - n)};
  Vec ci(n + 2 * mS);
  ci << M->mu(), Vec::Zero(mS), M->alpha();
  s.center_image = {eye(m), ci};
  return s;
}

Suite so3r3_suite(std::shared_ptr<So3R3Model> R, const Radii& r) {
  Suite s;
  s.name = "so3r3";
  s.Gsrc = std::make_shared<GroupDescriptor>(GroupDescriptor::so3());
  s.src = {s.Gsrc.get(), 3};
  s.dst = {nullptr, 6};
  s.coord_names = {"nu", "a", "b"};
  auto G = s.Gsrc;
  const auto& M = R->model();
  double scale = std::max(M.mu().norm(), 1.0);
  double qn = R->q().norm();
  s.sample = [=](Rng& rng) {
    Vec x(3);
    x << rng.uniform(-r.nu, r.nu) * scale, rng.uniform(-r.a, r.a) * qn,
        rng.uniform(-r.b, r.b) * scale;
    return ChartPoint{G->exp(rng.cube(3, r.g)), x};
  };
  s.map = [=](const ChartPoint& p) {
    return ChartPoint{Mat(), R->via_tube(p.g, p.x(0), p.x(1), p.x(2))};
  };
  s.model_form = [=](const ChartPoint& p) {
    return mgs_model_form(R->model(), p);
  };
  s.target_form = [](const ChartPoint&) { return canonical_form(3); };
  s.model_momentum = [=](const ChartPoint& p) {
    ModelPoint x{p.g, Vec(0), p.x.segment(0, 1), Vec(0), p.x.segment(1, 1),
                 p.x.segment(2, 1)};
    return R->model().model_momentum(x);
  };
  s.target_momentum = [](const ChartPoint& y) {
    Eigen::Vector3d Q = y.x.head(3), P = y.x.tail(3);
    return Vec(Q.cross(P));
  };
  s.checks.push_back({"qxp", [=](const ChartPoint& p, const ChartPoint& y) {
                        Eigen::Vector3d Q = y.x.head(3), P = y.x.tail(3);
                        Vec nv = R->model().basis().extend("p", p.x.head(1));
                        Vec w = p.g * (nv + R->model().mu());
                        return (Vec(Q.cross(P)) - w).norm();
                      }});
  s.checks.push_back(
      {"direct_vs_tube", [=](const ChartPoint& p, const ChartPoint& y) {
         return max_abs(R->direct(p.g, p.x(0), p.x(1), p.x(2)) - y.x);
       }});
  s.checks.push_back(
      {"roundtrip", [=](const ChartPoint& p, const ChartPoint& y) {
         auto inv = R->invert(y.x);
         double d = max_abs(inv.g - p.g);
         d = std::max(d, std::abs(inv.nu - p.x(0)));
         d = std::max(d, std::abs(inv.a - p.x(1)));
         d = std::max(d, std::abs(inv.b - p.x(2)));
         return d;
       }});
  s.actions.push_back(left_action(*G, false));
  s.center = {eye(3), Vec::Zero(3)};
  Vec qp(6);
  qp << R->q(), R->p();
  s.center_image = {Mat(), qp};
  return s;
}

std::vector<CheckRecord> check_point(
    const Suite& s, const ChartPoint& p, int id, const FDConfig& cfg,
    const std::vector<std::vector<Vec>>& action_samples) {
  std::vector<CheckRecord> out;
  auto record = [&](const std::string& name, auto&& fn,
                    const std::string& note = "") {
    CheckRecord r;
    r.point = id;
    r.check = name;
    r.note = note;
    try {
      r.residual = fn();
      r.pass = r.residual < cfg.threshold(name);
    } catch (const DomainExit& e) {
      r.skipped = true;
      r.note = std::string("domain exit: ") + e.what();
    } catch (const Error& e) {
      r.residual = INFINITY;
      r.note = e.what();
    }
    out.push_back(r);
  };
  ChartPoint img;
  bool have_img = false;
  record("pullback", [&] {
    Mat J = fd_jacobian(s.src, s.dst, s.map, p, cfg.step, &img);
    have_img = true;
    Mat lhs = J.transpose() * s.target_form(img) * J;
    return max_abs(lhs - s.model_form(p));
  });
  if (!have_img) {
    try {
      img = s.map(p);
      have_img = true;
    } catch (const Error&) {
    }
  }
  if (!have_img) return out;
  record("momentum", [&] {
    return (s.target_momentum(img) - s.model_momentum(p)).norm();
  });
  for (auto& c : s.checks) record(c.name, [&] { return c.fn(p, img); });
  for (size_t a = 0; a < s.actions.size(); ++a)
    for (auto& k : action_samples[a])
      record(
          "equivariance",
          [&] {
            ChartPoint lhs = s.map(s.actions[a].on_src(k, p));
            ChartPoint rhs = s.actions[a].on_dst(k, img);
            return chart_distance(lhs, rhs);
          },
          s.actions[a].name);
  return out;
}

Report run_suite(const Suite& s, int points, std::uint64_t seed,
                 const FDConfig& cfg, bool parallel) {
  Report rep;
  rep.suite = s.name;
  rep.seed = seed;
  rep.points = points;
  Rng rng(seed);
  std::vector<ChartPoint> pts;
  for (int i = 0; i < points; ++i) pts.push_back(s.sample(rng));
  std::vector<std::vector<Vec>> ks(s.actions.size());
  for (size_t a = 0; a < s.actions.size(); ++a)
    for (int j = 0; j < 2; ++j)
      ks[a].push_back(rng.cube(s.actions[a].dim, s.actions[a].radius));

  std::vector<std::vector<CheckRecord>> buf(points);
  for_each_point(points, parallel, [&](int i) {
    buf[i] = check_point(s, pts[i], i, cfg, ks);
  });

  CheckRecord c;
  c.point = -1;
  c.check = "center";
  try {
    c.residual = chart_distance(s.map(s.center), s.center_image);
    c.pass = c.residual < cfg.threshold("center");
  } catch (const Error& e) {
    c.residual = INFINITY;
    c.note = e.what();
  }
  rep.records.push_back(c);
  if (s.linearization) {
    CheckRecord l;
    l.point = -1;
    l.check = "linearization";
    try {
      l.residual = s.linearization();
      l.pass = l.residual < cfg.threshold("linearization");
    } catch (const Error& e) {
      l.residual = INFINITY;
      l.note = e.what();
    }
    rep.records.push_back(l);
  }
  for (auto& b : buf) rep.records.insert(rep.records.end(), b.begin(), b.end());
  return rep;
}

}  // namespace hamtube
