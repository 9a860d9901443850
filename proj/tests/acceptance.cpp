// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "hamtube/errors.hpp"
#include "hamtube/json_io.hpp"
#include "hamtube/special.hpp"

using namespace hamtube;

namespace tol {
constexpr double E_identity = 1e-12, E_zero = 1e-14;
constexpr double F_zero = 1e-10, F_one = 1e-14, F_minus_one = 1e-12;
constexpr double pullback = 1e-6, negative_control = 1e-3;
constexpr double closed_vs_generic = 1e-9;
constexpr double restricted_eps = 1e-10, restricted_paths = 1e-9;
constexpr double linearization = 1e-7;
constexpr double momentum = 1e-9;
constexpr double center = 1e-12, qxp = 1e-10, roundtrip = 1e-8;
constexpr double gamma = 1e-11, gamma_example = 1e-12;
constexpr double bl_momentum = 1e-9, bl_invert = 1e-8;
constexpr double certify = 1e-9, span_angle = 1e-10;
}  // namespace tol

namespace {

int failures = 0;

void report(int id, const std::string& title, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %2d: %s (%s)\n", pass ? "PASS" : "FAIL", id,
              title.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", x);
  return buf;
}

FDConfig fd;

struct SuiteStats {
  double max = 0;
  int evaluated = 0, skipped = 0, failed = 0;
};

SuiteStats stats(const Report& r, const std::string& check, double bound) {
  SuiteStats s;
  for (auto& rec : r.records) {
    if (rec.check != check) continue;
    if (rec.skipped) {
      ++s.skipped;
      continue;
    }
    ++s.evaluated;
    s.max = std::max(s.max, rec.residual);
    if (!(rec.residual < bound)) ++s.failed;
  }
  return s;
}

// every evaluated point below bound, none skipped, `want` points evaluated
bool all_below(const SuiteStats& s, double bound, int want) {
  return s.evaluated == want && s.skipped == 0 && s.max < bound;
}

std::string describe(const std::string& what, const SuiteStats& s) {
  std::string d = what + " max " + sci(s.max) + " over " + std::to_string(s.evaluated);
  if (s.skipped) d += ", " + std::to_string(s.skipped) + " domain exits";
  return d;
}

// ---------------------------------------------------------------------------

void criterion1() {
  double worst = 0;
  bool increasing = true;
  double prev = -INFINITY;
  const int n = 1000;
  for (int i = 0; i < n; ++i) {
    double x = -10.0 + 20.0 * i / (n - 1);
    double e = eval_E(x);
    worst = std::max(worst, E_identity_residual(x, e));
    if (!(e > prev)) increasing = false;
    prev = e;
  }
  double e0 = std::abs(eval_E(0.0) - 1.0);
  report(1, "E identity, E(0) = 1, monotone",
         worst < tol::E_identity && e0 < tol::E_zero && increasing,
         "identity max " + sci(worst) + ", |E(0)-1| " + sci(e0) +
             (increasing ? ", increasing" : ", NOT increasing"));
}

void criterion2() {
  double r0 = std::abs(eval_F(1e-12) - 1.0);
  double r0m = std::abs(eval_F(-1e-12) - 1.0);
  double r1 = std::abs(eval_F(1.0) - M_PI / 2);
  double rm = std::abs(eval_F(-1.0) - std::log(1.0 + std::sqrt(2.0)));
  report(2, "F anchors",
         std::max(r0, r0m) < tol::F_zero && r1 < tol::F_one && rm < tol::F_minus_one,
         "|F(0+)-1| " + sci(std::max(r0, r0m)) + ", |F(1)-pi/2| " + sci(r1) +
             ", |F(-1)-ln(1+sqrt2)| " + sci(rm));
}

std::vector<std::pair<std::string, std::shared_ptr<SimpleTube>>> closed_tubes() {
  Mat k(2, 2);
  k << 1.3, 0.4, -0.2, 0.7;
  return {
      {"SO(3)", std::make_shared<SimpleTube>(SimpleTube::so3(
                    (Vec(3) << 0.2, -0.1, 1.0).finished(), Strategy::So3Closed))},
      {"SL2 elliptic", std::make_shared<SimpleTube>(SimpleTube::sl2(
                           (Vec(3) << 1.0, 0.2, -0.3).finished(), Strategy::FPath))},
      {"SL2 hyperbolic", std::make_shared<SimpleTube>(SimpleTube::sl2(
                             (Vec(3) << 0.2, 1.0, 0.4).finished(), Strategy::FPath))},
      {"SL2 nilpotent", std::make_shared<SimpleTube>(
                            SimpleTube::sl2_nilpotent(k, 1.0, Strategy::EPath))},
  };
}

void criterion3() {
  bool ok = true;
  std::string detail;
  for (auto& [name, T] : closed_tubes()) {
    Suite s = simple_suite(T, Radii{});
    Report r = run_suite(s, 100, 3, fd);
    SuiteStats st = stats(r, "pullback", tol::pullback);
    ok = ok && all_below(st, tol::pullback, 100);
    detail += name + " " + sci(st.max) + (st.skipped ? "(exits)" : "") + "; ";
  }
  auto bad = std::make_shared<SimpleTube>(SimpleTube::so3((Vec(3) << 0, 0, 1).finished(),
                                                          Strategy::So3Closed));
  bad->perturbation = 1.01;
  Report r = run_suite(simple_suite(bad, Radii{}), 100, 3, fd);
  SuiteStats st = stats(r, "pullback", tol::pullback);
  bool neg = st.evaluated == 100 && st.max > tol::negative_control;
  ok = ok && neg;
  detail += "perturbed control " + sci(st.max);
  report(3, "simple tube symplectomorphism", ok, detail);
}

void criterion4() {
  bool ok = true;
  std::string detail;
  for (auto& [name, T] : closed_tubes()) {
    SimpleTube generic(T->group(), T->mu(), T->gmu(), T->q(), Strategy::Generic);
    Suite s = simple_suite(T, Radii{});
    Rng rng(4);
    int done = 0, exits = 0;
    double worst = 0;
    const int k = T->gmu().cols();
    while (done < 200 && exits < 200) {
      ChartPoint p = s.sample(rng);
      Vec nu = T->nu_from(p.x.head(k)), lam = T->lambda_from(p.x.tail(p.x.size() - k));
      try {
        CotPoint a = T->eval(p.g, nu, lam);
        CotPoint b = generic.eval(p.g, nu, lam);
        worst = std::max({worst, (a.g - b.g).cwiseAbs().maxCoeff(),
                          (a.nu - b.nu).cwiseAbs().maxCoeff()});
        ++done;
      } catch (const DomainExit&) {
        ++exits;
      }
    }
    ok = ok && done == 200 && worst < tol::closed_vs_generic;
    detail += name + " " + sci(worst) + "/" + std::to_string(done) + "; ";
  }
  report(4, "generic solve_m1 path vs closed forms", ok, detail);
}

void criterion5() {
  json cfg = merged_config("restricted", json::object());
  cfg["closed_form"] = false;
  auto newton = restricted_from_config(cfg);
  cfg["closed_form"] = true;
  auto closed = restricted_from_config(cfg);
  Suite s = restricted_suite(newton, Radii{});
  Report r = run_suite(s, 100, 5, fd);
  SuiteStats eps = stats(r, "restricted_eps", tol::restricted_eps);
  SuiteStats pb = stats(r, "pullback", tol::pullback);

  Rng rng(55);
  const auto& spl = newton->splitting();
  const int k = spl.gmu.cols(), d = spl.o.cols(), e = spl.l.cols();
  double worst = 0;
  int done = 0;
  for (int i = 0; i < 100; ++i) {
    ChartPoint p = s.sample(rng);
    Vec nu = newton->nu_from(p.x.head(k));
    Vec lam = spl.o * p.x.segment(k, d);
    Vec ep = p.x.tail(e);
    try {
      auto a = newton->eval(p.g, nu, lam, ep);
      auto b = closed->eval(p.g, nu, lam, ep);
      worst = std::max({worst, (a.pt.g - b.pt.g).cwiseAbs().maxCoeff(),
                        (a.pt.nu - b.pt.nu).cwiseAbs().maxCoeff()});
      ++done;
    } catch (const DomainExit&) {
    }
  }
  bool ok = all_below(eps, tol::restricted_eps, 100) &&
            all_below(pb, tol::pullback, 100) && done == 100 &&
            worst < tol::restricted_paths;
  report(5, "restricted tube", ok,
         describe("|J_R|_l + eps|", eps) + "; " + describe("pullback", pb) +
             "; Newton vs closed " + sci(worst) + " over " + std::to_string(done));
}

void criterion6() {
  bool ok = true;
  std::string detail;
  auto tubes = closed_tubes();
  std::vector<std::pair<std::string, std::shared_ptr<SimpleTube>>> all = tubes;
  for (auto& [name, T] : tubes)
    all.push_back({name + " generic",
                   std::make_shared<SimpleTube>(T->group(), T->mu(), T->gmu(), T->q(),
                                                Strategy::Generic)});
  all.push_back({"SO(3) mu=0 shift", std::make_shared<SimpleTube>(SimpleTube::so3(
                                         Vec::Zero(3), Strategy::Shift))});
  for (auto& [name, T] : all) {
    double r = simple_suite(T, Radii{}).linearization();
    ok = ok && r < tol::linearization;
    detail += name + " " + sci(r) + "; ";
  }
  report(6, "tube linearization at the center", ok, detail);
}

void criterion7() {
  bool ok = true;
  std::string detail;
  auto run = [&](const std::string& label, const Suite& s, const std::string& check) {
    Report r = run_suite(s, 100, 7, fd);
    SuiteStats st = stats(r, check, tol::momentum);
    ok = ok && all_below(st, tol::momentum, 100);
    detail += label + " " + sci(st.max) + (st.skipped ? "(exits)" : "") + "; ";
  };
  json c64 = merged_config("so3r3", json::object());
  auto R = so3r3_from_config(c64);
  auto M64 = std::make_shared<CotangentModel>(R->model());
  run("T*R3 model (general)", mgs_suite(M64, Radii{}, false, "general"), "momentum");
  run("T*R3 (Q x P)", so3r3_suite(R, Radii{}), "momentum");
  auto rot3 = model_from_config(merged_config("general", json::object()));
  run("G = G_mu synthetic", mgs_suite(rot3, Radii{}, false, "general"), "momentum");
  json par = merged_config("tube0", json{{"xi_h", {0, 0, 1}}});
  run("T0, h parallel to mu", mgs_suite(model_from_config(par), Radii{}, true, "tube0"),
      "momentum");
  json cs = merged_config("simple", json{{"xi_h", {0, 0, 1}}});
  auto Ts = simple_from_config(cs);
  run("identity on h_mu, SO(3)",
      simple_suite(Ts, Radii{}, simple_hmu_from_config(*Ts, cs)), "hmu_momentum");
  json csl = merged_config("simple", json{{"group", "sl2r"}, {"mu", {1, 0, 0}},
                                          {"xi_h", {1, 0, 0}}});
  auto Tsl = simple_from_config(csl);
  run("identity on h_mu, SL2",
      simple_suite(Tsl, Radii{}, simple_hmu_from_config(*Tsl, csl)), "hmu_momentum");
  report(7, "momentum normal form", ok, detail);
}

void criterion8() {
  auto R = so3r3_from_config(merged_config("so3r3", json::object()));
  Suite s = so3r3_suite(R, Radii{});
  Report r = run_suite(s, 100, 8, fd);
  double c = chart_distance(s.map(s.center), s.center_image);
  SuiteStats pb = stats(r, "pullback", tol::pullback);
  SuiteStats qp = stats(r, "qxp", tol::qxp);
  SuiteStats rt = stats(r, "roundtrip", tol::roundtrip);
  bool ok = c < tol::center && all_below(pb, tol::pullback, 100) &&
            all_below(qp, tol::qxp, 100) && all_below(rt, tol::roundtrip, 100);
  report(8, "SO(3) on T*R3 tube", ok,
         "center " + sci(c) + "; " + describe("pullback", pb) + "; " +
             describe("QxP", qp) + "; " + describe("round trip", rt));
}

void criterion9() {
  auto M = model_from_config(merged_config("general", json::object()));
  const auto& sd = M->slice();
  const Mat& sb = sd.s;
  Rng rng(9);
  double worst = 0, worst_c = 0;
  Mat Cp = sd.C * (sd.C.transpose() * sd.C).inverse() * sd.C.transpose();
  for (int i = 0; i < 100; ++i) {
    Vec nu = rng.ball(sb.cols(), 0.3);
    Vec bB = rng.ball(sd.B.cols(), 0.3);
    Vec g = M->gamma(nu, bB);
    Vec res = diamond(sd.rep, g, M->b_to_S(bB) + M->alpha(), sb) - nu;
    worst = std::max(worst, res.norm());
    worst_c = std::max(worst_c, (g - Cp * g).norm());
  }
  double n1 = 0.17, n2 = -0.23;
  Vec full(3);
  full << n1, n2, 0.0;
  Vec ex = M->gamma(sb.transpose() * full, Vec::Zero(sd.B.cols()));
  Vec want(3);
  want << -n2, n1, 0.0;
  double rex = (ex - want).cwiseAbs().maxCoeff();
  bool ok = worst < tol::gamma && worst_c < tol::gamma && rex < tol::gamma_example;
  report(9, "Gamma contract", ok,
         "diamond residual " + sci(worst) + ", C-membership " + sci(worst_c) +
             ", 2x2 example " + sci(rex));
}

void criterion10() {
  bool ok = true;
  std::string detail;
  Rng rng(10);

  // predicate-passing points of the T*R3 model: g in G_mu, nu = 0
  auto R = so3r3_from_config(merged_config("so3r3", json::object()));
  const CotangentModel& M = R->model();
  Vec muhat = M.mu().normalized();
  double worst = 0;
  int passed = 0;
  for (int i = 0; i < 100; ++i) {
    Mat g = GroupDescriptor::so3().exp(muhat * rng.uniform(-M_PI, M_PI));
    Vec a = Vec::Constant(1, rng.uniform(-0.3, 0.3));
    Vec b = Vec::Constant(1, rng.uniform(-0.3, 0.3));
    BLResult r = M.bates_lerman(g, Vec::Zero(1), Vec(0), a, b);
    if (r.pass) {
      ++passed;
      worst = std::max(worst, r.momentum);
    }
  }
  ok = ok && passed == 100 && worst < tol::bl_momentum;
  detail += "T*R3 " + std::to_string(passed) + " pass, J-mu " + sci(worst) + "; ";

  // nontrivial slice condition: h = span mu acting on R^2 by rotation
  auto P = model_from_config(merged_config("tube0", json{{"xi_h", {0, 0, 1}}}));
  const auto& sp = P->splitting();
  Mat rho = P->rep().act(sp.hmu.col(0));
  worst = 0;
  passed = 0;
  for (int i = 0; i < 100; ++i) {
    Mat g = GroupDescriptor::so3().exp(sp.hmu.col(0) * rng.uniform(-M_PI, M_PI));
    Vec lo = rng.ball(sp.o.cols(), 0.3);
    Vec a = rng.ball(2, 0.3), b = rng.ball(2, 0.3);
    Vec ra = rho * a;
    double c = half_diamond_coad(P->group(), P->mu(), P->lambda_to_g(lo), sp.hmu)(0) +
               b.dot(ra);
    b -= c / ra.squaredNorm() * ra;
    BLResult r = P->bates_lerman(g, Vec::Zero(sp.p.cols()), lo, a, b);
    if (r.pass) {
      ++passed;
      worst = std::max(worst, r.momentum);
    }
  }
  ok = ok && passed == 100 && worst < tol::bl_momentum;
  detail += "h || mu " + std::to_string(passed) + " pass, J-mu " + sci(worst) + "; ";

  // points with J = mu near (q, p) invert onto predicate-passing points
  Eigen::Vector3d q = R->q(), mu = M.mu();
  Eigen::Vector3d u = q.normalized(), v = mu.normalized().cross(u);
  double worst_inv = 0;
  passed = 0;
  int inverted = 0;
  for (int i = 0; i < 100; ++i) {
    Eigen::Vector3d Q = q + rng.uniform(-0.2, 0.2) * u + rng.uniform(-0.2, 0.2) * v;
    double t = R->alpha() + rng.uniform(-0.2, 0.2);
    Eigen::Vector3d Pv = mu.cross(Q) / Q.squaredNorm() + t * Q.normalized();
    Vec QP(6);
    QP << Q, Pv;
    try {
      auto inv = R->invert(QP);
      ++inverted;
      Vec back = R->via_tube(inv.g, inv.nu, inv.a, inv.b);
      worst_inv = std::max(worst_inv, (back - QP).cwiseAbs().maxCoeff());
      BLResult r = M.bates_lerman(inv.g, Vec::Constant(1, inv.nu), Vec(0),
                                  Vec::Constant(1, inv.a), Vec::Constant(1, inv.b),
                                  tol::bl_invert);
      if (r.pass) ++passed;
    } catch (const DomainExit&) {
    }
  }
  ok = ok && inverted == 100 && passed == 100 && worst_inv < tol::bl_invert;
  detail += "J = mu samples: " + std::to_string(inverted) + " inverted, " +
            std::to_string(passed) + " pass predicate, round trip " + sci(worst_inv);
  report(10, "Bates-Lerman predicate", ok, detail);
}

void criterion11() {
  bool ok = true;
  std::string detail;
  auto cert_max = [](const AdaptedSplitting& s) {
    double m = 0;
    for (auto& [k, v] : s.certificate) m = std::max(m, v);
    return m;
  };
  GroupDescriptor so3 = GroupDescriptor::so3();
  Vec mu(3), xh(3);
  mu << 0, 0, 1;
  xh << 1, 0, 0;
  AdaptedSplitting s = adapted_splitting(so3, Mat(xh), mu);
  double cm = cert_max(s);
  Vec nx = Eigen::Vector3d(xh).cross(Eigen::Vector3d(mu));
  double ang = std::max({subspace_angle(s.l, Mat(xh)), subspace_angle(s.n, Mat(nx)),
                         subspace_angle(s.p, Mat(mu)), subspace_angle(s.gmu, Mat(mu))});
  bool dims = s.o.cols() == 0 && s.hmu.cols() == 0;
  ok = ok && cm < tol::certify && ang < tol::span_angle && dims;
  detail += "SO(3) cert " + sci(cm) + ", span angle " + sci(ang) + "; ";

  GroupDescriptor sl2 = GroupDescriptor::sl2r();
  Rng rng(11);
  Vec m1 = rng.cube(3, 1.0);
  AdaptedSplitting a = adapted_splitting(sl2, Mat(3, 0), m1);
  double ca = cert_max(a);
  ok = ok && ca < tol::certify && a.o.cols() == 2;
  detail += "SL2 h=0 cert " + sci(ca) + "; ";

  Mat k = sl2.exp(rng.cube(3, 0.5));
  Vec circle = sl2.Ad(k) * Vec::Unit(3, 0);
  Vec m2 = rng.cube(3, 1.0);
  AdaptedSplitting b = adapted_splitting(sl2, Mat(circle), m2);
  double cb = cert_max(b);
  ok = ok && cb < tol::certify;
  detail += "SL2 conjugated circle cert " + sci(cb);
  report(11, "splitting certification", ok, detail);
}

}  // namespace

int main() {
  struct Entry {
    int id;
    void (*fn)();
  };
  const Entry all[] = {{1, criterion1}, {2, criterion2},  {3, criterion3},
                       {4, criterion4}, {5, criterion5},  {6, criterion6},
                       {7, criterion7}, {8, criterion8},  {9, criterion9},
                       {10, criterion10}, {11, criterion11}};
  for (auto& e : all) {
    try {
      e.fn();
    } catch (const std::exception& ex) {
      report(e.id, "raised", false, ex.what());
    }
  }
  std::printf("%s: %d failing criteria\n", failures ? "FAILED" : "OK", failures);
  return failures ? 1 : 0;
}
