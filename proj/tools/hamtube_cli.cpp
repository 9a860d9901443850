#include <omp.h>

#include <CLI11.hpp>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "hamtube/errors.hpp"
#include "hamtube/json_io.hpp"
#include "hamtube/special.hpp"

using namespace hamtube;

namespace {

constexpr int kExitSchema = 2, kExitDomain = 3, kExitVerify = 4;

json read_opt(const std::string& path) {
  return path.empty() ? json::object() : load_json(path);
}

void emit(const json& j) { std::cout << j.dump(2) << "\n"; }

std::string suite_of_kind(const std::string& kind) {
  if (kind == "simple" || kind == "restricted" || kind == "tube0" ||
      kind == "general" || kind == "so3r3")
    return kind;
  throw SchemaError("unknown kind '" + kind + "'");
}

ChartPoint point_from_json(const Suite& s, const json& j) {
  ChartPoint p = s.center;
  if (j.is_null() || j.empty()) return p;
  try {
    if (j.contains("g")) p.g = rows_from_json(j["g"]);
    if (j.contains("x")) p.x = vec_from_json(j["x"]);
  } catch (const json::exception& e) {
    throw SchemaError(std::string("point: ") + e.what());
  }
  if (p.x.size() != s.center.x.size())
    throw SchemaError("point.x: expected " + std::to_string(s.center.x.size()) +
                      " coordinates");
  if (s.src.G && (p.g.rows() != s.center.g.rows() || p.g.cols() != s.center.g.cols()))
    throw SchemaError("point.g has the wrong shape");
  if (s.src.G) s.src.G->check_member(p.g);
  return p;
}

json names_json(const Suite& s) {
  json j = json::array();
  for (auto& n : s.coord_names) j.push_back(n);
  return j;
}

double F_identity_residual(double x, double F) {
  if (x > 0) return std::abs(std::sin(std::sqrt(x) * F) - std::sqrt(x));
  if (x < 0) return std::abs(std::sinh(std::sqrt(-x) * F) - std::sqrt(-x));
  return std::abs(F - 1.0);
}

std::vector<double> grid_values(const json& v) {
  std::vector<double> out;
  if (v.is_array()) {
    for (auto& x : v) out.push_back(x.get<double>());
  } else {
    double a = v.at("from").get<double>(), b = v.at("to").get<double>();
    int n = v.at("steps").get<int>();
    if (n < 1) throw SchemaError("grid steps must be >= 1");
    for (int i = 0; i < n; ++i)
      out.push_back(n == 1 ? a : a + (b - a) * i / double(n - 1));
  }
  return out;
}

std::string fmt(double x) {
  std::ostringstream o;
  o << std::setprecision(17) << x;
  return o.str();
}

}  // namespace

int main(int argc, char** argv) {
  if (const char* t = std::getenv("HAMTUBE_THREADS")) {
    int n = std::atoi(t);
    if (n > 0) omp_set_num_threads(n);
  }

  CLI::App app{"Hamiltonian tubes for cotangent-lifted actions"};
  app.require_subcommand(1);

  auto* sf = app.add_subcommand("specialfn", "special functions");
  sf->require_subcommand(1);
  auto* sf_eval = sf->add_subcommand("eval", "evaluate E or F at x");
  std::string fname;
  double fx = 0;
  sf_eval->add_option("function", fname)->required()->check(CLI::IsMember({"E", "F"}));
  sf_eval->add_option("x", fx)->required();

  auto* tube = app.add_subcommand("tube", "tube evaluation and verification");
  tube->require_subcommand(1);
  std::string kind = "simple", group, model_path, point_path, suite = "simple",
              out_path, grid_path;
  std::uint64_t seed = 1;
  int points = 100;
  bool serial = false;

  auto* t_eval = tube->add_subcommand("eval", "evaluate a tube at a point");
  t_eval->add_option("--kind", kind, "simple|restricted|tube0|general|so3r3");
  t_eval->add_option("--group", group, "so3|sl2r");
  t_eval->add_option("--model", model_path, "model config JSON");
  t_eval->add_option("--point", point_path, "point JSON {g, x}; default center");

  auto* t_inv = tube->add_subcommand("invert", "invert a tube");
  t_inv->add_option("--kind", kind, "so3r3|general|tube0");
  t_inv->add_option("--model", model_path);
  t_inv->add_option("--point", point_path, "target JSON {g, x}")->required();

  auto* t_ver = tube->add_subcommand("verify", "run a verification suite");
  t_ver->add_option("--suite", suite)->check(
      CLI::IsMember({"simple", "restricted", "tube0", "general", "so3r3"}));
  t_ver->add_option("--model", model_path);
  t_ver->add_option("--seed", seed);
  t_ver->add_option("--points", points)->check(CLI::NonNegativeNumber);
  t_ver->add_option("--out", out_path, "report file; stdout when absent");
  t_ver->add_flag("--serial", serial, "disable OpenMP over points");

  auto* t_sw = tube->add_subcommand("sweep", "residuals over a grid, CSV");
  t_sw->add_option("--suite", suite)->check(
      CLI::IsMember({"simple", "restricted", "tube0", "general", "so3r3"}));
  t_sw->add_option("--model", model_path);
  t_sw->add_option("--grid", grid_path, "grid JSON")->required();
  t_sw->add_option("--seed", seed);

  auto* t_bl = tube->add_subcommand("blcheck", "Bates-Lerman predicate");
  t_bl->add_option("--kind", kind, "tube0|general|so3r3");
  t_bl->add_option("--model", model_path);
  t_bl->add_option("--point", point_path, "JSON {g, nu_p, lambda, a, b}");

  auto* sp = app.add_subcommand("splitting", "adapted splittings");
  sp->require_subcommand(1);
  auto* sp_c = sp->add_subcommand("compute", "compute and certify");
  sp_c->add_option("--model", model_path)->required();
  sp_c->add_option("--out", out_path);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kExitSchema;
  }

  try {
    if (*sf_eval) {
      json j;
      j["function"] = fname;
      j["x"] = fx;
      if (fname == "E") {
        double v = eval_E(fx);
        j["value"] = v;
        j["residual"] = E_identity_residual(fx, v);
      } else {
        double v = eval_F(fx);
        j["value"] = v;
        j["residual"] = F_identity_residual(fx, v);
      }
      emit(j);
      return 0;
    }

    if (*t_eval || *t_inv || *t_bl) {
      std::string s = suite_of_kind(kind == "simple" && (*t_inv || *t_bl) ? "so3r3" : kind);
      json user = read_opt(model_path);
      if (!group.empty()) {
        user["group"] = group;
        if (group == "sl2r" && !user.contains("mu") && !user.contains("mu_matrix") &&
            !user.contains("nilpotent"))
          user["mu"] = {1, 0, 0};
      }
      json cfg = merged_config(s, user);
      Suite su = suite_from_config(s, cfg);
      json pt = point_path.empty() ? json() : load_json(point_path);

      if (*t_eval) {
        ChartPoint p = point_from_json(su, pt);
        ChartPoint y = su.map(p);
        json j;
        j["kind"] = s;
        j["coords"] = names_json(su);
        j["input"] = report_point(p);
        j["output"] = report_point(y);
        j["momentum_residual"] =
            (su.target_momentum(y) - su.model_momentum(p)).norm();
        emit(j);
        return 0;
      }

      if (*t_inv) {
        json j;
        j["kind"] = s;
        if (s == "so3r3") {
          auto R = so3r3_from_config(cfg);
          Vec QP = vec_from_json(pt.at("x"));
          if (QP.size() != 6) throw SchemaError("so3r3 target x must be (Q, P)");
          auto inv = R->invert(QP);
          Vec x(3);
          x << inv.nu, inv.a, inv.b;
          j["coords"] = names_json(su);
          j["point"] = report_point({inv.g, x});
          j["residual"] = inv.residual;
          j["iterations"] = inv.iterations;
        } else if (s == "tube0" || s == "general") {
          auto M = model_from_config(cfg);
          ChartPoint y{rows_from_json(pt.at("g")), vec_from_json(pt.at("x"))};
          int n = M->group().dim(), m = M->dim_S();
          if (y.x.size() != n + 2 * m) throw SchemaError("target x must be (nu, a, b)");
          UpPoint up{y.g, y.x.head(n), y.x.segment(n, m), y.x.tail(m)};
          ModelPoint seed0{Mat::Identity(y.g.rows(), y.g.cols()),
                           Vec::Zero(M->slice().s.cols()),
                           Vec::Zero(M->splitting().p.cols()),
                           Vec::Zero(M->splitting().o.cols()),
                           Vec::Zero(M->slice().B.cols()),
                           Vec::Zero(M->slice().B.cols())};
          seed0.g = y.g;
          auto inv = M->invert(up, seed0);
          Vec x(inv.x.nu_s.size() + inv.x.nu_p.size() + inv.x.lambda.size() +
                2 * inv.x.a.size());
          x << inv.x.nu_s, inv.x.nu_p, inv.x.lambda, inv.x.a, inv.x.b;
          j["coords"] = names_json(su);
          j["point"] = report_point({inv.x.g, x});
          j["residual"] = inv.residual;
          j["iterations"] = inv.iterations;
        } else {
          throw SchemaError("invert supports so3r3, tube0 and general");
        }
        emit(j);
        return 0;
      }

      // blcheck
      if (s != "so3r3" && s != "tube0" && s != "general")
        throw SchemaError("blcheck supports so3r3, tube0 and general");
      std::shared_ptr<So3R3Model> R;
      std::shared_ptr<CotangentModel> Mp;
      if (s == "so3r3") R = so3r3_from_config(cfg);
      else Mp = model_from_config(cfg);
      const CotangentModel& M = R ? R->model() : *Mp;
      int m = M.dim_S();
      auto get = [&](const char* k, int n) {
        if (!pt.is_object() || !pt.contains(k)) return Vec(Vec::Zero(n));
        Vec v = vec_from_json(pt[k]);
        if (v.size() != n)
          throw SchemaError(std::string("point.") + k + " has the wrong size");
        return v;
      };
      Mat g = pt.is_object() && pt.contains("g")
                  ? rows_from_json(pt["g"])
                  : Mat(Mat::Identity(M.group().mat_dim(), M.group().mat_dim()));
      BLResult r = M.bates_lerman(g, get("nu_p", M.splitting().p.cols()),
                                  get("lambda", M.splitting().o.cols()),
                                  get("a", m), get("b", m));
      json j;
      j["pass"] = r.pass;
      j["r_group"] = r.r_group;
      j["r_nu"] = r.r_nu;
      j["r_slice"] = r.r_slice;
      if (r.pass) j["momentum_residual"] = r.momentum;
      emit(j);
      if (r.pass && !(r.momentum < 1e-9)) return kExitVerify;
      return 0;
    }

    if (*t_ver) {
      json cfg = merged_config(suite, read_opt(model_path));
      if (!t_ver->count("--seed")) seed = cfg.value("seed", seed);
      if (!t_ver->count("--points")) points = cfg.value("points", points);
      Suite su = suite_from_config(suite, cfg);
      FDConfig fd = fd_from_config(cfg);
      Report rep = run_suite(su, points, seed, fd, !serial);
      json j = rep.to_json(fd);
      if (out_path.empty()) {
        emit(j);
      } else {
        std::ofstream o(out_path);
        if (!o) throw SchemaError("cannot write " + out_path);
        o << j.dump(2) << "\n";
      }
      for (auto& [name, sm] : rep.summary(fd))
        std::cerr << name << ": max " << sm.max_residual << " (threshold "
                  << sm.threshold << "), " << sm.passed << " pass, "
                  << sm.failed << " fail, " << sm.skipped << " skipped\n";
      return rep.all_pass() ? 0 : kExitVerify;
    }

    if (*t_sw) {
      json cfg = merged_config(suite, read_opt(model_path));
      Suite su = suite_from_config(suite, cfg);
      FDConfig fd = fd_from_config(cfg);
      json grid = load_json(grid_path);
      std::vector<std::string> axes;
      std::vector<std::vector<double>> vals;
      std::vector<int> idx;
      try {
        for (auto& [name, v] : grid.at("axes").items()) {
          auto it = std::find(su.coord_names.begin(), su.coord_names.end(), name);
          if (it == su.coord_names.end())
            throw SchemaError("grid axis '" + name + "' is not a coordinate");
          axes.push_back(name);
          idx.push_back(int(it - su.coord_names.begin()));
          vals.push_back(grid_values(v));
        }
      } catch (const json::exception& e) {
        throw SchemaError(std::string("grid: ") + e.what());
      }
      ChartPoint base = su.center;
      if (grid.contains("g")) base.g = rows_from_json(grid["g"]);
      size_t total = 1;
      for (auto& v : vals) total *= v.size();
      Rng rng(seed);
      std::vector<std::vector<Vec>> ks(su.actions.size());
      for (size_t a = 0; a < su.actions.size(); ++a)
        ks[a].push_back(rng.cube(su.actions[a].dim, su.actions[a].radius));
      std::vector<ChartPoint> pts(total, base);
      for (size_t c = 0; c < total; ++c) {
        size_t r = c;
        for (int a = int(axes.size()) - 1; a >= 0; --a) {
          pts[c].x(idx[a]) = vals[a][r % vals[a].size()];
          r /= vals[a].size();
        }
      }
      std::vector<std::vector<CheckRecord>> recs(total);
      for_each_point(int(total), true, [&](int c) {
        recs[c] = check_point(su, pts[c], c, fd, ks);
      });
      std::cout << "point";
      for (auto& a : axes) std::cout << "," << a;
      std::cout << ",check,residual\n";
      bool ok = true;
      for (size_t c = 0; c < total; ++c) {
        auto row = [&](const std::string& check, const std::string& res) {
          std::cout << c;
          for (size_t a = 0; a < axes.size(); ++a) std::cout << "," << fmt(pts[c].x(idx[a]));
          std::cout << "," << check << "," << res << "\n";
        };
        if (recs[c].empty()) row("map", "exit");
        for (auto& r : recs[c]) {
          if (r.skipped) {
            row(r.check, "exit");
          } else {
            row(r.check, fmt(r.residual));
            ok = ok && r.pass;
          }
        }
      }
      return ok ? 0 : kExitVerify;
    }

    if (*sp_c) {
      json cfg = merged_config("restricted", read_opt(model_path));
      GroupDescriptor G = group_from_config(cfg);
      AdaptedSplitting spl = splitting_from_config(cfg);
      json j;
      j["group"] = G.to_json();
      j["splitting"] = to_json(spl);
      if (cfg.contains("S")) {
        Representation rep = rep_from_config(G, spl.h, cfg);
        Vec alpha = cfg.contains("alpha") ? vec_from_json(cfg["alpha"])
                                          : Vec(Vec::Zero(rep.m));
        j["slice"] = to_json(slice_data(G, spl, rep, alpha));
      }
      if (out_path.empty()) {
        emit(j);
      } else {
        std::ofstream o(out_path);
        if (!o) throw SchemaError("cannot write " + out_path);
        o << j["splitting"].dump(2) << "\n";
      }
      return 0;
    }
  } catch (const SchemaError& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return kExitSchema;
  } catch (const DomainExit& e) {
    std::cerr << "domain exit: " << e.what() << "\n";
    return kExitDomain;
  } catch (const json::exception& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return kExitSchema;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
