#include "hamtube/json_io.hpp"

#include <fstream>

#include "hamtube/errors.hpp"

namespace hamtube {

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw SchemaError(path + ": " + e.what());
  }
}

Mat rows_from_json(const json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array())
    throw SchemaError("matrix must be a non-empty list of rows");
  Mat M(j.size(), j[0].size());
  for (size_t i = 0; i < j.size(); ++i) {
    if (j[i].size() != j[0].size()) throw SchemaError("ragged matrix rows");
    for (size_t k = 0; k < j[i].size(); ++k) M(i, k) = j[i][k].get<double>();
  }
  return M;
}

json rows_to_json(const Mat& M) {
  json j = json::array();
  for (int i = 0; i < M.rows(); ++i) {
    json r = json::array();
    for (int k = 0; k < M.cols(); ++k) r.push_back(M(i, k));
    j.push_back(r);
  }
  return j;
}

json default_config(const std::string& suite) {
  if (suite == "simple")
    return {{"group", "so3"}, {"mu", {0, 0, 1}}};
  if (suite == "restricted")
    return {{"group", "so3"}, {"mu", {0, 0, 1}}, {"xi_h", {1, 0, 0}},
            {"closed_form", true}};
  if (suite == "tube0")
    return {{"group", "so3"},
            {"mu", {0, 0, 1}},
            {"xi_h", {1, 0, 0}},
            {"S", {{"dim", 2}, {"generators", {{{0, -1}, {1, 0}}}}}},
            {"alpha", {0, 0}}};
  if (suite == "general")
    return {{"group", "so3"},
            {"mu", {0, 0, 0}},
            {"h", {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}},
            {"S",
             {{"dim", 3},
              {"generators",
               {{{0, 0, 0}, {0, 0, -1}, {0, 1, 0}},
                {{0, 0, 1}, {0, 0, 0}, {-1, 0, 0}},
                {{0, -1, 0}, {1, 0, 0}, {0, 0, 0}}}}}},
            {"alpha", {0, 0, 1}}};
  if (suite == "so3r3")
    return {{"q", {1, 0, 0}}, {"p", {0.3, 1, 0}}, {"closed_form", true}};
  throw SchemaError("unknown suite '" + suite + "'");
}

json merged_config(const std::string& suite, const json& user) {
  if (!user.is_null() && !user.is_object())
    throw SchemaError("config must be a JSON object");
  json cfg = default_config(suite);
  if (user.is_object()) {
    // a user-supplied h replaces the default xi_h and vice versa
    if (user.contains("h")) cfg.erase("xi_h");
    if (user.contains("xi_h")) cfg.erase("h");
    if (user.contains("mu_matrix")) cfg.erase("mu");
    if (user.contains("nilpotent")) cfg.erase("mu");
    cfg.merge_patch(user);
  }
  return cfg;
}

namespace {

template <class F>
auto schema_guard(const char* what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw SchemaError(std::string(what) + ": " + e.what());
  }
}

Vec vec_of(const json& j, int n, const char* key) {
  Vec v = vec_from_json(j);
  if (n >= 0 && v.size() != n)
    throw SchemaError(std::string(key) + ": expected " + std::to_string(n) +
                      " entries, got " + std::to_string(v.size()));
  return v;
}

const Mat* opt_metric(const json& cfg, Mat& store, int n) {
  if (!cfg.contains("metric")) return nullptr;
  store = rows_from_json(cfg["metric"]);
  if (store.rows() != n || store.cols() != n)
    throw SchemaError("metric has the wrong shape");
  return &store;
}

}  // namespace

GroupDescriptor group_from_config(const json& cfg) {
  return schema_guard("group", [&] {
    if (!cfg.contains("group")) return GroupDescriptor::so3();
    return GroupDescriptor::from_json(cfg["group"]);
  });
}

Vec mu_from_config(const GroupDescriptor& G, const json& cfg) {
  return schema_guard("mu", [&] {
    if (cfg.contains("mu_matrix"))
      return G.covector_from_matrix(rows_from_json(cfg["mu_matrix"]));
    if (!cfg.contains("mu")) throw SchemaError("missing mu");
    return vec_of(cfg["mu"], G.dim(), "mu");
  });
}

Mat h_from_config(const GroupDescriptor& G, const json& cfg) {
  return schema_guard("h", [&] {
    if (cfg.contains("xi_h")) return Mat(vec_of(cfg["xi_h"], G.dim(), "xi_h"));
    if (cfg.contains("h")) {
      if (cfg["h"].empty()) return Mat(G.dim(), 0);
      return mat_from_json(cfg["h"], G.dim());
    }
    return Mat(G.dim(), 0);
  });
}

Representation rep_from_config(const GroupDescriptor& G, const Mat& h,
                               const json& cfg) {
  (void)G;
  return schema_guard("S", [&] {
    if (!cfg.contains("S")) return Representation::zero(h, 0);
    const json& S = cfg["S"];
    int m = S.at("dim").get<int>();
    if (m < 0) throw SchemaError("S.dim must be >= 0");
    if (!S.contains("generators")) return Representation::zero(h, m);
    Representation r;
    r.alg = h;
    r.m = m;
    for (auto& g : S["generators"]) {
      Mat A = m ? rows_from_json(g) : Mat(0, 0);
      if (A.rows() != m || A.cols() != m)
        throw SchemaError("S.generators: each must be dim x dim");
      r.gens.push_back(A);
    }
    if (int(r.gens.size()) != h.cols())
      throw SchemaError("S.generators: one matrix per h basis vector");
    return r;
  });
}

Strategy strategy_from_config(const json& cfg) {
  return schema_guard("strategy", [&] {
    if (!cfg.contains("strategy")) return Strategy::Auto;
    try {
      return strategy_from_string(cfg["strategy"].get<std::string>());
    } catch (const Error& e) {
      throw SchemaError(e.what());
    }
  });
}

Radii radii_from_config(const json& cfg) {
  return schema_guard("radii", [&] {
    Radii r;
    if (!cfg.contains("radii")) return r;
    const json& j = cfg["radii"];
    r.nu = j.value("nu", r.nu);
    r.lambda = j.value("lambda", r.lambda);
    r.eps = j.value("eps", r.eps);
    r.a = j.value("a", r.a);
    r.b = j.value("b", r.b);
    r.g = j.value("g", r.g);
    return r;
  });
}

FDConfig fd_from_config(const json& cfg) {
  return schema_guard("tolerances", [&] {
    FDConfig f;
    f.step = cfg.value("fd_step", f.step);
    if (!(f.step > 0)) throw SchemaError("fd_step must be positive");
    if (cfg.contains("tolerances"))
      for (auto& [k, v] : cfg["tolerances"].items())
        f.thresholds[k] = v.get<double>();
    return f;
  });
}

std::shared_ptr<SimpleTube> simple_from_config(const json& cfg) {
  GroupDescriptor G = group_from_config(cfg);
  Strategy st = strategy_from_config(cfg);
  if (cfg.contains("nilpotent")) {
    if (G.name() != "sl2r") throw SchemaError("nilpotent needs group sl2r");
    return schema_guard("nilpotent", [&] {
      const json& n = cfg["nilpotent"];
      Mat k = n.contains("k") ? rows_from_json(n["k"]) : Mat(Mat::Identity(2, 2));
      return std::make_shared<SimpleTube>(
          SimpleTube::sl2_nilpotent(k, n.value("c", 1.0), st));
    });
  }
  Vec mu = mu_from_config(G, cfg);
  if (G.name() == "so3" && !cfg.contains("q_basis"))
    return std::make_shared<SimpleTube>(SimpleTube::so3(mu, st));
  if (G.name() == "sl2r" && !cfg.contains("q_basis"))
    return std::make_shared<SimpleTube>(SimpleTube::sl2(mu, st));
  Mat gmu = isotropy_algebra(G, mu);
  Mat q = cfg.contains("q_basis")
              ? schema_guard("q_basis",
                             [&] { return mat_from_json(cfg["q_basis"], G.dim()); })
              : null_space(gmu.transpose());
  return std::make_shared<SimpleTube>(G, mu, gmu, q, st);
}

Mat simple_hmu_from_config(const SimpleTube& T, const json& cfg) {
  const GroupDescriptor& G = T.group();
  if (cfg.contains("h") || cfg.contains("xi_h")) {
    Mat h = h_from_config(G, cfg);
    if (h.cols() == 0) return h;
    return intersect(h, T.gmu());
  }
  // without an h, SO(3) uses H = G so that h_mu = g_mu
  if (G.name() == "so3") return T.gmu();
  return Mat(G.dim(), 0);
}

AdaptedSplitting splitting_from_config(const json& cfg) {
  if (cfg.contains("splitting_file"))
    return schema_guard("splitting_file", [&] {
      return splitting_from_json(load_json(cfg["splitting_file"].get<std::string>()));
    });
  GroupDescriptor G = group_from_config(cfg);
  Vec mu = mu_from_config(G, cfg);
  Mat h = h_from_config(G, cfg);
  Mat store;
  const Mat* metric = opt_metric(cfg, store, G.dim());
  return adapted_splitting(G, h, mu, metric);
}

std::shared_ptr<RestrictedTube> restricted_from_config(const json& cfg) {
  GroupDescriptor G = group_from_config(cfg);
  AdaptedSplitting spl = splitting_from_config(cfg);
  bool closed = schema_guard("closed_form",
                             [&] { return cfg.value("closed_form", false); });
  return std::make_shared<RestrictedTube>(G, spl, strategy_from_config(cfg),
                                          closed);
}

std::shared_ptr<CotangentModel> model_from_config(const json& cfg) {
  GroupDescriptor G = group_from_config(cfg);
  Vec mu = mu_from_config(G, cfg);
  Mat h = h_from_config(G, cfg);
  Representation rep = rep_from_config(G, h, cfg);
  Vec alpha = cfg.contains("alpha")
                  ? schema_guard("alpha", [&] { return vec_of(cfg["alpha"], rep.m, "alpha"); })
                  : Vec(Vec::Zero(rep.m));
  Mat store;
  const Mat* metric = opt_metric(cfg, store, G.dim());
  bool closed = schema_guard("closed_form",
                             [&] { return cfg.value("closed_form", false); });
  return std::make_shared<CotangentModel>(G, h, mu, rep, alpha, metric,
                                          strategy_from_config(cfg), closed);
}

std::shared_ptr<So3R3Model> so3r3_from_config(const json& cfg) {
  return schema_guard("so3r3", [&] {
    Eigen::Vector3d q = vec_of(cfg.at("q"), 3, "q");
    Eigen::Vector3d p = vec_of(cfg.at("p"), 3, "p");
    return std::make_shared<So3R3Model>(q, p, strategy_from_config(cfg),
                                        cfg.value("closed_form", false));
  });
}

Suite suite_from_config(const std::string& suite, const json& cfg) {
  Radii r = radii_from_config(cfg);
  if (suite == "simple") {
    auto T = simple_from_config(cfg);
    return simple_suite(T, r, simple_hmu_from_config(*T, cfg));
  }
  if (suite == "restricted") return restricted_suite(restricted_from_config(cfg), r);
  if (suite == "tube0") return mgs_suite(model_from_config(cfg), r, true, "tube0");
  if (suite == "general")
    return mgs_suite(model_from_config(cfg), r, false, "general");
  if (suite == "so3r3") return so3r3_suite(so3r3_from_config(cfg), r);
  throw SchemaError("unknown suite '" + suite + "'");
}

json report_point(const ChartPoint& p) {
  json j;
  if (p.g.size()) j["g"] = rows_to_json(p.g);
  j["x"] = vec_to_json(p.x);
  return j;
}

}  // namespace hamtube
