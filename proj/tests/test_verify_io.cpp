#include <cmath>

#include "doctest.h"
#include "hamtube/errors.hpp"
#include "hamtube/json_io.hpp"

using namespace hamtube;

TEST_CASE("identity map has zero pullback residual") {
  auto G = GroupDescriptor::so3();
  Chart c{&G, 3};
  MapFn id = [](const ChartPoint& p) { return p; };
  FormFn w = [&](const ChartPoint& p) { return cotangent_form(G, p.x, 0); };
  ChartPoint p{G.exp((Vec(3) << 0.1, 0.2, 0.3).finished()), (Vec(3) << 1, 2, 3).finished()};
  CHECK(pullback_residual(c, c, id, w, w, p, 1e-5) < 1e-10);
}

TEST_CASE("canonical and cotangent forms are antisymmetric") {
  Mat C = canonical_form(3);
  CHECK((C + C.transpose()).norm() == 0.0);
  CHECK(C(0, 3) == 1.0);
  auto G = GroupDescriptor::sl2r();
  Mat W = cotangent_form(G, (Vec(3) << 1, 2, 3).finished(), 2);
  CHECK(W.rows() == 3 + 3 + 4);
  CHECK((W + W.transpose()).norm() == 0.0);
}

TEST_CASE("suites pass and are reproducible") {
  for (std::string name : {"simple", "restricted", "tube0", "general", "so3r3"}) {
    CAPTURE(name);
    json cfg = merged_config(name, json::object());
    Suite s = suite_from_config(name, cfg);
    FDConfig fd;
    Report a = run_suite(s, 8, 42, fd, true);
    Report b = run_suite(s, 8, 42, fd, false);
    CHECK(a.all_pass());
    CHECK(a.to_json(fd).dump() == b.to_json(fd).dump());
    CHECK(a.count("pullback") == 8);
  }
}

TEST_CASE("perturbed tube fails the pullback check") {
  auto T = std::make_shared<SimpleTube>(SimpleTube::so3((Vec(3) << 0, 0, 1).finished()));
  T->perturbation = 1.01;
  FDConfig fd;
  Report r = run_suite(simple_suite(T, Radii{}), 10, 1, fd);
  CHECK_FALSE(r.all_pass());
  CHECK(r.max_residual("pullback") > 1e-3);
}

TEST_CASE("report summary agrees with records") {
  auto T = std::make_shared<SimpleTube>(SimpleTube::so3((Vec(3) << 0, 0, 1).finished()));
  FDConfig fd;
  Report r = run_suite(simple_suite(T, Radii{}), 5, 3, fd);
  auto sm = r.summary(fd);
  int total = 0;
  for (auto& [k, v] : sm) total += v.passed + v.failed + v.skipped;
  CHECK(total == int(r.records.size()));
  json j = r.to_json(fd);
  CHECK(j["all_pass"].get<bool>() == r.all_pass());
  CHECK(j["records"].size() == r.records.size());
}

TEST_CASE("domain exits are recorded as skipped") {
  auto T = std::make_shared<SimpleTube>(SimpleTube::so3((Vec(3) << 0, 0, 1).finished()));
  Suite s = simple_suite(T, Radii{});
  FDConfig fd;
  ChartPoint far{Mat::Identity(3, 3), (Vec(3) << 0, 3.0, 0).finished()};
  auto recs = check_point(s, far, 0, fd, {});
  REQUIRE(!recs.empty());
  CHECK(recs[0].skipped);
}

TEST_CASE("config merging and schema errors") {
  json c = merged_config("restricted", json{{"h", json::array({{0, 1, 0}})}});
  CHECK_FALSE(c.contains("xi_h"));
  CHECK_THROWS_AS(merged_config("nope", json::object()), SchemaError);
  CHECK_THROWS_AS(merged_config("simple", json::array()), SchemaError);
  CHECK_THROWS_AS(simple_from_config(json{{"group", "so3"}, {"mu", {1, 2}}}), SchemaError);
  CHECK_THROWS_AS(simple_from_config(json{{"group", "so3"}, {"mu", "x"}}), SchemaError);
  CHECK_THROWS_AS(model_from_config(merged_config("tube0", json{{"alpha", {1, 2, 3}}})),
                  SchemaError);
  CHECK_THROWS_AS(fd_from_config(json{{"fd_step", -1}}), SchemaError);
  FDConfig f = fd_from_config(json{{"tolerances", {{"pullback", 1e-3}}}});
  CHECK(f.threshold("pullback") == 1e-3);
}

TEST_CASE("sl2 config through mu_matrix and nilpotent keys") {
  auto T = simple_from_config(json{{"group", "sl2r"}, {"mu_matrix", {{0, 1}, {-1, 0}}}});
  CHECK(T->strategy() == Strategy::FPath);
  auto N = simple_from_config(json{{"group", "sl2r"}, {"nilpotent", {{"c", 2.0}}}});
  CHECK(N->strategy() == Strategy::EPath);
}
