#include <cmath>

#include "doctest.h"
#include "hamtube/errors.hpp"
#include "hamtube/gtubes.hpp"
#include "hamtube/random.hpp"
#include "hamtube/special.hpp"

using namespace hamtube;

namespace {
Vec v3(double a, double b, double c) { return (Vec(3) << a, b, c).finished(); }
double maxabs(const Mat& A) { return A.cwiseAbs().maxCoeff(); }
}  // namespace

TEST_CASE("so3 bracket is the cross product") {
  auto G = GroupDescriptor::so3();
  Vec a = v3(0.3, -1.2, 0.5), b = v3(2.0, 0.1, -0.7);
  Eigen::Vector3d c = Eigen::Vector3d(a).cross(Eigen::Vector3d(b));
  CHECK(maxabs(G.bracket(a, b) - Vec(c)) < 1e-15);
  CHECK(G.jacobi_residual() < 1e-14);
  CHECK(GroupDescriptor::sl2r().jacobi_residual() < 1e-14);
}

TEST_CASE("hat and vee invert each other") {
  for (auto G : {GroupDescriptor::so3(), GroupDescriptor::sl2r()}) {
    Vec x = v3(0.4, -0.9, 1.3);
    CHECK(maxabs(G.vee(G.hat(x)) - x) < 1e-14);
  }
}

TEST_CASE("Adstar is the dual of Ad and reverses products") {
  auto G = GroupDescriptor::sl2r();
  Rng rng(1);
  Mat a = G.exp(rng.cube(3, 1.0)), b = G.exp(rng.cube(3, 1.0));
  Vec nu = rng.cube(3, 1.0), xi = rng.cube(3, 1.0);
  CHECK(std::abs((G.Adstar(a) * nu).dot(xi) - nu.dot(G.Ad(a) * xi)) < 1e-13);
  CHECK(maxabs(G.Adstar(a * b) - G.Adstar(b) * G.Adstar(a)) < 1e-12);
  // Ad(g) xi = vee(g hat(xi) g^-1)
  CHECK(maxabs(G.Ad(a) * xi - G.vee(a * G.hat(xi) * a.inverse())) < 1e-12);
}

TEST_CASE("coad pairs as <mu, [xi, eta]>") {
  auto G = GroupDescriptor::so3();
  Vec xi = v3(1, 2, 3), mu = v3(-1, 0.5, 2), eta = v3(0.2, 0.1, -0.4);
  CHECK(std::abs(G.coad(xi, mu).dot(eta) - mu.dot(G.bracket(xi, eta))) < 1e-14);
}

TEST_CASE("closed exponentials agree with expm") {
  Rng rng(2);
  for (auto G : {GroupDescriptor::so3(), GroupDescriptor::sl2r()}) {
    for (int i = 0; i < 20; ++i) {
      Vec x = rng.cube(3, 2.0);
      CHECK(maxabs(G.exp_closed(x) - G.exp(x)) < 1e-12);
    }
    CHECK(maxabs(G.exp_closed(Vec::Zero(3)) - Mat::Identity(G.mat_dim(), G.mat_dim())) == 0.0);
  }
  // nilpotent direction of sl2
  auto S = GroupDescriptor::sl2r();
  Mat X(2, 2);
  X << 0, 1, 0, 0;
  Vec x = S.vee(X);
  CHECK(maxabs(S.exp_closed(x) - (Mat::Identity(2, 2) + X)) < 1e-14);
}

TEST_CASE("right dexp matches the derivative of exp") {
  Rng rng(3);
  for (auto G : {GroupDescriptor::so3(), GroupDescriptor::sl2r()}) {
    Vec lam = rng.cube(3, 1.0), v = rng.cube(3, 1.0);
    double h = 1e-6;
    Mat d = (G.exp(lam + h * v) - G.exp(lam - h * v)) / (2 * h);
    // right trivialization: d exp(lam) exp(-lam)
    Vec fd = G.vee(d * G.exp(lam).inverse());
    CHECK(maxabs(G.dexp_right(lam, v) - fd) < 1e-8);
    CHECK(maxabs(G.dexp_right_minus_id(lam, v) - (G.dexp_right(lam, v) - v)) < 1e-14);
  }
}

TEST_CASE("cubic relation of ad") {
  for (auto G : {GroupDescriptor::so3(), GroupDescriptor::sl2r()}) {
    REQUIRE(G.has_cubic_ad());
    Vec x = v3(0.3, 0.8, -0.5);
    Mat A = G.ad(x);
    CHECK(maxabs(A * A * A + G.cubic_coeff(x) * A) < 1e-14);
  }
}

TEST_CASE("sl2 trace-form identification") {
  auto G = GroupDescriptor::sl2r();
  CHECK(maxabs(G.gram() - Vec(v3(1, -1, -1)).asDiagonal().toDenseMatrix()) < 1e-15);
  Mat M(2, 2);
  M << 0.3, 1.2, -0.7, -0.3;
  Vec nu = G.covector_from_matrix(M);
  CHECK(maxabs(G.covector_to_matrix(nu) - M) < 1e-14);
  CHECK_THROWS_AS(GroupDescriptor::so3().covector_from_matrix(M), Error);
}

TEST_CASE("membership checks") {
  auto G = GroupDescriptor::so3();
  CHECK_NOTHROW(G.check_member(G.exp(v3(0.1, 0.2, 0.3))));
  Mat bad = Mat::Identity(3, 3) * 1.01;
  CHECK_THROWS_AS(G.check_member(bad), PreconditionError);
  auto S = GroupDescriptor::sl2r();
  Mat d(2, 2);
  d << 2, 0, 0, 1;
  CHECK_THROWS_AS(S.check_member(d), PreconditionError);
}

TEST_CASE("custom group from json matches the builtin") {
  auto G = GroupDescriptor::so3();
  auto H = GroupDescriptor::from_json(G.to_json());
  CHECK(H.dim() == 3);
  Vec a = v3(1, 0, 0), b = v3(0, 1, 0);
  CHECK(maxabs(H.bracket(a, b) - G.bracket(a, b)) < 1e-15);
  CHECK(GroupDescriptor::from_json(nlohmann::json("sl2r")).name() == "sl2r");
  CHECK_THROWS_AS(GroupDescriptor::from_json(nlohmann::json("so5")), SchemaError);
}

TEST_CASE("representation homomorphism") {
  auto G = GroupDescriptor::so3();
  Representation r;
  r.alg = Mat::Identity(3, 3);
  r.m = 3;
  for (int i = 0; i < 3; ++i) r.gens.push_back(G.basis()[i]);
  CHECK(r.homomorphism_residual(G) < 1e-14);
  Vec a = v3(1, 2, 3), b = v3(0, 0, 1);
  // diamond_j = b . (e_j x a)
  Vec d = diamond(r, a, b, Mat::Identity(3, 3));
  for (int j = 0; j < 3; ++j)
    CHECK(std::abs(d(j) - b.dot(Vec(Eigen::Vector3d::Unit(j).cross(Eigen::Vector3d(a))))) < 1e-15);
}

// ---------------------------------------------------------------------------

TEST_CASE("E reference values") {
  CHECK(eval_E(0.0) == 1.0);
  struct P {
    double x, E;
  } ref[] = {{2, 1.4737654512711425638},   {-2, 0.7526207478964416835},
             {0.5, 1.0907529333920842652}, {-0.5, 0.92316409091839324371},
             {10, 5.1},                    {-10, 0.40074689755683338287},
             {-50, 0.14274775284919617296}, {1e-3, 1.0001666944481483796}};
  for (auto p : ref) {
    CAPTURE(p.x);
    CHECK(std::abs(eval_E(p.x) - p.E) < 1e-13 * std::max(1.0, p.E));
  }
}

TEST_CASE("E solves its identity and decays to zero") {
  for (double x : {-20.0, -3.0, -1e-6, 1e-6, 0.7, 15.0})
    CHECK(E_identity_residual(x, eval_E(x)) < 1e-12);
  CHECK(eval_E(-1e6) < 1e-4);
  double prev = 0;
  for (int i = 0; i <= 1000; ++i) {
    double e = eval_E(-20.0 + 40.0 * i / 1000);
    CHECK(e > prev);
    prev = e;
  }
}

TEST_CASE("E small-argument continuity") {
  for (double x : {1e-9, -1e-9, 1e-5, -1e-5})
    CHECK(std::abs(eval_E(x) - (1.0 + x / 6.0)) < 1e-9);
}

TEST_CASE("F reference values and domain") {
  CHECK(eval_F(0.0) == 1.0);
  CHECK(std::abs(eval_F(1.0) - M_PI / 2) < 1e-15);
  CHECK(std::abs(eval_F(-1.0) - 0.88137358701954302523) < 1e-15);
  CHECK(std::abs(eval_F(0.5) - 1.1107207345395915618) < 1e-15);
  CHECK(std::abs(eval_F(-3.0) - 0.76034599630094634753) < 1e-15);
  CHECK_THROWS_AS(eval_F(1.0 + 1e-12), DomainExit);
  double prev = 0;
  for (int i = 0; i <= 500; ++i) {
    double f = eval_F(-25.0 + 26.0 * i / 500);
    CHECK(f > prev);
    prev = f;
  }
}

TEST_CASE("solve_m1 limits and closed-form agreement") {
  auto G = GroupDescriptor::so3();
  Vec mu = v3(0, 0, 1);
  Mat q = Mat::Zero(3, 2);
  q(0, 0) = 1;
  q(1, 1) = 1;
  CHECK(solve_m1(G, mu, q, Vec::Zero(3), Vec::Zero(3)) == 1.0);
  CHECK(std::abs(solve_m1(G, mu, q, Vec::Zero(3), v3(1e-4, 0, 0)) - 1.0) < 1e-8);
  Rng rng(5);
  for (int i = 0; i < 50; ++i) {
    double nz = rng.uniform(-0.3, 0.3);
    Vec nu = v3(0, 0, nz);
    Vec lam = q * rng.ball(2, 0.9);
    double b = 1 + nz, L = lam.norm();
    double closed = 2 * std::asin(L / (2 * std::sqrt(b))) / L;
    CHECK(std::abs(solve_m1(G, mu, q, nu, lam) - closed) < 1e-11);
  }
}

TEST_CASE("solve_m1 reports a domain exit outside the tube") {
  auto G = GroupDescriptor::so3();
  Mat q = Mat::Zero(3, 2);
  q(0, 0) = 1;
  q(1, 1) = 1;
  // |lambda| / (2 sqrt b) > 1 has no root
  CHECK_THROWS_AS(solve_m1(G, v3(0, 0, 1), q, Vec::Zero(3), v3(2.5, 0, 0)), DomainExit);
}
