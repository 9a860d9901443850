#include <cmath>

#include "doctest.h"
#include "hamtube/errors.hpp"
#include "hamtube/random.hpp"
#include "hamtube/splitting.hpp"

using namespace hamtube;

namespace {
Vec v3(double a, double b, double c) { return (Vec(3) << a, b, c).finished(); }
}  // namespace

TEST_CASE("isotropy algebras") {
  auto G = GroupDescriptor::so3();
  CHECK(isotropy_algebra(G, Vec::Zero(3)).cols() == 3);
  Mat g = isotropy_algebra(G, v3(0, 0, 1));
  REQUIRE(g.cols() == 1);
  CHECK(subspace_angle(g, Mat(v3(0, 0, 1))) < 1e-14);
  auto S = GroupDescriptor::sl2r();
  Mat X(2, 2);
  X << 0, 1, 0, 0;
  Vec mu = S.covector_from_matrix(X);
  Mat gs = isotropy_algebra(S, mu);
  REQUIRE(gs.cols() == 1);
  // the isotropy of a nilpotent covector is spanned by its own direction
  CHECK(subspace_angle(gs, Mat(S.vee(X))) < 1e-12);
}

TEST_CASE("SO(3) splitting with h orthogonal to mu") {
  auto G = GroupDescriptor::so3();
  AdaptedSplitting s = adapted_splitting(G, Mat(v3(1, 0, 0)), v3(0, 0, 2));
  CHECK(s.hmu.cols() == 0);
  CHECK(s.o.cols() == 0);
  CHECK(subspace_angle(s.l, Mat(v3(1, 0, 0))) < 1e-14);
  CHECK(subspace_angle(s.n, Mat(v3(0, 1, 0))) < 1e-14);
  CHECK(subspace_angle(s.p, Mat(v3(0, 0, 1))) < 1e-14);
  for (auto& [k, v] : s.certificate) {
    CAPTURE(k);
    CHECK(v < 1e-12);
  }
  SigmaMap sg = sigma(G, s);
  REQUIRE(sg.matrix.rows() == 1);
  // <ad*_n mu, l> = mu . (n x l)
  Vec n = s.n.col(0), l = s.l.col(0);
  double want = v3(0, 0, 2).dot(Vec(Eigen::Vector3d(n).cross(Eigen::Vector3d(l))));
  CHECK(std::abs(sg.matrix(0, 0) - want) < 1e-14);
  CHECK(std::abs(std::abs(want) - 2.0) < 1e-14);
}

TEST_CASE("SL2 splitting with h = 0") {
  auto G = GroupDescriptor::sl2r();
  Vec mu = v3(1.0, 0.3, -0.2);
  AdaptedSplitting s = adapted_splitting(G, Mat(3, 0), mu);
  CHECK(s.l.cols() == 0);
  CHECK(s.n.cols() == 0);
  CHECK(s.o.cols() == 2);
  CHECK(s.p.cols() == 1);
}

TEST_CASE("splitting preconditions") {
  auto G = GroupDescriptor::so3();
  Mat h(3, 2);
  h << 1, 0, 0, 1, 0, 0;
  // span(e1, e2) is not closed under the bracket
  CHECK_THROWS_AS(adapted_splitting(G, h, v3(0, 0, 1)), PreconditionError);
}

TEST_CASE("averaged metric on a conjugated circle") {
  auto G = GroupDescriptor::sl2r();
  Rng rng(7);
  Mat k = G.exp(rng.cube(3, 0.5));
  Vec c = G.Ad(k) * Vec::Unit(3, 0);
  Mat M = invariant_metric(G, Mat(c), Mat::Identity(3, 3));
  for (double t : {0.3, 1.1, 2.5}) {
    Mat A = G.Ad(G.exp(t * c));
    CHECK((A.transpose() * M * A - M).cwiseAbs().maxCoeff() < 1e-12);
  }
  AdaptedSplitting s = adapted_splitting(G, Mat(c), rng.cube(3, 1.0));
  for (auto& [key, v] : s.certificate) {
    CAPTURE(key);
    CHECK(v < 1e-9);
  }
}

TEST_CASE("splitting json round trip") {
  auto G = GroupDescriptor::so3();
  AdaptedSplitting s = adapted_splitting(G, Mat(v3(1, 0, 0)), v3(0, 0, 1));
  AdaptedSplitting t = splitting_from_json(to_json(s));
  CHECK((t.n - s.n).cwiseAbs().maxCoeff() == 0.0);
  CHECK((t.mu - s.mu).cwiseAbs().maxCoeff() == 0.0);
  CHECK(t.o.cols() == 0);
}

TEST_CASE("slice data for rotations of R^3 with alpha = e3") {
  auto G = GroupDescriptor::so3();
  AdaptedSplitting s = adapted_splitting(G, Mat::Identity(3, 3), Vec::Zero(3));
  Representation r;
  r.alg = s.h;
  r.m = 3;
  for (int i = 0; i < 3; ++i) r.gens.push_back(G.hat(s.h.col(i)));
  SliceData d = slice_data(G, s, r, v3(0, 0, 1));
  CHECK(d.gz.cols() == 1);
  CHECK(d.s.cols() == 2);
  CHECK(d.B.cols() == 1);
  CHECK(d.C.cols() == 2);
  CHECK(subspace_angle(d.gz, Mat(v3(0, 0, 1))) < 1e-14);
  CHECK(subspace_angle(d.B, Mat(v3(0, 0, 1))) < 1e-14);
  for (auto& [k, v] : d.certificate) {
    CAPTURE(k);
    CHECK(v < 1e-12);
  }
}

TEST_CASE("slice momentum is quadratic") {
  auto G = GroupDescriptor::so3();
  Vec mu = v3(0, 0, 1);
  Representation r;
  r.alg = Mat(mu);
  r.m = 2;
  Mat R(2, 2);
  R << 0, -1, 1, 0;
  r.gens.push_back(R);
  Vec lam = v3(0.2, -0.1, 0), a = (Vec(2) << 0.3, 0.1).finished(),
      b = (Vec(2) << -0.2, 0.4).finished();
  Vec j1 = slice_momentum(G, mu, r, lam, a, b, Mat(mu));
  Vec j2 = slice_momentum(G, mu, r, 2 * lam, 2 * a, 2 * b, Mat(mu));
  CHECK((j2 - 4 * j1).norm() < 1e-15);
  CHECK(slice_momentum(G, mu, r, Vec::Zero(3), Vec::Zero(2), b, Mat(mu)).norm() == 0.0);
}

TEST_CASE("adapted basis extend and restrict") {
  Mat A = Mat::Identity(3, 3);
  A(0, 1) = 0.5;
  AdaptedBasis ab({{"x", A.leftCols(1)}, {"y", A.rightCols(2)}});
  Vec c = (Vec(2) << 0.7, -1.1).finished();
  Vec nu = ab.extend("y", c);
  CHECK((ab.restrict("y", nu) - c).norm() < 1e-15);
  CHECK(ab.restrict("x", nu).norm() < 1e-15);
  CHECK(ab.dim("x") == 1);
}
