#include "hamtube/linalg.hpp"

#include <cmath>
#include <limits>
#include <unsupported/Eigen/MatrixFunctions>

#include "hamtube/errors.hpp"

namespace hamtube {

namespace {

Eigen::JacobiSVD<Mat> svd_full(const Mat& A) {
  return Eigen::JacobiSVD<Mat>(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
}

}  // namespace

int numerical_rank(const Mat& A, double rtol) {
  if (A.size() == 0) return 0;
  auto sv = Eigen::JacobiSVD<Mat>(A).singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  int r = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > rtol * sv(0)) ++r;
  return r;
}

Mat orth(const Mat& A, double rtol) {
  if (A.cols() == 0) return Mat(A.rows(), 0);
  auto svd = svd_full(A);
  int r = numerical_rank(A, rtol);
  return svd.matrixU().leftCols(r);
}

Mat null_space(const Mat& A, double rtol, bool strict) {
  const int n = A.cols();
  if (A.rows() == 0) return Mat::Identity(n, n);
  auto svd = svd_full(A);
  auto sv = svd.singularValues();
  double smax = sv.size() ? sv(0) : 0.0;
  if (smax == 0.0) return Mat::Identity(n, n);
  int r = 0;
  for (int i = 0; i < sv.size(); ++i) {
    double rel = sv(i) / smax;
    if (rel > rtol) {
      if (strict && rel <= 1e3 * rtol)
        throw CertificationError("no clear rank gap (relative singular value " +
                                 std::to_string(rel) + ")");
      ++r;
    }
  }
  return svd.matrixV().rightCols(n - r);
}

Mat hcat(const Mat& A, const Mat& B) {
  Mat C(A.rows() ? A.rows() : B.rows(), A.cols() + B.cols());
  if (A.cols()) C.leftCols(A.cols()) = A;
  if (B.cols()) C.rightCols(B.cols()) = B;
  return C;
}

Mat intersect(const Mat& A, const Mat& B, double rtol) {
  const int n = A.rows();
  if (A.cols() == 0 || B.cols() == 0) return Mat(n, 0);
  Mat Qa = orth(A, rtol), Qb = orth(B, rtol);
  if (Qa.cols() == 0 || Qb.cols() == 0) return Mat(n, 0);
  Mat M = hcat(Qa, -Qb);
  Mat K = null_space(M, rtol);
  if (K.cols() == 0) return Mat(n, 0);
  return orth(Qa * K.topRows(Qa.cols()), rtol);
}

Mat metric_complement(const Mat& sub, const Mat& ambient, const Mat& G,
                      double rtol) {
  const int n = ambient.rows();
  Mat Qa = orth(ambient, rtol);
  if (Qa.cols() == 0) return Mat(n, 0);
  if (sub.cols() == 0) return Qa;
  Mat K = null_space(sub.transpose() * G * Qa, rtol);
  return Qa * K;
}

double subspace_angle(const Mat& A, const Mat& B) {
  Mat Qa = orth(A), Qb = orth(B);
  if (Qa.cols() != Qb.cols()) return std::numeric_limits<double>::infinity();
  if (Qa.cols() == 0) return 0.0;
  Mat R = Qa - Qb * (Qb.transpose() * Qa);
  return Eigen::JacobiSVD<Mat>(R).singularValues()(0);
}

Vec coords_in(const Mat& A, const Vec& v) {
  if (A.cols() == 0) return Vec(0);
  return A.completeOrthogonalDecomposition().solve(v);
}

double outside_span(const Mat& A, const Vec& v) {
  double nv = v.norm();
  if (nv == 0.0) return 0.0;
  if (A.cols() == 0) return 1.0;
  Vec r = v - A * coords_in(A, v);
  return r.norm() / nv;
}

Mat expm(const Mat& A) { return A.exp(); }

Mat logm(const Mat& A) { return A.log(); }

}  // namespace hamtube
