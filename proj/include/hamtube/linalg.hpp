#pragma once
#include <Eigen/Dense>

namespace hamtube {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

// relative singular value threshold for rank decisions
inline constexpr double kRankTol = 1e-8;

int numerical_rank(const Mat& A, double rtol = kRankTol);

// orthonormal basis of the column space
Mat orth(const Mat& A, double rtol = kRankTol);

// orthonormal basis of ker A. With strict = true, singular values in
// (rtol, 1e3*rtol]*smax are treated as ambiguous and throw CertificationError.
Mat null_space(const Mat& A, double rtol = kRankTol, bool strict = false);

// basis of span(A) ∩ span(B)
Mat intersect(const Mat& A, const Mat& B, double rtol = kRankTol);

// vectors of span(ambient) that are G-orthogonal to span(sub)
Mat metric_complement(const Mat& sub, const Mat& ambient, const Mat& G,
                      double rtol = kRankTol);

// sine of the largest principal angle; inf when dimensions differ
double subspace_angle(const Mat& A, const Mat& B);

// columns of A concatenated with B
Mat hcat(const Mat& A, const Mat& B);

// least-squares coordinates of v in the basis given by the columns of A
Vec coords_in(const Mat& A, const Vec& v);

Mat expm(const Mat& A);
// principal logarithm; callers keep A near the identity
Mat logm(const Mat& A);

// largest absolute entry, 0 for an empty matrix
inline double max_abs(const Mat& A) {
  return A.size() ? A.cwiseAbs().maxCoeff() : 0.0;
}

// residual of v against span(A), relative to |v|
double outside_span(const Mat& A, const Vec& v);

}  // namespace hamtube
