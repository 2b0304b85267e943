#pragma once
#include <Eigen/Dense>
#include <utility>
#include <vector>

namespace ishear {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

// Orthonormal basis {E_ii, (E_ij + E_ji)/sqrt(2)} of symmetric d x d
// matrices. Index k <-> pair (i, j) with i <= j, diagonal pairs first.
struct SymBasis {
  explicit SymBasis(int d);
  int d;
  int dim;  // d (d + 1) / 2
  std::vector<std::pair<int, int>> pairs;

  Vec vec(const Mat& B) const;
  Mat mat(const Vec& v) const;
  Mat element(int k) const;
};

Mat expm(const Mat& M);

// Largest singular value.
double spectral_norm(const Mat& A);

double min_sym_eigenvalue(const Mat& S);

}  // namespace ishear
