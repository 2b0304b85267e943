#include "ishear/linalg.hpp"

#include <cmath>
#include <unsupported/Eigen/MatrixFunctions>

namespace ishear {

SymBasis::SymBasis(int d_) : d(d_), dim(d_ * (d_ + 1) / 2) {
  for (int i = 0; i < d; ++i) pairs.emplace_back(i, i);
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) pairs.emplace_back(i, j);
}

Vec SymBasis::vec(const Mat& B) const {
  Vec v(dim);
  for (int k = 0; k < dim; ++k) {
    auto [i, j] = pairs[k];
    v(k) = (i == j) ? B(i, i) : (B(i, j) + B(j, i)) / std::sqrt(2.0);
  }
  return v;
}

Mat SymBasis::mat(const Vec& v) const {
  Mat B = Mat::Zero(d, d);
  for (int k = 0; k < dim; ++k) {
    auto [i, j] = pairs[k];
    if (i == j) B(i, i) = v(k);
    else B(i, j) = B(j, i) = v(k) / std::sqrt(2.0);
  }
  return B;
}

Mat SymBasis::element(int k) const {
  Vec e = Vec::Zero(dim);
  e(k) = 1.0;
  return mat(e);
}

Mat expm(const Mat& M) { return M.exp(); }

double spectral_norm(const Mat& A) {
  if (A.size() == 0) return 0.0;
  Eigen::JacobiSVD<Mat> svd(A);
  return svd.singularValues()(0);
}

double min_sym_eigenvalue(const Mat& S) {
  Mat sym = 0.5 * (S + S.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

}  // namespace ishear
