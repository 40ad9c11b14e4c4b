#pragma once

// Numerical kernels used by the embedding and classifier code. Each hot loop
// has a plain serial version kept as the reference and an OpenMP version.
// The OpenMP versions either give every output element to exactly one thread
// or reduce over fixed-size blocks in a fixed order, so their results do not
// depend on the thread count.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace tge {

/// Dense row-major matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
  std::span<double> row(std::size_t i) { return {data.data() + i * cols, cols}; }
  std::span<const double> row(std::size_t i) const { return {data.data() + i * cols, cols}; }

  friend bool operator==(const Matrix&, const Matrix&) = default;
};

/// Compressed sparse rows.
struct CsrMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::size_t> row_ptr;  // size rows + 1
  std::vector<std::uint32_t> col;
  std::vector<double> val;

  std::size_t nnz() const { return val.size(); }
  CsrMatrix transpose() const;
};

struct Triplet {
  std::uint32_t row;
  std::uint32_t col;
  double val;
};

/// Builds a CSR matrix; entries with equal (row, col) are summed.
CsrMatrix csr_from_triplets(std::size_t rows, std::size_t cols, std::vector<Triplet> entries);

/// Row block size used by blocked reductions.
inline constexpr std::size_t kReduceBlock = 256;

/// Result of the L2-regularized logistic objective
///   sum_i log(1 + exp(-s_i (w.x_i + b))) + (lambda/2) |w|^2,  s_i = 2y_i - 1.
struct LogisticEval {
  double loss = 0.0;
  std::vector<double> grad_w;
  double grad_b = 0.0;
};

namespace serial {

void spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y);
/// Two passes of classical Gram-Schmidt: removes from `y` its components
/// along the first `count` columns of the column-major `basis` (each of
/// length y.size()).
void project_out(std::span<const double> basis, std::size_t count, std::span<double> y);
LogisticEval logistic_eval(const Matrix& features, std::span<const std::uint8_t> labels,
                           std::span<const double> w, double b, double lambda);

}  // namespace serial

namespace parallel {

void spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y);
void project_out(std::span<const double> basis, std::size_t count, std::span<double> y);
LogisticEval logistic_eval(const Matrix& features, std::span<const std::uint8_t> labels,
                           std::span<const double> w, double b, double lambda);

}  // namespace parallel

/// Numerically stable log(1 + exp(x)).
double log1p_exp(double x);
double sigmoid(double x);

/// Eigen-decomposition of a small symmetric matrix by cyclic Jacobi rotations.
/// Eigenvalues are returned in descending order; column k of `vectors` holds
/// the k-th eigenvector.
struct SymmetricEigen {
  std::vector<double> values;
  Matrix vectors;
};
SymmetricEigen symmetric_eigen(const Matrix& a);

/// Eigen-decomposition of the symmetric tridiagonal matrix with diagonal
/// `diag` and off-diagonal `off` (off[i] couples i and i+1) by implicit QL.
/// Same output convention as symmetric_eigen.
SymmetricEigen tridiagonal_eigen(std::vector<double> diag, std::vector<double> off);

}  // namespace tge
