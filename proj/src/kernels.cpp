#include "tge/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace tge {

CsrMatrix csr_from_triplets(std::size_t rows, std::size_t cols, std::vector<Triplet> entries) {
  std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  CsrMatrix m;
  m.rows = rows;
  m.cols = cols;
  m.row_ptr.assign(rows + 1, 0);
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const auto& e = entries[k];
    if (e.row >= rows || e.col >= cols) throw std::out_of_range("triplet outside matrix");
    if (k > 0 && entries[k - 1].row == e.row && entries[k - 1].col == e.col) {
      m.val.back() += e.val;
      continue;
    }
    m.col.push_back(e.col);
    m.val.push_back(e.val);
    ++m.row_ptr[e.row + 1];
  }
  for (std::size_t r = 0; r < rows; ++r) m.row_ptr[r + 1] += m.row_ptr[r];
  return m;
}

CsrMatrix CsrMatrix::transpose() const {
  CsrMatrix t;
  t.rows = cols;
  t.cols = rows;
  t.row_ptr.assign(cols + 1, 0);
  for (auto c : col) ++t.row_ptr[c + 1];
  for (std::size_t r = 0; r < cols; ++r) t.row_ptr[r + 1] += t.row_ptr[r];
  t.col.resize(nnz());
  t.val.resize(nnz());
  std::vector<std::size_t> next(t.row_ptr.begin(), t.row_ptr.end() - 1);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) {
      const std::size_t dst = next[col[k]]++;
      t.col[dst] = static_cast<std::uint32_t>(r);
      t.val[dst] = val[k];
    }
  }
  return t;
}

double log1p_exp(double x) {
  if (x > 0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

namespace {

inline void spmv_row(const CsrMatrix& a, std::span<const double> x, std::span<double> y,
                     std::size_t r) {
  double s = 0.0;
  for (std::size_t k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k) s += a.val[k] * x[a.col[k]];
  y[r] = s;
}

void check_spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y) {
  if (x.size() != a.cols || y.size() != a.rows) throw std::invalid_argument("spmv: shape mismatch");
}

// Shared body of the two Gram-Schmidt variants. `Parallel` only changes which
// loops are split across threads; the arithmetic per element is identical.
template <bool Parallel>
void project_out_impl(std::span<const double> basis, std::size_t count, std::span<double> y) {
  const std::size_t m = y.size();
  if (basis.size() < count * m) throw std::invalid_argument("project_out: basis too small");
  std::vector<double> coef(count);
  const bool split = Parallel && count * m > 16384;
  for (int pass = 0; pass < 2; ++pass) {
    const auto nc = static_cast<std::ptrdiff_t>(count);
#pragma omp parallel for schedule(static) if (split)
    for (std::ptrdiff_t i = 0; i < nc; ++i) {
      const double* qi = basis.data() + static_cast<std::size_t>(i) * m;
      double s = 0.0;
      for (std::size_t r = 0; r < m; ++r) s += qi[r] * y[r];
      coef[static_cast<std::size_t>(i)] = s;
    }
    // Rows are split into fixed chunks so each element is updated by one
    // thread, in the same order as the serial loop.
    constexpr std::size_t kChunk = 1024;
    const auto chunks = static_cast<std::ptrdiff_t>((m + kChunk - 1) / kChunk);
#pragma omp parallel for schedule(static) if (split)
    for (std::ptrdiff_t c = 0; c < chunks; ++c) {
      const std::size_t lo = static_cast<std::size_t>(c) * kChunk;
      const std::size_t hi = std::min(m, lo + kChunk);
      for (std::size_t i = 0; i < count; ++i) {
        const double ci = coef[i];
        const double* qi = basis.data() + i * m;
        for (std::size_t r = lo; r < hi; ++r) y[r] -= ci * qi[r];
      }
    }
  }
}

void check_logistic(const Matrix& f, std::span<const std::uint8_t> labels,
                    std::span<const double> w) {
  if (labels.size() != f.rows || w.size() != f.cols)
    throw std::invalid_argument("logistic_eval: shape mismatch");
}

// Accumulates loss and gradient of rows [begin, end) into (loss, gw, gb).
inline void logistic_rows(const Matrix& f, std::span<const std::uint8_t> labels,
                          std::span<const double> w, double b, std::size_t begin,
                          std::size_t end, double& loss, double* gw, double& gb) {
  for (std::size_t i = begin; i < end; ++i) {
    const double* x = f.data.data() + i * f.cols;
    double z = b;
    for (std::size_t c = 0; c < f.cols; ++c) z += w[c] * x[c];
    const double s = labels[i] ? 1.0 : -1.0;
    loss += log1p_exp(-s * z);
    // d/dz log(1+exp(-s z)) = -s * sigmoid(-s z)
    const double dz = -s * sigmoid(-s * z);
    for (std::size_t c = 0; c < f.cols; ++c) gw[c] += dz * x[c];
    gb += dz;
  }
}

void add_regularizer(LogisticEval& out, std::span<const double> w, double lambda) {
  double sq = 0.0;
  for (std::size_t c = 0; c < w.size(); ++c) {
    sq += w[c] * w[c];
    out.grad_w[c] += lambda * w[c];
  }
  out.loss += 0.5 * lambda * sq;
}

}  // namespace

namespace serial {

void spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y) {
  check_spmv(a, x, y);
  for (std::size_t r = 0; r < a.rows; ++r) spmv_row(a, x, y, r);
}

void project_out(std::span<const double> basis, std::size_t count, std::span<double> y) {
  project_out_impl<false>(basis, count, y);
}

LogisticEval logistic_eval(const Matrix& features, std::span<const std::uint8_t> labels,
                           std::span<const double> w, double b, double lambda) {
  check_logistic(features, labels, w);
  LogisticEval out;
  out.grad_w.assign(features.cols, 0.0);
  logistic_rows(features, labels, w, b, 0, features.rows, out.loss, out.grad_w.data(), out.grad_b);
  add_regularizer(out, w, lambda);
  return out;
}

}  // namespace serial

namespace parallel {

void spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y) {
  check_spmv(a, x, y);
  const auto rows = static_cast<std::ptrdiff_t>(a.rows);
#pragma omp parallel for schedule(static, 256) if (a.nnz() > 20000)
  for (std::ptrdiff_t r = 0; r < rows; ++r) spmv_row(a, x, y, static_cast<std::size_t>(r));
}

void project_out(std::span<const double> basis, std::size_t count, std::span<double> y) {
  project_out_impl<true>(basis, count, y);
}

LogisticEval logistic_eval(const Matrix& features, std::span<const std::uint8_t> labels,
                           std::span<const double> w, double b, double lambda) {
  check_logistic(features, labels, w);
  const std::size_t p = features.cols;
  const std::size_t blocks = (features.rows + kReduceBlock - 1) / kReduceBlock;
  std::vector<double> part_loss(blocks, 0.0), part_gb(blocks, 0.0);
  std::vector<double> part_gw(blocks * p, 0.0);
  const auto nb = static_cast<std::ptrdiff_t>(blocks);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < nb; ++k) {
    const auto kk = static_cast<std::size_t>(k);
    const std::size_t begin = kk * kReduceBlock;
    const std::size_t end = std::min(features.rows, begin + kReduceBlock);
    logistic_rows(features, labels, w, b, begin, end, part_loss[kk], part_gw.data() + kk * p,
                  part_gb[kk]);
  }
  LogisticEval out;
  out.grad_w.assign(p, 0.0);
  for (std::size_t k = 0; k < blocks; ++k) {
    out.loss += part_loss[k];
    out.grad_b += part_gb[k];
    for (std::size_t c = 0; c < p; ++c) out.grad_w[c] += part_gw[k * p + c];
  }
  add_regularizer(out, w, lambda);
  return out;
}

}  // namespace parallel

SymmetricEigen symmetric_eigen(const Matrix& input) {
  if (input.rows != input.cols) throw std::invalid_argument("symmetric_eigen: not square");
  const std::size_t n = input.rows;
  Matrix a = input;
  Matrix v(n, n);
  for (std::size_t i = 0; i < n; ++i) v(i, i) = 1.0;

  double total = 0.0;
  for (double x : a.data) total += x * x;
  const double eps = 1e-30 * std::max(total, 1e-300);
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off <= eps) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) < 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return a(x, x) > a(y, y); });
  SymmetricEigen out;
  out.values.resize(n);
  out.vectors = Matrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]);
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, k) = v(r, order[k]);
  }
  return out;
}

SymmetricEigen tridiagonal_eigen(std::vector<double> diag, std::vector<double> off) {
  const std::size_t n = diag.size();
  if (n == 0) return {};
  if (off.size() + 1 < n) throw std::invalid_argument("tridiagonal_eigen: off-diagonal too short");
  off.resize(n, 0.0);
  off[n - 1] = 0.0;
  Matrix z(n, n);
  for (std::size_t i = 0; i < n; ++i) z(i, i) = 1.0;

  constexpr double eps = std::numeric_limits<double>::epsilon();
  double norm = 0.0;
  for (std::size_t i = 0; i < n; ++i) norm = std::max(norm, std::abs(diag[i]) + std::abs(off[i]));
  for (std::size_t l = 0; l < n; ++l) {
    for (int iter = 0;; ++iter) {
      // Find a negligible off-diagonal element to split the problem.
      std::size_t m = l;
      for (; m + 1 < n; ++m) {
        const double dd = std::abs(diag[m]) + std::abs(diag[m + 1]);
        // The norm-relative test keeps clusters of near-zero eigenvalues from stalling.
        if (std::abs(off[m]) <= eps * dd || std::abs(off[m]) <= eps * norm) break;
      }
      if (m == l) break;
      if (iter == 200) throw std::runtime_error("tridiagonal_eigen: no convergence");
      // Wilkinson-style shift from the leading 2x2 block.
      double g = (diag[l + 1] - diag[l]) / (2.0 * off[l]);
      double r = std::hypot(g, 1.0);
      g = diag[m] - diag[l] + off[l] / (g + std::copysign(r, g));
      double s = 1.0, c = 1.0, p = 0.0;
      bool deflated = false;
      for (std::size_t ii = m; ii-- > l;) {
        const double f = s * off[ii];
        const double b = c * off[ii];
        r = std::hypot(f, g);
        off[ii + 1] = r;
        if (r == 0.0) {
          diag[ii + 1] -= p;
          off[m] = 0.0;
          deflated = true;
          break;
        }
        s = f / r;
        c = g / r;
        g = diag[ii + 1] - p;
        r = (diag[ii] - g) * s + 2.0 * c * b;
        p = s * r;
        diag[ii + 1] = g + p;
        g = c * r - b;
        for (std::size_t k = 0; k < n; ++k) {
          const double zf = z(k, ii + 1);
          z(k, ii + 1) = s * z(k, ii) + c * zf;
          z(k, ii) = c * z(k, ii) - s * zf;
        }
      }
      if (deflated) continue;
      diag[l] -= p;
      off[l] = g;
      off[m] = 0.0;
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return diag[x] > diag[y]; });
  SymmetricEigen out;
  out.values.resize(n);
  out.vectors = Matrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = diag[order[k]];
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, k) = z(r, order[k]);
  }
  return out;
}

}  // namespace tge
