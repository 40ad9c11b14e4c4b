#include "tge/embed.hpp"

#include <algorithm>
#include <exception>
#include <cmath>
#include <iostream>
#include <numeric>
#include <ostream>
#include <random>
#include <stdexcept>

namespace tge {

void write_embedding_csv(std::ostream& os, const EmbeddingMatrix& emb, const NodeTable& nodes) {
  if (nodes.size() != emb.num_nodes()) throw std::invalid_argument("node table does not match embedding");
  os << "node_id";
  for (std::size_t c = 0; c < emb.dim(); ++c) os << ",z_" << (c + 1);
  os << '\n';
  const auto old_precision = os.precision(17);
  for (std::size_t i = 0; i < emb.num_nodes(); ++i) {
    os << nodes.id_of(static_cast<NodeIndex>(i));
    for (double v : emb.row(i)) os << ',' << v;
    os << '\n';
  }
  os.precision(old_precision);
}

namespace {

struct ActiveSubmatrix {
  CsrMatrix a;    // active rows x active cols
  CsrMatrix at;   // transpose
  std::vector<NodeIndex> row_nodes;
  std::vector<NodeIndex> col_nodes;
  double scale = 0.0;  // largest weight; a holds weights divided by it
};

ActiveSubmatrix active_submatrix(const WeightedGraph& graph) {
  const std::size_t n = graph.num_nodes();
  std::vector<std::int64_t> row_map(n, -1), col_map(n, -1);
  ActiveSubmatrix out;
  for (const auto& arc : graph.arcs()) {
    if (row_map[arc.src] < 0) row_map[arc.src] = 0;
    if (col_map[arc.dst] < 0) col_map[arc.dst] = 0;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (row_map[i] >= 0) {
      row_map[i] = static_cast<std::int64_t>(out.row_nodes.size());
      out.row_nodes.push_back(static_cast<NodeIndex>(i));
    }
    if (col_map[i] >= 0) {
      col_map[i] = static_cast<std::int64_t>(out.col_nodes.size());
      out.col_nodes.push_back(static_cast<NodeIndex>(i));
    }
  }
  for (const auto& arc : graph.arcs()) out.scale = std::max(out.scale, arc.weight);
  if (!std::isfinite(out.scale)) throw std::overflow_error("spectral: non-finite edge weight");
  std::vector<Triplet> entries;
  entries.reserve(graph.num_arcs());
  for (const auto& arc : graph.arcs())
    entries.push_back({static_cast<std::uint32_t>(row_map[arc.src]),
                       static_cast<std::uint32_t>(col_map[arc.dst]), arc.weight / out.scale});
  out.a = csr_from_triplets(out.row_nodes.size(), out.col_nodes.size(), std::move(entries));
  out.at = out.a.transpose();
  return out;
}

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

SpectralFactors spectral_factors(const WeightedGraph& graph, std::size_t k, std::uint64_t seed,
                                 const SpectralOptions& opts) {
  const std::size_t n = graph.num_nodes();
  if (k > n) throw std::invalid_argument("spectral: dimension exceeds node count");
  SpectralFactors out;
  out.left = Matrix(n, k);
  out.right = Matrix(n, k);
  out.sigma.assign(k, 0.0);
  if (graph.empty() || k == 0) return out;

  const auto sub = active_submatrix(graph);
  const std::size_t r = sub.a.rows;
  const std::size_t c = sub.a.cols;
  const std::size_t kk = std::min({k, r, c});
  const std::size_t max_steps = std::min(r, std::max(opts.max_steps, kk));

  // Lanczos on B = A A^T with full reorthogonalization. Q is column-major.
  std::vector<double> q(max_steps * r, 0.0);
  std::vector<double> diag, off;
  std::vector<double> tmp_c(c), w(r);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  const auto fresh_direction = [&](std::size_t filled, std::span<double> v) {
    for (int attempt = 0; attempt < 4; ++attempt) {
      for (auto& x : v) x = normal(rng);
      parallel::project_out(q, filled, v);
      const double nv = norm2(v);
      if (nv > 1e-8) {
        for (auto& x : v) x /= nv;
        return true;
      }
    }
    return false;
  };

  std::size_t steps = 0;
  double scale = 0.0;
  {
    std::span<double> first(q.data(), r);
    fresh_direction(0, first);
  }
  for (std::size_t j = 0; j < max_steps; ++j) {
    std::span<const double> qj(q.data() + j * r, r);
    parallel::spmv(sub.at, qj, tmp_c);
    parallel::spmv(sub.a, tmp_c, w);
    double alpha = 0.0;
    for (std::size_t i = 0; i < r; ++i) alpha += qj[i] * w[i];
    for (std::size_t i = 0; i < r; ++i) w[i] -= alpha * qj[i];
    if (j > 0 && off[j - 1] != 0.0) {
      const double* prev = q.data() + (j - 1) * r;
      for (std::size_t i = 0; i < r; ++i) w[i] -= off[j - 1] * prev[i];
    }
    parallel::project_out(q, j + 1, w);
    diag.push_back(alpha);
    steps = j + 1;
    if (j + 1 == max_steps) break;
    const double beta = norm2(w);
    scale = std::max({scale, std::abs(alpha), beta});
    std::span<double> next(q.data() + (j + 1) * r, r);
    if (beta > 1e-12 * scale) {
      off.push_back(beta);
      for (std::size_t i = 0; i < r; ++i) next[i] = w[i] / beta;
    } else {
      // Invariant subspace reached; continue in the orthogonal complement so
      // repeated singular values are still found.
      off.push_back(0.0);
      if (!fresh_direction(j + 1, next)) break;
    }
  }

  const auto ritz = tridiagonal_eigen(diag, off);
  const double sigma1 = std::sqrt(std::max(ritz.values.front(), 0.0));
  std::vector<double> u(r), v(c), av(r);
  for (std::size_t p = 0; p < kk; ++p) {
    const double theta = ritz.values[p];
    double sigma = std::sqrt(std::max(theta, 0.0));
    if (sigma <= 1e-12 * sigma1) sigma = 0.0;
    std::fill(u.begin(), u.end(), 0.0);
    for (std::size_t j = 0; j < steps; ++j) {
      const double s = ritz.vectors(j, p);
      const double* qj = q.data() + j * r;
      for (std::size_t i = 0; i < r; ++i) u[i] += s * qj[i];
    }
    const double nu = norm2(u);
    if (nu > 0) for (auto& x : u) x /= nu;
    // Largest-magnitude entry made positive (first one on ties).
    std::size_t arg = 0;
    for (std::size_t i = 1; i < r; ++i)
      if (std::abs(u[i]) > std::abs(u[arg])) arg = i;
    if (u[arg] < 0) for (auto& x : u) x = -x;

    if (sigma > 0) {
      parallel::spmv(sub.at, u, v);
      for (auto& x : v) x /= sigma;
      parallel::spmv(sub.a, v, av);
      double res = 0.0;
      for (std::size_t i = 0; i < r; ++i) res += (av[i] - sigma * u[i]) * (av[i] - sigma * u[i]);
      out.max_residual = std::max(out.max_residual, std::sqrt(res) / sigma1);
    } else {
      std::fill(v.begin(), v.end(), 0.0);
    }
    out.sigma[p] = sigma * sub.scale;
    for (std::size_t i = 0; i < r; ++i) out.left(sub.row_nodes[i], p) = u[i];
    for (std::size_t i = 0; i < c; ++i) out.right(sub.col_nodes[i], p) = v[i];
  }
  out.steps = steps;
  return out;
}

EmbeddingMatrix spectral_embed(const WeightedGraph& graph, std::size_t d, std::uint64_t seed,
                               const SpectralOptions& opts) {
  const auto f = spectral_factors(graph, d, seed, opts);
  EmbeddingMatrix emb(graph.num_nodes(), d);
  for (std::size_t p = 0; p < d; ++p) {
    const double scale = std::sqrt(f.sigma[p]);
    for (std::size_t i = 0; i < graph.num_nodes(); ++i) emb.z(i, p) = f.left(i, p) * scale;
  }
  return emb;
}

namespace {

// Order-independent sum: sorting first makes the result invariant under node
// relabeling.
double sorted_sum(std::vector<double>& values) {
  std::sort(values.begin(), values.end());
  double s = 0.0;
  for (double x : values) s += x;
  return s;
}

}  // namespace

Matrix structural_features(const WeightedGraph& graph) {
  const std::size_t n = graph.num_nodes();
  std::vector<double> in_w(n, 0.0), out_w(n, 0.0);
  std::vector<std::vector<NodeIndex>> nbrs(n);
  for (const auto& a : graph.arcs()) {
    out_w[a.src] += a.weight;
    in_w[a.dst] += a.weight;
    if (a.src != a.dst) {
      nbrs[a.src].push_back(a.dst);
      nbrs[a.dst].push_back(a.src);
    }
  }
  for (auto& list : nbrs) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
  std::vector<double> log_deg(n);
  for (std::size_t i = 0; i < n; ++i) log_deg[i] = std::log1p(in_w[i] + out_w[i]);

  Matrix f(n, kStructuralBaseFeatures);
  const auto nn = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel
  {
    std::vector<char> mark(n, 0);
    std::vector<double> vals;
#pragma omp for schedule(dynamic, 16)
    for (std::ptrdiff_t ii = 0; ii < nn; ++ii) {
      const auto u = static_cast<std::size_t>(ii);
      if (in_w[u] == 0.0 && out_w[u] == 0.0) continue;
      f(u, 0) = std::log1p(in_w[u]);
      f(u, 1) = std::log1p(out_w[u]);
      const auto& nu = nbrs[u];
      if (!nu.empty()) {
        vals.clear();
        double mx = 0.0;
        for (auto v : nu) {
          vals.push_back(log_deg[v]);
          mx = std::max(mx, log_deg[v]);
        }
        f(u, 2) = sorted_sum(vals) / static_cast<double>(nu.size());
        f(u, 3) = mx;
      }
      if (nu.size() >= 2) {
        for (auto v : nu) mark[v] = 1;
        std::size_t links = 0;
        for (auto v : nu)
          for (auto w : nbrs[v])
            if (mark[w]) ++links;
        for (auto v : nu) mark[v] = 0;
        const double pairs = static_cast<double>(nu.size()) * static_cast<double>(nu.size() - 1);
        f(u, 4) = static_cast<double>(links) / pairs;  // each link seen from both ends
      }
    }
  }
  return f;
}

EmbeddingMatrix structural_embed(const WeightedGraph& graph, std::size_t d) {
  if (d < 4) throw std::invalid_argument("structural embedding needs d >= 4");
  const std::size_t n = graph.num_nodes();
  const Matrix base = structural_features(graph);
  std::vector<char> present(n, 0);
  for (const auto& a : graph.arcs()) present[a.src] = present[a.dst] = 1;
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < n; ++i)
    if (present[i]) rows.push_back(i);

  EmbeddingMatrix emb(n, d);
  if (rows.empty()) return emb;

  Matrix scaled(n, kStructuralBaseFeatures);
  for (std::size_t f = 0; f < kStructuralBaseFeatures; ++f) {
    double lo = base(rows.front(), f), hi = lo;
    for (auto i : rows) {
      lo = std::min(lo, base(i, f));
      hi = std::max(hi, base(i, f));
    }
    for (auto i : rows) scaled(i, f) = hi > lo ? (base(i, f) - lo) / (hi - lo) : 0.0;
  }

  std::vector<double> col(rows.size()), work;
  for (std::size_t c = 0; c < d; ++c) {
    const std::size_t f = c % kStructuralBaseFeatures;
    const double power = static_cast<double>(c / kStructuralBaseFeatures + 1);
    for (std::size_t k = 0; k < rows.size(); ++k) col[k] = std::pow(scaled(rows[k], f), power);
    work = col;
    const double mean = sorted_sum(work) / static_cast<double>(rows.size());
    work.resize(rows.size());
    for (std::size_t k = 0; k < rows.size(); ++k) work[k] = (col[k] - mean) * (col[k] - mean);
    const double sd = std::sqrt(sorted_sum(work) / static_cast<double>(rows.size()));
    for (std::size_t k = 0; k < rows.size(); ++k)
      emb.z(rows[k], c) = sd > 1e-12 ? (col[k] - mean) / sd : 0.0;
  }
  return emb;
}

BaseMethod parse_base_method(std::string_view name) {
  if (name == "spectral") return BaseMethod::kSpectral;
  if (name == "structural") return BaseMethod::kStructural;
  throw std::invalid_argument("unknown base embedding method: " + std::string(name));
}

std::string_view base_method_name(BaseMethod method) {
  return method == BaseMethod::kSpectral ? "spectral" : "structural";
}

EmbeddingMatrix embed_graph(const WeightedGraph& graph, BaseMethod method, std::size_t d,
                            std::uint64_t seed) {
  switch (method) {
    case BaseMethod::kSpectral: return spectral_embed(graph, d, seed);
    case BaseMethod::kStructural: return structural_embed(graph, d);
  }
  throw std::logic_error("unknown base method");
}

std::vector<EmbeddingMatrix> embed_series(const std::vector<WeightedGraph>& graphs,
                                          BaseMethod method, const std::vector<std::size_t>& dims,
                                          std::uint64_t seed) {
  if (dims.size() != graphs.size()) throw std::invalid_argument("embed_series: one dim per graph expected");
  for (const auto& g : graphs)
    if (g.num_nodes() != graphs.front().num_nodes())
      throw std::invalid_argument("embed_series: graphs must share the node universe");
  std::vector<EmbeddingMatrix> out(graphs.size());
  std::vector<std::exception_ptr> errors(graphs.size());
  const auto count = static_cast<std::ptrdiff_t>(graphs.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t k = 0; k < count; ++k) {
    const auto kk = static_cast<std::size_t>(k);
    try {
      out[kk] = embed_graph(graphs[kk], method, dims[kk], seed);
    } catch (...) {
      errors[kk] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

std::vector<EmbeddingMatrix> embed_series(const std::vector<WeightedGraph>& graphs,
                                          BaseMethod method, std::size_t d, std::uint64_t seed) {
  return embed_series(graphs, method, std::vector<std::size_t>(graphs.size(), d), seed);
}

std::vector<std::size_t> concat_allocation(std::size_t total_dim, std::size_t count) {
  if (count == 0) throw std::invalid_argument("concat_allocation: no snapshots");
  std::vector<std::size_t> dims(count, total_dim / count);
  dims.back() += total_dim % count;
  return dims;
}

EmbeddingMatrix fuse_concat(const std::vector<EmbeddingMatrix>& mats, std::size_t total_dim) {
  if (mats.empty()) throw std::invalid_argument("fuse_concat: empty sequence");
  std::size_t sum = 0;
  for (const auto& m : mats) {
    if (m.num_nodes() != mats.front().num_nodes())
      throw std::invalid_argument("fuse_concat: row count mismatch");
    sum += m.dim();
  }
  if (sum != total_dim)
    throw std::invalid_argument("fuse_concat: dims sum to " + std::to_string(sum) + ", expected " +
                                std::to_string(total_dim));
  EmbeddingMatrix out(mats.front().num_nodes(), total_dim);
  for (std::size_t i = 0; i < out.num_nodes(); ++i) {
    std::size_t offset = 0;
    for (const auto& m : mats) {
      const auto src = m.row(i);
      std::copy(src.begin(), src.end(), out.row(i).begin() + static_cast<std::ptrdiff_t>(offset));
      offset += m.dim();
    }
  }
  return out;
}

EmbeddingMatrix fuse_smooth(const std::vector<EmbeddingMatrix>& mats, double theta) {
  if (mats.empty()) throw std::invalid_argument("fuse_smooth: empty sequence");
  if (!(theta >= 0.0 && theta <= 1.0)) throw std::invalid_argument("fuse_smooth: theta must lie in [0, 1]");
  if (theta == 0.0) std::clog << "warning: fuse_smooth with theta=0 yields an all-zero embedding\n";
  EmbeddingMatrix acc(mats.front().num_nodes(), mats.front().dim());
  for (const auto& m : mats) {
    if (m.num_nodes() != acc.num_nodes() || m.dim() != acc.dim())
      throw std::invalid_argument("fuse_smooth: shape mismatch");
    for (std::size_t i = 0; i < acc.z.data.size(); ++i)
      acc.z.data[i] = (1.0 - theta) * acc.z.data[i] + theta * m.z.data[i];
  }
  return acc;
}

}  // namespace tge
