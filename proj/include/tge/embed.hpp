#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "tge/kernels.hpp"
#include "tge/models.hpp"

namespace tge {

/// One d-dimensional row per node of the global universe. Nodes that do not
/// appear in the source graph have all-zero rows.
struct EmbeddingMatrix {
  Matrix z;

  EmbeddingMatrix() = default;
  EmbeddingMatrix(std::size_t num_nodes, std::size_t dim) : z(num_nodes, dim) {}

  std::size_t num_nodes() const { return z.rows; }
  std::size_t dim() const { return z.cols; }
  std::span<const double> row(std::size_t i) const { return z.row(i); }
  std::span<double> row(std::size_t i) { return z.row(i); }

  friend bool operator==(const EmbeddingMatrix&, const EmbeddingMatrix&) = default;
};

/// `node_id,z_1,...,z_d` rows.
void write_embedding_csv(std::ostream& os, const EmbeddingMatrix& emb, const NodeTable& nodes);

// ---------------------------------------------------------------------------
// Spectral base method

struct SpectralOptions {
  std::size_t max_steps = 300;
  double tolerance = 1e-6;
};

/// Truncated SVD of the weighted adjacency matrix, A ~ U diag(sigma) V^T.
/// U and V are num_nodes x k with zero rows outside the active rows/columns.
struct SpectralFactors {
  Matrix left;
  Matrix right;
  std::vector<double> sigma;  // descending
  std::size_t steps = 0;
  double max_residual = 0.0;  // max_i |A v_i - sigma_i u_i| / sigma_1 over kept pairs
};

SpectralFactors spectral_factors(const WeightedGraph& graph, std::size_t k, std::uint64_t seed,
                                 const SpectralOptions& opts = {});

/// Rows are U sqrt(sigma) of the top-d factorization. Each singular direction
/// is signed so its largest-magnitude entry is positive.
EmbeddingMatrix spectral_embed(const WeightedGraph& graph, std::size_t d, std::uint64_t seed,
                               const SpectralOptions& opts = {});

// ---------------------------------------------------------------------------
// Structural (role-like) base method

inline constexpr std::size_t kStructuralBaseFeatures = 5;

/// Per-node base features, in order: log(1 + weighted in-degree),
/// log(1 + weighted out-degree), mean and max log(1 + weighted degree) of the
/// 1-hop neighbours, and the local clustering coefficient of the undirected
/// unweighted projection. Rows of absent nodes are zero.
Matrix structural_features(const WeightedGraph& graph);

/// Base features min-max scaled to [0,1] over present nodes, expanded to d
/// columns by powers (column c = feature c mod 5 raised to c div 5 + 1) and
/// standardized per column over present nodes.
EmbeddingMatrix structural_embed(const WeightedGraph& graph, std::size_t d);

// ---------------------------------------------------------------------------

enum class BaseMethod { kSpectral, kStructural };

BaseMethod parse_base_method(std::string_view name);
std::string_view base_method_name(BaseMethod method);

EmbeddingMatrix embed_graph(const WeightedGraph& graph, BaseMethod method, std::size_t d,
                            std::uint64_t seed);

/// One embedding per graph, rows aligned by global node index. `dims` gives the
/// dimension per graph (same length as graphs). Graphs are embedded
/// concurrently; results do not depend on the thread count.
std::vector<EmbeddingMatrix> embed_series(const std::vector<WeightedGraph>& graphs,
                                          BaseMethod method, const std::vector<std::size_t>& dims,
                                          std::uint64_t seed);
std::vector<EmbeddingMatrix> embed_series(const std::vector<WeightedGraph>& graphs,
                                          BaseMethod method, std::size_t d, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Temporal fusion

/// floor(total/T) dimensions per snapshot, remainder to the most recent one.
std::vector<std::size_t> concat_allocation(std::size_t total_dim, std::size_t count);

/// Row-wise concatenation in time order. The per-matrix dims must sum to
/// total_dim.
EmbeddingMatrix fuse_concat(const std::vector<EmbeddingMatrix>& mats, std::size_t total_dim);

/// Zbar_0 = 0, Zbar_t = (1 - theta) Zbar_{t-1} + theta Z_t; returns Zbar_T.
EmbeddingMatrix fuse_smooth(const std::vector<EmbeddingMatrix>& mats, double theta);

}  // namespace tge
