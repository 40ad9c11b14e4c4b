#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "tge/kernels.hpp"
#include "tge/series.hpp"
#include "tge/stream.hpp"

namespace tge {

struct Arc {
  NodeIndex src = 0;
  NodeIndex dst = 0;
  double weight = 0.0;

  friend bool operator==(const Arc&, const Arc&) = default;
};

/// Static weighted graph over the global node universe. Arcs are unique,
/// sorted by (src, dst), and carry strictly positive weights. Undirected
/// graphs store both orientations.
class WeightedGraph {
 public:
  WeightedGraph() = default;
  WeightedGraph(std::size_t num_nodes, Directedness directedness)
      : num_nodes_(num_nodes), directedness_(directedness) {}

  /// Sums duplicate (src, dst) entries and drops non-positive totals.
  static WeightedGraph from_arcs(std::size_t num_nodes, Directedness directedness,
                                 std::vector<Arc> arcs);

  std::size_t num_nodes() const { return num_nodes_; }
  std::size_t num_arcs() const { return arcs_.size(); }
  bool directed() const { return directedness_ == Directedness::kDirected; }
  Directedness directedness() const { return directedness_; }
  const std::vector<Arc>& arcs() const { return arcs_; }
  bool empty() const { return arcs_.empty(); }

  /// 0 when the arc is absent.
  double weight(NodeIndex src, NodeIndex dst) const;

  CsrMatrix to_csr() const;

  friend bool operator==(const WeightedGraph&, const WeightedGraph&) = default;

 private:
  std::size_t num_nodes_ = 0;
  Directedness directedness_ = Directedness::kDirected;
  std::vector<Arc> arcs_;
};

/// `src,dst,weight` rows; node ids are taken from `nodes` when given.
void write_graph_csv(std::ostream& os, const WeightedGraph& g, const NodeTable* nodes = nullptr);

struct TsgParams {
  double alpha = 0.8;
  std::optional<std::size_t> lag;

  void validate() const;
};

/// Timestamps dropped; weight = number of contacts. Undirected contacts add to
/// both orientations (self-contacts once).
WeightedGraph snapshot_graph(const Snapshot& snap, std::size_t num_nodes, Directedness dir);

/// S = sum_t (1-alpha)^(T-t) A_t over the whole series.
WeightedGraph build_tsg(const GraphTimeSeries& series, const TsgParams& params);

/// S_t = sum_{k=t-lag}^{t} (1-alpha)^(t-k) A_k for t = lag+1..T.
std::vector<WeightedGraph> tsg_series(const GraphTimeSeries& series, const TsgParams& params);

/// Union of all snapshots with multiplicity weights.
WeightedGraph static_model(const GraphTimeSeries& series);

struct WtrgOptions {
  /// Map snapshot timestamps affinely onto [0, 1] before exponentiating.
  bool rescale_time = false;
};

/// Instrumentation from one reachability sweep.
struct WtrgStats {
  std::size_t window_edges = 0;        // omega: directed contacts in the window
  std::size_t max_reach_size = 0;      // max_i |ReachSet(i)|
  std::size_t reach_insertions = 0;    // ReachSet insert/accumulate operations
};

/// One ReachSet entry: node `node` reached with final-edge time `time` along
/// `walks` distinct temporal walks.
struct ReachEntry {
  NodeIndex node = 0;
  double time = 0.0;
  double walks = 0.0;
};

struct WtrgResult {
  WeightedGraph graph;
  WtrgStats stats;
  std::vector<std::vector<ReachEntry>> reach;  // per node, sorted by (node, time)
};

/// Weighted temporal reachability graph by a reverse-time sweep: for each
/// contact (i, j, t), newest first, every (k, t_k) reachable from j adds
/// exp(-(t_k - t)) per walk to g(i, k) and joins i's reach set; the contact
/// itself adds 1 to g(i, j). Contacts sharing a timestamp do not chain.
WtrgResult build_wtrg_detailed(const Snapshot& snap, std::size_t num_nodes, Directedness dir,
                               const WtrgOptions& opts = {});
WeightedGraph build_wtrg(const Snapshot& snap, std::size_t num_nodes, Directedness dir,
                         const WtrgOptions& opts = {});

/// Unweighted temporal reachability graph: arc (u, v) with weight 1 iff a
/// temporal walk from u to v exists in the snapshot. Computed by an
/// earliest-arrival sweep per source, independently of the WTRG code path.
WeightedGraph build_trg(const Snapshot& snap, std::size_t num_nodes, Directedness dir);

/// Directed contacts that the reachability models operate on (undirected
/// contacts are expanded into both orientations at the same time).
std::vector<TemporalEdge> directed_contacts(const Snapshot& snap, Directedness dir);

enum class GraphModel { kSnapshot, kTrg, kWtrg };

/// One static graph per snapshot. The serial and parallel variants return the
/// same graphs; the parallel one builds distinct snapshots concurrently.
namespace serial {
std::vector<WeightedGraph> build_per_snapshot(const GraphTimeSeries& series, GraphModel model,
                                              const WtrgOptions& opts = {});
}
namespace parallel {
std::vector<WeightedGraph> build_per_snapshot(const GraphTimeSeries& series, GraphModel model,
                                              const WtrgOptions& opts = {});
}

}  // namespace tge
