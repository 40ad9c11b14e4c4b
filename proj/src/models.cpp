#include "tge/models.hpp"

#include <algorithm>
#include <exception>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <unordered_map>

namespace tge {

WeightedGraph WeightedGraph::from_arcs(std::size_t num_nodes, Directedness directedness,
                                       std::vector<Arc> arcs) {
  WeightedGraph g(num_nodes, directedness);
  std::sort(arcs.begin(), arcs.end(), [](const Arc& a, const Arc& b) {
    return a.src != b.src ? a.src < b.src : a.dst < b.dst;
  });
  for (const auto& a : arcs) {
    if (a.src >= num_nodes || a.dst >= num_nodes) throw std::out_of_range("arc outside node universe");
    if (!g.arcs_.empty() && g.arcs_.back().src == a.src && g.arcs_.back().dst == a.dst) {
      g.arcs_.back().weight += a.weight;
    } else {
      g.arcs_.push_back(a);
    }
  }
  std::erase_if(g.arcs_, [](const Arc& a) { return !(a.weight > 0.0); });
  return g;
}

double WeightedGraph::weight(NodeIndex src, NodeIndex dst) const {
  auto it = std::lower_bound(arcs_.begin(), arcs_.end(), Arc{src, dst, 0.0},
                             [](const Arc& a, const Arc& b) {
                               return a.src != b.src ? a.src < b.src : a.dst < b.dst;
                             });
  if (it != arcs_.end() && it->src == src && it->dst == dst) return it->weight;
  return 0.0;
}

CsrMatrix WeightedGraph::to_csr() const {
  CsrMatrix m;
  m.rows = m.cols = num_nodes_;
  m.row_ptr.assign(num_nodes_ + 1, 0);
  m.col.reserve(arcs_.size());
  m.val.reserve(arcs_.size());
  for (const auto& a : arcs_) {
    ++m.row_ptr[a.src + 1];
    m.col.push_back(a.dst);
    m.val.push_back(a.weight);
  }
  for (std::size_t r = 0; r < num_nodes_; ++r) m.row_ptr[r + 1] += m.row_ptr[r];
  return m;
}

void write_graph_csv(std::ostream& os, const WeightedGraph& g, const NodeTable* nodes) {
  os << "src,dst,weight\n";
  const auto old_precision = os.precision(17);
  for (const auto& a : g.arcs()) {
    if (nodes) {
      os << nodes->id_of(a.src) << ',' << nodes->id_of(a.dst);
    } else {
      os << a.src << ',' << a.dst;
    }
    os << ',' << a.weight << '\n';
  }
  os.precision(old_precision);
}

void TsgParams::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("TSG decay alpha must lie in (0, 1)");
}

namespace {

void add_contact(std::vector<Arc>& arcs, const TemporalEdge& e, Directedness dir, double w) {
  arcs.push_back({e.src, e.dst, w});
  if (dir == Directedness::kUndirected && e.src != e.dst) arcs.push_back({e.dst, e.src, w});
}

// Horner form of sum_{k=first}^{last} (1-alpha)^(last-k) A_k.
WeightedGraph decayed_sum(const GraphTimeSeries& series, std::size_t first, std::size_t last,
                          double alpha) {
  const double keep = 1.0 - alpha;
  std::unordered_map<std::uint64_t, double> acc;
  for (std::size_t k = first; k <= last; ++k) {
    if (k > first)
      for (auto& [key, w] : acc) w *= keep;
    const auto a = snapshot_graph(series.snapshots[k], series.num_nodes, series.directedness);
    for (const auto& arc : a.arcs())
      acc[(static_cast<std::uint64_t>(arc.src) << 32) | arc.dst] += arc.weight;
  }
  std::vector<Arc> arcs;
  arcs.reserve(acc.size());
  for (const auto& [key, w] : acc)
    arcs.push_back({static_cast<NodeIndex>(key >> 32), static_cast<NodeIndex>(key & 0xffffffffu), w});
  return WeightedGraph::from_arcs(series.num_nodes, series.directedness, std::move(arcs));
}

}  // namespace

WeightedGraph snapshot_graph(const Snapshot& snap, std::size_t num_nodes, Directedness dir) {
  std::vector<Arc> arcs;
  arcs.reserve(snap.edges.size() * (dir == Directedness::kUndirected ? 2 : 1));
  for (const auto& e : snap.edges) add_contact(arcs, e, dir, 1.0);
  return WeightedGraph::from_arcs(num_nodes, dir, std::move(arcs));
}

WeightedGraph build_tsg(const GraphTimeSeries& series, const TsgParams& params) {
  params.validate();
  if (series.empty()) throw std::invalid_argument("build_tsg: empty series");
  return decayed_sum(series, 0, series.size() - 1, params.alpha);
}

std::vector<WeightedGraph> tsg_series(const GraphTimeSeries& series, const TsgParams& params) {
  params.validate();
  if (!params.lag) throw std::invalid_argument("tsg_series: lag not set");
  const std::size_t lag = *params.lag;
  if (series.size() <= lag)
    throw std::invalid_argument("tsg_series: need more than lag=" + std::to_string(lag) + " snapshots");
  std::vector<WeightedGraph> out;
  out.reserve(series.size() - lag);
  for (std::size_t t = lag; t < series.size(); ++t)
    out.push_back(decayed_sum(series, t - lag, t, params.alpha));
  return out;
}

WeightedGraph static_model(const GraphTimeSeries& series) {
  std::vector<Arc> arcs;
  for (const auto& snap : series.snapshots)
    for (const auto& e : snap.edges) add_contact(arcs, e, series.directedness, 1.0);
  return WeightedGraph::from_arcs(series.num_nodes, series.directedness, std::move(arcs));
}

std::vector<TemporalEdge> directed_contacts(const Snapshot& snap, Directedness dir) {
  std::vector<TemporalEdge> out;
  out.reserve(snap.edges.size() * (dir == Directedness::kUndirected ? 2 : 1));
  for (const auto& e : snap.edges) {
    out.push_back(e);
    if (dir == Directedness::kUndirected && e.src != e.dst) out.push_back({e.dst, e.src, e.t});
  }
  return out;
}

WtrgResult build_wtrg_detailed(const Snapshot& snap, std::size_t num_nodes, Directedness dir,
                               const WtrgOptions& opts) {
  auto edges = directed_contacts(snap, dir);
  for (const auto& e : edges)
    if (e.src >= num_nodes || e.dst >= num_nodes) throw std::out_of_range("contact outside node universe");

  if (opts.rescale_time && !edges.empty()) {
    const auto [lo, hi] = std::minmax_element(edges.begin(), edges.end(),
                                              [](const auto& a, const auto& b) { return a.t < b.t; });
    const double t_min = lo->t;
    const double span = hi->t - lo->t;
    for (auto& e : edges) e.t = span > 0.0 ? (e.t - t_min) / span : 0.0;
  }

  // Distinct timestamps, so a reach entry can be keyed by (node, time rank).
  std::vector<double> times;
  times.reserve(edges.size());
  for (const auto& e : edges) times.push_back(e.t);
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  const auto rank_of = [&](double t) {
    return static_cast<std::uint32_t>(std::lower_bound(times.begin(), times.end(), t) - times.begin());
  };
  const auto key = [](NodeIndex node, std::uint32_t rank) {
    return (static_cast<std::uint64_t>(node) << 32) | rank;
  };

  std::stable_sort(edges.begin(), edges.end(),
                   [](const TemporalEdge& a, const TemporalEdge& b) { return a.t > b.t; });

  std::vector<std::unordered_map<std::uint64_t, double>> reach(num_nodes);
  std::vector<std::unordered_map<NodeIndex, double>> g(num_nodes);

  struct Pending {
    NodeIndex node;
    std::uint64_t key;
    double walks;
  };
  std::vector<Pending> pending;

  WtrgResult result;
  result.stats.window_edges = edges.size();

  // Contacts with one timestamp read the reach sets as they stood before the
  // group and are merged afterwards, so equal-time contacts never chain.
  std::size_t begin = 0;
  while (begin < edges.size()) {
    std::size_t end = begin;
    while (end < edges.size() && edges[end].t == edges[begin].t) ++end;
    pending.clear();
    for (std::size_t idx = begin; idx < end; ++idx) {
      const auto& [i, j, t] = edges[idx];
      for (const auto& [entry_key, walks] : reach[j]) {
        const auto k = static_cast<NodeIndex>(entry_key >> 32);
        const double t_k = times[entry_key & 0xffffffffu];
        g[i][k] += walks * std::exp(-(t_k - t));
        pending.push_back({i, entry_key, walks});
      }
      g[i][j] += 1.0;  // adjacent: zero delay
      pending.push_back({i, key(j, rank_of(t)), 1.0});
    }
    for (const auto& p : pending) reach[p.node][p.key] += p.walks;
    result.stats.reach_insertions += pending.size();
    begin = end;
  }

  std::vector<Arc> arcs;
  for (std::size_t i = 0; i < num_nodes; ++i)
    for (const auto& [k, w] : g[i]) arcs.push_back({static_cast<NodeIndex>(i), k, w});
  result.graph = WeightedGraph::from_arcs(num_nodes, Directedness::kDirected, std::move(arcs));

  result.reach.resize(num_nodes);
  for (std::size_t i = 0; i < num_nodes; ++i) {
    result.stats.max_reach_size = std::max(result.stats.max_reach_size, reach[i].size());
    auto& out = result.reach[i];
    out.reserve(reach[i].size());
    for (const auto& [entry_key, walks] : reach[i])
      out.push_back({static_cast<NodeIndex>(entry_key >> 32), times[entry_key & 0xffffffffu], walks});
    std::sort(out.begin(), out.end(), [](const ReachEntry& a, const ReachEntry& b) {
      return a.node != b.node ? a.node < b.node : a.time < b.time;
    });
  }
  return result;
}

WeightedGraph build_wtrg(const Snapshot& snap, std::size_t num_nodes, Directedness dir,
                         const WtrgOptions& opts) {
  return build_wtrg_detailed(snap, num_nodes, dir, opts).graph;
}

WeightedGraph build_trg(const Snapshot& snap, std::size_t num_nodes, Directedness dir) {
  auto edges = directed_contacts(snap, dir);
  std::stable_sort(edges.begin(), edges.end(),
                   [](const TemporalEdge& a, const TemporalEdge& b) { return a.t < b.t; });

  // Only nodes that touch a contact can start or end a walk.
  std::vector<NodeIndex> sources;
  {
    std::vector<char> seen(num_nodes, 0);
    for (const auto& e : edges) {
      if (e.src >= num_nodes || e.dst >= num_nodes) throw std::out_of_range("contact outside node universe");
      if (!seen[e.src]) {
        seen[e.src] = 1;
        sources.push_back(e.src);
      }
    }
    std::sort(sources.begin(), sources.end());
  }

  std::vector<std::vector<Arc>> per_source(sources.size());
  const auto count = static_cast<std::ptrdiff_t>(sources.size());
#pragma omp parallel
  {
    constexpr double kNever = std::numeric_limits<double>::infinity();
    std::vector<double> arrival(num_nodes, kNever);
    std::vector<char> reached(num_nodes, 0);
#pragma omp for schedule(dynamic, 8)
    for (std::ptrdiff_t s = 0; s < count; ++s) {
      const NodeIndex u = sources[static_cast<std::size_t>(s)];
      std::fill(arrival.begin(), arrival.end(), kNever);
      std::fill(reached.begin(), reached.end(), 0);
      arrival[u] = -kNever;
      // Ascending time with a strict test: an arrival at time t never enables
      // another contact at the same t.
      for (const auto& e : edges) {
        if (arrival[e.src] < e.t) {
          reached[e.dst] = 1;
          if (e.t < arrival[e.dst]) arrival[e.dst] = e.t;
        }
      }
      auto& out = per_source[static_cast<std::size_t>(s)];
      for (std::size_t v = 0; v < num_nodes; ++v)
        if (reached[v]) out.push_back({u, static_cast<NodeIndex>(v), 1.0});
    }
  }
  std::vector<Arc> arcs;
  for (auto& part : per_source) arcs.insert(arcs.end(), part.begin(), part.end());
  return WeightedGraph::from_arcs(num_nodes, Directedness::kDirected, std::move(arcs));
}

namespace {

WeightedGraph build_one(const GraphTimeSeries& series, std::size_t k, GraphModel model,
                        const WtrgOptions& opts) {
  const auto& snap = series.snapshots[k];
  switch (model) {
    case GraphModel::kSnapshot: return snapshot_graph(snap, series.num_nodes, series.directedness);
    case GraphModel::kTrg: return build_trg(snap, series.num_nodes, series.directedness);
    case GraphModel::kWtrg: return build_wtrg(snap, series.num_nodes, series.directedness, opts);
  }
  throw std::logic_error("unknown graph model");
}

}  // namespace

namespace serial {

std::vector<WeightedGraph> build_per_snapshot(const GraphTimeSeries& series, GraphModel model,
                                              const WtrgOptions& opts) {
  std::vector<WeightedGraph> out;
  out.reserve(series.size());
  for (std::size_t k = 0; k < series.size(); ++k) out.push_back(build_one(series, k, model, opts));
  return out;
}

}  // namespace serial

namespace parallel {

std::vector<WeightedGraph> build_per_snapshot(const GraphTimeSeries& series, GraphModel model,
                                              const WtrgOptions& opts) {
  std::vector<WeightedGraph> out(series.size());
  std::vector<std::exception_ptr> errors(series.size());
  const auto n = static_cast<std::ptrdiff_t>(series.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    const auto kk = static_cast<std::size_t>(k);
    try {
      out[kk] = build_one(series, kk, model, opts);
    } catch (...) {
      errors[kk] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace parallel

}  // namespace tge
