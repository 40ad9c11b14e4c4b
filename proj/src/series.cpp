#include "tge/series.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace tge {

PartitionSpec PartitionSpec::by_time(double tau) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw std::invalid_argument("tau must be a positive finite span");
  PartitionSpec spec;
  spec.kind = Kind::kTau;
  spec.tau = tau;
  return spec;
}

PartitionSpec PartitionSpec::by_count(std::size_t epsilon) {
  if (epsilon == 0) throw std::invalid_argument("epsilon must be >= 1");
  PartitionSpec spec;
  spec.kind = Kind::kEpsilon;
  spec.epsilon = epsilon;
  return spec;
}

GraphTimeSeries partition_tau(const EdgeStream& stream, double tau) {
  GraphTimeSeries series;
  series.spec = PartitionSpec::by_time(tau);
  series.num_nodes = stream.num_nodes();
  series.directedness = stream.directedness;
  if (stream.edges.empty()) return series;
  if (!is_canonical(stream)) throw std::invalid_argument("partition_tau needs a canonical stream");

  const double t0 = stream.edges.front().t;
  const auto bucket_of = [&](double t) {
    auto k = static_cast<std::size_t>(std::floor((t - t0) / tau));
    // Guard the floor against rounding at bucket boundaries.
    while (k > 0 && t < t0 + static_cast<double>(k) * tau) --k;
    while (t >= t0 + static_cast<double>(k + 1) * tau) ++k;
    return k;
  };
  const std::size_t count = bucket_of(stream.edges.back().t) + 1;
  series.snapshots.resize(count);
  for (std::size_t k = 0; k < count; ++k) {
    auto& snap = series.snapshots[k];
    snap.index = k + 1;
    snap.time_begin = t0 + static_cast<double>(k) * tau;
    snap.time_end = t0 + static_cast<double>(k + 1) * tau;
  }
  for (const auto& e : stream.edges) series.snapshots[bucket_of(e.t)].edges.push_back(e);
  return series;
}

GraphTimeSeries partition_epsilon(std::span<const TemporalEdge> edges, std::size_t num_nodes,
                                  Directedness directedness, std::size_t epsilon) {
  GraphTimeSeries series;
  series.spec = PartitionSpec::by_count(epsilon);
  series.num_nodes = num_nodes;
  series.directedness = directedness;
  const std::size_t complete = edges.size() / epsilon;
  series.dropped_edges = edges.size() - complete * epsilon;
  series.snapshots.reserve(complete);
  for (std::size_t k = 0; k < complete; ++k) {
    Snapshot snap;
    snap.index = k + 1;
    auto group = edges.subspan(k * epsilon, epsilon);
    snap.edges.assign(group.begin(), group.end());
    snap.time_begin = group.front().t;
    snap.time_end = std::nextafter(group.back().t, std::numeric_limits<double>::infinity());
    series.snapshots.push_back(std::move(snap));
  }
  return series;
}

GraphTimeSeries partition_epsilon(const EdgeStream& stream, std::size_t epsilon) {
  if (!stream.edges.empty() && !is_canonical(stream))
    throw std::invalid_argument("partition_epsilon needs a canonical stream");
  return partition_epsilon(stream.edges, stream.num_nodes(), stream.directedness, epsilon);
}

GraphTimeSeries recent_window(const GraphTimeSeries& series, std::size_t L) {
  if (L == 0) throw std::invalid_argument("window length must be >= 1");
  GraphTimeSeries out;
  out.spec = series.spec;
  out.num_nodes = series.num_nodes;
  out.directedness = series.directedness;
  out.dropped_edges = series.dropped_edges;
  const std::size_t keep = std::min(L, series.size());
  out.snapshots.assign(series.snapshots.end() - static_cast<std::ptrdiff_t>(keep),
                       series.snapshots.end());
  return out;
}

std::vector<std::size_t> edge_count_profile(const GraphTimeSeries& series) {
  std::vector<std::size_t> counts;
  counts.reserve(series.size());
  for (const auto& s : series.snapshots) counts.push_back(s.edges.size());
  return counts;
}

void write_profile_csv(std::ostream& os, const GraphTimeSeries& series) {
  os << "snapshot_index,edge_count\n";
  for (const auto& s : series.snapshots) os << s.index << ',' << s.edges.size() << '\n';
}

}  // namespace tge
