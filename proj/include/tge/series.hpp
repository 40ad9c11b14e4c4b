#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "tge/stream.hpp"

namespace tge {

struct PartitionSpec {
  enum class Kind { kTau, kEpsilon };

  Kind kind = Kind::kTau;
  double tau = 0.0;          // time span per snapshot, kTau only
  std::size_t epsilon = 0;   // edges per snapshot, kEpsilon only

  static PartitionSpec by_time(double tau);
  static PartitionSpec by_count(std::size_t epsilon);
};

/// One graph of a time-series. Edges keep their timestamps; all of them lie in
/// [time_begin, time_end).
struct Snapshot {
  std::size_t index = 0;  // 1-based position in the originating series
  std::vector<TemporalEdge> edges;
  double time_begin = 0.0;
  double time_end = 0.0;
};

struct GraphTimeSeries {
  std::vector<Snapshot> snapshots;
  PartitionSpec spec;
  std::size_t num_nodes = 0;
  Directedness directedness = Directedness::kDirected;
  std::size_t dropped_edges = 0;  // stream edges not covered by any snapshot

  std::size_t size() const { return snapshots.size(); }
  bool empty() const { return snapshots.empty(); }
  bool directed() const { return directedness == Directedness::kDirected; }
};

/// Buckets edges by t0 + (k-1)tau <= t < t0 + k*tau, t0 = first timestamp.
/// Empty buckets between edges are kept; the series ends at the bucket holding
/// the last edge. Requires a canonical stream.
GraphTimeSeries partition_tau(const EdgeStream& stream, double tau);

/// Consecutive groups of exactly `epsilon` edges. A trailing incomplete group
/// is left out and counted in `dropped_edges`.
GraphTimeSeries partition_epsilon(const EdgeStream& stream, std::size_t epsilon);

/// Same as above over a slice of a canonical edge sequence.
GraphTimeSeries partition_epsilon(std::span<const TemporalEdge> edges, std::size_t num_nodes,
                                  Directedness directedness, std::size_t epsilon);

/// Last min(L, T) snapshots; indices are preserved.
GraphTimeSeries recent_window(const GraphTimeSeries& series, std::size_t L);

std::vector<std::size_t> edge_count_profile(const GraphTimeSeries& series);

/// `snapshot_index,edge_count` rows.
void write_profile_csv(std::ostream& os, const GraphTimeSeries& series);

}  // namespace tge
