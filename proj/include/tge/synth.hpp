#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "tge/stream.hpp"

namespace tge {

/// Planted-community contact stream with drifting community activity.
///
/// Time is split into `volumes.size()` periods of `period_length`. Period p
/// receives volumes[p] contacts. The log-activity of each community is an
/// independent stationary Ornstein-Uhlenbeck process with correlation time
/// `drift_width` periods and standard deviation `activity_spread`, so recent
/// activity predicts the near future while long-run averages do not. Nodes
/// also change community: at rate `membership_rate` per period a node moves to
/// a uniformly drawn community, so old structure goes stale. A contact
/// picks a community by activity at its timestamp, a source inside it by a Zipf-like
/// popularity, and a destination in the same community with probability
/// `intra_prob` (otherwise from an activity-weighted random community).
/// Within a period, timestamps cluster around `bursts_per_period` Poisson
/// burst centres. With `event_clock`, community activity follows the contact
/// count instead of time: the drift position of the k-th contact is
/// k / total * periods, so bursty periods sweep through communities faster.
struct SyntheticConfig {
  std::size_t num_nodes = 400;
  std::size_t num_communities = 8;
  std::vector<std::size_t> volumes{1000, 1000, 1000, 1000, 1000, 1000, 1000};
  double period_length = 24.0;
  double drift_width = 1.5;
  double activity_spread = 1.5;
  double membership_rate = 0.4;
  double base_activity = 0.01;
  double intra_prob = 0.85;
  double popularity_exponent = 0.3;
  double bursts_per_period = 4.0;
  double burst_spread = 0.04;  // burst std-dev as a fraction of the period
  bool event_clock = false;
  std::uint64_t seed = 1;
};

/// Canonical, undirected stream starting at t = 0, with node ids "n0".."n{N-1}" interned in
/// index order (every node appears in the table even if it never fires).
EdgeStream generate_synthetic(const SyntheticConfig& config);

/// Volumes of a bursty stream: `periods` values with mean `mean` and
/// log-normal spread `sigma`, rescaled so they sum to periods*mean.
std::vector<std::size_t> bursty_volumes(std::size_t periods, std::size_t mean, double sigma,
                                        std::uint64_t seed);

/// `src dst timestamp` lines.
void write_edge_list(std::ostream& os, const EdgeStream& stream);

}  // namespace tge
