#include "tge/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <random>
#include <stdexcept>

namespace tge {

EdgeStream generate_synthetic(const SyntheticConfig& cfg) {
  if (cfg.num_nodes < 2 || cfg.num_communities == 0 || cfg.num_communities > cfg.num_nodes)
    throw std::invalid_argument("synthetic: bad node/community counts");
  if (cfg.volumes.empty() || !(cfg.period_length > 0)) throw std::invalid_argument("synthetic: bad periods");
  if (!(cfg.drift_width > 0) || cfg.membership_rate < 0)
    throw std::invalid_argument("synthetic: bad drift parameters");

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);

  EdgeStream stream;
  stream.directedness = Directedness::kUndirected;
  for (std::size_t i = 0; i < cfg.num_nodes; ++i) stream.nodes.intern("n" + std::to_string(i));

  // Zipf-like popularity by a random global rank; round-robin initial membership.
  std::vector<NodeIndex> perm(cfg.num_nodes);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<double> popularity(cfg.num_nodes);
  std::vector<std::size_t> community(cfg.num_nodes);
  for (std::size_t r = 0; r < perm.size(); ++r) {
    popularity[perm[r]] = 1.0 / std::pow(static_cast<double>(r + 1), cfg.popularity_exponent);
    community[perm[r]] = r % cfg.num_communities;
  }

  std::vector<std::vector<NodeIndex>> members;
  std::vector<std::discrete_distribution<std::size_t>> pick_member;
  const auto rebuild_members = [&] {
    members.assign(cfg.num_communities, {});
    for (NodeIndex v = 0; v < cfg.num_nodes; ++v) members[community[v]].push_back(v);
    pick_member.clear();
    for (const auto& m : members) {
      std::vector<double> w;
      for (auto v : m) w.push_back(popularity[v]);
      if (w.empty()) w.push_back(1.0);  // never drawn: empty communities get zero activity
      pick_member.emplace_back(w.begin(), w.end());
    }
  };
  rebuild_members();

  // Log-activity of each community: Ornstein-Uhlenbeck on a grid of kKnot
  // periods, stationary N(0, activity_spread^2), linearly interpolated.
  constexpr double kKnot = 0.125;
  const std::size_t periods = cfg.volumes.size();
  const auto knots = static_cast<std::size_t>(std::ceil(static_cast<double>(periods) / kKnot)) + 2;
  std::vector<std::vector<double>> log_act(cfg.num_communities, std::vector<double>(knots));
  {
    const double rho = std::exp(-kKnot / cfg.drift_width);
    const double kick = std::sqrt(1.0 - rho * rho);
    for (auto& g : log_act) {
      g[0] = normal(rng);
      for (std::size_t k = 1; k < knots; ++k) g[k] = rho * g[k - 1] + kick * normal(rng);
      for (auto& x : g) x *= cfg.activity_spread;
    }
  }
  const auto activity = [&](double clock) {
    const double x = std::clamp(clock / kKnot, 0.0, static_cast<double>(knots - 1));
    const auto k = std::min(static_cast<std::size_t>(x), knots - 2);
    const double w = x - static_cast<double>(k);
    std::vector<double> a(cfg.num_communities);
    for (std::size_t c = 0; c < cfg.num_communities; ++c)
      a[c] = members[c].empty() ? 0.0
                                : cfg.base_activity + std::exp((1.0 - w) * log_act[c][k] + w * log_act[c][k + 1]);
    return a;
  };

  // Membership drift: at every knot each node moves to a uniformly drawn
  // community with probability 1 - exp(-membership_rate * kKnot).
  const double move_prob = 1.0 - std::exp(-cfg.membership_rate * kKnot);
  std::uniform_int_distribution<std::size_t> any_community(0, cfg.num_communities - 1);
  std::size_t knot = 0;
  const auto advance_to = [&](double clock) {
    bool moved = false;
    while (static_cast<double>(knot + 1) * kKnot <= clock) {
      ++knot;
      for (auto& c : community)
        if (unif(rng) < move_prob) {
          c = any_community(rng);
          moved = true;
        }
    }
    if (moved) rebuild_members();
  };

  const double total_volume =
      static_cast<double>(std::accumulate(cfg.volumes.begin(), cfg.volumes.end(), std::size_t{0}));
  std::size_t emitted = 0;
  for (std::size_t p = 0; p < periods; ++p) {
    std::poisson_distribution<int> burst_count(cfg.bursts_per_period);
    const int bursts = std::max(1, burst_count(rng));
    std::vector<double> centres(static_cast<std::size_t>(bursts));
    for (auto& c : centres) c = unif(rng);
    std::uniform_int_distribution<std::size_t> pick_burst(0, centres.size() - 1);

    std::vector<double> fracs(cfg.volumes[p]);
    for (auto& frac : fracs) {
      frac = centres[pick_burst(rng)] + cfg.burst_spread * normal(rng);
      frac = std::clamp(frac, 0.0, 1.0 - 1e-6);  // stays inside the period after text round-trips
    }
    std::sort(fracs.begin(), fracs.end());

    for (const double frac : fracs) {
      const double t = (static_cast<double>(p) + frac) * cfg.period_length;
      const double clock = cfg.event_clock
                               ? static_cast<double>(emitted) / total_volume * static_cast<double>(periods)
                               : static_cast<double>(p) + frac;
      advance_to(clock);
      const auto act = activity(clock);
      std::discrete_distribution<std::size_t> pick_comm(act.begin(), act.end());
      const std::size_t cu = pick_comm(rng);
      const NodeIndex u = members[cu][pick_member[cu](rng)];
      NodeIndex v = u;
      while (v == u) {
        const std::size_t cv = unif(rng) < cfg.intra_prob ? cu : pick_comm(rng);
        v = members[cv][pick_member[cv](rng)];
      }
      stream.edges.push_back({u, v, t});
      ++emitted;
    }
  }
  stream = canonicalize(std::move(stream));
  // Anchor the earliest contact at the origin so period_length buckets line up with periods.
  if (!stream.edges.empty()) stream.edges.front().t = 0.0;
  return stream;
}

std::vector<std::size_t> bursty_volumes(std::size_t periods, std::size_t mean, double sigma,
                                        std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::lognormal_distribution<double> spread(0.0, sigma);
  std::vector<double> raw(periods);
  for (auto& r : raw) r = spread(rng);
  const double total = std::accumulate(raw.begin(), raw.end(), 0.0);
  std::vector<std::size_t> out(periods);
  for (std::size_t p = 0; p < periods; ++p)
    out[p] = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(
                                          raw[p] / total * static_cast<double>(periods * mean))));
  return out;
}

void write_edge_list(std::ostream& os, const EdgeStream& stream) {
  const auto old_precision = os.precision(12);
  for (const auto& e : stream.edges)
    os << stream.nodes.id_of(e.src) << ' ' << stream.nodes.id_of(e.dst) << ' ' << e.t << '\n';
  os.precision(old_precision);
}

}  // namespace tge
