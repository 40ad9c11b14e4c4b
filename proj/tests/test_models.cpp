#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "tge/models.hpp"

using namespace tge;

namespace {

constexpr NodeIndex A = 0, B = 1, C = 2, D = 3;

Snapshot snap_of(std::vector<TemporalEdge> edges) {
  Snapshot s;
  s.index = 1;
  s.edges = std::move(edges);
  return s;
}

GraphTimeSeries series_of(const std::vector<std::vector<TemporalEdge>>& per_snapshot, std::size_t n,
                          Directedness dir = Directedness::kDirected) {
  GraphTimeSeries s;
  s.num_nodes = n;
  s.directedness = dir;
  for (std::size_t k = 0; k < per_snapshot.size(); ++k) {
    Snapshot snap = snap_of(per_snapshot[k]);
    snap.index = k + 1;
    s.snapshots.push_back(std::move(snap));
  }
  return s;
}

oracle::ArcMap arcs_of(const WeightedGraph& g) {
  oracle::ArcMap m;
  for (const auto& a : g.arcs()) m[{a.src, a.dst}] = a.weight;
  return m;
}

}  // namespace

TEST_CASE("weighted graph construction sums duplicates and drops non-positive totals") {
  const auto g = WeightedGraph::from_arcs(3, Directedness::kDirected,
                                          {{2, 0, 1.0}, {0, 1, 2.0}, {2, 0, 0.5}, {1, 2, 0.0}});
  REQUIRE(g.num_arcs() == 2);
  CHECK(g.arcs()[0] == Arc{0, 1, 2.0});
  CHECK(g.weight(2, 0) == 1.5);
  CHECK(g.weight(1, 2) == 0.0);
  const auto csr = g.to_csr();
  CHECK(csr.nnz() == 2);
  std::ostringstream os;
  write_graph_csv(os, g);
  CHECK(os.str() == "src,dst,weight\n0,1,2\n2,0,1.5\n");
}

TEST_CASE("snapshot graph counts multiplicity") {
  const auto g = snapshot_graph(snap_of({{A, B, 1}, {A, B, 3}}), 2, Directedness::kDirected);
  CHECK(g.num_arcs() == 1);
  CHECK(g.weight(A, B) == 2.0);

  CHECK(snapshot_graph(snap_of({}), 2, Directedness::kDirected).empty());

  const auto both = snapshot_graph(snap_of({{A, B, 1}, {B, A, 2}}), 2, Directedness::kDirected);
  CHECK(both.num_arcs() == 2);
  CHECK(both.weight(A, B) == 1.0);
  CHECK(both.weight(B, A) == 1.0);

  const auto undirected = snapshot_graph(snap_of({{A, B, 1}}), 2, Directedness::kUndirected);
  CHECK(undirected.weight(B, A) == 1.0);
}

TEST_CASE("TSG worked values") {
  const auto one = series_of({{{A, B, 0}, {B, C, 0}}}, 3);
  CHECK(build_tsg(one, {0.3, {}}) == snapshot_graph(one.snapshots[0], 3, Directedness::kDirected));

  const auto two = series_of({{{A, B, 0}}, {{A, B, 1}}}, 2);
  CHECK(build_tsg(two, {0.5, {}}).weight(A, B) == doctest::Approx(1.5).epsilon(1e-15));

  const auto three = series_of({{{A, B, 0}}, {}, {}}, 2);
  CHECK(build_tsg(three, {0.8, {}}).weight(A, B) == doctest::Approx(0.04).epsilon(1e-12));

  CHECK_THROWS_AS(build_tsg(GraphTimeSeries{}, {0.5, {}}), std::invalid_argument);
  CHECK_THROWS_AS(build_tsg(two, {1.0, {}}), std::invalid_argument);
  CHECK_THROWS_AS(build_tsg(two, {0.0, {}}), std::invalid_argument);
}

TEST_CASE("TSG time-series windows") {
  const auto s = series_of({{{A, B, 0}}, {{A, B, 1}}, {{A, B, 2}}}, 2);
  const auto lag1 = tsg_series(s, {0.5, 1});
  REQUIRE(lag1.size() == 2);
  CHECK(lag1[0].weight(A, B) == doctest::Approx(1.5));
  CHECK(lag1[1].weight(A, B) == doctest::Approx(1.5));

  const auto full = tsg_series(s, {0.5, 2});
  REQUIRE(full.size() == 1);
  CHECK(full[0] == build_tsg(s, {0.5, {}}));

  const auto lag0 = tsg_series(s, {0.5, 0});
  REQUIRE(lag0.size() == 3);
  for (std::size_t k = 0; k < 3; ++k)
    CHECK(lag0[k] == snapshot_graph(s.snapshots[k], 2, Directedness::kDirected));

  CHECK_THROWS_AS(tsg_series(s, {0.5, 3}), std::invalid_argument);
  CHECK_THROWS_AS(tsg_series(s, {0.5, {}}), std::invalid_argument);
}

TEST_CASE("TSG matches direct summation and is monotone in alpha") {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t T = 1 + rep % 8;
    std::vector<std::vector<TemporalEdge>> snaps(T);
    for (auto& s : snaps) s = oracle::random_contacts(rng, 6, 5, 10);
    const auto series = series_of(snaps, 5, rep % 2 ? Directedness::kUndirected : Directedness::kDirected);
    for (double alpha : {0.2, 0.5, 0.8}) {
      const auto want = oracle::tsg_direct(series, 0, T - 1, alpha);
      const auto got = arcs_of(build_tsg(series, {alpha, {}}));
      REQUIRE(got.size() == want.size());
      for (const auto& [arc, w] : want) CHECK(oracle::rel_err(got.at(arc), w) <= 1e-12);
    }

    // Arcs absent from the last snapshot lose weight as alpha grows.
    const auto last = oracle::adjacency(series.snapshots.back().edges, series.directed());
    double prev_alpha = 0.05;
    auto prev = arcs_of(build_tsg(series, {prev_alpha, {}}));
    for (double alpha = 0.1; alpha < 0.96; alpha += 0.05) {
      const auto cur = arcs_of(build_tsg(series, {alpha, {}}));
      for (const auto& [arc, w] : cur)
        if (!last.count(arc)) CHECK(w <= prev.at(arc));
      prev = cur;
    }
  }
}

TEST_CASE("static model is the multiplicity union") {
  const auto s = series_of({{{A, B, 0}}, {{A, B, 1}}}, 2);
  CHECK(static_model(s).weight(A, B) == 2.0);
  CHECK(static_model(series_of({}, 2)).empty());
  // alpha -> 0 limit of TSG
  const auto near = build_tsg(s, {1e-12, {}});
  CHECK(near.weight(A, B) == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("TRG worked examples") {
  const auto g = build_trg(snap_of({{A, B, 1}, {B, C, 2}}), 3, Directedness::kDirected);
  CHECK(arcs_of(g) == oracle::ArcMap{{{A, B}, 1.0}, {{A, C}, 1.0}, {{B, C}, 1.0}});

  const auto h = build_trg(snap_of({{A, B, 2}, {B, C, 1}}), 3, Directedness::kDirected);
  CHECK(arcs_of(h) == oracle::ArcMap{{{A, B}, 1.0}, {{B, C}, 1.0}});

  // Length-2 walks out of A: A->B->C and A->B->D.
  const auto f = build_trg(snap_of({{A, B, 1}, {B, C, 2}, {B, D, 3}, {C, D, 1}}), 4,
                           Directedness::kDirected);
  CHECK(f.weight(A, C) == 1.0);
  CHECK(f.weight(A, D) == 1.0);
  CHECK(f.weight(C, A) == 0.0);
}

TEST_CASE("WTRG worked examples") {
  const auto single = build_wtrg(snap_of({{A, B, 7}}), 2, Directedness::kDirected);
  CHECK(arcs_of(single) == oracle::ArcMap{{{A, B}, 1.0}});

  const auto g = build_wtrg(snap_of({{A, B, 1}, {B, C, 2}, {B, D, 4}}), 4, Directedness::kDirected);
  CHECK(g.weight(A, C) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK(g.weight(A, D) == doctest::Approx(std::exp(-3.0)).epsilon(1e-15));
  CHECK(g.weight(A, B) == 1.0);
  CHECK(g.weight(B, C) == 1.0);
  CHECK(g.weight(B, D) == 1.0);
  CHECK(g.weight(A, C) > g.weight(A, D));

  const auto rep = build_wtrg(snap_of({{A, B, 1}, {A, B, 2}, {B, C, 3}}), 3, Directedness::kDirected);
  CHECK(rep.weight(A, C) == doctest::Approx(std::exp(-2.0) + std::exp(-1.0)).epsilon(1e-15));
  CHECK(rep.weight(A, B) == 2.0);

  // Equal timestamps do not chain.
  const auto tie = build_wtrg(snap_of({{A, B, 1}, {B, C, 1}}), 3, Directedness::kDirected);
  CHECK(tie.weight(A, C) == 0.0);
}

TEST_CASE("WTRG time rescaling maps the snapshot span onto [0, 1]") {
  const Snapshot s = snap_of({{A, B, 100}, {B, C, 300}});
  CHECK(build_wtrg(s, 3, Directedness::kDirected).weight(A, C) == doctest::Approx(std::exp(-200.0)));
  WtrgOptions opts;
  opts.rescale_time = true;
  CHECK(build_wtrg(s, 3, Directedness::kDirected, opts).weight(A, C) == doctest::Approx(std::exp(-1.0)));
}

TEST_CASE("WTRG matches the walk enumerator; TRG support; walk and degree bounds") {
  std::mt19937_64 rng(17);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = 3 + rep % 5;
    const bool directed = rep % 3 != 0;
    const auto dir = directed ? Directedness::kDirected : Directedness::kUndirected;
    const auto edges = oracle::random_contacts(rng, 1 + rep % 12, n, 1 + rep % 9);
    const auto s = snap_of(edges);

    const auto want = oracle::enumerate_walks(edges, directed);
    const auto res = build_wtrg_detailed(s, n, dir);
    const auto got = arcs_of(res.graph);
    REQUIRE(got.size() == want.weight.size());
    for (const auto& [arc, w] : want.weight) CHECK(oracle::rel_err(got.at(arc), w) <= 1e-9);

    CHECK(res.graph.num_arcs() <= want.walks);
    oracle::ArcMap support;
    for (const auto& [arc, w] : got) support[arc] = 1.0;
    CHECK(arcs_of(build_trg(s, n, dir)) == support);

    const std::size_t omega = res.stats.window_edges;
    CHECK(omega == oracle::expand(edges, directed).size());
    CHECK(res.stats.max_reach_size <= omega);
    CHECK(res.stats.reach_insertions <= omega * (res.stats.max_reach_size + 1));
    CHECK(res.stats.reach_insertions <= omega * omega);
    for (const auto& entries : res.reach) CHECK(entries.size() <= omega);
  }
}

TEST_CASE("reach entries witness walks ending at the recorded time") {
  const auto res = build_wtrg_detailed(snap_of({{A, B, 1}, {B, C, 2}, {B, D, 4}}), 4,
                                       Directedness::kDirected);
  const auto& ra = res.reach[A];
  REQUIRE(ra.size() == 3);
  CHECK(ra[0].node == B);
  CHECK(ra[0].time == 1.0);
  CHECK(ra[1].node == C);
  CHECK(ra[1].time == 2.0);
  CHECK(ra[2].node == D);
  CHECK(ra[2].time == 4.0);
  CHECK(res.reach[C].empty());
}

TEST_CASE("serial and parallel per-snapshot builders agree") {
  std::mt19937_64 rng(23);
  std::vector<std::vector<TemporalEdge>> snaps(9);
  for (auto& s : snaps) s = oracle::random_contacts(rng, 40, 15, 30);
  for (auto dir : {Directedness::kDirected, Directedness::kUndirected}) {
    const auto series = series_of(snaps, 15, dir);
    for (auto model : {GraphModel::kSnapshot, GraphModel::kTrg, GraphModel::kWtrg})
      CHECK(serial::build_per_snapshot(series, model) == parallel::build_per_snapshot(series, model));
  }
}

TEST_CASE("contacts outside the universe are rejected") {
  CHECK_THROWS_AS(build_wtrg(snap_of({{0, 5, 1}}), 3, Directedness::kDirected), std::out_of_range);
  CHECK_THROWS_AS(build_trg(snap_of({{0, 5, 1}}), 3, Directedness::kDirected), std::out_of_range);
}
