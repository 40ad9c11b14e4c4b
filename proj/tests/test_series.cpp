#include <random>
#include <sstream>

#include "doctest.h"
#include "tge/series.hpp"

using namespace tge;

namespace {

EdgeStream stream_at(const std::vector<double>& ts) {
  EdgeStream s;
  s.nodes.intern("a");
  s.nodes.intern("b");
  for (double t : ts) s.edges.push_back({0, 1, t});
  return s;
}

std::vector<double> times(const Snapshot& s) {
  std::vector<double> out;
  for (const auto& e : s.edges) out.push_back(e.t);
  return out;
}

EdgeStream random_stream(std::mt19937_64& rng, std::size_t n) {
  std::exponential_distribution<double> gap(0.3);
  std::vector<double> ts;
  double t = 5.0;
  for (std::size_t i = 0; i < n; ++i) ts.push_back(t += (i % 7 == 0 ? 0.0 : gap(rng)));
  return stream_at(ts);
}

}  // namespace

TEST_CASE("tau partition of the worked example") {
  const auto s = partition_tau(stream_at({0, 30, 70, 100, 120}), 50);
  REQUIRE(s.size() == 3);
  CHECK(times(s.snapshots[0]) == std::vector<double>{0, 30});
  CHECK(times(s.snapshots[1]) == std::vector<double>{70});
  CHECK(times(s.snapshots[2]) == std::vector<double>{100, 120});
  CHECK(edge_count_profile(s) == std::vector<std::size_t>{2, 1, 2});
  CHECK(s.snapshots[2].index == 3);
}

TEST_CASE("tau partition edge cases") {
  const auto one = partition_tau(stream_at({4, 4, 4}), 1.0);
  REQUIRE(one.size() == 1);
  CHECK(one.snapshots[0].edges.size() == 3);

  CHECK(partition_tau(stream_at({}), 1.0).empty());

  // Quiet periods stay in the series.
  const auto gap = partition_tau(stream_at({0, 35}), 10);
  CHECK(edge_count_profile(gap) == std::vector<std::size_t>{1, 0, 0, 1});

  CHECK_THROWS_AS(partition_tau(stream_at({0}), 0.0), std::invalid_argument);
  CHECK_THROWS_AS(partition_tau(stream_at({2, 1}), 1.0), std::invalid_argument);
}

TEST_CASE("epsilon partition sizes and dropped remainder") {
  std::vector<double> ts(12);
  for (std::size_t i = 0; i < ts.size(); ++i) ts[i] = double(i);

  const auto ten = partition_epsilon(stream_at({0, 1, 2, 3, 4, 5, 6, 7, 8, 9}), 5);
  CHECK(edge_count_profile(ten) == std::vector<std::size_t>{5, 5});
  CHECK(ten.dropped_edges == 0);

  const auto twelve = partition_epsilon(stream_at(ts), 5);
  CHECK(twelve.size() == 2);
  CHECK(twelve.dropped_edges == 2);

  const auto three = partition_epsilon(stream_at({0, 1, 2}), 5);
  CHECK(three.empty());
  CHECK(three.dropped_edges == 3);

  CHECK_THROWS_AS(partition_epsilon(stream_at({0}), 0), std::invalid_argument);
}

TEST_CASE("recent window") {
  std::vector<double> ts;
  for (int k = 0; k < 7; ++k) ts.push_back(k * 10.0);
  const auto s = partition_tau(stream_at(ts), 10);
  REQUIRE(s.size() == 7);

  const auto six = recent_window(s, 6);
  REQUIRE(six.size() == 6);
  CHECK(six.snapshots.front().index == 2);
  CHECK(six.snapshots.back().index == 7);

  CHECK(recent_window(s, 20).size() == 7);
  const auto last = recent_window(s, 1);
  REQUIRE(last.size() == 1);
  CHECK(last.snapshots[0].index == 7);
  CHECK_THROWS_AS(recent_window(s, 0), std::invalid_argument);
}

TEST_CASE("profile export and empty series") {
  CHECK(edge_count_profile(GraphTimeSeries{}).empty());
  const auto s = partition_tau(stream_at({0, 30, 70, 100, 120}), 50);
  std::ostringstream os;
  write_profile_csv(os, s);
  CHECK(os.str() == "snapshot_index,edge_count\n1,2\n2,1\n3,2\n");
}

TEST_CASE("partitions cover the stream prefix in order") {
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 40; ++rep) {
    const auto stream = random_stream(rng, 50 + 7 * rep);

    const double tau = 0.5 + rep * 0.37;
    const auto ts = partition_tau(stream, tau);
    std::vector<TemporalEdge> joined;
    for (const auto& snap : ts.snapshots) joined.insert(joined.end(), snap.edges.begin(), snap.edges.end());
    CHECK(joined == stream.edges);
    CHECK(ts.dropped_edges == 0);

    // Time ranges tile [t0, t0 + T tau) and hold their edges.
    const double t0 = stream.edges.front().t;
    for (std::size_t k = 0; k < ts.size(); ++k) {
      const auto& snap = ts.snapshots[k];
      CHECK(snap.time_begin == doctest::Approx(t0 + double(k) * tau));
      if (k + 1 < ts.size()) CHECK(snap.time_end == ts.snapshots[k + 1].time_begin);
      for (const auto& e : snap.edges) {
        CHECK(e.t >= snap.time_begin);
        CHECK(e.t < snap.time_end);
      }
    }

    const std::size_t eps = 1 + rep % 9;
    const auto es = partition_epsilon(stream, eps);
    joined.clear();
    for (const auto& snap : es.snapshots) {
      CHECK(snap.edges.size() == eps);
      joined.insert(joined.end(), snap.edges.begin(), snap.edges.end());
    }
    CHECK(joined.size() + es.dropped_edges == stream.edges.size());
    CHECK(std::equal(joined.begin(), joined.end(), stream.edges.begin()));
  }
}
