#include <Eigen/Dense>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "tge/embed.hpp"

using namespace tge;

namespace {

Eigen::MatrixXd dense(const WeightedGraph& g) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(long(g.num_nodes()), long(g.num_nodes()));
  for (const auto& arc : g.arcs()) a(arc.src, arc.dst) = arc.weight;
  return a;
}

Eigen::MatrixXd reconstruct(const SpectralFactors& f) {
  const long n = long(f.left.rows);
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t p = 0; p < f.sigma.size(); ++p)
    for (long i = 0; i < n; ++i)
      for (long j = 0; j < n; ++j) r(i, j) += f.sigma[p] * f.left(std::size_t(i), p) * f.right(std::size_t(j), p);
  return r;
}

WeightedGraph random_graph(std::mt19937_64& rng, std::size_t n, std::size_t arcs, bool directed = true) {
  std::uniform_int_distribution<NodeIndex> node(0, NodeIndex(n - 1));
  std::uniform_real_distribution<double> w(0.1, 3.0);
  std::vector<Arc> out;
  for (std::size_t k = 0; k < arcs; ++k) {
    const NodeIndex u = node(rng), v = node(rng);
    if (u == v) continue;
    const double x = w(rng);
    out.push_back({u, v, x});
    if (!directed) out.push_back({v, u, x});
  }
  return WeightedGraph::from_arcs(n, directed ? Directedness::kDirected : Directedness::kUndirected,
                                  std::move(out));
}

WeightedGraph relabel(const WeightedGraph& g, const std::vector<NodeIndex>& perm) {
  std::vector<Arc> arcs;
  for (const auto& a : g.arcs()) arcs.push_back({perm[a.src], perm[a.dst], a.weight});
  return WeightedGraph::from_arcs(g.num_nodes(), g.directedness(), std::move(arcs));
}

EmbeddingMatrix random_embedding(std::mt19937_64& rng, std::size_t n, std::size_t d) {
  std::normal_distribution<double> g;
  EmbeddingMatrix e(n, d);
  for (auto& x : e.z.data) x = g(rng);
  return e;
}

}  // namespace

TEST_CASE("spectral: empty graph gives zeros") {
  const auto z = spectral_embed(WeightedGraph(5, Directedness::kDirected), 3, 1);
  CHECK(z.num_nodes() == 5);
  CHECK(z.dim() == 3);
  for (double x : z.z.data) CHECK(x == 0.0);
}

TEST_CASE("spectral: rank-1 two-node graph is reconstructed") {
  const double w = 2.5;
  const auto g = WeightedGraph::from_arcs(2, Directedness::kDirected, {{0, 1, w}});
  const auto f = spectral_factors(g, 1, 1);
  REQUIRE(f.sigma.size() == 1);
  const Eigen::MatrixXd a = dense(g);
  CHECK((a - reconstruct(f)).norm() / a.norm() < 1e-6);

  const auto z = spectral_embed(g, 1, 1);
  CHECK(z.row(0)[0] == doctest::Approx(std::sqrt(w)));
  CHECK(z.row(1)[0] == 0.0);
}

TEST_CASE("spectral: rank-k error matches a dense SVD") {
  std::mt19937_64 rng(2);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t n = 6 + rep % 5;
    const auto g = random_graph(rng, n, 3 * n, rep % 2 == 0);
    const Eigen::MatrixXd a = dense(g);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
    const auto& s = svd.singularValues();
    for (std::size_t k : {std::size_t{1}, std::size_t{3}}) {
      double best = 0.0;
      for (long p = long(k); p < s.size(); ++p) best += s(p) * s(p);
      best = std::sqrt(best);
      const auto f = spectral_factors(g, k, 9);
      const double ours = (a - reconstruct(f)).norm();
      CHECK(std::abs(ours - best) <= 1e-6 * a.norm());
      for (std::size_t p = 0; p < f.sigma.size(); ++p)
        CHECK(f.sigma[p] == doctest::Approx(s(long(p))).epsilon(1e-8));
    }
  }
}

TEST_CASE("spectral: sign convention, determinism and absent rows") {
  std::mt19937_64 rng(4);
  auto g = random_graph(rng, 12, 30);
  // node 11 absent
  std::vector<Arc> arcs;
  for (const auto& a : g.arcs())
    if (a.src != 11 && a.dst != 11) arcs.push_back(a);
  g = WeightedGraph::from_arcs(12, Directedness::kDirected, std::move(arcs));

  const auto z1 = spectral_embed(g, 4, 77);
  const auto z2 = spectral_embed(g, 4, 77);
  CHECK(z1 == z2);
  for (std::size_t c = 0; c < 4; ++c) {
    CHECK(z1.row(11)[c] == 0.0);
    double best = 0.0;
    for (std::size_t i = 0; i < 12; ++i)
      if (std::abs(z1.row(i)[c]) > std::abs(best)) best = z1.row(i)[c];
    CHECK(best >= 0.0);
  }
  CHECK_THROWS(spectral_embed(g, 13, 1));
}

TEST_CASE("spectral: huge weights do not overflow") {
  const auto g = WeightedGraph::from_arcs(3, Directedness::kDirected,
                                          {{0, 1, 1e200}, {1, 2, 3e199}, {2, 0, 1.0}});
  const auto z = spectral_embed(g, 2, 1);
  for (double x : z.z.data) CHECK(std::isfinite(x));
}

TEST_CASE("structural: isolated, isomorphic and star nodes") {
  // 0-1 and 2-3 are two identical undirected edges; 4 and 5 are isolated.
  const auto pairs = WeightedGraph::from_arcs(
      6, Directedness::kUndirected, {{0, 1, 2.0}, {1, 0, 2.0}, {2, 3, 2.0}, {3, 2, 2.0}});
  const auto z = structural_embed(pairs, 10);
  for (std::size_t c = 0; c < 10; ++c) {
    CHECK(z.row(0)[c] == z.row(2)[c]);
    CHECK(z.row(1)[c] == z.row(3)[c]);
    CHECK(z.row(4)[c] == 0.0);
    CHECK(z.row(5)[c] == 0.0);
  }

  std::vector<Arc> star;
  for (NodeIndex leaf = 1; leaf < 5; ++leaf) {
    star.push_back({0, leaf, 1.0});
    star.push_back({leaf, 0, 1.0});
  }
  const auto s = structural_embed(WeightedGraph::from_arcs(5, Directedness::kUndirected, star), 8);
  bool differs = false;
  for (std::size_t c = 0; c < 8; ++c) differs |= s.row(0)[c] != s.row(1)[c];
  CHECK(differs);
  CHECK_THROWS(structural_embed(pairs, 3));
}

TEST_CASE("structural: relabeling permutes rows") {
  std::mt19937_64 rng(8);
  for (int rep = 0; rep < 10; ++rep) {
    const std::size_t n = 25;
    const auto g = random_graph(rng, n, 60, rep % 2 == 0);
    std::vector<NodeIndex> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    const auto z = structural_embed(g, 16);
    const auto zp = structural_embed(relabel(g, perm), 16);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t c = 0; c < 16; ++c) CHECK(zp.row(perm[i])[c] == doctest::Approx(z.row(i)[c]).epsilon(1e-12));
  }
}

TEST_CASE("embed_series: alignment and determinism") {
  std::mt19937_64 rng(12);
  const auto g = random_graph(rng, 20, 50);
  for (auto method : {BaseMethod::kSpectral, BaseMethod::kStructural}) {
    const auto single = embed_series({g}, method, 6, 5);
    REQUIRE(single.size() == 1);
    CHECK(single[0] == embed_graph(g, method, 6, 5));
    const auto twice = embed_series({g, g}, method, 6, 5);
    CHECK(twice[0] == twice[1]);
  }
  // Node 3 only appears in the second graph.
  const auto g1 = WeightedGraph::from_arcs(4, Directedness::kDirected, {{0, 1, 1.0}, {1, 2, 1.0}});
  const auto g2 = WeightedGraph::from_arcs(4, Directedness::kDirected, {{0, 1, 1.0}, {2, 3, 1.0}});
  const auto zs = embed_series({g1, g2}, BaseMethod::kStructural, 5, 1);
  bool nonzero = false;
  for (std::size_t c = 0; c < 5; ++c) {
    CHECK(zs[0].row(3)[c] == 0.0);
    nonzero |= zs[1].row(3)[c] != 0.0;
  }
  CHECK(nonzero);
  CHECK(parse_base_method("spectral") == BaseMethod::kSpectral);
  CHECK(base_method_name(BaseMethod::kStructural) == "structural");
  CHECK_THROWS_AS(parse_base_method("node2vec"), std::invalid_argument);
}

TEST_CASE("fuse_concat allocation and layout") {
  CHECK(concat_allocation(128, 2) == std::vector<std::size_t>{64, 64});
  CHECK(concat_allocation(128, 6) == std::vector<std::size_t>{21, 21, 21, 21, 21, 23});

  std::mt19937_64 rng(1);
  const auto a = random_embedding(rng, 5, 64), b = random_embedding(rng, 5, 64);
  const auto ab = fuse_concat({a, b}, 128);
  CHECK(ab.dim() == 128);
  CHECK(ab.row(3)[0] == a.row(3)[0]);
  CHECK(ab.row(3)[64] == b.row(3)[0]);

  CHECK(fuse_concat({a}, 64) == a);

  const auto narrow = random_embedding(rng, 5, 32), wide = random_embedding(rng, 5, 96);
  const auto nw = fuse_concat({narrow, wide}, 128);
  CHECK(nw.row(2)[32] == wide.row(2)[0]);
  CHECK_THROWS_AS(fuse_concat({a, b}, 100), std::invalid_argument);
}

TEST_CASE("fuse_smooth worked values") {
  std::mt19937_64 rng(6);
  const auto z1 = random_embedding(rng, 4, 3), z2 = random_embedding(rng, 4, 3);
  CHECK(fuse_smooth({z1, z2}, 1.0) == z2);

  EmbeddingMatrix ones(2, 2);
  std::fill(ones.z.data.begin(), ones.z.data.end(), 1.0);
  for (double x : fuse_smooth({ones}, 0.8).z.data) CHECK(x == doctest::Approx(0.8));

  const auto two = fuse_smooth({z1, z2}, 0.5);
  for (std::size_t i = 0; i < two.z.data.size(); ++i)
    CHECK(two.z.data[i] == doctest::Approx(0.25 * z1.z.data[i] + 0.5 * z2.z.data[i]).epsilon(1e-15));

  for (double x : fuse_smooth({z1, z2}, 0.0).z.data) CHECK(x == 0.0);
  CHECK_THROWS_AS(fuse_smooth({}, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(fuse_smooth({z1}, 1.5), std::invalid_argument);
}

TEST_CASE("fuse_smooth matches the closed form; fusion is row-equivariant") {
  std::mt19937_64 rng(14);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t T = 1 + rep % 9, n = 7;
    const double theta = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    std::vector<EmbeddingMatrix> zs;
    std::vector<Matrix> raw;
    for (std::size_t t = 0; t < T; ++t) {
      zs.push_back(random_embedding(rng, n, 4));
      raw.push_back(zs.back().z);
    }
    const auto fused = fuse_smooth(zs, theta);
    const auto want = oracle::smooth_closed_form(raw, theta);
    for (std::size_t i = 0; i < want.data.size(); ++i) CHECK(std::abs(fused.z.data[i] - want.data[i]) <= 1e-12);

    std::vector<NodeIndex> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<EmbeddingMatrix> permuted;
    for (const auto& z : zs) {
      EmbeddingMatrix p(n, z.dim());
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < z.dim(); ++c) p.row(perm[i])[c] = z.row(i)[c];
      permuted.push_back(std::move(p));
    }
    const auto fp = fuse_smooth(permuted, theta);
    const auto concat = fuse_concat(zs, 4 * T), cp = fuse_concat(permuted, 4 * T);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t c = 0; c < 4; ++c) CHECK(fp.row(perm[i])[c] == fused.row(i)[c]);
      for (std::size_t c = 0; c < 4 * T; ++c) CHECK(cp.row(perm[i])[c] == concat.row(i)[c]);
    }
  }
}

TEST_CASE("embedding csv export") {
  NodeTable nodes;
  nodes.intern("u");
  nodes.intern("v");
  EmbeddingMatrix e(2, 2);
  e.row(1)[0] = 1.5;
  std::ostringstream os;
  write_embedding_csv(os, e, nodes);
  CHECK(os.str() == "node_id,z_1,z_2\nu,0,0\nv,1.5,0\n");
}
