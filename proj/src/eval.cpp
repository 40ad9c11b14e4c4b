#include "tge/eval.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>
#include <unordered_set>

namespace tge {

ProtocolSplit align_protocol(const EdgeStream& stream, double tau, std::size_t train_count,
                             std::optional<std::size_t> offset) {
  if (train_count == 0) throw std::invalid_argument("train_count must be >= 1");
  auto full = partition_tau(stream, tau);
  const std::size_t total = full.size();
  if (total < train_count + 1)
    throw std::invalid_argument("tau partition gives " + std::to_string(total) +
                                " snapshots; need at least " + std::to_string(train_count + 1));
  const std::size_t latest = total - train_count - 1;
  std::size_t start = std::min(total / 3, latest);
  if (offset) {
    if (*offset > latest)
      throw std::invalid_argument("training offset " + std::to_string(*offset) +
                                  " leaves no hold-out snapshot");
    start = *offset;
  }

  ProtocolSplit split;
  split.offset = start;
  split.total_tau_snapshots = total;
  split.test_snapshot = full.snapshots[start + train_count];
  split.epsilon = split.test_snapshot.edges.size();
  if (split.epsilon == 0) throw std::invalid_argument("hold-out snapshot has no edges");

  split.tau_series = full;
  split.tau_series.snapshots.assign(full.snapshots.begin() + static_cast<std::ptrdiff_t>(start),
                                    full.snapshots.begin() + static_cast<std::ptrdiff_t>(start + train_count));
  split.tau_series.dropped_edges = 0;

  // Stream prefix before the hold-out; keep whole epsilon-groups ending at it.
  const double boundary = split.test_snapshot.time_begin;
  const auto prefix_end = std::lower_bound(stream.edges.begin(), stream.edges.end(), boundary,
                                           [](const TemporalEdge& e, double t) { return e.t < t; });
  const auto prefix = static_cast<std::size_t>(prefix_end - stream.edges.begin());
  const std::size_t groups = std::min(train_count, prefix / split.epsilon);
  if (groups == 0)
    throw std::invalid_argument("fewer than epsilon=" + std::to_string(split.epsilon) +
                                " edges precede the hold-out snapshot");
  const std::size_t used = groups * split.epsilon;
  std::span<const TemporalEdge> window(stream.edges.data() + (prefix - used), used);
  split.epsilon_series = partition_epsilon(window, stream.num_nodes(), stream.directedness, split.epsilon);
  split.epsilon_series.dropped_edges = prefix - used;
  return split;
}

namespace {

std::uint64_t pair_key(NodeIndex a, NodeIndex b) {
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

NodePair oriented(NodeIndex a, NodeIndex b, Directedness dir) {
  if (dir == Directedness::kUndirected && b < a) return {b, a};
  return {a, b};
}

}  // namespace

std::vector<NodePair> positive_pairs(const Snapshot& test, Directedness dir) {
  std::vector<NodePair> out;
  std::unordered_set<std::uint64_t> seen;
  for (const auto& e : test.edges) {
    if (e.src == e.dst) continue;
    const auto p = oriented(e.src, e.dst, dir);
    if (seen.insert(pair_key(p.first, p.second)).second) out.push_back(p);
  }
  return out;
}

std::vector<NodePair> sample_negatives(const Snapshot& test, std::size_t num_nodes,
                                       Directedness dir, std::size_t count, std::uint64_t seed) {
  std::unordered_set<std::uint64_t> connected;
  for (const auto& e : test.edges) {
    connected.insert(pair_key(e.src, e.dst));
    connected.insert(pair_key(e.dst, e.src));
  }
  const auto is_connected = [&](NodeIndex a, NodeIndex b) { return connected.count(pair_key(a, b)) != 0; };

  const double n = static_cast<double>(num_nodes);
  const double ordered_pairs = n * (n - 1.0);
  std::size_t connected_pairs = 0;  // ordered, non-self
  for (auto k : connected)
    if ((k >> 32) != (k & 0xffffffffu)) ++connected_pairs;
  double available = ordered_pairs - static_cast<double>(connected_pairs);
  if (dir == Directedness::kUndirected) available /= 2.0;
  if (available < static_cast<double>(count))
    throw std::invalid_argument("not enough unconnected pairs for " + std::to_string(count) + " negatives");

  std::mt19937_64 rng(seed);
  std::vector<NodePair> out;
  out.reserve(count);
  std::unordered_set<std::uint64_t> taken;

  if (static_cast<double>(count) * 2.0 <= available) {
    std::uniform_int_distribution<NodeIndex> pick(0, static_cast<NodeIndex>(num_nodes - 1));
    while (out.size() < count) {
      const NodeIndex a = pick(rng);
      const NodeIndex b = pick(rng);
      if (a == b || is_connected(a, b)) continue;
      const auto p = oriented(a, b, dir);
      if (taken.insert(pair_key(p.first, p.second)).second) out.push_back(p);
    }
    return out;
  }

  // Dense case: enumerate the complement and take a seeded sample of it.
  std::vector<NodePair> pool;
  for (NodeIndex a = 0; a < num_nodes; ++a)
    for (NodeIndex b = 0; b < num_nodes; ++b) {
      if (a == b || is_connected(a, b)) continue;
      if (dir == Directedness::kUndirected && b < a) continue;
      pool.push_back({a, b});
    }
  std::shuffle(pool.begin(), pool.end(), rng);
  pool.resize(count);
  return pool;
}

LabeledEdgeSet make_labeled_set(const Snapshot& test, std::size_t num_nodes, Directedness dir,
                                std::uint64_t seed) {
  LabeledEdgeSet set;
  set.seed = seed;
  set.positives = positive_pairs(test, dir);
  set.negatives = sample_negatives(test, num_nodes, dir, set.positives.size(), seed);
  return set;
}

std::vector<double> edge_embedding(const EmbeddingMatrix& z, NodeIndex i, NodeIndex j) {
  if (i >= z.num_nodes() || j >= z.num_nodes()) throw std::out_of_range("edge_embedding: unknown node");
  std::vector<double> out;
  out.reserve(2 * z.dim());
  const auto zi = z.row(i);
  const auto zj = z.row(j);
  out.insert(out.end(), zi.begin(), zi.end());
  out.insert(out.end(), zj.begin(), zj.end());
  return out;
}

Matrix edge_features(const EmbeddingMatrix& z, std::span<const NodePair> pairs) {
  Matrix x(pairs.size(), 2 * z.dim());
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto [i, j] = pairs[k];
    if (i >= z.num_nodes() || j >= z.num_nodes()) throw std::out_of_range("edge_features: unknown node");
    auto out = x.row(k);
    std::copy(z.row(i).begin(), z.row(i).end(), out.begin());
    std::copy(z.row(j).begin(), z.row(j).end(), out.begin() + static_cast<std::ptrdiff_t>(z.dim()));
  }
  return x;
}

double LogisticModel::decision(std::span<const double> x) const {
  double z = bias;
  for (std::size_t c = 0; c < weights.size(); ++c) z += weights[c] * x[c];
  return z;
}

double LogisticModel::probability(std::span<const double> x) const { return sigmoid(decision(x)); }

std::vector<double> LogisticModel::decision_function(const Matrix& features) const {
  if (features.cols != weights.size()) throw std::invalid_argument("decision_function: feature width mismatch");
  std::vector<double> out(features.rows);
  for (std::size_t i = 0; i < features.rows; ++i) out[i] = decision(features.row(i));
  return out;
}

std::vector<double> LogisticModel::predict_proba(const Matrix& features) const {
  auto out = decision_function(features);
  for (auto& z : out) z = sigmoid(z);
  return out;
}

LogisticModel train_logistic(const Matrix& features, std::span<const std::uint8_t> labels,
                             const LogisticOptions& opts) {
  if (labels.size() != features.rows) throw std::invalid_argument("train_logistic: label count mismatch");
  const auto positives = std::count_if(labels.begin(), labels.end(), [](auto y) { return y != 0; });
  if (positives == 0 || static_cast<std::size_t>(positives) == labels.size())
    throw std::invalid_argument("train_logistic: need examples of both classes");
  for (double v : features.data)
    if (!std::isfinite(v)) throw std::invalid_argument("train_logistic: non-finite feature");

  const std::size_t p = features.cols;
  const std::size_t dim = p + 1;  // weights then bias
  std::vector<double> x(dim, 0.0);
  const auto evaluate = [&](const std::vector<double>& params, std::vector<double>& grad) {
    const auto ev = parallel::logistic_eval(features, labels, std::span(params.data(), p), params[p],
                                            opts.reg_strength);
    grad.assign(ev.grad_w.begin(), ev.grad_w.end());
    grad.push_back(ev.grad_b);
    return ev.loss;
  };
  const auto max_abs = [](const std::vector<double>& v) {
    double m = 0.0;
    for (double e : v) m = std::max(m, std::abs(e));
    return m;
  };
  const auto dot = [](const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
  };

  LogisticModel model;
  std::vector<double> grad;
  double f = evaluate(x, grad);
  model.loss_history.push_back(f);

  // L-BFGS with Armijo backtracking; every accepted step lowers the objective.
  constexpr std::size_t kMemory = 10;
  std::deque<std::vector<double>> s_hist, y_hist;
  std::deque<double> rho_hist;
  std::vector<double> dir(dim), x_new(dim), g_new;
  std::size_t iter = 0;
  while (iter < opts.max_iter) {
    if (max_abs(grad) < opts.tol) {
      model.converged = true;
      break;
    }
    // Two-loop recursion.
    dir = grad;
    std::vector<double> alpha(s_hist.size());
    for (std::size_t k = s_hist.size(); k-- > 0;) {
      alpha[k] = rho_hist[k] * dot(s_hist[k], dir);
      for (std::size_t i = 0; i < dim; ++i) dir[i] -= alpha[k] * y_hist[k][i];
    }
    double gamma = 1.0;
    if (!s_hist.empty()) gamma = dot(s_hist.back(), y_hist.back()) / dot(y_hist.back(), y_hist.back());
    for (auto& v : dir) v *= gamma;
    for (std::size_t k = 0; k < s_hist.size(); ++k) {
      const double beta = rho_hist[k] * dot(y_hist[k], dir);
      for (std::size_t i = 0; i < dim; ++i) dir[i] += s_hist[k][i] * (alpha[k] - beta);
    }
    for (auto& v : dir) v = -v;
    double slope = dot(grad, dir);
    if (!(slope < 0.0)) {
      // Not a descent direction; fall back to steepest descent.
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      for (std::size_t i = 0; i < dim; ++i) dir[i] = -grad[i];
      slope = dot(grad, dir);
    }

    double step = 1.0;
    if (s_hist.empty()) {
      // No curvature yet: cap the step so no decision value moves by more than one.
      double reach = std::sqrt(dot(grad, grad));
      for (std::size_t r = 0; r < features.rows; ++r) {
        const auto row = features.row(r);
        double change = dir[p];
        for (std::size_t c = 0; c < p; ++c) change += dir[c] * row[c];
        reach = std::max(reach, std::abs(change));
      }
      if (reach > 1.0) step = 1.0 / reach;
    }
    double f_new = 0.0;
    bool accepted = false;
    // Backtrack until the step stops changing x; badly scaled features can
    // need hundreds of halvings.
    for (;;) {
      bool moved = false;
      for (std::size_t i = 0; i < dim; ++i) {
        x_new[i] = x[i] + step * dir[i];
        moved = moved || x_new[i] != x[i];
      }
      if (!moved) break;
      f_new = evaluate(x_new, g_new);
      if (f_new <= f + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    ++iter;
    if (!accepted) break;  // no further decrease representable

    std::vector<double> s(dim), y(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      s[i] = x_new[i] - x[i];
      y[i] = g_new[i] - grad[i];
    }
    const double sy = dot(s, y);
    if (sy > 1e-12 * dot(y, y)) {
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(y));
      rho_hist.push_back(1.0 / sy);
      if (s_hist.size() > kMemory) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }
    x.swap(x_new);
    grad.swap(g_new);
    f = f_new;
    model.loss_history.push_back(f);
  }
  if (!model.converged && max_abs(grad) < opts.tol) model.converged = true;
  model.iterations = iter;
  model.weights.assign(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(p));
  model.bias = x[p];
  return model;
}

double auc_score(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  if (scores.size() != labels.size()) throw std::invalid_argument("auc: size mismatch");
  std::size_t pos = 0;
  for (auto y : labels) pos += y ? 1 : 0;
  const std::size_t neg = labels.size() - pos;
  if (pos == 0 || neg == 0) throw std::invalid_argument("auc: need both classes");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  // Count correctly ordered (pos, neg) pairs in half units so the sum is exact.
  std::size_t half_units = 0;
  std::size_t neg_below = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    std::size_t tie_pos = 0, tie_neg = 0;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      if (labels[order[j]]) ++tie_pos; else ++tie_neg;
      ++j;
    }
    half_units += tie_pos * (2 * neg_below + tie_neg);
    neg_below += tie_neg;
    i = j;
  }
  return (static_cast<double>(half_units) / 2.0) / (static_cast<double>(pos) * static_cast<double>(neg));
}

BinaryMetrics metrics(std::span<const double> scores, std::span<const std::uint8_t> labels,
                      double threshold) {
  BinaryMetrics m;
  m.auc = auc_score(scores, labels);
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool predicted = scores[i] > threshold;
    if (labels[i]) (predicted ? tp : fn)++;
    else (predicted ? fp : tn)++;
  }
  m.acc = static_cast<double>(tp + tn) / static_cast<double>(scores.size());
  const double denom = static_cast<double>(2 * tp + fp + fn);
  m.f1 = denom > 0 ? 2.0 * static_cast<double>(tp) / denom : 0.0;
  return m;
}

double criterion_value(const MetricRecord& r, Criterion c) {
  switch (c) {
    case Criterion::kAuc: return r.auc;
    case Criterion::kAcc: return r.acc;
    case Criterion::kF1: return r.f1;
  }
  return 0.0;
}

const RankRow& RankTable::row(const std::string& model) const {
  for (const auto& r : rows)
    if (r.model == model) return r;
  throw std::out_of_range("no rank row for model " + model);
}

RankTable rank_models(std::span<const MetricRecord> records) {
  std::set<std::string> models;
  std::map<std::pair<std::string, std::string>, std::vector<const MetricRecord*>> cells;
  for (const auto& r : records) {
    models.insert(r.model);
    cells[{r.dataset, r.method}].push_back(&r);
  }
  std::map<std::string, RankRow> rows;
  for (const auto& m : models) rows[m].model = m;

  for (const auto& [cell, recs] : cells) {
    std::set<std::string> present;
    for (const auto* r : recs)
      if (!present.insert(r->model).second)
        throw std::invalid_argument("duplicate record for " + r->model + " in cell " + cell.first + "/" + cell.second);
    if (present != models)
      throw std::invalid_argument("cell " + cell.first + "/" + cell.second + " is missing models");
    for (auto c : kCriteria) {
      double best = -std::numeric_limits<double>::infinity();
      for (const auto* r : recs) best = std::max(best, criterion_value(*r, c));
      for (const auto* r : recs)
        if (criterion_value(*r, c) == best) ++rows[r->model].first_ranks[static_cast<std::size_t>(c)];
    }
  }
  RankTable table;
  table.cells = cells.size();
  for (auto& [name, row] : rows) {
    row.score = row.first_ranks[0] + row.first_ranks[1] + row.first_ranks[2];
    table.rows.push_back(row);
  }
  std::stable_sort(table.rows.begin(), table.rows.end(),
                   [](const RankRow& a, const RankRow& b) { return a.score > b.score; });
  return table;
}

GainTable mean_gain(std::span<const MetricRecord> records, const std::vector<std::string>& ours,
                    const std::vector<std::string>& baselines) {
  if (ours.empty() || baselines.empty()) throw std::invalid_argument("mean_gain: empty model list");
  std::map<std::pair<std::string, std::string>, std::map<std::string, double>> auc;
  for (const auto& r : records) auc[{r.dataset, r.method}][r.model] = r.auc;
  if (auc.empty()) throw std::invalid_argument("mean_gain: no records");

  GainTable table;
  table.ours = ours;
  table.baselines = baselines;
  for (const auto& a : ours) {
    std::vector<double> row;
    for (const auto& b : baselines) {
      double total = 0.0;
      for (const auto& [cell, values] : auc) {
        const auto ia = values.find(a);
        const auto ib = values.find(b);
        if (ia == values.end() || ib == values.end())
          throw std::invalid_argument("mean_gain: missing AUC for " + (ia == values.end() ? a : b) +
                                      " in " + cell.first + "/" + cell.second);
        if (ib->second <= 0.0) throw std::invalid_argument("mean_gain: baseline AUC is zero");
        total += 100.0 * (ia->second - ib->second) / ib->second;
      }
      row.push_back(total / static_cast<double>(auc.size()));
    }
    table.mean.push_back(std::accumulate(row.begin(), row.end(), 0.0) / static_cast<double>(row.size()));
    table.gain.push_back(std::move(row));
  }
  return table;
}

}  // namespace tge
