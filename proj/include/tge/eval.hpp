#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tge/embed.hpp"
#include "tge/series.hpp"
#include "tge/stream.hpp"

namespace tge {

// ---------------------------------------------------------------------------
// Protocol

struct ProtocolSplit {
  GraphTimeSeries tau_series;      // training window of the time-based series
  GraphTimeSeries epsilon_series;  // count-based series ending at the hold-out
  Snapshot test_snapshot;
  std::size_t epsilon = 0;         // = |test snapshot edges|
  std::size_t offset = 0;          // training window starts at tau snapshot offset+1
  std::size_t total_tau_snapshots = 0;
};

/// Builds the tau-series, picks the window of `train_count` snapshots starting
/// at `offset` (default floor(T/3), clamped so the hold-out exists) and uses
/// the snapshot right after it as the shared test set. The count-based series
/// uses epsilon = |test edges| over the most recent train_count*epsilon edges
/// preceding the test snapshot.
ProtocolSplit align_protocol(const EdgeStream& stream, double tau, std::size_t train_count,
                             std::optional<std::size_t> offset = std::nullopt);

// ---------------------------------------------------------------------------
// Labeled pairs

using NodePair = std::pair<NodeIndex, NodeIndex>;

struct LabeledEdgeSet {
  std::vector<NodePair> positives;
  std::vector<NodePair> negatives;
  std::uint64_t seed = 0;
};

/// Distinct non-self pairs of the snapshot (undirected pairs as (min, max)).
std::vector<NodePair> positive_pairs(const Snapshot& test, Directedness dir);

/// Uniformly sampled distinct pairs that are unconnected (in either
/// orientation) in `test`, without self-pairs. Deterministic given seed.
std::vector<NodePair> sample_negatives(const Snapshot& test, std::size_t num_nodes,
                                       Directedness dir, std::size_t count, std::uint64_t seed);

LabeledEdgeSet make_labeled_set(const Snapshot& test, std::size_t num_nodes, Directedness dir,
                                std::uint64_t seed);

/// [z_i ; z_j]
std::vector<double> edge_embedding(const EmbeddingMatrix& z, NodeIndex i, NodeIndex j);

/// One edge_embedding row per pair.
Matrix edge_features(const EmbeddingMatrix& z, std::span<const NodePair> pairs);

// ---------------------------------------------------------------------------
// Classifier

struct LogisticOptions {
  double reg_strength = 1.0;  // L2 coefficient; larger is stronger
  double tol = 1e-4;          // on max |gradient|
  std::size_t max_iter = 1000;
};

struct LogisticModel {
  std::vector<double> weights;
  double bias = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  std::vector<double> loss_history;  // objective after each accepted step, [0] = initial

  double decision(std::span<const double> x) const;
  double probability(std::span<const double> x) const;
  std::vector<double> decision_function(const Matrix& features) const;  // log-odds
  std::vector<double> predict_proba(const Matrix& features) const;
};

LogisticModel train_logistic(const Matrix& features, std::span<const std::uint8_t> labels,
                             const LogisticOptions& opts = {});

// ---------------------------------------------------------------------------
// Metrics, ranking, gains

struct BinaryMetrics {
  double auc = 0.0;
  double acc = 0.0;
  double f1 = 0.0;
};

/// Mann-Whitney AUC with tied scores contributing one half.
double auc_score(std::span<const double> scores, std::span<const std::uint8_t> labels);

/// AUC plus accuracy and F1 of the positive class, predicting 1 when the
/// score exceeds `threshold`.
BinaryMetrics metrics(std::span<const double> scores, std::span<const std::uint8_t> labels,
                      double threshold = 0.5);

struct MetricRecord {
  std::string dataset;
  std::string method;
  std::string model;
  double auc = 0.0;
  double acc = 0.0;
  double f1 = 0.0;
};

enum class Criterion { kAuc = 0, kAcc = 1, kF1 = 2 };
inline constexpr std::array<Criterion, 3> kCriteria{Criterion::kAuc, Criterion::kAcc, Criterion::kF1};
double criterion_value(const MetricRecord& r, Criterion c);

struct RankRow {
  std::string model;
  std::array<std::size_t, 3> first_ranks{};  // AUC, ACC, F1
  std::size_t score = 0;
};

struct RankTable {
  std::vector<RankRow> rows;  // sorted by score descending, then name
  std::size_t cells = 0;      // (dataset, method) cells ranked

  const RankRow& row(const std::string& model) const;
};

/// Per criterion and (dataset, method) cell, every model attaining the maximum
/// gets a first rank; a model's score sums its first ranks. Every cell must
/// hold exactly one record per model.
RankTable rank_models(std::span<const MetricRecord> records);

struct GainTable {
  std::vector<std::string> ours;
  std::vector<std::string> baselines;
  std::vector<std::vector<double>> gain;  // [ours][baseline], percent
  std::vector<double> mean;               // per ours, mean over baselines
};

/// gain(a, b) = mean over (dataset, method) cells of 100 (AUC_a - AUC_b) / AUC_b.
GainTable mean_gain(std::span<const MetricRecord> records, const std::vector<std::string>& ours,
                    const std::vector<std::string>& baselines);

}  // namespace tge
