#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "tge/embed.hpp"
#include "tge/eval.hpp"
#include "tge/models.hpp"

namespace tge {

/// Invalid configuration or unreadable dataset; the run does not start.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ModelFamily { kSnapshot, kTsg, kTrg, kWtrg, kStatic };
enum class Representation { kTau, kEpsilon, kNone };

struct ModelSpec {
  ModelFamily family = ModelFamily::kSnapshot;
  Representation representation = Representation::kTau;

  /// Canonical ASCII name, e.g. "TSG-eps", "WTRG-tau", "Static".
  std::string name() const;
  /// Accepts the canonical names and the Greek-suffixed forms ("SG-ε").
  static ModelSpec parse(const std::string& name);

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

std::vector<ModelSpec> all_models();

enum class FusionMode { kSmooth, kConcat };

struct ExperimentConfig {
  std::string dataset_name = "dataset";
  std::filesystem::path dataset_path;
  std::string format = "auto";
  bool directed = false;
  bool skip_malformed = false;

  double tau = 1.0;
  std::size_t train_count = 6;
  std::optional<std::size_t> offset;

  std::vector<ModelSpec> models = all_models();
  std::vector<BaseMethod> methods{BaseMethod::kSpectral, BaseMethod::kStructural};

  FusionMode fusion = FusionMode::kSmooth;
  double theta = 0.8;
  std::vector<std::size_t> concat_dims;  // empty: floor(d/T) each, remainder to the latest

  double alpha = 0.8;
  std::optional<std::size_t> tsg_lag;
  bool wtrg_rescale_time = false;

  std::size_t dim = 128;

  LogisticOptions classifier;
  double train_fraction = 0.5;

  std::uint64_t seed = 1;

  std::vector<std::string> gain_ours;       // empty: epsilon-based models
  std::vector<std::string> gain_baselines;  // empty: tau-based models and Static

  std::filesystem::path output_dir = "tge_out";
  std::string output_format = "csv";

  void validate() const;

  /// Relative dataset and output paths resolve against `base_dir`.
  static ExperimentConfig from_json(const nlohmann::json& doc,
                                    const std::filesystem::path& base_dir = {});
  static ExperimentConfig load(const std::filesystem::path& path);
  /// Fully resolved document; from_json(to_json()) reproduces the config.
  nlohmann::json to_json() const;

  std::uint64_t sampling_seed() const;
  std::uint64_t embedding_seed() const;
  std::uint64_t split_seed() const;
};

struct CellFailure {
  std::string dataset;
  std::string method;
  std::string model;
  std::string message;
};

struct ProtocolInfo {
  std::size_t tau_snapshots = 0;
  std::size_t offset = 0;
  std::size_t train_count = 0;
  std::size_t epsilon = 0;
  std::size_t epsilon_snapshots = 0;
  std::size_t epsilon_dropped = 0;
  std::size_t positives = 0;
  std::size_t classifier_train = 0;
  std::size_t classifier_test = 0;
  std::size_t num_nodes = 0;
  std::size_t num_edges = 0;
};

struct ExperimentReport {
  std::vector<MetricRecord> records;
  std::vector<CellFailure> failures;
  std::optional<RankTable> rank;
  std::optional<GainTable> gain;
  std::map<std::string, std::vector<std::size_t>> edge_counts;  // per model name
  ProtocolInfo protocol;
  nlohmann::json config_echo;
  std::vector<std::pair<std::string, double>> stage_seconds;
  double total_seconds = 0.0;

  bool complete() const { return failures.empty(); }
};

ExperimentReport run_experiment(const ExperimentConfig& config);

/// Edge-count profiles only: full-stream tau and epsilon partitions plus the
/// per-model profiles of the training windows.
std::map<std::string, std::vector<std::size_t>> edge_count_profiles(const ExperimentConfig& config);

/// Writes the report into `dir`. "csv": metrics.csv, rank_table.csv,
/// gain_table.csv, failures.csv, edge_counts_<model>.csv, protocol.json;
/// "json": metrics.json holding every table. Both also write config_echo.json
/// and timings.csv. All files except timings.csv are byte-identical for
/// identical configs.
void emit_report(const ExperimentReport& report, const std::filesystem::path& dir,
                 const std::string& format);

void write_profiles(const std::map<std::string, std::vector<std::size_t>>& profiles,
                    const std::filesystem::path& dir);

}  // namespace tge
