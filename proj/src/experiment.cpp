#include "tge/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "tge/series.hpp"
#include "tge/stream.hpp"

namespace tge {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Model names

namespace {

struct FamilyName {
  ModelFamily family;
  const char* name;
};
constexpr FamilyName kFamilies[] = {{ModelFamily::kSnapshot, "SG"},
                                    {ModelFamily::kTsg, "TSG"},
                                    {ModelFamily::kTrg, "TRG"},
                                    {ModelFamily::kWtrg, "WTRG"}};

}  // namespace

std::string ModelSpec::name() const {
  if (family == ModelFamily::kStatic) return "Static";
  for (const auto& f : kFamilies)
    if (f.family == family)
      return std::string(f.name) + (representation == Representation::kEpsilon ? "-eps" : "-tau");
  throw std::logic_error("unknown model family");
}

ModelSpec ModelSpec::parse(const std::string& name) {
  if (name == "Static" || name == "static") return {ModelFamily::kStatic, Representation::kNone};
  const auto dash = name.find('-');
  if (dash == std::string::npos) throw ConfigError("unknown model '" + name + "'");
  const std::string head = name.substr(0, dash);
  const std::string tail = name.substr(dash + 1);
  Representation rep;
  if (tail == "tau" || tail == "\xcf\x84") {
    rep = Representation::kTau;
  } else if (tail == "eps" || tail == "epsilon" || tail == "\xce\xb5") {
    rep = Representation::kEpsilon;
  } else {
    throw ConfigError("unknown model '" + name + "'");
  }
  for (const auto& f : kFamilies)
    if (head == f.name) return {f.family, rep};
  throw ConfigError("unknown model '" + name + "'");
}

std::vector<ModelSpec> all_models() {
  std::vector<ModelSpec> out;
  for (const auto& f : kFamilies) {
    out.push_back({f.family, Representation::kTau});
    out.push_back({f.family, Representation::kEpsilon});
  }
  out.push_back({ModelFamily::kStatic, Representation::kNone});
  return out;
}

// ---------------------------------------------------------------------------
// Config

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void reject_unknown(const json& obj, const std::string& where, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [k, v] : obj.items()) {
    if (std::none_of(keys.begin(), keys.end(), [&](const char* allowed) { return k == allowed; }))
      throw ConfigError(where + ": unknown key '" + k + "'");
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
  if (!obj.contains(key) || obj.at(key).is_null()) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

template <typename T>
void read_optional(const json& obj, const char* key, std::optional<T>& out, const std::string& where) {
  if (!obj.contains(key) || obj.at(key).is_null()) return;
  T value{};
  read(obj, key, value, where);
  out = value;
}

const char* fusion_name(FusionMode m) { return m == FusionMode::kSmooth ? "smooth" : "concat"; }

}  // namespace

std::uint64_t ExperimentConfig::sampling_seed() const { return splitmix(seed ^ 0x1ULL); }
std::uint64_t ExperimentConfig::embedding_seed() const { return splitmix(seed ^ 0x2ULL); }
std::uint64_t ExperimentConfig::split_seed() const { return splitmix(seed ^ 0x3ULL); }

void ExperimentConfig::validate() const {
  if (dataset_path.empty()) throw ConfigError("dataset.path is required");
  try {
    parse_format_name(format);
  } catch (const std::exception&) {
    throw ConfigError("dataset.format must be auto, whitespace or comma");
  }
  if (!(tau > 0.0) || !std::isfinite(tau)) throw ConfigError("protocol.tau must be positive");
  if (train_count == 0) throw ConfigError("protocol.train_count must be >= 1");
  if (models.empty()) throw ConfigError("models must not be empty");
  if (methods.empty()) throw ConfigError("methods must not be empty");
  if (!(theta >= 0.0 && theta <= 1.0)) throw ConfigError("fusion.theta must lie in [0, 1]");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("tsg.alpha must lie in (0, 1)");
  if (dim < 4) throw ConfigError("embedding.dim must be >= 4");
  if (!concat_dims.empty()) {
    if (fusion != FusionMode::kConcat) throw ConfigError("fusion.dims requires concat mode");
    std::size_t sum = 0;
    for (auto d : concat_dims) sum += d;
    if (sum != dim) throw ConfigError("fusion.dims must sum to embedding.dim");
  }
  if (!(classifier.reg_strength > 0.0)) throw ConfigError("classifier.reg_strength must be positive");
  if (!(classifier.tol > 0.0)) throw ConfigError("classifier.tol must be positive");
  if (classifier.max_iter == 0) throw ConfigError("classifier.max_iter must be >= 1");
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw ConfigError("classifier.train_fraction must lie in (0, 1)");
  if (output_format != "csv" && output_format != "json")
    throw ConfigError("output.format must be csv or json");

  std::set<std::string> names;
  for (const auto& m : models)
    if (!names.insert(m.name()).second) throw ConfigError("model listed twice: " + m.name());
  std::set<BaseMethod> seen;
  for (auto m : methods)
    if (!seen.insert(m).second)
      throw ConfigError("method listed twice: " + std::string(base_method_name(m)));
  for (const auto* list : {&gain_ours, &gain_baselines})
    for (const auto& n : *list)
      if (!names.count(ModelSpec::parse(n).name()))
        throw ConfigError("gain table names model '" + n + "' which is not configured");
}

ExperimentConfig ExperimentConfig::from_json(const json& doc, const std::filesystem::path& base_dir) {
  ExperimentConfig c;
  reject_unknown(doc, "config",
                 {"dataset", "protocol", "models", "methods", "fusion", "tsg", "wtrg", "embedding",
                  "classifier", "seed", "gain", "output"});

  if (!doc.contains("dataset")) throw ConfigError("config: missing 'dataset'");
  const auto& ds = doc.at("dataset");
  reject_unknown(ds, "dataset", {"name", "path", "format", "directed", "skip_malformed"});
  read(ds, "name", c.dataset_name, "dataset");
  std::string path;
  read(ds, "path", path, "dataset");
  c.dataset_path = path;
  if (!c.dataset_path.empty() && c.dataset_path.is_relative() && !base_dir.empty())
    c.dataset_path = base_dir / c.dataset_path;
  read(ds, "format", c.format, "dataset");
  read(ds, "directed", c.directed, "dataset");
  read(ds, "skip_malformed", c.skip_malformed, "dataset");

  if (doc.contains("protocol")) {
    const auto& p = doc.at("protocol");
    reject_unknown(p, "protocol", {"tau", "train_count", "offset"});
    read(p, "tau", c.tau, "protocol");
    read(p, "train_count", c.train_count, "protocol");
    read_optional(p, "offset", c.offset, "protocol");
  }

  if (doc.contains("models")) {
    std::vector<std::string> names;
    read(doc, "models", names, "config");
    c.models.clear();
    for (const auto& n : names) c.models.push_back(ModelSpec::parse(n));
  }
  if (doc.contains("methods")) {
    std::vector<std::string> names;
    read(doc, "methods", names, "config");
    c.methods.clear();
    for (const auto& n : names) {
      try {
        c.methods.push_back(parse_base_method(n));
      } catch (const std::exception&) {
        throw ConfigError("unknown base method '" + n + "'");
      }
    }
  }

  if (doc.contains("fusion")) {
    const auto& f = doc.at("fusion");
    reject_unknown(f, "fusion", {"mode", "theta", "dims"});
    std::string mode = fusion_name(c.fusion);
    read(f, "mode", mode, "fusion");
    if (mode == "smooth") {
      c.fusion = FusionMode::kSmooth;
    } else if (mode == "concat") {
      c.fusion = FusionMode::kConcat;
    } else {
      throw ConfigError("fusion.mode must be smooth or concat");
    }
    read(f, "theta", c.theta, "fusion");
    read(f, "dims", c.concat_dims, "fusion");
  }
  if (doc.contains("tsg")) {
    const auto& t = doc.at("tsg");
    reject_unknown(t, "tsg", {"alpha", "lag"});
    read(t, "alpha", c.alpha, "tsg");
    read_optional(t, "lag", c.tsg_lag, "tsg");
  }
  if (doc.contains("wtrg")) {
    const auto& w = doc.at("wtrg");
    reject_unknown(w, "wtrg", {"rescale_time"});
    read(w, "rescale_time", c.wtrg_rescale_time, "wtrg");
  }
  if (doc.contains("embedding")) {
    const auto& e = doc.at("embedding");
    reject_unknown(e, "embedding", {"dim"});
    read(e, "dim", c.dim, "embedding");
  }
  if (doc.contains("classifier")) {
    const auto& k = doc.at("classifier");
    reject_unknown(k, "classifier", {"reg_strength", "tol", "max_iter", "train_fraction"});
    read(k, "reg_strength", c.classifier.reg_strength, "classifier");
    read(k, "tol", c.classifier.tol, "classifier");
    read(k, "max_iter", c.classifier.max_iter, "classifier");
    read(k, "train_fraction", c.train_fraction, "classifier");
  }
  read(doc, "seed", c.seed, "config");
  if (doc.contains("gain")) {
    const auto& g = doc.at("gain");
    reject_unknown(g, "gain", {"ours", "baselines"});
    read(g, "ours", c.gain_ours, "gain");
    read(g, "baselines", c.gain_baselines, "gain");
    for (auto* list : {&c.gain_ours, &c.gain_baselines})
      for (auto& n : *list) n = ModelSpec::parse(n).name();
  }
  if (doc.contains("output")) {
    const auto& o = doc.at("output");
    reject_unknown(o, "output", {"dir", "format"});
    std::string dir = c.output_dir.string();
    read(o, "dir", dir, "output");
    c.output_dir = dir;
    if (c.output_dir.is_relative() && !base_dir.empty()) c.output_dir = base_dir / c.output_dir;
    read(o, "format", c.output_format, "output");
  }

  c.validate();
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  return from_json(doc, path.parent_path());
}

json ExperimentConfig::to_json() const {
  json doc;
  doc["dataset"] = {{"name", dataset_name},
                    {"path", dataset_path.string()},
                    {"format", format},
                    {"directed", directed},
                    {"skip_malformed", skip_malformed}};
  doc["protocol"] = {{"tau", tau}, {"train_count", train_count}, {"offset", nullptr}};
  if (offset) doc["protocol"]["offset"] = *offset;
  doc["models"] = json::array();
  for (const auto& m : models) doc["models"].push_back(m.name());
  doc["methods"] = json::array();
  for (auto m : methods) doc["methods"].push_back(std::string(base_method_name(m)));
  doc["fusion"] = {{"mode", fusion_name(fusion)}, {"theta", theta}, {"dims", concat_dims}};
  doc["tsg"] = {{"alpha", alpha}, {"lag", nullptr}};
  if (tsg_lag) doc["tsg"]["lag"] = *tsg_lag;
  doc["wtrg"] = {{"rescale_time", wtrg_rescale_time}};
  doc["embedding"] = {{"dim", dim}};
  doc["classifier"] = {{"reg_strength", classifier.reg_strength},
                       {"tol", classifier.tol},
                       {"max_iter", classifier.max_iter},
                       {"train_fraction", train_fraction}};
  doc["seed"] = seed;
  doc["gain"] = {{"ours", gain_ours}, {"baselines", gain_baselines}};
  doc["output"] = {{"dir", output_dir.string()}, {"format", output_format}};
  return doc;
}

// ---------------------------------------------------------------------------
// Runner

namespace {

using Clock = std::chrono::steady_clock;

class StageTimer {
 public:
  explicit StageTimer(std::vector<std::pair<std::string, double>>& sink) : sink_(sink) {}

  template <typename F>
  decltype(auto) time(const std::string& stage, F&& f) {
    const auto start = Clock::now();
    struct Guard {
      StageTimer& self;
      const std::string& stage;
      Clock::time_point start;
      ~Guard() { self.add(stage, std::chrono::duration<double>(Clock::now() - start).count()); }
    } guard{*this, stage, start};
    return f();
  }

  void add(const std::string& stage, double seconds) {
    for (auto& [name, total] : sink_)
      if (name == stage) {
        total += seconds;
        return;
      }
    sink_.emplace_back(stage, seconds);
  }

 private:
  std::vector<std::pair<std::string, double>>& sink_;
};

EdgeStream load_stream(const ExperimentConfig& c) {
  ParseOptions opts;
  opts.format = parse_format_name(c.format);
  opts.directedness = c.directed ? Directedness::kDirected : Directedness::kUndirected;
  opts.skip_malformed = c.skip_malformed;
  try {
    return canonicalize(parse_edge_stream(c.dataset_path, opts));
  } catch (const ParseError& e) {
    throw ConfigError(c.dataset_path.string() + ": " + e.what());
  } catch (const std::exception& e) {
    throw ConfigError("dataset " + c.dataset_path.string() + ": " + e.what());
  }
}

ProtocolSplit protocol_for(const ExperimentConfig& c, const EdgeStream& stream) {
  try {
    return align_protocol(stream, c.tau, c.train_count, c.offset);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("protocol: ") + e.what());
  }
}

/// What a model feeds the embedder: a series of graphs to fuse, or one graph.
struct ModelGraphs {
  std::vector<WeightedGraph> graphs;
  bool fused = true;
  std::vector<std::size_t> edge_counts;
};

const GraphTimeSeries& series_for(const ModelSpec& m, const ProtocolSplit& split) {
  return m.representation == Representation::kEpsilon ? split.epsilon_series : split.tau_series;
}

ModelGraphs build_model(const ModelSpec& m, const ProtocolSplit& split, const ExperimentConfig& c) {
  const auto& series = series_for(m, split);
  ModelGraphs out;
  const WtrgOptions wopts{c.wtrg_rescale_time};
  switch (m.family) {
    case ModelFamily::kSnapshot:
      out.graphs = parallel::build_per_snapshot(series, GraphModel::kSnapshot);
      out.edge_counts = edge_count_profile(series);
      break;
    case ModelFamily::kTrg:
    case ModelFamily::kWtrg:
      out.graphs = parallel::build_per_snapshot(
          series, m.family == ModelFamily::kTrg ? GraphModel::kTrg : GraphModel::kWtrg, wopts);
      for (const auto& g : out.graphs) out.edge_counts.push_back(g.num_arcs());
      break;
    case ModelFamily::kTsg: {
      const TsgParams params{c.alpha, c.tsg_lag};
      if (c.tsg_lag) {
        out.graphs = tsg_series(series, params);
      } else {
        out.graphs.push_back(build_tsg(series, params));
        out.fused = false;
      }
      out.edge_counts = edge_count_profile(series);
      break;
    }
    case ModelFamily::kStatic:
      out.graphs.push_back(static_model(split.tau_series));
      out.fused = false;
      out.edge_counts = edge_count_profile(split.tau_series);
      break;
  }
  return out;
}

struct ClassifierSplit {
  std::vector<NodePair> train_pairs, test_pairs;
  std::vector<std::uint8_t> train_labels, test_labels;
};

ClassifierSplit split_labeled(const LabeledEdgeSet& set, double fraction, std::uint64_t seed) {
  ClassifierSplit out;
  std::mt19937_64 rng(seed);
  const auto take = [&](std::vector<NodePair> pairs, std::uint8_t label) {
    std::shuffle(pairs.begin(), pairs.end(), rng);
    auto n_train = static_cast<std::size_t>(fraction * static_cast<double>(pairs.size()));
    n_train = std::clamp<std::size_t>(n_train, 1, pairs.size() - 1);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      auto& dst_pairs = i < n_train ? out.train_pairs : out.test_pairs;
      auto& dst_labels = i < n_train ? out.train_labels : out.test_labels;
      dst_pairs.push_back(pairs[i]);
      dst_labels.push_back(label);
    }
  };
  if (set.positives.size() < 2 || set.negatives.size() < 2)
    throw ConfigError("hold-out snapshot yields fewer than two positive pairs");
  take(set.positives, 1);
  take(set.negatives, 0);
  return out;
}

std::vector<std::string> default_ours(const std::vector<ModelSpec>& models) {
  std::vector<std::string> out;
  for (const auto& m : models)
    if (m.representation == Representation::kEpsilon) out.push_back(m.name());
  return out;
}

std::vector<std::string> default_baselines(const std::vector<ModelSpec>& models) {
  std::vector<std::string> out;
  for (const auto& m : models)
    if (m.representation != Representation::kEpsilon) out.push_back(m.name());
  return out;
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& config) {
  config.validate();
  const auto run_start = Clock::now();
  ExperimentReport report;
  report.config_echo = config.to_json();
  StageTimer timer(report.stage_seconds);

  const EdgeStream stream = timer.time("load", [&] { return load_stream(config); });
  const ProtocolSplit split = timer.time("protocol", [&] { return protocol_for(config, stream); });

  const auto labeled = timer.time("labels", [&] {
    try {
      return make_labeled_set(split.test_snapshot, stream.num_nodes(), stream.directedness,
                              config.sampling_seed());
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("labels: ") + e.what());
    }
  });
  const auto cls = timer.time("labels", [&] {
    return split_labeled(labeled, config.train_fraction, config.split_seed());
  });

  auto& info = report.protocol;
  info.tau_snapshots = split.total_tau_snapshots;
  info.offset = split.offset;
  info.train_count = config.train_count;
  info.epsilon = split.epsilon;
  info.epsilon_snapshots = split.epsilon_series.size();
  info.epsilon_dropped = split.epsilon_series.dropped_edges;
  info.positives = labeled.positives.size();
  info.classifier_train = cls.train_pairs.size();
  info.classifier_test = cls.test_pairs.size();
  info.num_nodes = stream.num_nodes();
  info.num_edges = stream.edges.size();

  for (const auto& model : config.models) {
    const std::string model_name = model.name();
    ModelGraphs mg;
    std::string build_error;
    timer.time("graphs", [&] {
      try {
        mg = build_model(model, split, config);
        report.edge_counts[model_name] = mg.edge_counts;
      } catch (const std::exception& e) {
        build_error = std::string("graph construction: ") + e.what();
      }
    });

    for (const auto method : config.methods) {
      const std::string method_name(base_method_name(method));
      if (!build_error.empty()) {
        report.failures.push_back({config.dataset_name, method_name, model_name, build_error});
        continue;
      }
      try {
        EmbeddingMatrix z;
        if (mg.fused) {
          std::vector<std::size_t> dims;
          if (config.fusion == FusionMode::kSmooth) {
            dims.assign(mg.graphs.size(), config.dim);
          } else if (!config.concat_dims.empty()) {
            if (config.concat_dims.size() != mg.graphs.size())
              throw std::invalid_argument("fusion.dims has " + std::to_string(config.concat_dims.size()) +
                                          " entries for " + std::to_string(mg.graphs.size()) + " snapshots");
            dims = config.concat_dims;
          } else {
            dims = concat_allocation(config.dim, mg.graphs.size());
          }
          const auto parts = timer.time("embedding", [&] {
            return embed_series(mg.graphs, method, dims, config.embedding_seed());
          });
          z = timer.time("fusion", [&] {
            return config.fusion == FusionMode::kSmooth ? fuse_smooth(parts, config.theta)
                                                        : fuse_concat(parts, config.dim);
          });
        } else {
          z = timer.time("embedding", [&] {
            return embed_graph(mg.graphs.front(), method, config.dim, config.embedding_seed());
          });
        }

        const auto m = timer.time("classifier", [&] {
          const Matrix train_x = edge_features(z, cls.train_pairs);
          const Matrix test_x = edge_features(z, cls.test_pairs);
          const auto clf = train_logistic(train_x, cls.train_labels, config.classifier);
          // Log-odds rank like probabilities but do not saturate; p > 0.5 iff log-odds > 0.
          const auto scores = clf.decision_function(test_x);
          return metrics(scores, cls.test_labels, 0.0);
        });
        report.records.push_back({config.dataset_name, method_name, model_name, m.auc, m.acc, m.f1});
      } catch (const std::exception& e) {
        report.failures.push_back({config.dataset_name, method_name, model_name, e.what()});
      }
    }
  }

  timer.time("tables", [&] {
    // Rank and gain tables only cover models with a record in every cell.
    std::set<std::string> failed;
    for (const auto& f : report.failures) failed.insert(f.model);
    std::vector<MetricRecord> complete;
    for (const auto& r : report.records)
      if (!failed.count(r.model)) complete.push_back(r);
    if (complete.empty()) return;
    report.rank = rank_models(complete);

    auto ours = config.gain_ours.empty() ? default_ours(config.models) : config.gain_ours;
    auto base = config.gain_baselines.empty() ? default_baselines(config.models) : config.gain_baselines;
    const auto drop_failed = [&](std::vector<std::string>& v) {
      v.erase(std::remove_if(v.begin(), v.end(), [&](const std::string& n) { return failed.count(n) > 0; }),
              v.end());
    };
    drop_failed(ours);
    drop_failed(base);
    if (ours.empty() || base.empty()) return;
    try {
      report.gain = mean_gain(complete, ours, base);
    } catch (const std::invalid_argument& e) {
      std::clog << "warning: gain table skipped: " << e.what() << '\n';
    }
  });

  report.total_seconds = std::chrono::duration<double>(Clock::now() - run_start).count();
  return report;
}

std::map<std::string, std::vector<std::size_t>> edge_count_profiles(const ExperimentConfig& config) {
  config.validate();
  const EdgeStream stream = load_stream(config);
  const ProtocolSplit split = protocol_for(config, stream);
  std::map<std::string, std::vector<std::size_t>> out;
  out["tau"] = edge_count_profile(partition_tau(stream, config.tau));
  out["epsilon"] = edge_count_profile(partition_epsilon(stream, split.epsilon));
  for (const auto& m : config.models) out[m.name()] = build_model(m, split, config).edge_counts;
  return out;
}

// ---------------------------------------------------------------------------
// Output

namespace {

std::string num(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string metrics_csv(const ExperimentReport& r) {
  std::ostringstream os;
  os << "dataset,method,model,auc,acc,f1\n";
  for (const auto& m : r.records)
    os << csv_field(m.dataset) << ',' << m.method << ',' << m.model << ',' << num(m.auc) << ','
       << num(m.acc) << ',' << num(m.f1) << '\n';
  return os.str();
}

std::string rank_csv(const ExperimentReport& r) {
  std::ostringstream os;
  os << "model,auc_first,acc_first,f1_first,score\n";
  if (r.rank)
    for (const auto& row : r.rank->rows)
      os << row.model << ',' << row.first_ranks[0] << ',' << row.first_ranks[1] << ','
         << row.first_ranks[2] << ',' << row.score << '\n';
  return os.str();
}

std::string gain_csv(const ExperimentReport& r) {
  std::ostringstream os;
  os << "model";
  if (r.gain)
    for (const auto& b : r.gain->baselines) os << ',' << b;
  os << ",mean\n";
  if (r.gain)
    for (std::size_t i = 0; i < r.gain->ours.size(); ++i) {
      os << r.gain->ours[i];
      for (double g : r.gain->gain[i]) os << ',' << num(g);
      os << ',' << num(r.gain->mean[i]) << '\n';
    }
  return os.str();
}

std::string failures_csv(const ExperimentReport& r) {
  std::ostringstream os;
  os << "dataset,method,model,error\n";
  for (const auto& f : r.failures)
    os << csv_field(f.dataset) << ',' << f.method << ',' << f.model << ',' << csv_field(f.message) << '\n';
  return os.str();
}

std::string profile_csv(const std::vector<std::size_t>& counts) {
  std::ostringstream os;
  os << "snapshot_index,edge_count\n";
  for (std::size_t i = 0; i < counts.size(); ++i) os << i + 1 << ',' << counts[i] << '\n';
  return os.str();
}

json protocol_json(const ProtocolInfo& p) {
  return {{"num_nodes", p.num_nodes},
          {"num_edges", p.num_edges},
          {"tau_snapshots", p.tau_snapshots},
          {"offset", p.offset},
          {"train_count", p.train_count},
          {"epsilon", p.epsilon},
          {"epsilon_snapshots", p.epsilon_snapshots},
          {"epsilon_dropped_edges", p.epsilon_dropped},
          {"positives", p.positives},
          {"classifier_train_pairs", p.classifier_train},
          {"classifier_test_pairs", p.classifier_test}};
}

json report_json(const ExperimentReport& r) {
  json doc;
  doc["metrics"] = json::array();
  for (const auto& m : r.records)
    doc["metrics"].push_back({{"dataset", m.dataset},
                              {"method", m.method},
                              {"model", m.model},
                              {"auc", m.auc},
                              {"acc", m.acc},
                              {"f1", m.f1}});
  doc["rank_table"] = json::array();
  if (r.rank)
    for (const auto& row : r.rank->rows)
      doc["rank_table"].push_back({{"model", row.model},
                                   {"auc_first", row.first_ranks[0]},
                                   {"acc_first", row.first_ranks[1]},
                                   {"f1_first", row.first_ranks[2]},
                                   {"score", row.score}});
  doc["gain_table"] = json::array();
  if (r.gain)
    for (std::size_t i = 0; i < r.gain->ours.size(); ++i) {
      json row{{"model", r.gain->ours[i]}, {"mean", r.gain->mean[i]}};
      for (std::size_t b = 0; b < r.gain->baselines.size(); ++b)
        row["vs"][r.gain->baselines[b]] = r.gain->gain[i][b];
      doc["gain_table"].push_back(row);
    }
  doc["failures"] = json::array();
  for (const auto& f : r.failures)
    doc["failures"].push_back(
        {{"dataset", f.dataset}, {"method", f.method}, {"model", f.model}, {"error", f.message}});
  doc["edge_counts"] = r.edge_counts;
  doc["protocol"] = protocol_json(r.protocol);
  doc["config"] = r.config_echo;
  return doc;
}

}  // namespace

void write_profiles(const std::map<std::string, std::vector<std::size_t>>& profiles,
                    const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& [name, counts] : profiles)
    write_file(dir / ("edge_counts_" + name + ".csv"), profile_csv(counts));
}

void emit_report(const ExperimentReport& report, const std::filesystem::path& dir,
                 const std::string& format) {
  std::filesystem::create_directories(dir);
  if (format == "json") {
    write_file(dir / "metrics.json", report_json(report).dump(2) + "\n");
  } else if (format == "csv") {
    write_file(dir / "metrics.csv", metrics_csv(report));
    write_file(dir / "rank_table.csv", rank_csv(report));
    write_file(dir / "gain_table.csv", gain_csv(report));
    write_file(dir / "failures.csv", failures_csv(report));
    write_file(dir / "protocol.json", protocol_json(report.protocol).dump(2) + "\n");
    write_profiles(report.edge_counts, dir);
  } else {
    throw std::invalid_argument("unknown output format '" + format + "'");
  }
  write_file(dir / "config_echo.json", report.config_echo.dump(2) + "\n");

  std::ostringstream t;
  t << "stage,seconds\n";
  for (const auto& [stage, secs] : report.stage_seconds) t << stage << ',' << num(secs) << '\n';
  t << "total," << num(report.total_seconds) << '\n';
  write_file(dir / "timings.csv", t.str());
}

}  // namespace tge
