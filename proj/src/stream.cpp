#include "tge/stream.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

namespace tge {

NodeIndex NodeTable::intern(std::string_view id) {
  auto it = index_.find(std::string(id));
  if (it != index_.end()) return it->second;
  const auto idx = static_cast<NodeIndex>(ids_.size());
  ids_.emplace_back(id);
  index_.emplace(ids_.back(), idx);
  return idx;
}

NodeIndex NodeTable::index_of(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) throw std::out_of_range("unknown node id: " + std::string(id));
  return it->second;
}

bool NodeTable::contains(std::string_view id) const {
  return index_.count(std::string(id)) != 0;
}

void NodeTable::write_csv(std::ostream& os) const {
  os << "index,node_id\n";
  for (std::size_t i = 0; i < ids_.size(); ++i) os << i << ',' << ids_[i] << '\n';
}

EdgeListFormat parse_format_name(std::string_view name) {
  if (name == "auto") return EdgeListFormat::kAuto;
  if (name == "whitespace" || name == "tsv" || name == "space") return EdgeListFormat::kWhitespace;
  if (name == "comma" || name == "csv") return EdgeListFormat::kComma;
  throw std::invalid_argument("unknown edge-list format: " + std::string(name));
}

namespace {

bool is_sep(char c, EdgeListFormat fmt) {
  const bool ws = c == ' ' || c == '\t' || c == '\r';
  switch (fmt) {
    case EdgeListFormat::kWhitespace: return ws;
    case EdgeListFormat::kComma: return c == ',';
    case EdgeListFormat::kAuto: return ws || c == ',';
  }
  return ws;
}

std::vector<std::string_view> split_fields(std::string_view line, EdgeListFormat fmt) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    if (is_sep(line[i], fmt)) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < line.size() && !is_sep(line[j], fmt)) ++j;
    auto field = line.substr(i, j - i);
    // Comma-separated fields may still carry padding.
    while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
    while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r'))
      field.remove_suffix(1);
    out.push_back(field);
    i = j;
  }
  return out;
}

bool parse_double(std::string_view s, double& out) {
  if (s.empty()) return false;
  const char* first = s.data();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

EdgeStream parse_edge_stream(std::istream& in, const ParseOptions& opts) {
  EdgeStream stream;
  stream.directedness = opts.directedness;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view(line);
    while (!view.empty() && (view.front() == ' ' || view.front() == '\t')) view.remove_prefix(1);
    if (view.empty() || view.front() == '%' || view.front() == '#') continue;
    if (view.find_first_not_of(" \t\r") == std::string_view::npos) continue;

    const auto fields = split_fields(view, opts.format);
    std::string problem;
    double t = 0.0;
    if (fields.size() < 3 || fields.size() > 4) {
      problem = "expected 3 or 4 columns, got " + std::to_string(fields.size());
    } else if (fields[0].empty() || fields[1].empty()) {
      problem = "empty node id";
    } else if (!parse_double(fields[2], t)) {
      problem = "non-numeric timestamp '" + std::string(fields[2]) + "'";
    } else if (!std::isfinite(t)) {
      problem = "non-finite timestamp";
    } else if (t < 0.0) {
      problem = "negative timestamp";
    }
    if (!problem.empty()) {
      if (opts.skip_malformed) continue;
      throw ParseError("line " + std::to_string(lineno) + ": " + problem, lineno);
    }
    const NodeIndex u = stream.nodes.intern(fields[0]);
    const NodeIndex v = stream.nodes.intern(fields[1]);
    stream.edges.push_back({u, v, t});
  }
  if (in.bad()) throw ParseError("read failure", 0);
  return stream;
}

EdgeStream parse_edge_stream(const std::filesystem::path& path, const ParseOptions& opts) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open edge list: " + path.string(), 0);
  return parse_edge_stream(in, opts);
}

EdgeStream canonicalize(EdgeStream stream) {
  std::stable_sort(stream.edges.begin(), stream.edges.end(),
                   [](const TemporalEdge& a, const TemporalEdge& b) { return a.t < b.t; });
  return stream;
}

bool is_canonical(const EdgeStream& stream) {
  return std::is_sorted(stream.edges.begin(), stream.edges.end(),
                        [](const TemporalEdge& a, const TemporalEdge& b) { return a.t < b.t; });
}

}  // namespace tge
