#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace tge {

using NodeIndex = std::uint32_t;

/// A single contact (source, destination, timestamp) between two nodes.
struct TemporalEdge {
  NodeIndex src = 0;
  NodeIndex dst = 0;
  double t = 0.0;

  friend bool operator==(const TemporalEdge&, const TemporalEdge&) = default;
};

enum class Directedness { kDirected, kUndirected };

/// Dense index <-> external id table. Indices are assigned in order of first
/// appearance in the input.
class NodeTable {
 public:
  NodeIndex intern(std::string_view id);
  NodeIndex index_of(std::string_view id) const;  // throws std::out_of_range
  bool contains(std::string_view id) const;
  const std::string& id_of(NodeIndex i) const { return ids_.at(i); }
  std::size_t size() const { return ids_.size(); }
  const std::vector<std::string>& ids() const { return ids_; }

  /// Writes `index,node_id` rows.
  void write_csv(std::ostream& os) const;

 private:
  std::vector<std::string> ids_;
  std::unordered_map<std::string, NodeIndex> index_;
};

struct EdgeStream {
  std::vector<TemporalEdge> edges;
  NodeTable nodes;
  Directedness directedness = Directedness::kDirected;

  std::size_t num_nodes() const { return nodes.size(); }
  bool directed() const { return directedness == Directedness::kDirected; }
};

enum class EdgeListFormat {
  kAuto,        // whitespace or comma, decided per line
  kWhitespace,
  kComma,
};

EdgeListFormat parse_format_name(std::string_view name);

struct ParseOptions {
  EdgeListFormat format = EdgeListFormat::kAuto;
  Directedness directedness = Directedness::kDirected;
  bool skip_malformed = false;
};

/// Malformed input. `line()` is 1-based; 0 when the error is not tied to a line.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Parses `src dst timestamp [weight]` records. Lines starting with `%` or `#`
/// and blank lines are ignored. The result is not yet canonicalized.
EdgeStream parse_edge_stream(std::istream& in, const ParseOptions& opts = {});
EdgeStream parse_edge_stream(const std::filesystem::path& path,
                             const ParseOptions& opts = {});

/// Stable sort by timestamp. Duplicates and tie order are preserved.
EdgeStream canonicalize(EdgeStream stream);

bool is_canonical(const EdgeStream& stream);

}  // namespace tge
