#include <random>
#include <sstream>

#include "doctest.h"
#include "tge/stream.hpp"

using namespace tge;

namespace {

EdgeStream parse(const std::string& text, ParseOptions opts = {}) {
  std::istringstream in(text);
  return parse_edge_stream(in, opts);
}

std::vector<double> times(const EdgeStream& s) {
  std::vector<double> out;
  for (const auto& e : s.edges) out.push_back(e.t);
  return out;
}

}  // namespace

TEST_CASE("parse: two records over three nodes") {
  const auto s = parse("a b 1\nb c 2");
  CHECK(s.edges.size() == 2);
  CHECK(s.num_nodes() == 3);
  CHECK(s.nodes.id_of(s.edges[1].dst) == "c");
  CHECK(s.edges[0].t == 1.0);
}

TEST_CASE("parse: empty input") {
  const auto s = parse("");
  CHECK(s.edges.empty());
  CHECK(s.num_nodes() == 0);
}

TEST_CASE("parse: negative timestamp is rejected with its line") {
  try {
    parse("a b 1\na b -5\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("parse: comments, commas, weight column, blank lines") {
  const auto s = parse("% header\n# more\n\nx,y,3,0.5\ny z 4 7\n");
  REQUIRE(s.edges.size() == 2);
  CHECK(s.edges[0].t == 3.0);
  CHECK(s.nodes.id_of(s.edges[1].dst) == "z");
}

TEST_CASE("parse: malformed lines fail by default and are skipped on request") {
  const std::string text = "a b 1\nnot-a-record\nc d x\nc d 2\n";
  CHECK_THROWS_AS(parse(text), ParseError);
  ParseOptions skip;
  skip.skip_malformed = true;
  CHECK(parse(text, skip).edges.size() == 2);
  CHECK_THROWS_AS(parse("a b nan\n"), ParseError);
  CHECK_THROWS_AS(parse("a b inf\n"), ParseError);
}

TEST_CASE("parse: explicit format is enforced") {
  ParseOptions ws;
  ws.format = EdgeListFormat::kWhitespace;
  CHECK(parse("a b 1\n", ws).edges.size() == 1);
  ParseOptions comma;
  comma.format = EdgeListFormat::kComma;
  CHECK(parse("a,b,1\n", comma).edges.size() == 1);
  CHECK_THROWS_AS(parse_format_name("parquet"), std::invalid_argument);
}

TEST_CASE("parse: unreadable path") {
  CHECK_THROWS_AS(parse_edge_stream(std::filesystem::path("/nonexistent/edges.txt")), ParseError);
}

TEST_CASE("node table round trip") {
  NodeTable t;
  CHECK(t.intern("x") == 0);
  CHECK(t.intern("y") == 1);
  CHECK(t.intern("x") == 0);
  CHECK(t.index_of("y") == 1);
  CHECK_FALSE(t.contains("z"));
  CHECK_THROWS_AS(t.index_of("z"), std::out_of_range);
  std::ostringstream os;
  t.write_csv(os);
  CHECK(os.str() == "index,node_id\n0,x\n1,y\n");
}

TEST_CASE("canonicalize: sorts, keeps duplicates, stable on ties") {
  CHECK(times(canonicalize(parse("a b 3\na b 1\na b 2\n"))) == std::vector<double>{1, 2, 3});

  const auto dup = canonicalize(parse("a b 5\na b 5\n"));
  CHECK(dup.edges.size() == 2);

  const auto tie = canonicalize(parse("a b 5\nc d 5\n"));
  CHECK(tie.nodes.id_of(tie.edges[0].src) == "a");
  CHECK(tie.nodes.id_of(tie.edges[1].src) == "c");
}

TEST_CASE("canonicalize: idempotent and size-preserving on random streams") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> t(0, 20);
  for (int rep = 0; rep < 50; ++rep) {
    EdgeStream s;
    for (int i = 0; i < 8; ++i) s.nodes.intern(std::to_string(i));
    for (NodeIndex i = 0; i < 60; ++i) s.edges.push_back({i % 8, (i * 3 + 1) % 8, double(t(rng))});
    const auto once = canonicalize(s);
    CHECK(is_canonical(once));
    CHECK(once.edges.size() == s.edges.size());
    CHECK(canonicalize(once).edges == once.edges);
  }
}
