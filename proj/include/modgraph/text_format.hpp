#pragma once

#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "modgraph/graph.hpp"
#include "modgraph/signature.hpp"

namespace modgraph {

namespace detail {

inline std::vector<std::string> split_words(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> words;
  for (std::string w; in >> w;) words.push_back(w);
  return words;
}

inline std::string strip_comment(const std::string& line) {
  auto hash = line.find('#');
  return hash == std::string::npos ? line : line.substr(0, hash);
}

[[noreturn]] inline void parse_fail(int line, const std::string& msg) {
  throw Error(ErrorCode::kParseError, "line " + std::to_string(line) + ": " + msg);
}

inline int parse_int(const std::string& word, int line) {
  try {
    std::size_t used = 0;
    int v = std::stoi(word, &used);
    if (used != word.size()) parse_fail(line, "expected an integer, got '" + word + "'");
    return v;
  } catch (const std::logic_error&) {
    parse_fail(line, "expected an integer, got '" + word + "'");
  }
}

}  // namespace detail

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kInvalidArgument, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct NamedGraph {
  std::string name;
  LabeledGraph graph;
};

/// Line-oriented graph format:
///   graph <name> / alphabet <sym>... / vertex <id> <sym> / edge <id> <id>
inline NamedGraph parse_graph(const std::string& text) {
  NamedGraph out;
  std::optional<Alphabet> alphabet;
  std::map<Vertex, std::string> labeling;
  std::set<Edge> edges;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    auto w = detail::split_words(detail::strip_comment(raw));
    if (w.empty()) continue;
    const std::string& kw = w[0];
    if (kw == "graph") {
      if (w.size() != 2) detail::parse_fail(line, "usage: graph <name>");
      out.name = w[1];
    } else if (kw == "alphabet") {
      if (alphabet) detail::parse_fail(line, "alphabet given twice");
      if (w.size() < 2) detail::parse_fail(line, "alphabet needs at least one symbol");
      try {
        alphabet = Alphabet(std::vector<std::string>(w.begin() + 1, w.end()));
      } catch (const Error& e) {
        detail::parse_fail(line, e.what());
      }
    } else if (kw == "vertex") {
      if (w.size() != 3) detail::parse_fail(line, "usage: vertex <id> <symbol>");
      if (!alphabet) detail::parse_fail(line, "vertex before alphabet");
      int id = detail::parse_int(w[1], line);
      if (id <= 0) detail::parse_fail(line, "vertex ids must be positive");
      if (!alphabet->contains(w[2])) detail::parse_fail(line, "unknown label '" + w[2] + "'");
      if (!labeling.emplace(id, w[2]).second) detail::parse_fail(line, "duplicate vertex " + w[1]);
    } else if (kw == "edge") {
      if (w.size() != 3) detail::parse_fail(line, "usage: edge <id> <id>");
      int u = detail::parse_int(w[1], line);
      int v = detail::parse_int(w[2], line);
      if (u == v) detail::parse_fail(line, "self-loop at vertex " + w[1]);
      if (!labeling.count(u) || !labeling.count(v)) detail::parse_fail(line, "edge endpoint is not a declared vertex");
      edges.emplace(u, v);
    } else {
      detail::parse_fail(line, "unknown directive '" + kw + "'");
    }
  }
  if (!alphabet) detail::parse_fail(line, "missing alphabet");
  out.graph = LabeledGraph(*alphabet, labeling, edges);
  return out;
}

inline std::string format_graph(const LabeledGraph& g, const std::string& name = "g") {
  std::ostringstream out;
  out << "graph " << name << "\n";
  out << "alphabet";
  for (const auto& s : g.alphabet().symbols()) out << ' ' << s;
  out << "\n";
  for (Vertex v : g.vertices()) out << "vertex " << v << ' ' << g.label(v) << "\n";
  for (const auto& [u, v] : g.edges()) out << "edge " << u << ' ' << v << "\n";
  return out.str();
}

/// Signature format:
///   signature <name> / alphabet ... / op par|seq|clique /
///   prime <name> <n> : <i>-><j> ...
inline Signature parse_signature(const std::string& text, SearchLimits limits = {}) {
  std::string name;
  std::optional<Alphabet> alphabet;
  std::vector<std::pair<int, SignatureOp>> ops;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    auto w = detail::split_words(detail::strip_comment(raw));
    if (w.empty()) continue;
    const std::string& kw = w[0];
    try {
      if (kw == "signature") {
        if (w.size() != 2) detail::parse_fail(line, "usage: signature <name>");
        name = w[1];
      } else if (kw == "alphabet") {
        if (alphabet) detail::parse_fail(line, "alphabet given twice");
        alphabet = Alphabet(std::vector<std::string>(w.begin() + 1, w.end()));
      } else if (kw == "op") {
        if (w.size() != 2) detail::parse_fail(line, "usage: op par|seq|clique");
        if (w[1] == kParName) ops.emplace_back(line, SignatureOp::parallel());
        else if (w[1] == kSeqName) ops.emplace_back(line, SignatureOp::sequential());
        else if (w[1] == kCliqueName) ops.emplace_back(line, SignatureOp::clique());
        else detail::parse_fail(line, "unknown builtin operation '" + w[1] + "'");
      } else if (kw == "prime") {
        if (w.size() < 4 || w[3] != ":") detail::parse_fail(line, "usage: prime <name> <n> : <i>-><j> ...");
        int n = detail::parse_int(w[2], line);
        if (n < 3) detail::parse_fail(line, "prime operations need n >= 3");
        std::vector<Edge> edges;
        for (std::size_t k = 4; k < w.size(); ++k) {
          auto arrow = w[k].find("->");
          if (arrow == std::string::npos) detail::parse_fail(line, "expected <i>-><j>, got '" + w[k] + "'");
          int a = detail::parse_int(w[k].substr(0, arrow), line);
          int b = detail::parse_int(w[k].substr(arrow + 2), line);
          if (a < 1 || a > n || b < 1 || b > n) detail::parse_fail(line, "edge " + w[k] + " leaves [n]");
          if (a == b) detail::parse_fail(line, "self-loop " + w[k]);
          edges.emplace_back(a, b);
        }
        ops.emplace_back(line, SignatureOp::prime(w[1], unlabeled_graph(n, edges), limits));
      } else {
        detail::parse_fail(line, "unknown directive '" + kw + "'");
      }
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kParseError) throw;
      detail::parse_fail(line, e.what());
    }
  }
  if (!alphabet) detail::parse_fail(line, "missing alphabet");
  Signature sig(name, *alphabet, {}, limits);
  for (auto& [op_line, op] : ops) {
    try {
      sig.add(std::move(op));
    } catch (const Error& e) {
      detail::parse_fail(op_line, e.what());
    }
  }
  return sig;
}

inline std::string format_signature(const Signature& sig) {
  std::ostringstream out;
  out << "signature " << (sig.name().empty() ? "sig" : sig.name()) << "\n";
  out << "alphabet";
  for (const auto& s : sig.alphabet().symbols()) out << ' ' << s;
  out << "\n";
  for (const auto& op : sig.ops()) {
    if (op.is_builtin()) {
      out << "op " << op.name() << "\n";
      continue;
    }
    out << "prime " << op.name() << ' ' << op.arity() << " :";
    for (const auto& [a, b] : op.graph().edges()) out << ' ' << a << "->" << b;
    out << "\n";
  }
  return out.str();
}

}  // namespace modgraph
