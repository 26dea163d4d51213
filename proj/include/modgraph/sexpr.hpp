#pragma once

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "modgraph/error.hpp"

namespace modgraph {

struct SourcePos {
  int line = 1;
  int column = 1;

  std::string to_string() const { return std::to_string(line) + ":" + std::to_string(column); }
};

/// Parenthesized prefix expression: an atom or a list.
struct SExpr {
  bool is_list = false;
  std::string atom;
  std::vector<SExpr> items;
  SourcePos pos;

  bool is_atom() const { return !is_list; }
};

namespace detail {

class SExprReader {
 public:
  explicit SExprReader(std::string_view text) : text_(text) {}

  SExpr read_one() {
    skip_space();
    if (at_end()) fail("unexpected end of input");
    SExpr e = read();
    skip_space();
    if (!at_end()) fail("trailing input after expression");
    return e;
  }

  std::vector<SExpr> read_all() {
    std::vector<SExpr> out;
    for (skip_space(); !at_end(); skip_space()) out.push_back(read());
    return out;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorCode::kSyntaxError, pos_.to_string() + ": " + msg);
  }

  bool at_end() const { return i_ >= text_.size(); }

  void advance() {
    if (text_[i_] == '\n') { ++pos_.line; pos_.column = 1; } else { ++pos_.column; }
    ++i_;
  }

  void skip_space() {
    while (!at_end()) {
      char c = text_[i_];
      if (c == ';' || c == '#') {
        while (!at_end() && text_[i_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  SExpr read() {
    SExpr e;
    e.pos = pos_;
    char c = text_[i_];
    if (c == '(') {
      advance();
      e.is_list = true;
      for (;;) {
        skip_space();
        if (at_end()) fail("missing ')' for list opened at " + e.pos.to_string());
        if (text_[i_] == ')') { advance(); break; }
        e.items.push_back(read());
      }
      return e;
    }
    if (c == ')') fail("unexpected ')'");
    while (!at_end()) {
      char d = text_[i_];
      if (d == '(' || d == ')' || d == ';' || std::isspace(static_cast<unsigned char>(d))) break;
      e.atom += d;
      advance();
    }
    return e;
  }

  std::string_view text_;
  std::size_t i_ = 0;
  SourcePos pos_;
};

}  // namespace detail

/// Reads exactly one expression; ';' and '#' start line comments.
inline SExpr parse_sexpr(std::string_view text) { return detail::SExprReader(text).read_one(); }

/// Reads every top-level expression in order.
inline std::vector<SExpr> parse_sexpr_all(std::string_view text) { return detail::SExprReader(text).read_all(); }

}  // namespace modgraph
