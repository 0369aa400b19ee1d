#include "kql/aexpr.hpp"

#include <algorithm>
#include <cctype>

#include "kql/error.hpp"

namespace kql {

namespace {

struct Cursor {
  std::string_view text;
  std::size_t pos = 0;

  bool done() const { return pos >= text.size(); }
  char peek() const { return pos < text.size() ? text[pos] : '\0'; }

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(Errc::Syntax, what + " in A-Expression \"" + std::string(text) + "\"", pos);
  }

  std::string identifier(const char* what) {
    const std::size_t start = pos;
    while (!done()) {
      const char c = peek();
      const auto u = static_cast<unsigned char>(c);
      if (std::isalnum(u) || c == '_') {
        ++pos;
      } else {
        break;
      }
    }
    std::string_view id = text.substr(start, pos - start);
    if (id.empty() || !is_identifier(id)) {
      pos = start;
      fail(std::string("expected ") + what);
    }
    return std::string(id);
  }

  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos;
  }
};

}  // namespace

AExpr parse_aexpr(std::string_view text) {
  Cursor cur{text};
  AExpr expr;

  std::string scope = cur.identifier("scope");
  if (scope != "ALL") expr.scope = scope;

  if (cur.peek() == '/') {
    ++cur.pos;
    expr.kind = AExpr::Kind::TableSelector;
    expr.dimension_set = cur.identifier("dimension-set name");
  } else if (cur.peek() == '*') {
    ++cur.pos;
    if (cur.peek() == '[') {
      ++cur.pos;
      expr.kind = AExpr::Kind::DimSetBracket;
      expr.dimension_set = cur.identifier("dimension-set name");
      cur.expect(']');
    } else {
      expr.kind = AExpr::Kind::FieldSelector;
      expr.dimension = cur.identifier("dimension name");
      while (cur.peek() == '*') {
        ++cur.pos;
        TagSpec spec;
        spec.scheme = cur.identifier("tag scheme");
        cur.expect(':');
        spec.name = cur.identifier("tag name");
        if (std::find(expr.tag_specs.begin(), expr.tag_specs.end(), spec) !=
            expr.tag_specs.end()) {
          cur.fail("duplicate tag " + spec.scheme + ":" + spec.name);
        }
        expr.tag_specs.push_back(std::move(spec));
      }
    }
  } else {
    cur.fail("expected '*' or '/' after scope");
  }

  if (!cur.done()) cur.fail("trailing characters");
  return expr;
}

std::string render_aexpr(const AExpr& a) {
  std::string out = a.scope ? *a.scope : "ALL";
  switch (a.kind) {
    case AExpr::Kind::FieldSelector:
      out += "*" + a.dimension;
      for (const auto& tag : a.tag_specs) {
        out += "*" + tag.scheme + ":" + tag.name;
      }
      break;
    case AExpr::Kind::DimSetBracket:
      out += "*[" + a.dimension_set + "]";
      break;
    case AExpr::Kind::TableSelector:
      out += "/" + a.dimension_set;
      break;
  }
  return out;
}

bool is_aexpr_char(char c) {
  const auto u = static_cast<unsigned char>(c);
  return std::isalnum(u) || c == '_' || c == '*' || c == '/' || c == ':' ||
         c == '[' || c == ']';
}

}  // namespace kql
