#include "kql/kql_parser.hpp"

#include <cctype>
#include <cstdint>
#include <string>

#include "kql/error.hpp"

namespace kql {

namespace {

enum class Tok {
  Ident,
  AExprText,
  String,
  Integer,
  Star,
  Comma,
  LParen,
  RParen,
  Op,
  Semicolon,
  End,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;   // identifier/aexpr text, op symbol, literal value
  std::size_t pos = 0;
};

bool ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  Token next() {
    skip_ws();
    Token tok;
    tok.pos = pos_;
    if (pos_ >= text_.size()) {
      tok.kind = Tok::End;
      return tok;
    }
    const char c = text_[pos_];
    if (ident_start(c)) {
      std::size_t end = pos_;
      while (end < text_.size() && ident_char(text_[end])) ++end;
      // An identifier glued to '*' or '/' starts an A-Expression; take the
      // maximal run of A-Expression characters.
      if (end < text_.size() && (text_[end] == '*' || text_[end] == '/')) {
        while (end < text_.size() && is_aexpr_char(text_[end])) ++end;
        tok.kind = Tok::AExprText;
      } else {
        tok.kind = Tok::Ident;
      }
      tok.text = std::string(text_.substr(pos_, end - pos_));
      pos_ = end;
      return tok;
    }
    if (c == '\'') {
      ++pos_;
      std::string value;
      while (true) {
        if (pos_ >= text_.size()) {
          throw Error(Errc::Syntax, "unterminated string literal", tok.pos);
        }
        if (text_[pos_] == '\'') {
          if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '\'') {
            value += '\'';
            pos_ += 2;
            continue;
          }
          ++pos_;
          break;
        }
        value += text_[pos_++];
      }
      tok.kind = Tok::String;
      tok.text = std::move(value);
      return tok;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '-' && pos_ + 1 < text_.size() &&
         std::isdigit(static_cast<unsigned char>(text_[pos_ + 1])))) {
      std::size_t end = pos_ + 1;
      while (end < text_.size() &&
             std::isdigit(static_cast<unsigned char>(text_[end]))) {
        ++end;
      }
      tok.kind = Tok::Integer;
      tok.text = std::string(text_.substr(pos_, end - pos_));
      pos_ = end;
      return tok;
    }
    switch (c) {
      case '*':
        tok.kind = Tok::Star;
        ++pos_;
        return tok;
      case ',':
        tok.kind = Tok::Comma;
        ++pos_;
        return tok;
      case '(':
        tok.kind = Tok::LParen;
        ++pos_;
        return tok;
      case ')':
        tok.kind = Tok::RParen;
        ++pos_;
        return tok;
      case ';':
        tok.kind = Tok::Semicolon;
        ++pos_;
        return tok;
      case '=':
        tok.kind = Tok::Op;
        tok.text = "=";
        ++pos_;
        return tok;
      case '!':
        if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '=') {
          tok.kind = Tok::Op;
          tok.text = "!=";
          pos_ += 2;
          return tok;
        }
        throw Error(Errc::Syntax, "unexpected character '!'", tok.pos);
      case '<':
      case '>': {
        tok.kind = Tok::Op;
        tok.text = std::string(1, c);
        ++pos_;
        if (pos_ < text_.size() && text_[pos_] == '=') {
          tok.text += '=';
          ++pos_;
        }
        return tok;
      }
      default:
        throw Error(Errc::Syntax,
                    std::string("unexpected character '") + c + "'", tok.pos);
    }
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

std::string to_upper(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) out += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

bool is_reserved(const std::string& upper) {
  return upper == "SELECT" || upper == "DISTINCT" || upper == "FROM" ||
         upper == "WHERE" || upper == "AND" || upper == "OR" ||
         upper == "NOT" || upper == "AS" || upper == "UNION" || upper == "ALL";
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text), lexer_(text) { advance(); }

  Statement statement() {
    Statement stmt;
    stmt.branches.push_back(query_block());
    while (is_keyword("UNION")) {
      advance();
      expect_keyword("ALL");
      stmt.branches.push_back(query_block());
    }
    return stmt;
  }

  void finish() {
    if (tok_.kind == Tok::Semicolon) advance();
    if (tok_.kind != Tok::End) {
      fail("expected end of statement");
    }
  }

 private:
  Query query_block() {
    expect_keyword("SELECT");
    Query q;
    if (is_keyword("DISTINCT")) {
      q.distinct = true;
      advance();
    }
    if (tok_.kind == Tok::Star) {
      q.select_star = true;
      advance();
    } else {
      q.select_items.push_back(select_item());
      while (tok_.kind == Tok::Comma) {
        advance();
        q.select_items.push_back(select_item());
      }
    }
    expect_keyword("FROM");
    q.from = from_item();
    if (is_keyword("WHERE")) {
      advance();
      q.where = or_expr();
    }
    return q;
  }

  SelectItem select_item() {
    if (tok_.kind == Tok::AExprText) {
      AExpr expr = take_aexpr();
      if (expr.kind == AExpr::Kind::TableSelector) {
        throw Error(Errc::Position,
                    "table selector \"" + render_aexpr(expr) +
                        "\" is only legal in FROM",
                    tok_pos_of_last_);
      }
      return SelectItem{ColumnRef{std::move(expr)}};
    }
    return SelectItem{ColumnRef{identifier("column name")}};
  }

  FromItem from_item() {
    if (tok_.kind == Tok::LParen) {
      advance();
      Statement inner = statement();
      expect(Tok::RParen, ")");
      expect_keyword("AS");
      std::string alias = identifier("subquery alias");
      FromItem item = FromItem::from_subquery(std::move(inner), std::move(alias));
      return item;
    }
    if (tok_.kind == Tok::AExprText) {
      AExpr expr = take_aexpr();
      if (expr.kind != AExpr::Kind::TableSelector) {
        throw Error(Errc::Position,
                    "A-Expression \"" + render_aexpr(expr) +
                        "\" is not legal in FROM; use a table selector",
                    tok_pos_of_last_);
      }
      return FromItem::from_selector(std::move(expr));
    }
    return FromItem::physical(identifier("table name"));
  }

  Condition or_expr() {
    std::vector<Condition> children;
    children.push_back(and_expr());
    while (is_keyword("OR")) {
      advance();
      children.push_back(and_expr());
    }
    if (children.size() == 1) return std::move(children.front());
    return Condition::disjunction(std::move(children));
  }

  Condition and_expr() {
    std::vector<Condition> children;
    children.push_back(not_expr());
    while (is_keyword("AND")) {
      advance();
      children.push_back(not_expr());
    }
    if (children.size() == 1) return std::move(children.front());
    return Condition::conjunction(std::move(children));
  }

  Condition not_expr() {
    if (is_keyword("NOT")) {
      advance();
      return Condition::negation(not_expr());
    }
    return primary();
  }

  Condition primary() {
    if (tok_.kind == Tok::LParen) {
      advance();
      Condition inner = or_expr();
      expect(Tok::RParen, ")");
      inner.grouped = true;
      return inner;
    }
    return comparison();
  }

  Condition comparison() {
    Comparison cmp;
    if (tok_.kind == Tok::AExprText) {
      AExpr expr = take_aexpr();
      if (expr.kind != AExpr::Kind::FieldSelector) {
        throw Error(Errc::Position,
                    "A-Expression \"" + render_aexpr(expr) +
                        "\" is not legal in WHERE; use a field selector",
                    tok_pos_of_last_);
      }
      cmp.column = ColumnRef{std::move(expr)};
    } else {
      cmp.column = ColumnRef{identifier("column name")};
    }
    if (tok_.kind != Tok::Op) fail("expected comparison operator");
    cmp.op = parse_op(tok_.text);
    advance();
    if (tok_.kind == Tok::String) {
      cmp.literal = SqlLiteral::str(tok_.text);
      advance();
    } else if (tok_.kind == Tok::Integer) {
      SqlLiteral lit;
      lit.kind = SqlLiteral::Kind::Integer;
      lit.text = tok_.text;
      lit.number = std::stoll(tok_.text);
      cmp.literal = std::move(lit);
      advance();
    } else {
      fail("expected literal");
    }
    return Condition::comparison(std::move(cmp));
  }

  static CompOp parse_op(const std::string& text) {
    if (text == "=") return CompOp::Eq;
    if (text == "!=") return CompOp::Ne;
    if (text == "<") return CompOp::Lt;
    if (text == "<=") return CompOp::Le;
    if (text == ">") return CompOp::Gt;
    return CompOp::Ge;
  }

  AExpr take_aexpr() {
    tok_pos_of_last_ = tok_.pos;
    const std::size_t base = tok_.pos;
    try {
      AExpr expr = parse_aexpr(tok_.text);
      advance();
      return expr;
    } catch (const Error& e) {
      // Rebase the inner offset onto the statement text.
      const std::size_t offset = base + e.offset().value_or(0);
      throw Error(Errc::Syntax, "bad A-Expression: " + std::string(e.what()),
                  offset);
    }
  }

  std::string identifier(const char* what) {
    if (tok_.kind != Tok::Ident) fail(std::string("expected ") + what);
    std::string upper = to_upper(tok_.text);
    if (is_reserved(upper)) {
      fail("keyword " + upper + " cannot be used as " + what);
    }
    std::string out = tok_.text;
    advance();
    return out;
  }

  bool is_keyword(const char* kw) const {
    return tok_.kind == Tok::Ident && to_upper(tok_.text) == kw;
  }

  void expect_keyword(const char* kw) {
    if (!is_keyword(kw)) fail(std::string("expected ") + kw);
    advance();
  }

  void expect(Tok kind, const char* what) {
    if (tok_.kind != kind) fail(std::string("expected ") + what);
    advance();
  }

  [[noreturn]] void fail(const std::string& what) {
    // Offsets must land inside the input, including errors at end-of-text.
    std::size_t pos = tok_.pos;
    if (!text_.empty() && pos >= text_.size()) pos = text_.size() - 1;
    if (text_.empty()) pos = 0;
    throw Error(Errc::Syntax, what, pos);
  }

  void advance() { tok_ = lexer_.next(); }

  std::string_view text_;
  Lexer lexer_;
  Token tok_;
  std::size_t tok_pos_of_last_ = 0;
};

}  // namespace

Statement parse_kql(std::string_view text) {
  Parser parser(text);
  Statement stmt = parser.statement();
  parser.finish();
  return stmt;
}

}  // namespace kql
