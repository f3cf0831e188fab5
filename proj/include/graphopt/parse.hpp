#ifndef GRAPHOPT_PARSE_HPP
#define GRAPHOPT_PARSE_HPP

#include <cctype>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "graphopt/ast.hpp"

namespace graphopt {

struct parse_error : std::runtime_error {
  std::size_t line;
  std::size_t column;
  parse_error(std::size_t l, std::size_t c, const std::string& msg)
      : std::runtime_error("parse error at " + std::to_string(l) + ":" +
                           std::to_string(c) + ": " + msg),
        line(l), column(c) {}
};

namespace detail {

enum class Tok {
  ident, string, integer, floating,
  lparen, rparen, lbrace, rbrace, lbracket, rbracket,
  colon, comma, dot, dash, arrow_head, arrow_tail,  // - , -> head is ">", <- tail
  end
};

struct Token {
  Tok kind = Tok::end;
  std::string text;       // ident name or string payload
  std::int64_t int_val = 0;
  double float_val = 0.0;
  std::size_t line = 1, column = 1;
};

class Lexer {
 public:
  explicit Lexer(const std::string& src) : src_(src) { advance(); }

  const Token& peek() const { return tok_; }
  Token take() {
    Token t = tok_;
    advance();
    return t;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw parse_error(line_, col_, msg);
  }

  char cur() const { return pos_ < src_.size() ? src_[pos_] : '\0'; }

  void bump() {
    if (pos_ < src_.size()) {
      if (src_[pos_] == '\n') { ++line_; col_ = 1; }
      else ++col_;
      ++pos_;
    }
  }

  void advance() {
    while (std::isspace(static_cast<unsigned char>(cur()))) bump();
    tok_ = Token{};
    tok_.line = line_;
    tok_.column = col_;
    char c = cur();
    if (c == '\0') { tok_.kind = Tok::end; return; }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string word;
      while (std::isalnum(static_cast<unsigned char>(cur())) || cur() == '_') {
        word += cur();
        bump();
      }
      tok_.kind = Tok::ident;
      tok_.text = word;
      return;
    }
    if (c == '`') {  // backtick-quoted identifier
      bump();
      std::string word;
      while (cur() != '`') {
        if (cur() == '\0') fail("unterminated backtick identifier");
        word += cur();
        bump();
      }
      bump();
      if (word.empty()) fail("empty backtick identifier");
      tok_.kind = Tok::ident;
      tok_.text = word;
      return;
    }
    if (c == '"') {
      bump();
      std::string text;
      while (cur() != '"') {
        if (cur() == '\0') fail("unterminated string literal");
        if (cur() == '\\') {
          bump();
          char esc = cur();
          if (esc == '"' || esc == '\\') text += esc;
          else if (esc == 'n') text += '\n';
          else if (esc == 't') text += '\t';
          else fail(std::string("unknown escape \\") + esc);
          bump();
        } else {
          text += cur();
          bump();
        }
      }
      bump();
      tok_.kind = Tok::string;
      tok_.text = text;
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::string num;
      bool is_float = false;
      while (std::isdigit(static_cast<unsigned char>(cur()))) { num += cur(); bump(); }
      if (cur() == '.' && pos_ + 1 < src_.size() &&
          std::isdigit(static_cast<unsigned char>(src_[pos_ + 1]))) {
        is_float = true;
        num += cur(); bump();
        while (std::isdigit(static_cast<unsigned char>(cur()))) { num += cur(); bump(); }
      }
      if (cur() == 'e' || cur() == 'E') {
        std::size_t save = pos_;
        std::string exp;
        exp += cur(); bump();
        if (cur() == '+' || cur() == '-') { exp += cur(); bump(); }
        if (std::isdigit(static_cast<unsigned char>(cur()))) {
          is_float = true;
          while (std::isdigit(static_cast<unsigned char>(cur()))) { exp += cur(); bump(); }
          num += exp;
        } else {
          // not an exponent after all; rewind is impossible with this lexer,
          // so reject outright, nothing in the language puts 'e' after digits
          (void)save;
          fail("malformed number literal");
        }
      }
      if (is_float) {
        tok_.kind = Tok::floating;
        tok_.float_val = std::stod(num);
      } else {
        tok_.kind = Tok::integer;
        try {
          tok_.int_val = std::stoll(num);
        } catch (const std::out_of_range&) {
          fail("integer literal out of range");
        }
      }
      return;
    }
    switch (c) {
      case '(': bump(); tok_.kind = Tok::lparen; return;
      case ')': bump(); tok_.kind = Tok::rparen; return;
      case '{': bump(); tok_.kind = Tok::lbrace; return;
      case '}': bump(); tok_.kind = Tok::rbrace; return;
      case '[': bump(); tok_.kind = Tok::lbracket; return;
      case ']': bump(); tok_.kind = Tok::rbracket; return;
      case ':': bump(); tok_.kind = Tok::colon; return;
      case ',': bump(); tok_.kind = Tok::comma; return;
      case '.': bump(); tok_.kind = Tok::dot; return;
      case '-': bump(); tok_.kind = Tok::dash; return;
      case '>': bump(); tok_.kind = Tok::arrow_head; return;
      case '<': bump(); tok_.kind = Tok::arrow_tail; return;
      default: fail(std::string("unexpected character '") + c + "'");
    }
  }

  const std::string& src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1, col_ = 1;
  Token tok_;
};

inline std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

inline bool is_keyword(const Token& t, const char* kw) {
  return t.kind == Tok::ident && lower(t.text) == kw;
}

class Parser {
 public:
  explicit Parser(const std::string& src) : lex_(src) {}

  Query parse() {
    expect_keyword("match");
    Query q;
    q.chains.push_back(parse_chain());
    while (at(Tok::comma)) {
      lex_.take();
      q.chains.push_back(parse_chain());
    }
    expect_keyword("return");
    q.ret = parse_return();
    if (!at(Tok::end)) fail("unexpected trailing input");
    validate(q);
    return q;
  }

 private:
  static const std::set<std::string>& reserved() {
    static const std::set<std::string> words = {
        "match", "return", "distinct", "order", "by", "asc",
        "desc",  "limit",  "as",       "count", "shortestpath", "date"};
    return words;
  }

  bool at(Tok k) const { return lex_.peek().kind == k; }

  [[noreturn]] void fail(const std::string& msg) const {
    throw parse_error(lex_.peek().line, lex_.peek().column, msg);
  }

  Token expect(Tok k, const char* what) {
    if (!at(k)) fail(std::string("expected ") + what);
    return lex_.take();
  }

  void expect_keyword(const char* kw) {
    if (!is_keyword(lex_.peek(), kw))
      fail(std::string("expected keyword ") + kw);
    lex_.take();
  }

  std::string expect_name(const char* what) {
    Token t = expect(Tok::ident, what);
    if (reserved().count(lower(t.text)))
      throw parse_error(t.line, t.column,
                        "reserved word \"" + t.text + "\" cannot be a " + what);
    return t.text;
  }

  Chain parse_chain() {
    Chain c;
    c.nodes.push_back(parse_node_pattern());
    for (;;) {
      if (at(Tok::dash)) {  // -[...]->
        lex_.take();
        RelPattern r = parse_rel_body();
        expect(Tok::dash, "'-'");
        expect(Tok::arrow_head, "'>'");
        r.arrow = Arrow::right;
        c.rels.push_back(std::move(r));
        c.nodes.push_back(parse_node_pattern());
      } else if (at(Tok::arrow_tail)) {  // <-[...]-
        lex_.take();
        expect(Tok::dash, "'-'");
        RelPattern r = parse_rel_body();
        expect(Tok::dash, "'-'");
        r.arrow = Arrow::left;
        c.rels.push_back(std::move(r));
        c.nodes.push_back(parse_node_pattern());
      } else {
        break;
      }
    }
    return c;
  }

  NodePattern parse_node_pattern() {
    expect(Tok::lparen, "'('");
    NodePattern n;
    if (at(Tok::ident) && !reserved().count(lower(lex_.peek().text)))
      n.var = lex_.take().text;
    if (at(Tok::colon)) {
      lex_.take();
      n.label = expect_name("label");
    }
    if (at(Tok::lbrace)) n.filters = parse_filters();
    expect(Tok::rparen, "')'");
    return n;
  }

  RelPattern parse_rel_body() {
    expect(Tok::lbracket, "'['");
    RelPattern r;
    if (at(Tok::ident) && !reserved().count(lower(lex_.peek().text)))
      r.var = lex_.take().text;
    if (at(Tok::colon)) {
      lex_.take();
      r.type = expect_name("edge type");
    }
    if (at(Tok::lbrace)) r.filters = parse_filters();
    expect(Tok::rbracket, "']'");
    return r;
  }

  std::vector<PropFilter> parse_filters() {
    expect(Tok::lbrace, "'{'");
    std::vector<PropFilter> filters;
    for (;;) {
      PropFilter f;
      f.key = expect(Tok::ident, "property key").text;
      expect(Tok::colon, "':'");
      f.value = parse_filter_value();
      filters.push_back(std::move(f));
      if (at(Tok::comma)) { lex_.take(); continue; }
      break;
    }
    expect(Tok::rbrace, "'}'");
    return filters;
  }

  FilterValue parse_filter_value() {
    const Token& t = lex_.peek();
    if (t.kind == Tok::string) return PropertyValue{lex_.take().text};
    if (t.kind == Tok::integer) return PropertyValue{lex_.take().int_val};
    if (t.kind == Tok::floating) return PropertyValue{lex_.take().float_val};
    if (t.kind == Tok::dash) {  // negative number
      lex_.take();
      if (at(Tok::integer)) return PropertyValue{-lex_.take().int_val};
      if (at(Tok::floating)) return PropertyValue{-lex_.take().float_val};
      fail("expected number after '-'");
    }
    if (is_keyword(t, "date")) {
      Token dt = lex_.take();
      expect(Tok::lparen, "'('");
      Token s = expect(Tok::string, "date string");
      expect(Tok::rparen, "')'");
      auto d = parse_date(s.text);
      if (!d)
        throw parse_error(s.line, s.column,
                          "bad date literal \"" + s.text + "\" (want YYYY-MM-DD)");
      (void)dt;
      return PropertyValue{*d};
    }
    if (t.kind == Tok::ident) {
      CrossRef ref;
      ref.var = expect_name("variable");
      expect(Tok::dot, "'.'");
      ref.key = expect(Tok::ident, "property key").text;
      return ref;
    }
    fail("expected literal or variable.key");
  }

  ReturnClause parse_return() {
    ReturnClause ret;
    if (is_keyword(lex_.peek(), "distinct")) {
      lex_.take();
      ret.distinct = true;
    }
    ret.items.push_back(parse_return_item());
    while (at(Tok::comma)) {
      lex_.take();
      ret.items.push_back(parse_return_item());
    }
    if (is_keyword(lex_.peek(), "order")) {
      lex_.take();
      expect_keyword("by");
      OrderKey key;
      if (is_keyword(lex_.peek(), "count")) {
        lex_.take();
        expect(Tok::lparen, "'('");
        key.key = ReturnCount{expect_name("variable")};
        expect(Tok::rparen, "')'");
      } else {
        ReturnAttr attr;
        attr.var = expect_name("variable");
        expect(Tok::dot, "'.'");
        attr.key = expect(Tok::ident, "property key").text;
        key.key = attr;
      }
      if (is_keyword(lex_.peek(), "desc")) { lex_.take(); key.descending = true; }
      else if (is_keyword(lex_.peek(), "asc")) lex_.take();
      ret.order_by = key;
    }
    if (is_keyword(lex_.peek(), "limit")) {
      lex_.take();
      if (at(Tok::dash)) {
        const Token& d = lex_.peek();
        throw parse_error(d.line, d.column, "negative LIMIT");
      }
      Token n = expect(Tok::integer, "limit count");
      if (n.int_val < 0) throw parse_error(n.line, n.column, "negative LIMIT");
      ret.limit = static_cast<std::uint64_t>(n.int_val);
    }
    return ret;
  }

  ReturnItem parse_return_item() {
    ReturnItem item;
    if (is_keyword(lex_.peek(), "count")) {
      lex_.take();
      expect(Tok::lparen, "'('");
      item.what = ReturnCount{expect_name("variable")};
      expect(Tok::rparen, "')'");
    } else if (is_keyword(lex_.peek(), "shortestpath")) {
      lex_.take();
      expect(Tok::lparen, "'('");
      ReturnShortestPath sp;
      sp.from = expect_name("variable");
      expect(Tok::comma, "','");
      sp.to = expect_name("variable");
      expect(Tok::rparen, "')'");
      item.what = sp;
    } else {
      std::string var = expect_name("variable");
      if (at(Tok::dot)) {
        lex_.take();
        item.what = ReturnAttr{var, expect(Tok::ident, "property key").text};
      } else {
        item.what = ReturnVar{var};
      }
    }
    if (is_keyword(lex_.peek(), "as")) {
      lex_.take();
      Token t = expect(Tok::ident, "alias");
      item.alias = t.text;
    }
    return item;
  }

  /* Static semantic checks: variable kinds and binding order, cross-reference
   * targets, aggregate arguments, literal type consistency. */
  void validate(const Query& q) {
    enum class Kind { node_var, rel_var };
    std::map<std::string, Kind> vars;          // all bound variables
    std::map<std::string, std::size_t> bound_at;  // name -> binding position
    std::size_t position = 0;

    auto bind = [&](const std::optional<std::string>& name, Kind kind) {
      if (!name) { ++position; return; }
      auto it = vars.find(*name);
      if (it != vars.end()) {
        if (it->second != kind)
          fail_at(*name, "variable " + *name + " is used as both a node and a relationship");
        if (kind == Kind::rel_var)
          fail_at(*name, "relationship variable " + *name + " bound more than once");
      } else {
        vars.emplace(*name, kind);
        bound_at.emplace(*name, position);
      }
      ++position;
    };

    // First walk: establish bindings in textual order.
    for (const Chain& c : q.chains) {
      for (std::size_t i = 0; i < c.nodes.size(); ++i) {
        if (i > 0) bind(c.rels[i - 1].var, Kind::rel_var);
        bind(c.nodes[i].var, Kind::node_var);
      }
    }

    // Second walk: every cross-reference names a variable bound strictly
    // earlier than the element carrying the filter.
    position = 0;
    auto check_filters = [&](const std::vector<PropFilter>& filters) {
      for (const PropFilter& f : filters) {
        const auto* ref = std::get_if<CrossRef>(&f.value);
        if (!ref) continue;
        auto it = bound_at.find(ref->var);
        if (it == bound_at.end())
          fail_at(ref->var, "cross-reference to unbound variable " + ref->var);
        if (it->second >= position)
          fail_at(ref->var,
                  "cross-reference to " + ref->var + " before it is bound");
      }
    };
    for (const Chain& c : q.chains) {
      for (std::size_t i = 0; i < c.nodes.size(); ++i) {
        if (i > 0) {
          check_filters(c.rels[i - 1].filters);
          ++position;
        }
        check_filters(c.nodes[i].filters);
        ++position;
      }
    }

    auto require_bound = [&](const std::string& name, const char* where) {
      if (!vars.count(name))
        fail_at(name, std::string("unbound variable ") + name + " in " + where);
    };
    for (const auto& item : q.ret.items) {
      if (const auto* v = std::get_if<ReturnVar>(&item.what))
        require_bound(v->var, "RETURN");
      else if (const auto* attr = std::get_if<ReturnAttr>(&item.what))
        require_bound(attr->var, "RETURN");
      else if (const auto* cnt = std::get_if<ReturnCount>(&item.what))
        require_bound(cnt->var, "count()");
      else {
        const auto& sp = std::get<ReturnShortestPath>(item.what);
        require_bound(sp.from, "shortestPath()");
        require_bound(sp.to, "shortestPath()");
        if (vars.at(sp.from) != Kind::node_var || vars.at(sp.to) != Kind::node_var)
          fail_at(sp.from, "shortestPath() arguments must be node variables");
      }
    }
    std::size_t sp_items = 0;
    for (const auto& item : q.ret.items)
      if (std::holds_alternative<ReturnShortestPath>(item.what)) ++sp_items;
    if (sp_items > 1) fail_at("shortestPath", "at most one shortestPath() item");
    if (q.ret.order_by) {
      if (const auto* attr = std::get_if<ReturnAttr>(&q.ret.order_by->key))
        require_bound(attr->var, "ORDER BY");
      else
        require_bound(std::get<ReturnCount>(q.ret.order_by->key).var, "ORDER BY");
    }
    if (q.ret.order_by && std::holds_alternative<ReturnCount>(q.ret.order_by->key) &&
        !q.has_aggregate())
      fail_at("count", "ORDER BY count() requires a count() return item");

    // Under DISTINCT or aggregation, rows are reduced to the projected
    // items; an attribute sort key must be derivable from them.
    if (q.ret.order_by) {
      if (const auto* attr = std::get_if<ReturnAttr>(&q.ret.order_by->key)) {
        bool derivable = !(q.has_aggregate() || q.ret.distinct);
        for (const auto& item : q.ret.items) {
          if (const auto* rv = std::get_if<ReturnVar>(&item.what);
              rv && rv->var == attr->var)
            derivable = true;
          if (const auto* ra = std::get_if<ReturnAttr>(&item.what);
              ra && ra->var == attr->var && ra->key == attr->key)
            derivable = true;
        }
        if (!derivable)
          fail_at(attr->var, "ORDER BY " + attr->var + "." + attr->key +
                                 " must be derivable from the returned items "
                                 "under DISTINCT or aggregation");
      }
    }

    // Literal filters on the same (variable, key) must share a variant.
    std::map<std::pair<std::string, std::string>, std::size_t> literal_kind;
    auto check_literals = [&](const std::optional<std::string>& var,
                              const std::vector<PropFilter>& filters) {
      if (!var) return;
      for (const PropFilter& f : filters) {
        const auto* lit = std::get_if<PropertyValue>(&f.value);
        if (!lit) continue;
        auto key = std::make_pair(*var, f.key);
        auto [it, fresh] = literal_kind.emplace(key, lit->index());
        if (!fresh && it->second != lit->index())
          fail_at(*var, "conflicting literal types for " + *var + "." + f.key);
      }
    };
    for (const Chain& c : q.chains) {
      for (std::size_t i = 0; i < c.nodes.size(); ++i) {
        if (i > 0) check_literals(c.rels[i - 1].var, c.rels[i - 1].filters);
        check_literals(c.nodes[i].var, c.nodes[i].filters);
      }
    }
  }

  [[noreturn]] void fail_at(const std::string&, const std::string& msg) {
    // Semantic errors surface at the end of input; position data is less
    // useful than the message itself here.
    throw parse_error(lex_.peek().line, lex_.peek().column, msg);
  }

  Lexer lex_;
};

}  // namespace detail

inline Query parse_query(const std::string& text) {
  return detail::Parser(text).parse();
}

}  // namespace graphopt

#endif
