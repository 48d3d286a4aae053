#include "sai/parser.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <sstream>

namespace sai {

ParseError::ParseError(std::size_t line, std::size_t column, const std::string& message)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      line_(line),
      column_(column),
      message_(message) {}

namespace {

/// Offset -> (line, column) over the whole input.
class SourceMap {
 public:
  explicit SourceMap(std::string_view text) {
    starts_.push_back(0);
    for (std::size_t i = 0; i < text.size(); ++i)
      if (text[i] == '\n') starts_.push_back(i + 1);
  }
  ParseError error(std::size_t offset, const std::string& message) const {
    auto it = std::upper_bound(starts_.begin(), starts_.end(), offset);
    std::size_t line = static_cast<std::size_t>(it - starts_.begin());
    return ParseError(line, offset - starts_[line - 1] + 1, message);
  }

 private:
  std::vector<std::size_t> starts_;
};

enum class Tok { Ident, Number, Op, End };

struct Token {
  Tok kind;
  std::string text;
  std::size_t offset;
};

std::vector<Token> tokenize(std::string_view text, std::size_t base, const SourceMap& map) {
  static const std::array<std::string_view, 6> kTwoChar = {"->", ">=", "<=", "!=", "==", "=>"};
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < text.size()) {
    unsigned char c = static_cast<unsigned char>(text[i]);
    if (std::isspace(c)) {
      ++i;
      continue;
    }
    std::size_t start = i;
    if (std::isalpha(c) || c == '_') {
      while (i < text.size() && (std::isalnum(static_cast<unsigned char>(text[i])) ||
                                 text[i] == '_' || text[i] == '.'))
        ++i;
      out.push_back({Tok::Ident, std::string(text.substr(start, i - start)), base + start});
      continue;
    }
    if (std::isdigit(c) || (c == '.' && i + 1 < text.size() && std::isdigit(static_cast<unsigned char>(text[i + 1])))) {
      while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
      if (i < text.size() && text[i] == '.') {
        ++i;
        while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
      }
      out.push_back({Tok::Number, std::string(text.substr(start, i - start)), base + start});
      continue;
    }
    std::string_view two = text.substr(i, 2);
    if (std::find(kTwoChar.begin(), kTwoChar.end(), two) != kTwoChar.end()) {
      if (two == "==" || two == "=>")
        throw map.error(base + i, "unexpected '" + std::string(two) + "'; use '=' or '->'");
      out.push_back({Tok::Op, std::string(two), base + i});
      i += 2;
      continue;
    }
    if (std::string_view("+-*/^()&|!<>=,;'").find(static_cast<char>(c)) != std::string_view::npos) {
      out.push_back({Tok::Op, std::string(1, static_cast<char>(c)), base + i});
      ++i;
      continue;
    }
    throw map.error(base + i, std::string("unexpected character '") + static_cast<char>(c) + "'");
  }
  out.push_back({Tok::End, "", base + text.size()});
  return out;
}

std::optional<Relation> relation_of(const std::string& op) {
  if (op == ">=") return Relation::Ge;
  if (op == ">") return Relation::Gt;
  if (op == "<=") return Relation::Le;
  if (op == "<") return Relation::Lt;
  if (op == "=") return Relation::Eq;
  if (op == "!=") return Relation::Ne;
  return std::nullopt;
}

class Parser {
 public:
  Parser(std::vector<Token> tokens, ContextPtr ctx, const SourceMap& map, bool allow_params)
      : toks_(std::move(tokens)), ctx_(std::move(ctx)), map_(map), allow_params_(allow_params) {}

  Formula formula() { return implication(); }

  Polynomial expr() {
    Polynomial acc = term();
    while (peek_op("+") || peek_op("-")) {
      bool minus = next().text == "-";
      Polynomial rhs = term();
      if (minus) acc -= rhs;
      else acc += rhs;
    }
    return acc;
  }

  const Token& peek() const { return toks_[pos_]; }
  bool at_end() const { return peek().kind == Tok::End; }
  bool peek_op(std::string_view op) const { return peek().kind == Tok::Op && peek().text == op; }
  const Token& next() { return toks_[pos_ == toks_.size() - 1 ? pos_ : pos_++]; }

  void expect(std::string_view op) {
    if (!peek_op(op)) fail("expected '" + std::string(op) + "'");
    next();
  }

  std::string ident() {
    if (peek().kind != Tok::Ident) fail("expected identifier");
    return next().text;
  }

  [[noreturn]] void fail(const std::string& what) const {
    const Token& t = peek();
    std::string found = t.kind == Tok::End ? "end of section" : "'" + t.text + "'";
    throw map_.error(t.offset, what + ", found " + found);
  }

 private:
  Formula implication() {
    Formula lhs = disjunction();
    if (peek_op("->")) {
      next();
      return Formula::implies(lhs, implication());
    }
    return lhs;
  }

  Formula disjunction() {
    std::vector<Formula> parts{conjunction()};
    while (peek_op("|")) {
      next();
      parts.push_back(conjunction());
    }
    return parts.size() == 1 ? parts.front() : Formula::disj(std::move(parts));
  }

  Formula conjunction() {
    std::vector<Formula> parts{unary()};
    while (peek_op("&")) {
      next();
      parts.push_back(unary());
    }
    return parts.size() == 1 ? parts.front() : Formula::conj(std::move(parts));
  }

  Formula unary() {
    if (peek_op("!")) {
      next();
      return Formula::negate(unary());
    }
    if (peek().kind == Tok::Ident && (peek().text == "true" || peek().text == "false")) {
      return next().text == "true" ? Formula::truth() : Formula::falsity();
    }
    if (peek_op("(")) {
      // "(x + 1)^2 >= 0" and "(x >= 0 & y > 0)" share a prefix: try the atom
      // reading first and fall back to a parenthesized formula.
      std::size_t save = pos_;
      try {
        return atom();
      } catch (const ParseError&) {
        pos_ = save;
      }
      next();
      Formula inner = formula();
      expect(")");
      return inner;
    }
    return atom();
  }

  Formula atom() {
    Polynomial lhs = expr();
    std::optional<Relation> rel;
    if (peek().kind == Tok::Op) rel = relation_of(peek().text);
    if (!rel) fail("expected comparison operator");
    next();
    Polynomial rhs = expr();
    return Formula::atom(lhs - rhs, *rel);
  }

  Polynomial term() {
    Polynomial acc = signed_factor();
    while (peek_op("*") || peek_op("/")) {
      bool divide = next().text == "/";
      std::size_t at = peek().offset;
      Polynomial rhs = signed_factor();
      if (divide) {
        auto c = rhs.constant_value();
        if (!rhs.is_constant() || !c) throw map_.error(at, "division is only allowed by a constant");
        if (*c == 0) throw map_.error(at, "division by zero");
        acc *= Rational(1 / *c);
      } else {
        acc *= rhs;
      }
    }
    return acc;
  }

  Polynomial signed_factor() {
    if (peek_op("-")) {
      next();
      return -signed_factor();
    }
    if (peek_op("+")) {
      next();
      return signed_factor();
    }
    Polynomial base = primary();
    if (peek_op("^")) {
      next();
      if (peek().kind != Tok::Number || peek().text.find('.') != std::string::npos)
        fail("expected a natural-number exponent");
      const Token& t = next();
      unsigned long e = std::stoul(t.text);
      if (e > 1000) throw map_.error(t.offset, "exponent too large");
      base = base.pow(static_cast<unsigned>(e));
    }
    return base;
  }

  Polynomial primary() {
    const Token& t = peek();
    if (t.kind == Tok::Number) {
      next();
      return Polynomial::constant(ctx_, parse_rational(t.text));
    }
    if (t.kind == Tok::Ident) {
      auto id = ctx_->find(t.text);
      if (!id) throw map_.error(t.offset, "undeclared variable '" + t.text + "'");
      if (!allow_params_ && ctx_->is_param(*id))
        throw map_.error(t.offset, "parameter '" + t.text + "' is not allowed here");
      next();
      return Polynomial::variable(ctx_, *id);
    }
    if (peek_op("(")) {
      next();
      Polynomial inner = expr();
      expect(")");
      return inner;
    }
    fail("expected expression");
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  ContextPtr ctx_;
  const SourceMap& map_;
  bool allow_params_;
};

struct Section {
  std::string name;
  std::size_t header;  // offset of the keyword
  std::size_t begin;   // offset after the colon
  std::size_t end;
};

const std::set<std::string> kSections = {"vars", "params", "field", "domain", "init", "invariant"};

std::string strip_comments(std::string_view text) {
  std::string out(text);
  bool in_comment = false;
  for (char& c : out) {
    if (c == '\n') in_comment = false;
    else if (c == '#') in_comment = true;
    if (in_comment) c = ' ';
  }
  return out;
}

std::vector<Section> split_sections(const std::string& text, const SourceMap& map) {
  std::vector<Section> out;
  std::size_t line_start = 0;
  while (line_start <= text.size()) {
    std::size_t line_end = text.find('\n', line_start);
    if (line_end == std::string::npos) line_end = text.size();
    std::size_t i = line_start;
    while (i < line_end && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t word_start = i;
    while (i < line_end && (std::isalpha(static_cast<unsigned char>(text[i])))) ++i;
    std::string word = text.substr(word_start, i - word_start);
    std::size_t j = i;
    while (j < line_end && text[j] == ' ') ++j;
    if (j < line_end && text[j] == ':' && kSections.count(word)) {
      if (!out.empty()) out.back().end = line_start;
      out.push_back({word, word_start, j + 1, text.size()});
    } else if (out.empty()) {
      std::size_t k = line_start;
      while (k < line_end && std::isspace(static_cast<unsigned char>(text[k]))) ++k;
      if (k < line_end) throw map.error(k, "expected a section header such as 'vars:'");
    }
    line_start = line_end + 1;
  }
  return out;
}

std::vector<std::string> name_list(Parser& p) {
  std::vector<std::string> names;
  if (p.at_end()) return names;
  names.push_back(p.ident());
  while (p.peek_op(",")) {
    p.next();
    names.push_back(p.ident());
  }
  if (!p.at_end()) p.fail("expected ',' or end of section");
  return names;
}

Formula parse_formula_section(const std::string& text, const Section& s, const ContextPtr& ctx,
                              const SourceMap& map) {
  Parser p(tokenize(std::string_view(text).substr(s.begin, s.end - s.begin), s.begin, map), ctx, map, true);
  if (p.at_end()) p.fail("expected formula");
  Formula f = p.formula();
  if (!p.at_end()) p.fail("expected end of formula");
  return f;
}

}  // namespace

Problem parse_problem(std::string_view raw) {
  std::string text = strip_comments(raw);
  SourceMap map(text);
  std::vector<Section> sections = split_sections(text, map);
  std::map<std::string, const Section*> by_name;
  for (const auto& s : sections) {
    if (!by_name.emplace(s.name, &s).second)
      throw map.error(s.header, "duplicate section '" + s.name + ":'");
  }
  auto body = [&](const Section& s) { return std::string_view(text).substr(s.begin, s.end - s.begin); };
  auto require = [&](const std::string& name) -> const Section& {
    auto it = by_name.find(name);
    if (it == by_name.end()) throw map.error(text.size(), "missing section '" + name + ":'");
    return *it->second;
  };

  auto names_of = [&](const Section& s) {
    ContextPtr empty = make_context({});
    Parser p(tokenize(body(s), s.begin, map), empty, map, true);
    return std::pair{name_list(p), tokenize(body(s), s.begin, map)};
  };
  const Section& vars_sec = require("vars");
  auto [state, state_toks] = names_of(vars_sec);
  if (state.empty()) throw map.error(vars_sec.begin, "at least one state variable is required");
  std::vector<std::string> params;
  std::vector<Token> param_toks;
  if (by_name.count("params")) std::tie(params, param_toks) = names_of(*by_name["params"]);

  std::set<std::string> seen;
  auto check_names = [&](const std::vector<Token>& toks) {
    for (const auto& t : toks) {
      if (t.kind != Tok::Ident) continue;
      if (t.text == "true" || t.text == "false") throw map.error(t.offset, "reserved name '" + t.text + "'");
      if (!seen.insert(t.text).second) throw map.error(t.offset, "duplicate declaration of '" + t.text + "'");
    }
  };
  check_names(state_toks);
  check_names(param_toks);
  ContextPtr ctx = make_context(state, params);

  const Section& field_sec = require("field");
  Parser fp(tokenize(body(field_sec), field_sec.begin, map), ctx, map, false);
  std::vector<std::optional<Polynomial>> comps(state.size());
  while (!fp.at_end()) {
    std::size_t at = fp.peek().offset;
    std::string name = fp.ident();
    auto id = ctx->find(name);
    if (!id) throw map.error(at, "undeclared variable '" + name + "'");
    if (ctx->is_param(*id)) throw map.error(at, "parameter '" + name + "' cannot have a derivative");
    fp.expect("'");
    fp.expect("=");
    Polynomial rhs = fp.expr();
    if (comps[*id]) throw map.error(at, "duplicate equation for '" + name + "'");
    comps[*id] = rhs;
    if (fp.at_end()) break;
    fp.expect(";");
  }
  std::vector<Polynomial> field;
  for (std::size_t i = 0; i < comps.size(); ++i) {
    if (!comps[i])
      throw map.error(field_sec.header, "field arity mismatch: no equation for '" + state[i] + "'");
    field.push_back(*comps[i]);
  }

  Problem prob{ctx, VectorField(ctx, std::move(field))};
  auto formula_of = [&](const Section& s) { return parse_formula_section(text, s, ctx, map); };
  if (by_name.count("domain")) {
    prob.domain = formula_of(*by_name["domain"]);
    if (prob.domain.has_params()) throw map.error(by_name["domain"]->begin, "domain must not mention parameters");
  }
  prob.init = formula_of(require("init"));
  if (prob.init.has_params()) throw map.error(by_name["init"]->begin, "init must not mention parameters");
  prob.candidate = formula_of(require("invariant"));
  return prob;
}

Formula parse_formula(std::string_view text, const ContextPtr& ctx) {
  std::string clean = strip_comments(text);
  SourceMap map(clean);
  Parser p(tokenize(clean, 0, map), ctx, map, true);
  if (p.at_end()) p.fail("expected formula");
  Formula f = p.formula();
  if (!p.at_end()) p.fail("expected end of formula");
  return f;
}

Polynomial parse_polynomial(std::string_view text, const ContextPtr& ctx) {
  std::string clean = strip_comments(text);
  SourceMap map(clean);
  Parser p(tokenize(clean, 0, map), ctx, map, true);
  Polynomial q = p.expr();
  if (!p.at_end()) p.fail("expected end of expression");
  return q;
}

std::string print_problem(const Problem& prob) {
  std::ostringstream out;
  auto join = [](const std::vector<std::string>& names) {
    std::string s;
    for (std::size_t i = 0; i < names.size(); ++i) s += (i ? ", " : "") + names[i];
    return s;
  };
  out << "vars: " << join(prob.ctx->state_names()) << "\n";
  if (prob.parametric()) out << "params: " << join(prob.ctx->param_names()) << "\n";
  out << "field:\n";
  for (std::size_t i = 0; i < prob.field.dim(); ++i)
    out << "  " << prob.ctx->name(static_cast<VarId>(i)) << "' = " << prob.field[i].to_string() << ";\n";
  if (!prob.domain.is_true()) out << "domain: " << to_string(prob.domain) << "\n";
  out << "init: " << to_string(prob.init) << "\n";
  out << "invariant: " << to_string(prob.candidate) << "\n";
  return out.str();
}

bool same_problem(const Problem& a, const Problem& b) {
  return a.ctx->names() == b.ctx->names() && a.ctx->num_state() == b.ctx->num_state() &&
         a.field == b.field && a.domain == b.domain && a.init == b.init && a.candidate == b.candidate;
}

}  // namespace sai
