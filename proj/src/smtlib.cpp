#include "sai/smtlib.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

namespace sai {
namespace {

const std::set<std::string_view> kReserved = {
    "and", "or", "not", "=>", "xor", "ite", "let", "forall", "exists", "true", "false",
    "distinct", "as", "par", "_", "!", "Real", "Int", "Bool", "root-obj"};

void collect_vars(const Formula& f, std::set<VarId>& out) {
  if (f.kind() == Formula::Kind::Atom) {
    for (const auto& [m, c] : f.poly().terms())
      for (const auto& vp : m.factors()) out.insert(vp.var);
    return;
  }
  for (const auto& c : f.children()) collect_vars(c, out);
}

void check_declared(const Formula& phi, const std::vector<std::string>& vars) {
  std::set<VarId> used;
  collect_vars(phi, used);
  if (used.empty()) return;
  const VarContext& ctx = *phi.atom_polys().front().context();
  for (VarId v : used) {
    if (std::find(vars.begin(), vars.end(), ctx.name(v)) == vars.end())
      throw std::invalid_argument("formula mentions undeclared variable '" + ctx.name(v) + "'");
  }
}

std::string symbol_list(const std::vector<std::string>& vars) {
  std::string s;
  for (std::size_t i = 0; i < vars.size(); ++i) s += (i ? " " : "") + smt_symbol(vars[i]);
  return s;
}

void preamble(std::ostringstream& out, std::string_view logic, const std::vector<std::string>& consts) {
  out << "(set-option :produce-models true)\n";
  out << "(set-logic " << logic << ")\n";
  for (const auto& v : consts) out << "(declare-const " << smt_symbol(v) << " Real)\n";
}

void epilogue(std::ostringstream& out, const std::vector<std::string>& model_vars) {
  out << "(check-sat)\n";
  if (!model_vars.empty()) out << "(get-value (" << symbol_list(model_vars) << "))\n";
}

// Univariate polynomials over Q, ascending coefficients, no trailing zeros.
using Upoly = std::vector<Rational>;

void trim(Upoly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

Upoly add(Upoly a, const Upoly& b) {
  if (a.size() < b.size()) a.resize(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) a[i] += b[i];
  trim(a);
  return a;
}

Upoly scale(Upoly a, const Rational& c) {
  for (auto& x : a) x *= c;
  trim(a);
  return a;
}

Upoly mul(const Upoly& a, const Upoly& b) {
  if (a.empty() || b.empty()) return {};
  Upoly r(a.size() + b.size() - 1);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  trim(r);
  return r;
}

Upoly rem(Upoly a, const Upoly& b) {
  while (a.size() >= b.size() && !a.empty()) {
    Rational f = a.back() / b.back();
    std::size_t shift = a.size() - b.size();
    for (std::size_t i = 0; i < b.size(); ++i) a[i + shift] -= f * b[i];
    a.pop_back();
    trim(a);
  }
  return a;
}

Upoly quotient(Upoly a, const Upoly& b) {
  if (a.size() < b.size()) return {};
  Upoly q(a.size() - b.size() + 1);
  while (a.size() >= b.size() && !a.empty()) {
    Rational f = a.back() / b.back();
    std::size_t shift = a.size() - b.size();
    q[shift] = f;
    for (std::size_t i = 0; i < b.size(); ++i) a[i + shift] -= f * b[i];
    a.pop_back();
    trim(a);
  }
  trim(q);
  return q;
}

Upoly derivative(const Upoly& p) {
  Upoly d;
  for (std::size_t i = 1; i < p.size(); ++i) d.push_back(p[i] * static_cast<long>(i));
  trim(d);
  return d;
}

Upoly gcd(Upoly a, Upoly b) {
  while (!b.empty()) {
    Upoly r = rem(a, b);
    a = std::move(b);
    b = std::move(r);
  }
  return a.empty() ? a : scale(a, Rational(1 / a.back()));
}

Rational eval(const Upoly& p, const Rational& x) {
  Rational acc = 0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * x + *it;
  return acc;
}

int variations(const std::vector<Upoly>& seq, const Rational& x) {
  int count = 0;
  int last = 0;
  for (const auto& p : seq) {
    int s = sgn(eval(p, x));
    if (s == 0) continue;
    if (last != 0 && s != last) ++count;
    last = s;
  }
  return count;
}

bool is_number(const std::string& s) {
  return !s.empty() && (std::isdigit(static_cast<unsigned char>(s[0])) || s[0] == '.');
}

Upoly eval_upoly(const SExpr& e) {
  if (!e.is_list) {
    if (is_number(e.atom)) {
      Upoly c{parse_rational(e.atom)};
      trim(c);
      return c;
    }
    return Upoly{0, 1};
  }
  if (e.items.empty() || e.items[0].is_list) throw SExprError("malformed polynomial term");
  const std::string& op = e.items[0].atom;
  std::vector<Upoly> args;
  for (std::size_t i = 1; i < e.items.size(); ++i) args.push_back(eval_upoly(e.items[i]));
  if (args.empty()) throw SExprError("operator without operands: " + op);
  if (op == "+") {
    Upoly acc;
    for (const auto& a : args) acc = add(acc, a);
    return acc;
  }
  if (op == "-") {
    if (args.size() == 1) return scale(args[0], -1);
    Upoly acc = args[0];
    for (std::size_t i = 1; i < args.size(); ++i) acc = add(acc, scale(args[i], -1));
    return acc;
  }
  if (op == "*") {
    Upoly acc{1};
    for (const auto& a : args) acc = mul(acc, a);
    return acc;
  }
  if (op == "^" && args.size() == 2 && args[1].size() <= 1) {
    Rational e_val = args[1].empty() ? Rational(0) : args[1][0];
    if (e_val.get_den() != 1 || e_val < 0) throw SExprError("non-natural exponent");
    Upoly acc{1};
    for (long i = 0; i < e_val.get_num().get_si(); ++i) acc = mul(acc, args[0]);
    return acc;
  }
  if (op == "/" && args.size() == 2 && args[1].size() == 1) return scale(args[0], Rational(1 / args[1][0]));
  throw SExprError("unsupported operator in polynomial: " + op);
}

}  // namespace

std::string smt_symbol(std::string_view name) {
  bool simple = !name.empty() && !std::isdigit(static_cast<unsigned char>(name[0])) &&
                kReserved.count(name) == 0;
  for (char c : name)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '.') simple = false;
  return simple ? std::string(name) : "|" + std::string(name) + "|";
}

std::string to_smtlib(const Polynomial& p) {
  if (p.is_zero()) return "0";
  const VarContext& ctx = *p.context();
  std::vector<std::string> terms;
  for (auto it = p.terms().rbegin(); it != p.terms().rend(); ++it) {
    const auto& [m, c] = *it;
    std::vector<std::string> factors;
    if (c != 1 || m.is_one()) factors.push_back(to_smtlib(c));
    for (const auto& vp : m.factors())
      for (unsigned e = 0; e < vp.exp; ++e) factors.push_back(smt_symbol(ctx.name(vp.var)));
    if (factors.size() == 1) {
      terms.push_back(factors[0]);
    } else {
      std::string t = "(*";
      for (const auto& f : factors) t += " " + f;
      terms.push_back(t + ")");
    }
  }
  if (terms.size() == 1) return terms[0];
  std::string s = "(+";
  for (const auto& t : terms) s += " " + t;
  return s + ")";
}

std::string to_smtlib(const Formula& f) {
  using K = Formula::Kind;
  auto nary = [](std::string_view op, const std::vector<Formula>& kids, std::string_view unit) {
    if (kids.empty()) return std::string(unit);
    if (kids.size() == 1) return to_smtlib(kids[0]);
    std::string s = "(" + std::string(op);
    for (const auto& k : kids) s += " " + to_smtlib(k);
    return s + ")";
  };
  switch (f.kind()) {
    case K::True: return "true";
    case K::False: return "false";
    case K::Atom: {
      std::string lhs = to_smtlib(f.poly());
      switch (f.relation()) {
        case Relation::Ge: return "(>= " + lhs + " 0)";
        case Relation::Gt: return "(> " + lhs + " 0)";
        case Relation::Le: return "(<= " + lhs + " 0)";
        case Relation::Lt: return "(< " + lhs + " 0)";
        case Relation::Eq: return "(= " + lhs + " 0)";
        case Relation::Ne: return "(not (= " + lhs + " 0))";
      }
      break;
    }
    case K::And: return nary("and", f.children(), "true");
    case K::Or: return nary("or", f.children(), "false");
    case K::Not: return "(not " + to_smtlib(f.children()[0]) + ")";
    case K::Implies:
      return "(=> " + to_smtlib(f.children()[0]) + " " + to_smtlib(f.children()[1]) + ")";
  }
  throw std::logic_error("unreachable formula kind");
}

std::string emit_validity_script(const Formula& phi, const std::vector<std::string>& vars,
                                 std::string_view logic) {
  check_declared(phi, vars);
  std::ostringstream out;
  out << "; validity query: unsat means the formula holds for all reals\n";
  preamble(out, logic, vars);
  out << "(assert (not " << to_smtlib(phi) << "))\n";
  epilogue(out, vars);
  return out.str();
}

std::string emit_satisfiability_script(const Formula& phi, const std::vector<std::string>& vars,
                                       std::string_view logic) {
  check_declared(phi, vars);
  std::ostringstream out;
  out << "; satisfiability query\n";
  preamble(out, logic, vars);
  out << "(assert " << to_smtlib(phi) << ")\n";
  epilogue(out, vars);
  return out.str();
}

std::string emit_exists_forall_script(const Formula& phi, const std::vector<std::string>& params,
                                      const std::vector<std::string>& state, std::string_view logic) {
  std::vector<std::string> all = params;
  all.insert(all.end(), state.begin(), state.end());
  check_declared(phi, all);
  std::ostringstream out;
  out << "; template query: exists parameters such that the formula holds for all states\n";
  preamble(out, logic, params);
  out << "(assert (forall (";
  for (std::size_t i = 0; i < state.size(); ++i) out << (i ? " " : "") << "(" << smt_symbol(state[i]) << " Real)";
  out << ") " << to_smtlib(phi) << "))\n";
  epilogue(out, params);
  return out.str();
}

std::vector<SExpr> parse_sexprs(std::string_view text) {
  std::vector<std::vector<SExpr>> stack(1);
  std::size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == ';') {
      while (i < text.size() && text[i] != '\n') ++i;
    } else if (c == '(') {
      stack.emplace_back();
      ++i;
    } else if (c == ')') {
      if (stack.size() == 1) throw SExprError("unbalanced ')'");
      SExpr list;
      list.is_list = true;
      list.items = std::move(stack.back());
      stack.pop_back();
      stack.back().push_back(std::move(list));
      ++i;
    } else if (c == '"' || c == '|') {
      std::size_t j = i + 1;
      std::string atom;
      while (j < text.size()) {
        if (text[j] == c) {
          if (c == '"' && j + 1 < text.size() && text[j + 1] == '"') {
            atom += '"';
            j += 2;
            continue;
          }
          break;
        }
        atom += text[j++];
      }
      if (j >= text.size()) throw SExprError("unterminated literal");
      stack.back().push_back(SExpr{atom, {}, false});
      i = j + 1;
    } else {
      std::size_t j = i;
      while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j])) && text[j] != '(' &&
             text[j] != ')' && text[j] != ';')
        ++j;
      stack.back().push_back(SExpr{std::string(text.substr(i, j - i)), {}, false});
      i = j;
    }
  }
  if (stack.size() != 1) throw SExprError("unbalanced '('");
  return std::move(stack[0]);
}

ModelValue parse_model_value(const SExpr& e) {
  if (!e.is_list) {
    if (!is_number(e.atom)) throw SExprError("unexpected model value: " + e.atom);
    return {parse_rational(e.atom), true};
  }
  if (e.items.empty() || e.items[0].is_list) throw SExprError("malformed model value");
  const std::string& op = e.items[0].atom;
  if (op == "-" && e.items.size() == 2) {
    ModelValue v = parse_model_value(e.items[1]);
    return {-v.value, v.exact};
  }
  if ((op == "-" || op == "+" || op == "*" || op == "/") && e.items.size() == 3) {
    ModelValue a = parse_model_value(e.items[1]);
    ModelValue b = parse_model_value(e.items[2]);
    bool exact = a.exact && b.exact;
    if (op == "-") return {a.value - b.value, exact};
    if (op == "+") return {a.value + b.value, exact};
    if (op == "*") return {a.value * b.value, exact};
    if (b.value == 0) throw SExprError("division by zero in model value");
    return {a.value / b.value, exact};
  }
  if (op == "root-obj" && e.items.size() == 3 && !e.items[2].is_list) {
    Upoly p = eval_upoly(e.items[1]);
    unsigned k = static_cast<unsigned>(std::stoul(e.items[2].atom));
    auto root = approximate_real_root(p, k);
    if (!root) throw SExprError("root-obj index out of range");
    return {*root, false};
  }
  throw SExprError("unsupported model value operator: " + op);
}

SolverReply parse_solver_reply(std::string_view output) {
  SolverReply reply;
  std::vector<SExpr> exprs;
  try {
    exprs = parse_sexprs(output);
  } catch (const SExprError& e) {
    reply.detail = std::string("unparseable solver output: ") + e.what();
    return reply;
  }
  std::size_t i = 0;
  for (; i < exprs.size(); ++i) {
    const SExpr& e = exprs[i];
    if (!e.is_list && (e.atom == "sat" || e.atom == "unsat" || e.atom == "unknown")) break;
    if (e.is_list && !e.items.empty() && !e.items[0].is_list && e.items[0].atom == "error") {
      reply.detail = e.items.size() > 1 ? e.items[1].atom : "solver error";
      return reply;
    }
  }
  if (i == exprs.size()) {
    reply.detail = "no check-sat answer in solver output";
    return reply;
  }
  const std::string& answer = exprs[i].atom;
  if (answer == "unsat") {
    reply.answer = SolverReply::Answer::Unsat;
    return reply;
  }
  if (answer == "unknown") {
    reply.answer = SolverReply::Answer::Unknown;
    reply.detail = "solver-unknown";
    return reply;
  }
  reply.answer = SolverReply::Answer::Sat;
  for (std::size_t j = i + 1; j < exprs.size(); ++j) {
    const SExpr& e = exprs[j];
    if (!e.is_list) continue;
    if (!e.items.empty() && !e.items[0].is_list && e.items[0].atom == "error") {
      reply.detail = e.items.size() > 1 ? e.items[1].atom : "solver error";
      continue;
    }
    try {
      for (const auto& binding : e.items) {
        if (!binding.is_list || binding.items.size() != 2 || binding.items[0].is_list)
          throw SExprError("malformed get-value binding");
        reply.model.emplace_back(binding.items[0].atom, parse_model_value(binding.items[1]));
      }
    } catch (const std::exception& ex) {
      reply.model.clear();
      reply.detail = std::string("unparseable model: ") + ex.what();
    }
    break;
  }
  return reply;
}

std::optional<Rational> approximate_real_root(std::vector<Rational> coeffs, unsigned k, unsigned bits) {
  trim(coeffs);
  if (coeffs.size() < 2 || k == 0) return std::nullopt;
  Upoly p = quotient(coeffs, gcd(coeffs, derivative(coeffs)));
  std::vector<Upoly> seq{p, derivative(p)};
  while (seq.back().size() > 1) {
    Upoly r = scale(rem(seq[seq.size() - 2], seq.back()), -1);
    if (r.empty()) break;
    seq.push_back(std::move(r));
  }
  Rational bound = 0;
  for (std::size_t i = 0; i + 1 < p.size(); ++i) bound = std::max(bound, Rational(abs(p[i] / p.back())));
  bound += 1;
  Rational lo = -bound;
  Rational hi = bound;
  int base = variations(seq, lo);
  if (base - variations(seq, hi) < static_cast<int>(k)) return std::nullopt;
  mpz_class denom = 1;
  mpz_mul_2exp(denom.get_mpz_t(), denom.get_mpz_t(), bits);
  Rational tol(1, denom);
  // Invariant: at least k roots in (-bound, hi], fewer than k in (-bound, lo].
  while (hi - lo > tol) {
    Rational mid = (lo + hi) / 2;
    if (base - variations(seq, mid) >= static_cast<int>(k)) hi = mid;
    else lo = mid;
  }
  return (lo + hi) / 2;
}

}  // namespace sai
