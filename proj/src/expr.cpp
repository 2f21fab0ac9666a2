#include "approxlie/expr.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "approxlie/errors.hpp"

namespace approxlie {

struct Expr::Node {
  Kind kind = Kind::Constant;
  Rational value;
  AtomId atom = 0;
  Transcendental fn = Transcendental::Log;
  std::vector<Expr> ops;
  int exponent = 0;
};

namespace {

std::shared_ptr<Expr::Node> make_node(Expr::Kind kind) {
  auto n = std::make_shared<Expr::Node>();
  n->kind = kind;
  return n;
}

}  // namespace

Expr::Expr() : Expr(Rational(0)) {}
Expr::Expr(int c) : Expr(Rational(c)) {}
Expr::Expr(const Rational& c) {
  auto n = make_node(Kind::Constant);
  n->value = c;
  n->value.canonicalize();
  node_ = std::move(n);
}

Expr Expr::symbol(AtomId a) {
  auto n = make_node(Kind::Symbol);
  n->atom = a;
  return Expr(std::move(n));
}

Expr Expr::call(Transcendental fn, const Expr& arg) {
  auto n = make_node(Kind::Call);
  n->fn = fn;
  n->ops.push_back(arg);
  return Expr(std::move(n));
}

Expr Expr::sum(std::vector<Expr> terms) {
  std::vector<Expr> flat;
  Rational constant = 0;
  bool sawConstant = false;
  for (auto& t : terms) {
    if (t.kind() == Kind::Sum) {
      for (const auto& s : t.operands()) {
        if (s.kind() == Kind::Constant) {
          constant += s.value();
          sawConstant = true;
        } else {
          flat.push_back(s);
        }
      }
    } else if (t.kind() == Kind::Constant) {
      constant += t.value();
      sawConstant = true;
    } else {
      flat.push_back(std::move(t));
    }
  }
  if (sawConstant && constant != 0) flat.emplace_back(constant);
  if (flat.empty()) return Expr(0);
  if (flat.size() == 1) return flat[0];
  auto n = make_node(Kind::Sum);
  n->ops = std::move(flat);
  return Expr(std::move(n));
}

Expr Expr::product(std::vector<Expr> factors) {
  std::vector<Expr> flat;
  Rational constant = 1;
  for (auto& f : factors) {
    if (f.kind() == Kind::Product) {
      for (const auto& s : f.operands()) {
        if (s.kind() == Kind::Constant) {
          constant *= s.value();
        } else {
          flat.push_back(s);
        }
      }
    } else if (f.kind() == Kind::Constant) {
      constant *= f.value();
    } else {
      flat.push_back(std::move(f));
    }
  }
  if (constant == 0) return Expr(0);
  if (flat.empty()) return Expr(constant);
  if (constant == 1 && flat.size() == 1) return flat[0];
  if (constant != 1) flat.insert(flat.begin(), Expr(constant));
  auto n = make_node(Kind::Product);
  n->ops = std::move(flat);
  return Expr(std::move(n));
}

Expr Expr::power(const Expr& base, int exponent) {
  if (exponent == 0) return Expr(1);
  if (exponent == 1) return base;
  if (base.kind() == Kind::Constant) {
    if (base.value() == 0) {
      if (exponent < 0) throw DivisionByZeroExpr("zero raised to a negative power");
      return Expr(0);
    }
    mpz_class num, den;
    unsigned e = static_cast<unsigned>(std::abs(exponent));
    mpz_pow_ui(num.get_mpz_t(), base.value().get_num_mpz_t(), e);
    mpz_pow_ui(den.get_mpz_t(), base.value().get_den_mpz_t(), e);
    Rational r = exponent > 0 ? Rational(num, den) : Rational(den, num);
    r.canonicalize();
    return Expr(r);
  }
  if (base.kind() == Kind::Power) return power(base.operands()[0], base.exponent() * exponent);
  auto n = make_node(Kind::Power);
  n->ops.push_back(base);
  n->exponent = exponent;
  return Expr(std::move(n));
}

Expr::Kind Expr::kind() const { return node_->kind; }
const Rational& Expr::value() const { return node_->value; }
AtomId Expr::atom() const { return node_->atom; }
Transcendental Expr::function() const { return node_->fn; }
std::span<const Expr> Expr::operands() const { return node_->ops; }
int Expr::exponent() const { return node_->exponent; }
bool Expr::is_constant(const Rational& c) const { return kind() == Kind::Constant && value() == c; }

bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Expr::Kind::Constant: return a.value() == b.value();
    case Expr::Kind::Symbol: return a.atom() == b.atom();
    case Expr::Kind::Call:
      if (a.function() != b.function()) return false;
      break;
    case Expr::Kind::Power:
      if (a.exponent() != b.exponent()) return false;
      break;
    default: break;
  }
  auto oa = a.operands(), ob = b.operands();
  return std::equal(oa.begin(), oa.end(), ob.begin(), ob.end());
}

Expr operator+(const Expr& a, const Expr& b) { return Expr::sum({a, b}); }
Expr operator-(const Expr& a) { return Expr::product({Expr(-1), a}); }
Expr operator-(const Expr& a, const Expr& b) { return Expr::sum({a, -b}); }
Expr operator*(const Expr& a, const Expr& b) { return Expr::product({a, b}); }
Expr operator/(const Expr& a, const Expr& b) {
  if (b.is_constant(0)) throw DivisionByZeroExpr("division by zero");
  return Expr::product({a, Expr::power(b, -1)});
}
Expr pow(const Expr& base, int exponent) { return Expr::power(base, exponent); }

// ---------------------------------------------------------------- parsing

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Expr parse_all() {
    Expr e = expression();
    skip();
    if (pos_ < text_.size()) fail("end of input or operator");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& expected) const { throw SyntaxError(pos_ + 1, expected); }

  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expr expression() {
    std::vector<Expr> terms{term()};
    while (true) {
      if (accept('+')) {
        terms.push_back(term());
      } else if (accept('-')) {
        terms.push_back(-term());
      } else {
        break;
      }
    }
    return Expr::sum(std::move(terms));
  }

  Expr term() {
    Expr acc = unary();
    while (true) {
      if (accept('*')) {
        acc = acc * unary();
      } else if (accept('/')) {
        std::size_t at = pos_;
        Expr d = unary();
        if (d.is_constant(0)) throw DivisionByZeroExpr("division by zero at position " + std::to_string(at + 1));
        acc = acc / d;
      } else {
        break;
      }
    }
    return acc;
  }

  Expr unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }

  Expr power() {
    Expr base = primary();
    if (accept('^')) {
      int e = exponent();
      skip();
      if (pos_ < text_.size() && text_[pos_] == '^') fail("operator (chained exponents need parentheses)");
      return Expr::power(base, e);
    }
    return base;
  }

  int exponent() {
    bool negative = false;
    while (true) {
      if (accept('-')) {
        negative = !negative;
      } else if (!accept('+')) {
        break;
      }
    }
    skip();
    std::size_t start = pos_;
    Expr e;
    if (accept('(')) {
      e = expression();
      if (!accept(')')) fail("')'");
    } else if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      e = number();
    } else {
      fail("integer exponent");
    }
    if (e.kind() != Expr::Kind::Constant || e.value().get_den() != 1 || !e.value().get_num().fits_sint_p()) {
      pos_ = start;
      fail("integer exponent");
    }
    int v = static_cast<int>(e.value().get_num().get_si());
    return negative ? -v : v;
  }

  Expr number() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    std::string digits(text_.substr(start, pos_ - start));
    long scale = 0;
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      std::size_t f = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      digits += std::string(text_.substr(f, pos_ - f));
      scale -= static_cast<long>(pos_ - f);
    }
    if (digits.empty()) fail("number");
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t save = pos_;
      ++pos_;
      bool neg = false;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) neg = text_[pos_++] == '-';
      std::size_t ds = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (pos_ == ds) {
        pos_ = save;
      } else {
        long ev = std::stol(std::string(text_.substr(ds, pos_ - ds)));
        scale += neg ? -ev : ev;
      }
    }
    mpz_class mant(digits, 10), ten = 10, p;
    mpz_pow_ui(p.get_mpz_t(), ten.get_mpz_t(), static_cast<unsigned long>(std::labs(scale)));
    Rational r = scale >= 0 ? Rational(mant * p) : Rational(mant, p);
    r.canonicalize();
    return Expr(r);
  }

  Expr primary() {
    skip();
    if (pos_ >= text_.size()) fail("expression");
    char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (c == '(') {
      ++pos_;
      Expr e = expression();
      if (!accept(')')) fail("')'");
      return e;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
        ++pos_;
      }
      std::string name(text_.substr(start, pos_ - start));
      skip();
      if (pos_ < text_.size() && text_[pos_] == '(') {
        auto fn = transcendental_from_name(name);
        if (!fn) throw UnknownFunction("unknown function '" + name + "' at position " + std::to_string(start + 1));
        ++pos_;
        Expr arg = expression();
        if (!accept(')')) fail("')'");
        return Expr::call(*fn, arg);
      }
      return identifier(name, start);
    }
    fail("expression");
  }

  Expr identifier(const std::string& name, std::size_t start) {
    auto& reg = registry();
    if (auto f = reg.find_function(name)) return Expr::symbol(reg.jet(*f));
    if (auto a = reg.find_named(name)) return Expr::symbol(*a);
    auto us = name.find('_');
    if (us != std::string::npos) {
      if (auto f = reg.find_function(name.substr(0, us))) {
        const FunctionInfo& fi = reg.function_info(*f);
        std::vector<int> index(fi.args.size(), 0);
        for (char ch : name.substr(us + 1)) {
          bool found = false;
          for (std::size_t i = 0; i < fi.args.size(); ++i) {
            const std::string& argName = reg.info(fi.args[i]).name;
            if (argName.size() == 1 && argName[0] == ch) {
              ++index[i];
              found = true;
            }
          }
          if (!found) {
            pos_ = start;
            fail("derivative suffix over the arguments of " + fi.name);
          }
        }
        return Expr::symbol(reg.jet(*f, index));
      }
    }
    return Expr::symbol(reg.parameter(name));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse(std::string_view text) { return Parser(text).parse_all(); }

// ---------------------------------------------------------------- printing

namespace {

enum Prec { kSum = 1, kProduct = 2, kPower = 3 };

std::string rational_text(const Rational& r) { return r.get_str(); }

void print(const Expr& e, int context, std::string& out);

bool negative_term(const Expr& e) {
  if (e.kind() == Expr::Kind::Constant) return e.value() < 0;
  if (e.kind() == Expr::Kind::Product) {
    const Expr& first = e.operands()[0];
    return first.kind() == Expr::Kind::Constant && first.value() < 0;
  }
  return false;
}

void print_product(const Expr& e, std::string& out) {
  auto ops = e.operands();
  std::size_t i = 0;
  bool needOperator = false;
  if (ops[0].kind() == Expr::Kind::Constant) {
    const Rational& c = ops[0].value();
    if (c == -1) {
      out += "-";
    } else {
      out += rational_text(c);
      needOperator = true;
    }
    i = 1;
  }
  for (; i < ops.size(); ++i) {
    const Expr& f = ops[i];
    bool inverse = f.kind() == Expr::Kind::Power && f.exponent() < 0;
    if (inverse) {
      out += needOperator ? "/" : "1/";
      print(Expr::power(f.operands()[0], -f.exponent()), kPower, out);
    } else {
      if (needOperator) out += "*";
      print(f, kPower, out);
    }
    needOperator = true;
  }
}

void print(const Expr& e, int context, std::string& out) {
  switch (e.kind()) {
    case Expr::Kind::Constant: {
      bool paren = context >= kPower && (e.value() < 0 || e.value().get_den() != 1);
      if (paren) out += "(";
      out += rational_text(e.value());
      if (paren) out += ")";
      return;
    }
    case Expr::Kind::Symbol: out += registry().info(e.atom()).name; return;
    case Expr::Kind::Call:
      out += transcendental_name(e.function());
      out += "(";
      print(e.operands()[0], 0, out);
      out += ")";
      return;
    case Expr::Kind::Sum: {
      bool paren = context > kSum;
      if (paren) out += "(";
      auto ops = e.operands();
      for (std::size_t i = 0; i < ops.size(); ++i) {
        if (i == 0) {
          print(ops[i], kSum, out);
        } else if (negative_term(ops[i])) {
          out += " - ";
          print(-ops[i], kSum, out);
        } else {
          out += " + ";
          print(ops[i], kSum, out);
        }
      }
      if (paren) out += ")";
      return;
    }
    case Expr::Kind::Product: {
      bool paren = context >= kPower;
      if (paren) out += "(";
      print_product(e, out);
      if (paren) out += ")";
      return;
    }
    case Expr::Kind::Power: {
      if (e.exponent() < 0) {
        bool paren = context >= kPower;
        if (paren) out += "(";
        out += "1/";
        print(Expr::power(e.operands()[0], -e.exponent()), kPower, out);
        if (paren) out += ")";
        return;
      }
      print(e.operands()[0], kPower + 1, out);
      out += "^" + std::to_string(e.exponent());
      return;
    }
  }
}

}  // namespace

std::string to_string(const Expr& e) {
  std::string out;
  print(e, 0, out);
  return out;
}

// ---------------------------------------------------------------- calculus

Expr diff(const Expr& e, AtomId v) {
  switch (e.kind()) {
    case Expr::Kind::Constant: return Expr(0);
    case Expr::Kind::Symbol: {
      if (e.atom() == v) return Expr(1);
      const AtomInfo& info = registry().info(e.atom());
      if (info.kind != AtomKind::Jet) return Expr(0);
      int pos = argument_position(info, v);
      if (pos < 0) return Expr(0);
      std::vector<int> extra(info.index.size(), 0);
      extra[static_cast<std::size_t>(pos)] = 1;
      return Expr::symbol(jet_shift(e.atom(), extra));
    }
    case Expr::Kind::Call: {
      const Expr& a = e.operands()[0];
      Expr da = diff(a, v);
      if (da.is_constant(0)) return Expr(0);
      switch (e.function()) {
        case Transcendental::Log: return da / a;
        case Transcendental::Exp: return e * da;
        case Transcendental::Sin: return Expr::call(Transcendental::Cos, a) * da;
        case Transcendental::Cos: return -(Expr::call(Transcendental::Sin, a) * da);
        case Transcendental::Arctan: return da / (Expr(1) + Expr::power(a, 2));
      }
      return Expr(0);
    }
    case Expr::Kind::Sum: {
      std::vector<Expr> terms;
      for (const auto& t : e.operands()) terms.push_back(diff(t, v));
      return Expr::sum(std::move(terms));
    }
    case Expr::Kind::Product: {
      auto ops = e.operands();
      std::vector<Expr> terms;
      for (std::size_t i = 0; i < ops.size(); ++i) {
        Expr d = diff(ops[i], v);
        if (d.is_constant(0)) continue;
        std::vector<Expr> factors(ops.begin(), ops.end());
        factors[i] = d;
        terms.push_back(Expr::product(std::move(factors)));
      }
      return Expr::sum(std::move(terms));
    }
    case Expr::Kind::Power: {
      const Expr& b = e.operands()[0];
      Expr db = diff(b, v);
      if (db.is_constant(0)) return Expr(0);
      return Expr::product({Expr(e.exponent()), Expr::power(b, e.exponent() - 1), db});
    }
  }
  return Expr(0);
}

namespace {

bool contains_symbol(const Expr& e, AtomId a) {
  if (e.kind() == Expr::Kind::Symbol) return e.atom() == a;
  for (const auto& o : e.operands()) {
    if (contains_symbol(o, a)) return true;
  }
  return false;
}

Expr substitute_once(const Expr& e, const std::vector<std::pair<AtomId, Expr>>& rules) {
  switch (e.kind()) {
    case Expr::Kind::Constant: return e;
    case Expr::Kind::Symbol:
      for (const auto& [a, r] : rules) {
        if (a == e.atom()) return r;
      }
      return e;
    case Expr::Kind::Call: return Expr::call(e.function(), substitute_once(e.operands()[0], rules));
    case Expr::Kind::Sum: {
      std::vector<Expr> t;
      for (const auto& o : e.operands()) t.push_back(substitute_once(o, rules));
      return Expr::sum(std::move(t));
    }
    case Expr::Kind::Product: {
      std::vector<Expr> t;
      for (const auto& o : e.operands()) t.push_back(substitute_once(o, rules));
      return Expr::product(std::move(t));
    }
    case Expr::Kind::Power: return Expr::power(substitute_once(e.operands()[0], rules), e.exponent());
  }
  return e;
}

}  // namespace

Expr substitute(const Expr& e, const std::vector<std::pair<AtomId, Expr>>& rules, bool fixpoint) {
  if (!fixpoint) return substitute_once(e, rules);
  for (const auto& [a, r] : rules) {
    if (contains_symbol(r, a)) {
      throw CircularSubstitution("rule for " + registry().info(a).name + " refers to itself");
    }
  }
  Expr cur = e;
  for (std::size_t iter = 0; iter <= rules.size() + 1; ++iter) {
    bool any = false;
    for (const auto& [a, r] : rules) any = any || contains_symbol(cur, a);
    if (!any) return cur;
    cur = substitute_once(cur, rules);
  }
  throw CircularSubstitution("substitution rules do not reach a fixpoint");
}

NormalForm normalize(const Expr& e) {
  switch (e.kind()) {
    case Expr::Kind::Constant: return NormalForm(e.value());
    case Expr::Kind::Symbol: return NormalForm::atom(e.atom());
    case Expr::Kind::Call: return apply_function(e.function(), normalize(e.operands()[0]));
    case Expr::Kind::Sum: {
      NormalForm out;
      for (const auto& t : e.operands()) out += normalize(t);
      return out;
    }
    case Expr::Kind::Product: {
      NormalForm out(1);
      for (const auto& t : e.operands()) out *= normalize(t);
      return out;
    }
    case Expr::Kind::Power: return normalize(e.operands()[0]).pow(e.exponent());
  }
  return NormalForm();
}

namespace {

Expr atom_expr(AtomId a) {
  const AtomInfo& info = registry().info(a);
  if (info.kind == AtomKind::Transcendental) return Expr::call(info.fn, to_expr(*info.arg));
  return Expr::symbol(a);
}

Expr monomial_expr(const Monomial& m, const Rational& c) {
  auto& reg = registry();
  std::vector<Monomial::Factor> fs(m.factors().begin(), m.factors().end());
  std::sort(fs.begin(), fs.end(), [&](const auto& l, const auto& r) {
    if ((l.second > 0) != (r.second > 0)) return l.second > 0;
    return reg.info(l.first).sortKey < reg.info(r.first).sortKey;
  });
  std::vector<Expr> factors{Expr(c)};
  for (const auto& [a, e] : fs) factors.push_back(Expr::power(atom_expr(a), e));
  return Expr::product(std::move(factors));
}

Expr poly_expr(const Poly& p) {
  std::vector<const Poly::Term*> terms;
  for (const auto& t : p.terms()) terms.push_back(&t);
  std::sort(terms.begin(), terms.end(), [](const auto* a, const auto* b) { return compare_display(a->first, b->first) > 0; });
  std::vector<Expr> out;
  for (const auto* t : terms) out.push_back(monomial_expr(t->first, t->second));
  return Expr::sum(std::move(out));
}

}  // namespace

Expr to_expr(const NormalForm& f) {
  Expr num = poly_expr(f.numerator());
  if (f.is_polynomial()) return num;
  std::vector<std::pair<std::string, Expr>> dens;
  for (const auto& [id, e] : f.denominator()) {
    Expr q = poly_expr(FactorRegistry::instance().get(id));
    dens.emplace_back(to_string(q), Expr::power(q, -e));
  }
  std::sort(dens.begin(), dens.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<Expr> factors{num};
  for (auto& d : dens) factors.push_back(d.second);
  return Expr::product(std::move(factors));
}

std::string to_string(const NormalForm& f) { return to_string(to_expr(f)); }
std::string to_string(const Monomial& m) { return to_string(monomial_expr(m, 1)); }

// ---------------------------------------------------------------- numerics

double eval(const Expr& e, const Bindings& bindings) {
  switch (e.kind()) {
    case Expr::Kind::Constant: return e.value().get_d();
    case Expr::Kind::Symbol: {
      auto it = bindings.find(e.atom());
      if (it == bindings.end()) throw MissingBinding("no value bound for " + registry().info(e.atom()).name);
      return it->second;
    }
    case Expr::Kind::Call: {
      double a = eval(e.operands()[0], bindings);
      switch (e.function()) {
        case Transcendental::Log:
          if (!(a > 0)) throw NumericSingularity("logarithm of a non-positive value");
          return std::log(a);
        case Transcendental::Exp: return std::exp(a);
        case Transcendental::Sin: return std::sin(a);
        case Transcendental::Cos: return std::cos(a);
        case Transcendental::Arctan: return std::atan(a);
      }
      return 0;
    }
    case Expr::Kind::Sum: {
      double s = 0;
      for (const auto& t : e.operands()) s += eval(t, bindings);
      return s;
    }
    case Expr::Kind::Product: {
      double p = 1;
      for (const auto& t : e.operands()) p *= eval(t, bindings);
      return p;
    }
    case Expr::Kind::Power: {
      double b = eval(e.operands()[0], bindings);
      if (e.exponent() < 0 && std::abs(b) < 1e-300) throw NumericSingularity("division by a vanishing value");
      return std::pow(b, e.exponent());
    }
  }
  return 0;
}

}  // namespace approxlie
