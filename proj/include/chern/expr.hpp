#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <numbers>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace chern {

using cplx = std::complex<double>;

struct ParseError : std::runtime_error {
  std::size_t offset;
  ParseError(const std::string& msg, std::size_t at)
      : std::runtime_error(msg + " (at byte " + std::to_string(at) + ")"),
        offset(at) {}
};

struct EvalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Immutable AST for complex-valued coordinate expressions.
/// Coordinates are z1..zn; conj(zk) is a first-class node; parameters
/// are named reals. Evaluation is pure and thread-safe.
class Expr {
 public:
  enum class Op : std::uint8_t {
    Const, Coord, CoordConj, Param,
    Add, Sub, Mul, Div, Neg, Conj,
    Exp, Log, Sin, Cos, Abs2, PowInt
  };

  struct Node {
    Op op;
    cplx value{};          // Const
    int index = 0;         // Coord/CoordConj: 0-based; PowInt: exponent
    std::string name;      // Param
    std::vector<Expr> kids;
  };

  Expr() : node_(zero_node()) {}

  Op op() const { return node_->op; }
  const Node& node() const { return *node_; }

  bool is_const(cplx v) const {
    return node_->op == Op::Const && node_->value == v;
  }
  bool is_zero() const { return is_const(cplx(0.0)); }

  // -- factories -------------------------------------------------------

  static Expr constant(cplx v) {
    Expr e;
    e.node_ = std::make_shared<Node>(Node{Op::Const, v, 0, {}, {}});
    return e;
  }
  static Expr coord(int k) { return leaf(Op::Coord, k); }
  static Expr coord_conj(int k) { return leaf(Op::CoordConj, k); }
  static Expr param(std::string name) {
    Expr e;
    e.node_ = std::make_shared<Node>(Node{Op::Param, {}, 0, std::move(name), {}});
    return e;
  }

  friend Expr operator+(const Expr& a, const Expr& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    if (both_const(a, b)) return constant(a.cval() + b.cval());
    return make(Op::Add, {a, b});
  }
  friend Expr operator-(const Expr& a, const Expr& b) {
    if (b.is_zero()) return a;
    if (both_const(a, b)) return constant(a.cval() - b.cval());
    if (a.is_zero()) return -b;
    return make(Op::Sub, {a, b});
  }
  friend Expr operator*(const Expr& a, const Expr& b) {
    if (a.is_zero() || b.is_zero()) return constant(0.0);
    if (a.is_const(cplx(1.0))) return b;
    if (b.is_const(cplx(1.0))) return a;
    if (both_const(a, b)) return constant(a.cval() * b.cval());
    return make(Op::Mul, {a, b});
  }
  friend Expr operator/(const Expr& a, const Expr& b) {
    if (a.is_zero()) return constant(0.0);
    if (b.is_const(cplx(1.0))) return a;
    if (both_const(a, b)) return constant(a.cval() / b.cval());
    return make(Op::Div, {a, b});
  }
  friend Expr operator-(const Expr& a) {
    if (a.node_->op == Op::Const) return constant(-a.cval());
    if (a.node_->op == Op::Neg) return a.node_->kids[0];
    return make(Op::Neg, {a});
  }

  static Expr conj(const Expr& a) {
    switch (a.node_->op) {
      case Op::Const: return constant(std::conj(a.cval()));
      case Op::Coord: return coord_conj(a.node_->index);
      case Op::CoordConj: return coord(a.node_->index);
      case Op::Param: return a;               // parameters are real
      case Op::Conj: return a.node_->kids[0]; // conj(conj(e)) = e
      case Op::Abs2: return a;                // |e|^2 is real
      default: return make(Op::Conj, {a});
    }
  }
  static Expr exp(const Expr& a) { return unary_fold(Op::Exp, a); }
  static Expr log(const Expr& a) { return unary_fold(Op::Log, a); }
  static Expr sin(const Expr& a) { return unary_fold(Op::Sin, a); }
  static Expr cos(const Expr& a) { return unary_fold(Op::Cos, a); }
  static Expr abs2(const Expr& a) {
    if (a.node_->op == Op::Const) return constant(std::norm(a.cval()));
    return make(Op::Abs2, {a});
  }
  static Expr powi(const Expr& a, int k) {
    if (k == 0) return constant(1.0);
    if (k == 1) return a;
    if (a.node_->op == Op::Const) return constant(std::pow(a.cval(), k));
    Expr e;
    e.node_ = std::make_shared<Node>(Node{Op::PowInt, {}, k, {}, {a}});
    return e;
  }

  // -- Wirtinger differentiation ---------------------------------------

  /// d/dz_k (barred=false) or d/dz̄_k (barred=true), treating z_k and
  /// conj(z_k) as independent variables.
  Expr diff(int k, bool barred) const {
    const Node& n = *node_;
    switch (n.op) {
      case Op::Const:
      case Op::Param:
        return constant(0.0);
      case Op::Coord:
        return constant((!barred && n.index == k) ? 1.0 : 0.0);
      case Op::CoordConj:
        return constant((barred && n.index == k) ? 1.0 : 0.0);
      case Op::Add: return n.kids[0].diff(k, barred) + n.kids[1].diff(k, barred);
      case Op::Sub: return n.kids[0].diff(k, barred) - n.kids[1].diff(k, barred);
      case Op::Mul:
        return n.kids[0].diff(k, barred) * n.kids[1] +
               n.kids[0] * n.kids[1].diff(k, barred);
      case Op::Div: {
        const Expr &u = n.kids[0], &v = n.kids[1];
        return (u.diff(k, barred) * v - u * v.diff(k, barred)) / (v * v);
      }
      case Op::Neg: return -n.kids[0].diff(k, barred);
      case Op::Conj:
        // d/dz conj(e) = conj(d/dz̄ e)
        return conj(n.kids[0].diff(k, !barred));
      case Op::Exp: return exp(n.kids[0]) * n.kids[0].diff(k, barred);
      case Op::Log: return n.kids[0].diff(k, barred) / n.kids[0];
      case Op::Sin: return cos(n.kids[0]) * n.kids[0].diff(k, barred);
      case Op::Cos: return -(sin(n.kids[0]) * n.kids[0].diff(k, barred));
      case Op::Abs2:
        // e*conj(e): product rule through the conjugation
        return n.kids[0].diff(k, barred) * conj(n.kids[0]) +
               n.kids[0] * conj(n.kids[0].diff(k, !barred));
      case Op::PowInt: {
        const Expr& u = n.kids[0];
        return constant(double(n.index)) * powi(u, n.index - 1) *
               u.diff(k, barred);
      }
    }
    throw EvalError("corrupt AST");
  }

  // -- direct recursive evaluation --------------------------------------

  cplx eval(std::span<const cplx> coords,
            const std::map<std::string, double>& params) const {
    const Node& n = *node_;
    switch (n.op) {
      case Op::Const: return n.value;
      case Op::Coord: return coords[static_cast<std::size_t>(n.index)];
      case Op::CoordConj:
        return std::conj(coords[static_cast<std::size_t>(n.index)]);
      case Op::Param: {
        auto it = params.find(n.name);
        if (it == params.end()) throw EvalError("unbound parameter '" + n.name + "'");
        return it->second;
      }
      case Op::Add: return n.kids[0].eval(coords, params) + n.kids[1].eval(coords, params);
      case Op::Sub: return n.kids[0].eval(coords, params) - n.kids[1].eval(coords, params);
      case Op::Mul: return n.kids[0].eval(coords, params) * n.kids[1].eval(coords, params);
      case Op::Div: return n.kids[0].eval(coords, params) / n.kids[1].eval(coords, params);
      case Op::Neg: return -n.kids[0].eval(coords, params);
      case Op::Conj: return std::conj(n.kids[0].eval(coords, params));
      case Op::Exp: return std::exp(n.kids[0].eval(coords, params));
      case Op::Log: {
        cplx v = n.kids[0].eval(coords, params);
        if (v == cplx(0.0)) throw EvalError("log of zero");
        return std::log(v);
      }
      case Op::Sin: return std::sin(n.kids[0].eval(coords, params));
      case Op::Cos: return std::cos(n.kids[0].eval(coords, params));
      case Op::Abs2: return std::norm(n.kids[0].eval(coords, params));
      case Op::PowInt: {
        cplx v = n.kids[0].eval(coords, params);
        return std::pow(v, n.index);
      }
    }
    throw EvalError("corrupt AST");
  }

  // -- introspection -----------------------------------------------------

  /// Bitmask of complex coordinates the expression references.
  std::uint32_t coord_mask() const {
    std::uint32_t m = 0;
    walk([&](const Node& n) {
      if (n.op == Op::Coord || n.op == Op::CoordConj)
        m |= (1u << n.index);
    });
    return m;
  }

  void collect_params(std::vector<std::string>& out) const {
    walk([&](const Node& n) {
      if (n.op == Op::Param) {
        for (const auto& s : out)
          if (s == n.name) return;
        out.push_back(n.name);
      }
    });
  }

  std::string to_string() const {
    std::ostringstream os;
    print(os, 0);
    return os.str();
  }

 private:
  std::shared_ptr<const Node> node_;

  cplx cval() const { return node_->value; }
  static bool both_const(const Expr& a, const Expr& b) {
    return a.node_->op == Op::Const && b.node_->op == Op::Const;
  }
  static Expr leaf(Op op, int k) {
    Expr e;
    e.node_ = std::make_shared<Node>(Node{op, {}, k, {}, {}});
    return e;
  }
  static Expr make(Op op, std::vector<Expr> kids) {
    Expr e;
    e.node_ = std::make_shared<Node>(Node{op, {}, 0, {}, std::move(kids)});
    return e;
  }
  static Expr unary_fold(Op op, const Expr& a) {
    if (a.node_->op == Op::Const) {
      cplx v = a.cval();
      switch (op) {
        case Op::Exp: return constant(std::exp(v));
        case Op::Log:
          if (v == cplx(0.0)) break;  // keep node; error at eval
          return constant(std::log(v));
        case Op::Sin: return constant(std::sin(v));
        case Op::Cos: return constant(std::cos(v));
        default: break;
      }
    }
    return make(op, {a});
  }
  static std::shared_ptr<const Node> zero_node() {
    static const auto z =
        std::make_shared<Node>(Node{Op::Const, cplx(0.0), 0, {}, {}});
    return z;
  }

  template <class F>
  void walk(F&& f) const {
    f(*node_);
    for (const auto& k : node_->kids) k.walk(f);
  }

  // precedence: 0 add, 1 mul, 2 unary, 3 pow/atom
  void print(std::ostringstream& os, int parent_prec) const {
    const Node& n = *node_;
    auto paren = [&](int prec, auto&& body) {
      if (prec < parent_prec) os << '(';
      body();
      if (prec < parent_prec) os << ')';
    };
    switch (n.op) {
      case Op::Const: {
        cplx v = n.value;
        if (v.imag() == 0.0) {
          if (v.real() < 0) { os << '(' << fmt(v.real()) << ')'; }
          else os << fmt(v.real());
        } else if (v.real() == 0.0 && v.imag() == 1.0) {
          os << 'i';
        } else {
          os << '(' << fmt(v.real()) << (v.imag() < 0 ? "-" : "+")
             << fmt(std::abs(v.imag())) << "*i)";
        }
        break;
      }
      case Op::Coord: os << 'z' << (n.index + 1); break;
      case Op::CoordConj: os << "conj(z" << (n.index + 1) << ')'; break;
      case Op::Param: os << n.name; break;
      case Op::Add:
        paren(0, [&] { n.kids[0].print(os, 0); os << '+'; n.kids[1].print(os, 1); });
        break;
      case Op::Sub:
        paren(0, [&] { n.kids[0].print(os, 0); os << '-'; n.kids[1].print(os, 1); });
        break;
      case Op::Mul:
        paren(1, [&] { n.kids[0].print(os, 1); os << '*'; n.kids[1].print(os, 2); });
        break;
      case Op::Div:
        paren(1, [&] { n.kids[0].print(os, 1); os << '/'; n.kids[1].print(os, 2); });
        break;
      case Op::Neg:
        paren(2, [&] { os << '-'; n.kids[0].print(os, 2); });
        break;
      case Op::Conj: os << "conj("; n.kids[0].print(os, 0); os << ')'; break;
      case Op::Exp: os << "exp("; n.kids[0].print(os, 0); os << ')'; break;
      case Op::Log: os << "log("; n.kids[0].print(os, 0); os << ')'; break;
      case Op::Sin: os << "sin("; n.kids[0].print(os, 0); os << ')'; break;
      case Op::Cos: os << "cos("; n.kids[0].print(os, 0); os << ')'; break;
      case Op::Abs2: os << "abs2("; n.kids[0].print(os, 0); os << ')'; break;
      case Op::PowInt:
        os << "pow(";
        n.kids[0].print(os, 0);
        os << ',' << n.index << ')';
        break;
    }
  }
  static std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
  }
};

/// Shorthand used by the Wirtinger-derivative call sites.
inline Expr wirtinger_diff(const Expr& e, int k, bool barred) {
  return e.diff(k, barred);
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

/// Grammar (see docs/expressions.md):
///   expr   := term  { ("+"|"-") term }
///   term   := factor { ("*"|"/") factor }
///   factor := unary [ "^" integer ]
///   unary  := "-" unary | atom
///   atom   := number | "i" | "pi" | coord | func "(" args ")" | param | "(" expr ")"
class Parser {
 public:
  Parser(std::string_view text, int n) : s_(text), n_(n) {}

  Expr parse() {
    if (s_.empty()) throw ParseError("empty expression", 0);
    Expr e = parse_expr();
    skip_ws();
    if (pos_ != s_.size()) throw ParseError("unexpected trailing input", pos_);
    return e;
  }

 private:
  std::string_view s_;
  int n_;
  std::size_t pos_ = 0;

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) { ++pos_; return true; }
    return false;
  }
  char peek() {
    skip_ws();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }

  Expr parse_expr() {
    Expr e = parse_term();
    for (;;) {
      if (eat('+')) e = e + parse_term();
      else if (eat('-')) e = e - parse_term();
      else return e;
    }
  }
  Expr parse_term() {
    Expr e = parse_factor();
    for (;;) {
      if (eat('*')) e = e * parse_factor();
      else if (eat('/')) e = e / parse_factor();
      else return e;
    }
  }
  Expr parse_factor() {
    Expr e = parse_unary();
    if (eat('^')) {
      int k = parse_int();
      e = Expr::powi(e, k);
    }
    return e;
  }
  Expr parse_unary() {
    if (eat('-')) return -parse_unary();
    return parse_atom();
  }

  int parse_int() {
    skip_ws();
    std::size_t at = pos_;
    bool neg = eat('-');
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (pos_ == start) throw ParseError("expected integer exponent", at);
    int v = std::stoi(std::string(s_.substr(start, pos_ - start)));
    return neg ? -v : v;
  }

  Expr parse_atom() {
    skip_ws();
    if (pos_ >= s_.size()) throw ParseError("unexpected end of input", pos_);
    char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (c == '(') {
      std::size_t at = pos_;
      ++pos_;
      Expr e = parse_expr();
      if (!eat(')')) throw ParseError("missing ')'", at);
      return e;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident();
    throw ParseError(std::string("unexpected character '") + c + "'", pos_);
  }

  Expr parse_number() {
    std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.'))
      ++pos_;
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      std::size_t mark = pos_++;
      if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
      if (pos_ >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[pos_]))) pos_ = mark;
      else while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    std::string tok(s_.substr(start, pos_ - start));
    try {
      return Expr::constant(std::stod(tok));
    } catch (const std::exception&) {
      throw ParseError("malformed number '" + tok + "'", start);
    }
  }

  Expr parse_ident() {
    std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
      ++pos_;
    std::string name(s_.substr(start, pos_ - start));

    if (name == "i") return Expr::constant(cplx(0.0, 1.0));
    if (name == "pi") return Expr::constant(std::numbers::pi);

    if (name.size() > 1 && name[0] == 'z' &&
        std::all_of(name.begin() + 1, name.end(),
                    [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); })) {
      int k = std::stoi(name.substr(1));
      if (k < 1 || k > n_)
        throw ParseError("coordinate index out of range: " + name, start);
      return Expr::coord(k - 1);
    }

    if (peek() == '(') {
      std::vector<Expr> args;
      eat('(');
      args.push_back(parse_expr());
      while (eat(',')) args.push_back(parse_expr());
      if (!eat(')')) throw ParseError("missing ')' in call to " + name, start);
      if (name == "conj" && args.size() == 1) return Expr::conj(args[0]);
      if (name == "exp" && args.size() == 1) return Expr::exp(args[0]);
      if (name == "log" && args.size() == 1) return Expr::log(args[0]);
      if (name == "sin" && args.size() == 1) return Expr::sin(args[0]);
      if (name == "cos" && args.size() == 1) return Expr::cos(args[0]);
      if (name == "abs2" && args.size() == 1) return Expr::abs2(args[0]);
      if (name == "pow") {
        if (args.size() != 2 || args[1].op() != Expr::Op::Const ||
            args[1].node().value.imag() != 0.0)
          throw ParseError("pow expects (expr, integer)", start);
        double k = args[1].node().value.real();
        if (k != std::floor(k)) throw ParseError("pow exponent must be an integer", start);
        return Expr::powi(args[0], static_cast<int>(k));
      }
      throw ParseError("unknown function '" + name + "'", start);
    }
    // anything else is a named real parameter
    return Expr::param(name);
  }
};

inline Expr parse_expr(std::string_view text, int n) {
  return Parser(text, n).parse();
}

// ---------------------------------------------------------------------------
// Tape compiler: flat postorder program for fast repeated evaluation.
// ---------------------------------------------------------------------------

class CompiledExpr {
 public:
  CompiledExpr() = default;

  explicit CompiledExpr(const Expr& e) { build(e); }

  /// Names of the parameters referenced, in slot order.
  const std::vector<std::string>& params() const { return params_; }
  std::uint32_t coord_mask() const { return mask_; }

  /// Resolve parameter slots against name->value bindings.
  std::vector<double> bind(const std::map<std::string, double>& values) const {
    std::vector<double> out(params_.size());
    for (std::size_t s = 0; s < params_.size(); ++s) {
      auto it = values.find(params_[s]);
      if (it == values.end())
        throw EvalError("unbound parameter '" + params_[s] + "'");
      out[s] = it->second;
    }
    return out;
  }

  cplx eval(std::span<const cplx> coords, std::span<const double> params,
            std::vector<cplx>& stack) const {
    stack.resize(depth_);
    std::size_t sp = 0;
    for (const Ins& in : tape_) {
      switch (in.op) {
        case Expr::Op::Const: stack[sp++] = consts_[in.arg]; break;
        case Expr::Op::Coord: stack[sp++] = coords[in.arg]; break;
        case Expr::Op::CoordConj: stack[sp++] = std::conj(coords[in.arg]); break;
        case Expr::Op::Param: stack[sp++] = params[in.arg]; break;
        case Expr::Op::Add: --sp; stack[sp - 1] += stack[sp]; break;
        case Expr::Op::Sub: --sp; stack[sp - 1] -= stack[sp]; break;
        case Expr::Op::Mul: --sp; stack[sp - 1] *= stack[sp]; break;
        case Expr::Op::Div: --sp; stack[sp - 1] /= stack[sp]; break;
        case Expr::Op::Neg: stack[sp - 1] = -stack[sp - 1]; break;
        case Expr::Op::Conj: stack[sp - 1] = std::conj(stack[sp - 1]); break;
        case Expr::Op::Exp: stack[sp - 1] = std::exp(stack[sp - 1]); break;
        case Expr::Op::Log:
          if (stack[sp - 1] == cplx(0.0)) throw EvalError("log of zero");
          stack[sp - 1] = std::log(stack[sp - 1]);
          break;
        case Expr::Op::Sin: stack[sp - 1] = std::sin(stack[sp - 1]); break;
        case Expr::Op::Cos: stack[sp - 1] = std::cos(stack[sp - 1]); break;
        case Expr::Op::Abs2: stack[sp - 1] = std::norm(stack[sp - 1]); break;
        case Expr::Op::PowInt:
          stack[sp - 1] = std::pow(stack[sp - 1], in.arg);
          break;
      }
    }
    return stack[0];
  }

  cplx eval(std::span<const cplx> coords, std::span<const double> params) const {
    thread_local std::vector<cplx> scratch;
    return eval(coords, params, scratch);
  }

 private:
  struct Ins {
    Expr::Op op;
    int arg = 0;
  };
  std::vector<Ins> tape_;
  std::vector<cplx> consts_;
  std::vector<std::string> params_;
  std::uint32_t mask_ = 0;
  std::size_t depth_ = 1;

  void build(const Expr& e) {
    std::size_t cur = 0;
    emit(e, cur);
  }
  void emit(const Expr& e, std::size_t& cur) {
    const auto& n = e.node();
    switch (n.op) {
      case Expr::Op::Const: {
        consts_.push_back(n.value);
        tape_.push_back({n.op, static_cast<int>(consts_.size() - 1)});
        bump(cur);
        return;
      }
      case Expr::Op::Coord:
      case Expr::Op::CoordConj:
        mask_ |= (1u << n.index);
        tape_.push_back({n.op, n.index});
        bump(cur);
        return;
      case Expr::Op::Param: {
        int slot = -1;
        for (std::size_t s = 0; s < params_.size(); ++s)
          if (params_[s] == n.name) slot = static_cast<int>(s);
        if (slot < 0) {
          params_.push_back(n.name);
          slot = static_cast<int>(params_.size() - 1);
        }
        tape_.push_back({n.op, slot});
        bump(cur);
        return;
      }
      default: {
        for (const auto& k : n.kids) emit(k, cur);
        tape_.push_back({n.op, n.op == Expr::Op::PowInt ? n.index : 0});
        cur -= (n.kids.size() - 1);
        return;
      }
    }
  }
  void bump(std::size_t& cur) {
    ++cur;
    depth_ = std::max(depth_, cur + 1);
  }
};

// ---------------------------------------------------------------------------
// Finite-difference Wirtinger engine (fallback for opaque evaluators and the
// "fd" derivative mode). Central differences in the 2n real coordinates with
// Wirtinger recombination; optional one-level Richardson extrapolation for
// first derivatives.
// ---------------------------------------------------------------------------

struct FdOptions {
  double step1 = 1e-5;      // first derivatives
  double step2 = 1e-4;      // second derivatives
  bool richardson = false;  // one-level extrapolation on first derivatives
};

using ScalarFn = std::function<cplx(std::span<const cplx>)>;

namespace fd_detail {

inline cplx shifted(const ScalarFn& f, std::span<const cplx> p, int k,
                    cplx dz, std::vector<cplx>& buf) {
  buf.assign(p.begin(), p.end());
  buf[static_cast<std::size_t>(k)] += dz;
  return f(buf);
}

inline cplx central(const ScalarFn& f, std::span<const cplx> p, int k,
                    cplx dir, double h, std::vector<cplx>& buf) {
  return (shifted(f, p, k, dir * h, buf) - shifted(f, p, k, -dir * h, buf)) /
         (2.0 * h);
}

}  // namespace fd_detail

/// First Wirtinger derivative of an opaque scalar: d/dz_k or d/dz̄_k.
inline cplx fd_wirtinger(const ScalarFn& f, std::span<const cplx> p, int k,
                         bool barred, const FdOptions& opt = {}) {
  std::vector<cplx> buf;
  auto once = [&](double h) {
    cplx dx = fd_detail::central(f, p, k, cplx(1, 0), h, buf);
    cplx dy = fd_detail::central(f, p, k, cplx(0, 1), h, buf);
    return barred ? 0.5 * (dx + cplx(0, 1) * dy) : 0.5 * (dx - cplx(0, 1) * dy);
  };
  if (!opt.richardson) return once(opt.step1);
  cplx d1 = once(opt.step1), d2 = once(opt.step1 / 2.0);
  return (4.0 * d2 - d1) / 3.0;
}

/// Second Wirtinger derivative d_a d_b(bar?) of an opaque scalar, via a
/// composed central stencil. The Richardson variant extrapolates from a
/// pair of larger steps, which also keeps the subtraction round-off small.
inline cplx fd_wirtinger2(const ScalarFn& f, std::span<const cplx> p, int a,
                          bool a_barred, int b, bool b_barred,
                          const FdOptions& opt = {}) {
  auto once = [&](double h) {
    std::vector<cplx> buf;
    auto inner = [&](std::span<const cplx> q) {
      std::vector<cplx> local;
      cplx dx = fd_detail::central(f, q, b, cplx(1, 0), h, local);
      cplx dy = fd_detail::central(f, q, b, cplx(0, 1), h, local);
      return b_barred ? 0.5 * (dx + cplx(0, 1) * dy)
                      : 0.5 * (dx - cplx(0, 1) * dy);
    };
    ScalarFn g = inner;
    cplx dx = fd_detail::central(g, p, a, cplx(1, 0), h, buf);
    cplx dy = fd_detail::central(g, p, a, cplx(0, 1), h, buf);
    return a_barred ? 0.5 * (dx + cplx(0, 1) * dy)
                    : 0.5 * (dx - cplx(0, 1) * dy);
  };
  if (!opt.richardson) return once(opt.step2);
  const double h = 10.0 * opt.step2;
  return (4.0 * once(h) - once(2.0 * h)) / 3.0;
}

}  // namespace chern
