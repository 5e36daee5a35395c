#include "rdcontrol/ratelang.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace rdc::ratelang {

// ---------------------------------------------------------------------------
// SymbolTable

static void check_fresh(const SymbolTable& t, const std::string& name) {
  if (t.find_constant(name) >= 0 || t.find_variable(name) >= 0)
    throw DuplicateName(name);
}

int SymbolTable::add_constant(const std::string& name) {
  check_fresh(*this, name);
  constants_.push_back(name);
  return n_constants() - 1;
}

int SymbolTable::add_variable(const std::string& name) {
  check_fresh(*this, name);
  variables_.push_back(name);
  return n_variables() - 1;
}

int SymbolTable::find_constant(std::string_view name) const {
  for (size_t i = 0; i < constants_.size(); ++i)
    if (constants_[i] == name) return static_cast<int>(i);
  return -1;
}

int SymbolTable::find_variable(std::string_view name) const {
  for (size_t i = 0; i < variables_.size(); ++i)
    if (variables_[i] == name) return static_cast<int>(i);
  return -1;
}

// ---------------------------------------------------------------------------
// Expr construction

Expr::Expr() : table_(std::make_shared<SymbolTable>()) {
  nodes_.push_back(Node{});  // literal 0
  root_ = 0;
}

Expr Expr::number(double v, std::shared_ptr<const SymbolTable> t) {
  Expr e;
  e.table_ = std::move(t);
  e.nodes_[0].value = v;
  return e;
}

Expr Expr::constant(int sym, std::shared_ptr<const SymbolTable> t) {
  Expr e;
  e.table_ = std::move(t);
  e.nodes_[0] = Node{Op::Constant, 0.0, sym, -1, -1, -1};
  return e;
}

Expr Expr::variable(int sym, std::shared_ptr<const SymbolTable> t) {
  Expr e;
  e.table_ = std::move(t);
  e.nodes_[0] = Node{Op::Variable, 0.0, sym, -1, -1, -1};
  return e;
}

int Expr::clone_into(std::vector<Node>& arena, int id) const {
  const Node& n = nodes_[id];
  Node copy = n;
  if (n.a >= 0) copy.a = clone_into(arena, n.a);
  if (n.b >= 0) copy.b = clone_into(arena, n.b);
  arena.push_back(copy);
  return static_cast<int>(arena.size()) - 1;
}

// Binary/unary builders with literal folding. Folding keeps derivatives
// compact (dropping x*0 and x+0 terms) without doing general simplification.
// The parser uses the same builders, so "x + 0" and "-(2)" normalize the
// same way no matter where the tree came from.
Expr Expr::add(const Expr& a, const Expr& b) {
  if (a.is_literal_zero()) return b;
  if (b.is_literal_zero()) return a;
  if (a.nodes_[a.root_].op == Op::Number && b.nodes_[b.root_].op == Op::Number)
    return number(a.nodes_[a.root_].value + b.nodes_[b.root_].value, a.table_);
  Expr e;
  e.table_ = a.table_;
  e.nodes_.clear();
  int ia = a.clone_into(e.nodes_, a.root_);
  int ib = b.clone_into(e.nodes_, b.root_);
  e.nodes_.push_back(Node{Op::Add, 0.0, -1, ia, ib, -1});
  e.root_ = static_cast<int>(e.nodes_.size()) - 1;
  return e;
}

Expr Expr::sub(const Expr& a, const Expr& b) {
  if (b.is_literal_zero()) return a;
  if (a.is_literal_zero()) return neg(b);
  if (a.nodes_[a.root_].op == Op::Number && b.nodes_[b.root_].op == Op::Number)
    return number(a.nodes_[a.root_].value - b.nodes_[b.root_].value, a.table_);
  Expr e;
  e.table_ = a.table_;
  e.nodes_.clear();
  int ia = a.clone_into(e.nodes_, a.root_);
  int ib = b.clone_into(e.nodes_, b.root_);
  e.nodes_.push_back(Node{Op::Sub, 0.0, -1, ia, ib, -1});
  e.root_ = static_cast<int>(e.nodes_.size()) - 1;
  return e;
}

Expr Expr::mul(const Expr& a, const Expr& b) {
  if (a.is_literal_zero() || b.is_literal_zero())
    return number(0.0, a.table_);
  if (a.nodes_[a.root_].op == Op::Number && a.nodes_[a.root_].value == 1.0) return b;
  if (b.nodes_[b.root_].op == Op::Number && b.nodes_[b.root_].value == 1.0) return a;
  if (a.nodes_[a.root_].op == Op::Number && b.nodes_[b.root_].op == Op::Number)
    return number(a.nodes_[a.root_].value * b.nodes_[b.root_].value, a.table_);
  Expr e;
  e.table_ = a.table_;
  e.nodes_.clear();
  int ia = a.clone_into(e.nodes_, a.root_);
  int ib = b.clone_into(e.nodes_, b.root_);
  e.nodes_.push_back(Node{Op::Mul, 0.0, -1, ia, ib, -1});
  e.root_ = static_cast<int>(e.nodes_.size()) - 1;
  return e;
}

Expr Expr::div(const Expr& a, const Expr& b) {
  if (a.is_literal_zero()) return number(0.0, a.table_);
  if (b.nodes_[b.root_].op == Op::Number && b.nodes_[b.root_].value == 1.0) return a;
  Expr e;
  e.table_ = a.table_;
  e.nodes_.clear();
  int ia = a.clone_into(e.nodes_, a.root_);
  int ib = b.clone_into(e.nodes_, b.root_);
  e.nodes_.push_back(Node{Op::Div, 0.0, -1, ia, ib, -1});
  e.root_ = static_cast<int>(e.nodes_.size()) - 1;
  return e;
}

Expr Expr::neg(const Expr& a) {
  if (a.nodes_[a.root_].op == Op::Number)
    return number(-a.nodes_[a.root_].value, a.table_);
  Expr e;
  e.table_ = a.table_;
  e.nodes_.clear();
  int ia = a.clone_into(e.nodes_, a.root_);
  e.nodes_.push_back(Node{Op::Neg, 0.0, -1, ia, -1, -1});
  e.root_ = static_cast<int>(e.nodes_.size()) - 1;
  return e;
}

Expr Expr::pow(const Expr& a, double exponent) {
  if (exponent == 0.0) return number(1.0, a.table_);
  if (exponent == 1.0) return a;
  Expr e;
  e.table_ = a.table_;
  e.nodes_.clear();
  int ia = a.clone_into(e.nodes_, a.root_);
  e.nodes_.push_back(Node{Op::Pow, exponent, -1, ia, -1, -1});
  e.root_ = static_cast<int>(e.nodes_.size()) - 1;
  return e;
}

Expr Expr::call(Op fn, const Expr& a) {
  Expr e;
  e.table_ = a.table_;
  e.nodes_.clear();
  int ia = a.clone_into(e.nodes_, a.root_);
  e.nodes_.push_back(Node{fn, 0.0, -1, ia, -1, -1});
  e.root_ = static_cast<int>(e.nodes_.size()) - 1;
  return e;
}

bool Expr::is_literal_zero() const {
  const Node& r = nodes_[root_];
  return r.op == Op::Number && r.value == 0.0;
}

// ---------------------------------------------------------------------------
// evaluation

double Expr::eval(std::span<const double> vars, std::span<const double> consts) const {
  if (static_cast<int>(vars.size()) < table_->n_variables())
    throw UnboundIdentifier(table_->variable_name(static_cast<int>(vars.size())));
  if (static_cast<int>(consts.size()) < table_->n_constants())
    throw UnboundIdentifier(table_->constant_name(static_cast<int>(consts.size())));
  return eval_node(root_, vars, consts);
}

double Expr::eval_node(int id, std::span<const double> vars,
                       std::span<const double> consts) const {
  const Node& n = nodes_[id];
  switch (n.op) {
    case Op::Number:   return n.value;
    case Op::Constant: return consts[n.sym];
    case Op::Variable: return vars[n.sym];
    case Op::Add: return eval_node(n.a, vars, consts) + eval_node(n.b, vars, consts);
    case Op::Sub: return eval_node(n.a, vars, consts) - eval_node(n.b, vars, consts);
    case Op::Mul: return eval_node(n.a, vars, consts) * eval_node(n.b, vars, consts);
    case Op::Div: {
      double num = eval_node(n.a, vars, consts);
      double den = eval_node(n.b, vars, consts);
      if (den == 0.0) throw DivideByZero(n.pos);
      return num / den;
    }
    case Op::Neg:  return -eval_node(n.a, vars, consts);
    case Op::Pow:  return std::pow(eval_node(n.a, vars, consts), n.value);
    case Op::Exp:  return std::exp(eval_node(n.a, vars, consts));
    case Op::Tanh: return std::tanh(eval_node(n.a, vars, consts));
    case Op::Coth: {
      double x = eval_node(n.a, vars, consts);
      double t = std::tanh(x);
      if (t == 0.0) throw DivideByZero(n.pos);
      return 1.0 / t;
    }
    case Op::Sqrt: return std::sqrt(eval_node(n.a, vars, consts));
  }
  return 0.0; // unreachable
}

// ---------------------------------------------------------------------------
// derivative

bool Expr::depends_on(int var) const {
  for (const Node& n : nodes_)
    if (n.op == Op::Variable && n.sym == var) return true;
  return false;
}

Expr Expr::derivative(int var) const {
  // Work on subtrees as whole Expr values: simple, and the smart constructors
  // fold vanishing branches so the result stays small.
  struct Rec {
    const Expr& self;
    int var;
    Expr sub(int id) const {  // subtree rooted at id as an Expr
      Expr e;
      e.table_ = self.table_;
      e.nodes_.clear();
      e.root_ = self.clone_into(e.nodes_, id);
      return e;
    }
    Expr d(int id) const {
      const Node& n = self.nodes_[id];
      auto zero = [&] { return number(0.0, self.table_); };
      switch (n.op) {
        case Op::Number:
        case Op::Constant: return zero();
        case Op::Variable: return number(n.sym == var ? 1.0 : 0.0, self.table_);
        case Op::Add: return add(d(n.a), d(n.b));
        case Op::Sub: return Expr::sub(d(n.a), d(n.b));
        case Op::Mul: return add(mul(d(n.a), sub(n.b)), mul(sub(n.a), d(n.b)));
        case Op::Div: {
          // (u/v)' = u'/v - u v'/v^2
          Expr u = sub(n.a), v = sub(n.b);
          Expr first = Expr::div(d(n.a), v);
          Expr second = Expr::div(mul(u, d(n.b)), pow(v, 2.0));
          return Expr::sub(first, second);
        }
        case Op::Neg: return neg(d(n.a));
        case Op::Pow: {
          // (u^k)' = k u^(k-1) u'
          Expr du = d(n.a);
          if (du.is_literal_zero()) return zero();
          Expr factor = mul(number(n.value, self.table_), pow(sub(n.a), n.value - 1.0));
          return mul(factor, du);
        }
        case Op::Exp: {
          Expr du = d(n.a);
          if (du.is_literal_zero()) return zero();
          return mul(call(Op::Exp, sub(n.a)), du);
        }
        case Op::Tanh: {
          // tanh' = 1 - tanh^2
          Expr du = d(n.a);
          if (du.is_literal_zero()) return zero();
          Expr t = call(Op::Tanh, sub(n.a));
          return mul(Expr::sub(number(1.0, self.table_), pow(t, 2.0)), du);
        }
        case Op::Coth: {
          // coth' = 1 - coth^2
          Expr du = d(n.a);
          if (du.is_literal_zero()) return zero();
          Expr t = call(Op::Coth, sub(n.a));
          return mul(Expr::sub(number(1.0, self.table_), pow(t, 2.0)), du);
        }
        case Op::Sqrt: {
          // sqrt' = 1 / (2 sqrt)
          Expr du = d(n.a);
          if (du.is_literal_zero()) return zero();
          Expr den = mul(number(2.0, self.table_), call(Op::Sqrt, sub(n.a)));
          return Expr::div(du, den);
        }
      }
      return zero(); // unreachable
    }
  };
  return Rec{*this, var}.d(root_);
}

// ---------------------------------------------------------------------------
// printing

namespace {
int precedence(Op op) {
  switch (op) {
    case Op::Add: case Op::Sub: return 1;
    case Op::Mul: case Op::Div: return 2;
    case Op::Neg: return 3;
    case Op::Pow: return 4;
    default: return 5;
  }
}

void format_double(std::string& out, double v) {
  char buf[40];
  if (v == static_cast<long long>(v) && std::fabs(v) < 1e15)
    std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(v));
  else
    std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}
} // namespace

void Expr::print_node(std::string& out, int id, int parent_prec) const {
  const Node& n = nodes_[id];
  int prec = precedence(n.op);
  bool parens = prec < parent_prec;
  // A negative literal prints bare: the parser folds the leading '-' back
  // into the literal. Only a power base needs the parentheses.
  if (n.op == Op::Number) parens = n.value < 0 && parent_prec >= 5;
  if (parens) out += '(';
  switch (n.op) {
    case Op::Number:   format_double(out, n.value); break;
    case Op::Constant: out += table_->constant_name(n.sym); break;
    case Op::Variable: out += table_->variable_name(n.sym); break;
    case Op::Add:
      print_node(out, n.a, 1); out += " + "; print_node(out, n.b, 2);
      break;
    case Op::Sub:
      print_node(out, n.a, 1); out += " - "; print_node(out, n.b, 2);
      break;
    case Op::Mul:
      print_node(out, n.a, 2); out += '*'; print_node(out, n.b, 3);
      break;
    case Op::Div:
      print_node(out, n.a, 2); out += '/'; print_node(out, n.b, 3);
      break;
    case Op::Neg:
      out += '-'; print_node(out, n.a, 4);
      break;
    case Op::Pow:
      print_node(out, n.a, 5); out += '^'; format_double(out, n.value);
      break;
    case Op::Exp:  out += "exp(";  print_node(out, n.a, 0); out += ')'; break;
    case Op::Tanh: out += "tanh("; print_node(out, n.a, 0); out += ')'; break;
    case Op::Coth: out += "coth("; print_node(out, n.a, 0); out += ')'; break;
    case Op::Sqrt: out += "sqrt("; print_node(out, n.a, 0); out += ')'; break;
  }
  if (parens) out += ')';
}

std::string Expr::str() const {
  std::string out;
  print_node(out, root_, 0);
  return out;
}

// ---------------------------------------------------------------------------
// structural equality

bool Expr::equal_nodes(int id, const Expr& other, int oid) const {
  const Node& a = nodes_[id];
  const Node& b = other.nodes_[oid];
  if (a.op != b.op || a.sym != b.sym) return false;
  if ((a.op == Op::Number || a.op == Op::Pow) && a.value != b.value) return false;
  if ((a.a >= 0) != (b.a >= 0) || (a.b >= 0) != (b.b >= 0)) return false;
  if (a.a >= 0 && !equal_nodes(a.a, other, b.a)) return false;
  if (a.b >= 0 && !equal_nodes(a.b, other, b.b)) return false;
  return true;
}

bool Expr::equals(const Expr& other) const {
  return equal_nodes(root_, other, other.root_);
}

// ---------------------------------------------------------------------------
// parser

namespace {

struct Token {
  enum Kind { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End } kind;
  double value = 0.0;
  std::string text;
  int pos = 0;
};

class Lexer {
public:
  explicit Lexer(std::string_view src) : src_(src) {}

  Token next() {
    while (i_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[i_]))) ++i_;
    int pos = static_cast<int>(i_);
    if (i_ >= src_.size()) return {Token::End, 0, "", pos};
    char c = src_[i_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return lex_number(pos);
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return lex_ident(pos);
    ++i_;
    switch (c) {
      case '+': return {Token::Plus, 0, "+", pos};
      case '-': return {Token::Minus, 0, "-", pos};
      case '*': return {Token::Star, 0, "*", pos};
      case '/': return {Token::Slash, 0, "/", pos};
      case '^': return {Token::Caret, 0, "^", pos};
      case '(': return {Token::LParen, 0, "(", pos};
      case ')': return {Token::RParen, 0, ")", pos};
    }
    throw SyntaxError(pos, std::string("unexpected character '") + c + "'");
  }

private:
  Token lex_number(int pos) {
    const char* begin = src_.data() + i_;
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin) throw SyntaxError(pos, "malformed number");
    i_ += static_cast<size_t>(end - begin);
    return {Token::Number, v, std::string(begin, static_cast<size_t>(end - begin)), pos};
  }

  Token lex_ident(int pos) {
    size_t start = i_;
    while (i_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[i_])) || src_[i_] == '_'))
      ++i_;
    return {Token::Ident, 0, std::string(src_.substr(start, i_ - start)), pos};
  }

  std::string_view src_;
  size_t i_ = 0;
};

} // namespace

class Parser {
public:
  Parser(std::string_view src, std::shared_ptr<const SymbolTable> table)
    : lexer_(src), table_(std::move(table)) {
    advance();
  }

  Expr run() {
    Expr e = expression(0);
    if (tok_.kind != Token::End)
      throw SyntaxError(tok_.pos, "unexpected trailing input '" + tok_.text + "'");
    return e;
  }

private:
  static constexpr int kMaxDepth = 200;

  void advance() { tok_ = lexer_.next(); }

  void check_depth(int depth) {
    if (depth > kMaxDepth)
      throw SyntaxError(tok_.pos, "expression nested too deeply");
  }

  Expr expression(int depth) {
    check_depth(depth);
    Expr e = term(depth + 1);
    while (tok_.kind == Token::Plus || tok_.kind == Token::Minus) {
      bool plus = tok_.kind == Token::Plus;
      advance();
      Expr rhs = term(depth + 1);
      e = plus ? Expr::add(e, rhs) : Expr::sub(e, rhs);
    }
    return e;
  }

  Expr term(int depth) {
    check_depth(depth);
    Expr e = factor(depth + 1);
    while (tok_.kind == Token::Star || tok_.kind == Token::Slash) {
      bool mul = tok_.kind == Token::Star;
      int pos = tok_.pos;
      advance();
      Expr rhs = factor(depth + 1);
      e = mul ? Expr::mul(e, rhs) : div_at(e, rhs, pos);
    }
    return e;
  }

  // Division built by the parser keeps the '/' column for DivideByZero.
  static Expr div_at(const Expr& a, const Expr& b, int pos) {
    Expr e = Expr::div(a, b);
    if (!e.nodes_.empty() && e.nodes_[e.root_].op == Op::Div)
      e.nodes_[e.root_].pos = pos;
    return e;
  }

  Expr factor(int depth) {
    check_depth(depth);
    if (tok_.kind == Token::Minus) {
      advance();
      return Expr::neg(factor(depth + 1));
    }
    return power(depth + 1);
  }

  Expr power(int depth) {
    check_depth(depth);
    Expr base = atom(depth + 1);
    if (tok_.kind != Token::Caret) return base;
    advance();
    double sign = 1.0;
    if (tok_.kind == Token::Minus) {
      sign = -1.0;
      advance();
    }
    if (tok_.kind != Token::Number)
      throw SyntaxError(tok_.pos, "exponent must be a numeric literal");
    double exponent = sign * tok_.value;
    advance();
    return Expr::pow(base, exponent);
  }

  Expr atom(int depth) {
    check_depth(depth);
    switch (tok_.kind) {
      case Token::Number: {
        Expr e = Expr::number(tok_.value, table_);
        advance();
        return e;
      }
      case Token::LParen: {
        advance();
        Expr e = expression(depth + 1);
        expect(Token::RParen, "expected ')'");
        return e;
      }
      case Token::Ident: {
        std::string name = tok_.text;
        int pos = tok_.pos;
        advance();
        if (tok_.kind == Token::LParen) {
          advance();
          Expr arg = expression(depth + 1);
          expect(Token::RParen, "expected ')' after function argument");
          return make_call(name, arg, pos);
        }
        int c = table_->find_constant(name);
        if (c >= 0) return Expr::constant(c, table_);
        int v = table_->find_variable(name);
        if (v >= 0) return Expr::variable(v, table_);
        throw UnknownIdentifier(name);
      }
      default:
        throw SyntaxError(tok_.pos, "expected a number, name, or '('");
    }
  }

  Expr make_call(const std::string& name, const Expr& arg, int pos) {
    Op fn;
    if (name == "exp") fn = Op::Exp;
    else if (name == "tanh") fn = Op::Tanh;
    else if (name == "coth") fn = Op::Coth;
    else if (name == "sqrt") fn = Op::Sqrt;
    else throw UnknownIdentifier(name);
    Expr e = Expr::call(fn, arg);
    e.nodes_[e.root_].pos = pos;
    return e;
  }

  void expect(Token::Kind kind, const char* msg) {
    if (tok_.kind != kind) throw SyntaxError(tok_.pos, msg);
    advance();
  }

  Lexer lexer_;
  std::shared_ptr<const SymbolTable> table_;
  Token tok_;
};

Expr parse(std::string_view text, std::shared_ptr<const SymbolTable> table) {
  return Parser(text, std::move(table)).run();
}

} // namespace rdc::ratelang
