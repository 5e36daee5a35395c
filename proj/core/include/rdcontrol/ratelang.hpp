#ifndef RDCONTROL_RATELANG_HPP
#define RDCONTROL_RATELANG_HPP

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rdcontrol/errors.hpp"

namespace rdc::ratelang {

/// Names an expression may reference: bound constants (rate parameters) and
/// variables (the concentrations, or `xi` for initial profiles). Parsing
/// resolves every identifier against one table; evaluation then runs on
/// index-addressed spans with no string lookups.
class SymbolTable {
public:
  /// Registers a constant; throws DuplicateName if the name is taken.
  int add_constant(const std::string& name);
  /// Registers a variable; throws DuplicateName if the name is taken.
  int add_variable(const std::string& name);

  int n_constants() const { return static_cast<int>(constants_.size()); }
  int n_variables() const { return static_cast<int>(variables_.size()); }

  /// Index of the named constant/variable, or -1 when absent.
  int find_constant(std::string_view name) const;
  int find_variable(std::string_view name) const;

  const std::string& constant_name(int i) const { return constants_[i]; }
  const std::string& variable_name(int i) const { return variables_[i]; }

private:
  std::vector<std::string> constants_;
  std::vector<std::string> variables_;
};

enum class Op : std::uint8_t {
  Number,    // literal; value
  Constant,  // sym indexes the table's constants
  Variable,  // sym indexes the table's variables
  Add, Sub, Mul, Div,   // children a, b
  Neg,                  // child a
  Pow,                  // child a, numeric exponent in value
  Exp, Tanh, Coth, Sqrt // child a
};

/// A parsed rate expression: an immutable tree stored as a flat node arena.
/// Value semantics; copies share nothing but the symbol table.
class Expr {
public:
  /// Default-constructed expression is the literal 0 over an empty table.
  Expr();

  /// Evaluates with `vars[i]` bound to variable i and `consts[i]` to
  /// constant i. Throws UnboundIdentifier if a span is too short and
  /// DivideByZero on an exactly zero denominator.
  double eval(std::span<const double> vars, std::span<const double> consts) const;

  /// Exact partial derivative with respect to variable `var`, with literal
  /// constant folding. The result shares this expression's symbol table.
  Expr derivative(int var) const;

  /// Prints a form that `parse` maps back to a structurally equal tree.
  std::string str() const;

  /// Structural equality (same shape, literals, and symbol indices).
  bool equals(const Expr& other) const;

  bool is_literal_zero() const;
  bool depends_on(int var) const;

  const std::shared_ptr<const SymbolTable>& table() const { return table_; }

  // Building blocks (used by the parser, derivatives, and tests).
  static Expr number(double v, std::shared_ptr<const SymbolTable> t);
  static Expr constant(int sym, std::shared_ptr<const SymbolTable> t);
  static Expr variable(int sym, std::shared_ptr<const SymbolTable> t);
  static Expr add(const Expr& a, const Expr& b);
  static Expr sub(const Expr& a, const Expr& b);
  static Expr mul(const Expr& a, const Expr& b);
  static Expr div(const Expr& a, const Expr& b);
  static Expr neg(const Expr& a);
  static Expr pow(const Expr& a, double exponent);
  static Expr call(Op fn, const Expr& a);

private:
  struct Node {
    Op op = Op::Number;
    double value = 0.0;       // Number literal or Pow exponent
    std::int32_t sym = -1;    // Constant/Variable index
    std::int32_t a = -1, b = -1;
    std::int32_t pos = -1;    // source column, -1 for synthesized nodes
  };

  friend class Parser;

  double eval_node(int id, std::span<const double> vars,
                   std::span<const double> consts) const;
  int clone_into(std::vector<Node>& arena, int id) const;
  int derive(std::vector<Node>& arena, int id, int var) const;
  void print_node(std::string& out, int id, int parent_prec) const;
  bool equal_nodes(int id, const Expr& other, int oid) const;

  std::vector<Node> nodes_;
  std::int32_t root_ = -1;
  std::shared_ptr<const SymbolTable> table_;
};

/// Parses the rate grammar
///
///   expression := term (('+'|'-') term)*
///   term       := factor (('*'|'/') factor)*
///   factor     := '-' factor | power
///   power      := atom ('^' ('-')? NUMBER)?
///   atom       := NUMBER | IDENT | IDENT '(' expression ')' | '(' expression ')'
///
/// with builtins exp, tanh, coth, sqrt. Exponents are numeric literals only.
/// Throws SyntaxError (with column) or UnknownIdentifier.
Expr parse(std::string_view text, std::shared_ptr<const SymbolTable> table);

} // namespace rdc::ratelang

#endif
