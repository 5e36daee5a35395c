#include <cmath>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "rdcontrol/errors.hpp"
#include "rdcontrol/ratelang.hpp"

using namespace rdc;
using ratelang::Expr;
using ratelang::Op;
using ratelang::SymbolTable;

namespace {

std::shared_ptr<const SymbolTable> cycle_table() {
  auto t = std::make_shared<SymbolTable>();
  t->add_constant("k");
  t->add_constant("kappa");
  t->add_variable("Y");
  t->add_variable("YP");
  return t;
}

double eval1(const std::string& text, std::vector<double> vars, std::vector<double> consts) {
  return ratelang::parse(text, cycle_table()).eval(vars, consts);
}

}  // namespace

TEST_CASE("rate expressions evaluate with the usual precedence") {
  CHECK(eval1("1 + 2*3^2", {0, 0}, {0, 0}) == doctest::Approx(19.0));
  CHECK(eval1("-2^2", {0, 0}, {0, 0}) == doctest::Approx(-4.0));   // unary minus binds last
  CHECK(eval1("(1 + 2)*3", {0, 0}, {0, 0}) == doctest::Approx(9.0));
  CHECK(eval1("6/3/2", {0, 0}, {0, 0}) == doctest::Approx(1.0));   // left associative
  CHECK(eval1("1 - 2 - 3", {0, 0}, {0, 0}) == doctest::Approx(-4.0));
  CHECK(eval1("2^-2", {0, 0}, {0, 0}) == doctest::Approx(0.25));
  CHECK(eval1("k*(YP - kappa*Y)", {0.7, 0.3}, {2.0, 10.0}) == doctest::Approx(2.0 * (0.3 - 7.0)));
}

TEST_CASE("builtin functions") {
  CHECK(eval1("exp(0)", {0, 0}, {0, 0}) == doctest::Approx(1.0));
  CHECK(eval1("tanh(0.5)", {0, 0}, {0, 0}) == doctest::Approx(std::tanh(0.5)));
  CHECK(eval1("coth(0.5)", {0, 0}, {0, 0}) == doctest::Approx(1.0 / std::tanh(0.5)));
  CHECK(eval1("sqrt(2)", {0, 0}, {0, 0}) == doctest::Approx(std::sqrt(2.0)));
  CHECK(eval1("exp(tanh(Y))", {0.2, 0}, {0, 0}) == doctest::Approx(std::exp(std::tanh(0.2))));
}

TEST_CASE("syntax errors carry the offending column") {
  auto table = cycle_table();

  try {
    ratelang::parse("k*(Y + )", table);
    FAIL("expected SyntaxError");
  } catch (const SyntaxError& e) {
    CHECK(e.position() == 7);
  }

  try {
    ratelang::parse("1 2", table);
    FAIL("expected SyntaxError");
  } catch (const SyntaxError& e) {
    CHECK(e.position() == 2);
    CHECK(std::string(e.what()).find("trailing") != std::string::npos);
  }

  CHECK_THROWS_AS(ratelang::parse("Y^YP", table), SyntaxError);   // exponents are literals
  CHECK_THROWS_AS(ratelang::parse("", table), SyntaxError);
  CHECK_THROWS_AS(ratelang::parse("k*(Y", table), SyntaxError);   // unclosed paren
  CHECK_THROWS_AS(ratelang::parse("bogus + 1", table), UnknownIdentifier);

  std::string deep(300, '(');
  deep += "1";
  deep.append(300, ')');
  CHECK_THROWS_AS(ratelang::parse(deep, table), SyntaxError);     // recursion guard
}

TEST_CASE("division by an exact zero reports the division's column") {
  auto table = cycle_table();
  Expr e = ratelang::parse("1/(Y - Y)", table);
  try {
    e.eval(std::vector<double>{0.5, 0.5}, std::vector<double>{0, 0});
    FAIL("expected DivideByZero");
  } catch (const DivideByZero& err) {
    CHECK(err.position() == 1);
  }
}

TEST_CASE("evaluation validates span lengths") {
  auto table = cycle_table();
  Expr e = ratelang::parse("k*YP", table);
  std::vector<double> vars{0.5};  // YP is variable index 1, so this is too short
  std::vector<double> consts{1.0, 2.0};
  CHECK_THROWS_AS(e.eval(vars, consts), UnboundIdentifier);
}

TEST_CASE("symbol table rejects duplicates and reports indices") {
  SymbolTable t;
  CHECK(t.add_constant("k") == 0);
  CHECK(t.add_variable("Y") == 0);
  CHECK(t.add_variable("YP") == 1);
  CHECK_THROWS_AS(t.add_constant("k"), DuplicateName);
  CHECK_THROWS_AS(t.add_variable("k"), DuplicateName);  // one namespace
  CHECK(t.find_variable("YP") == 1);
  CHECK(t.find_constant("nope") == -1);
}

TEST_CASE("printed expressions parse back to structurally equal trees") {
  auto table = cycle_table();
  std::mt19937_64 rng(20260814);
  int checked = 0;
  for (int i = 0; i < 500; ++i) {
    Expr e = oracles::random_expr(rng, table, 5);
    Expr back = ratelang::parse(e.str(), table);
    if (!back.equals(e)) {
      CAPTURE(e.str());
      CHECK(back.equals(e));
    }
    ++checked;
  }
  CHECK(checked == 500);
}

TEST_CASE("exact derivatives match finite differences") {
  auto table = cycle_table();
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> point(0.2, 1.8);
  std::uniform_int_distribution<int> which(0, table->n_variables() - 1);

  // keep drawing until 500 expressions pass the FD-reliability guard, so the
  // comparison count does not depend on how wild a particular seed's draws are
  int effective = 0, attempts = 0;
  while (effective < 500 && attempts < 4000) {
    ++attempts;
    Expr e = oracles::random_expr(rng, table, 4);
    int var = which(rng);
    std::vector<double> vars{point(rng), point(rng)};
    std::vector<double> consts{point(rng), point(rng)};

    Expr de = e.derivative(var);
    if (!e.depends_on(var)) {
      CHECK(de.is_literal_zero());
      continue;
    }

    double d_exact = 0.0;
    try {
      d_exact = de.eval(vars, consts);
    } catch (const DivideByZero&) {
      continue;
    }
    if (!std::isfinite(d_exact)) continue;

    auto fd = [&](double h) {
      std::vector<double> lo = vars, hi = vars;
      lo[var] -= h;
      hi[var] += h;
      return (e.eval(hi, consts) - e.eval(lo, consts)) / (2.0 * h);
    };
    double d1 = fd(1e-4), d2 = fd(5e-5);
    if (!std::isfinite(d1) || !std::isfinite(d2)) continue;
    double scale = std::max({std::fabs(d1), std::fabs(d2), 1.0});
    if (std::fabs(d1 - d2) > 1e-3 * scale) continue;  // FD itself unreliable here

    ++effective;
    CAPTURE(e.str());
    CHECK(std::fabs(d_exact - d2) <= 5e-3 * scale);
  }
  CHECK(effective == 500);
}

TEST_CASE("derivatives of the cycle rate laws are exact") {
  auto table = cycle_table();
  Expr rate = ratelang::parse("k*(YP - kappa*Y)", table);
  std::vector<double> vars{0.4, 0.6}, consts{2.0, 10.0};

  int iY = table->find_variable("Y");
  int iYP = table->find_variable("YP");
  CHECK(rate.derivative(iY).eval(vars, consts) == doctest::Approx(-20.0));
  CHECK(rate.derivative(iYP).eval(vars, consts) == doctest::Approx(2.0));

  Expr sq = ratelang::parse("YP^2", table);
  CHECK(sq.derivative(iYP).eval(vars, consts) == doctest::Approx(1.2));
  CHECK(sq.derivative(iY).is_literal_zero());
  CHECK(sq.depends_on(iYP));
  CHECK_FALSE(sq.depends_on(iY));
}
