// Small arithmetic expression evaluator.
//
// Accepts numbers, the constant `pi`, named variables, + - * / ^, parentheses
// and the functions sqrt, sin, cos, exp, abs.  Used for `--set x=sqrt(2)` on
// the command line and for the closed-form probability curves stored in the
// acceptance fixtures (e.g. "(3+4*cos(2*t))^2*sin(t)^10").
#pragma once

#include <cctype>
#include <cmath>
#include <map>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace pst {

class expression_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Expression {
 public:
  using Variables = std::map<std::string, double, std::less<>>;

  static Expression parse(std::string_view text) {
    Parser p{text, 0};
    Expression e;
    e.root_ = p.parse_sum();
    p.skip_ws();
    if (p.pos != text.size()) {
      throw expression_error("unexpected '" + std::string(text.substr(p.pos)) +
                             "' in expression '" + std::string(text) + "'");
    }
    return e;
  }

  double operator()(const Variables& vars = {}) const { return eval(*root_, vars); }

 private:
  struct Node;
  using NodePtr = std::shared_ptr<const Node>;
  struct Number { double value; };
  struct Variable { std::string name; };
  struct Unary { char op; NodePtr arg; };
  struct Binary { char op; NodePtr lhs, rhs; };
  struct Call { std::string fn; NodePtr arg; };
  struct Node { std::variant<Number, Variable, Unary, Binary, Call> v; };

  template <class T>
  static NodePtr make(T t) {
    return std::make_shared<const Node>(Node{std::move(t)});
  }

  struct Parser {
    std::string_view s;
    std::size_t pos;

    void skip_ws() {
      while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool accept(char c) {
      skip_ws();
      if (pos < s.size() && s[pos] == c) {
        ++pos;
        return true;
      }
      return false;
    }
    [[noreturn]] void fail(const std::string& what) const {
      throw expression_error(what + " at offset " + std::to_string(pos) + " in '" +
                             std::string(s) + "'");
    }

    NodePtr parse_sum() {
      NodePtr lhs = parse_product();
      for (;;) {
        if (accept('+')) lhs = make(Binary{'+', lhs, parse_product()});
        else if (accept('-')) lhs = make(Binary{'-', lhs, parse_product()});
        else return lhs;
      }
    }
    NodePtr parse_product() {
      NodePtr lhs = parse_unary();
      for (;;) {
        if (accept('*')) lhs = make(Binary{'*', lhs, parse_unary()});
        else if (accept('/')) lhs = make(Binary{'/', lhs, parse_unary()});
        else return lhs;
      }
    }
    NodePtr parse_unary() {
      if (accept('-')) return make(Unary{'-', parse_unary()});
      if (accept('+')) return parse_unary();
      return parse_power();
    }
    // right associative; binds tighter than unary minus on its left operand
    NodePtr parse_power() {
      NodePtr base = parse_primary();
      if (accept('^')) return make(Binary{'^', base, parse_unary()});
      return base;
    }
    NodePtr parse_primary() {
      skip_ws();
      if (pos >= s.size()) fail("unexpected end of expression");
      if (accept('(')) {
        NodePtr inner = parse_sum();
        if (!accept(')')) fail("missing ')'");
        return inner;
      }
      const char c = s[pos];
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
        const std::string rest(s.substr(pos));
        std::size_t used = 0;
        double v = 0.0;
        try {
          v = std::stod(rest, &used);
        } catch (const std::exception&) {
          fail("bad number");
        }
        pos += used;
        return make(Number{v});
      }
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        const std::size_t start = pos;
        while (pos < s.size() &&
               (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
          ++pos;
        std::string name(s.substr(start, pos - start));
        if (accept('(')) {
          static const std::vector<std::string> known{"sqrt", "sin", "cos", "exp", "abs"};
          bool ok = false;
          for (const auto& k : known) ok = ok || k == name;
          if (!ok) fail("unknown function '" + name + "'");
          NodePtr arg = parse_sum();
          if (!accept(')')) fail("missing ')'");
          return make(Call{std::move(name), arg});
        }
        if (name == "pi") return make(Number{std::numbers::pi});
        return make(Variable{std::move(name)});
      }
      fail(std::string("unexpected character '") + c + "'");
    }
  };

  static double eval(const Node& n, const Variables& vars) {
    return std::visit(
        [&](const auto& x) -> double {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, Number>) {
            return x.value;
          } else if constexpr (std::is_same_v<T, Variable>) {
            auto it = vars.find(x.name);
            if (it == vars.end()) throw expression_error("unbound variable '" + x.name + "'");
            return it->second;
          } else if constexpr (std::is_same_v<T, Unary>) {
            return -eval(*x.arg, vars);
          } else if constexpr (std::is_same_v<T, Binary>) {
            const double a = eval(*x.lhs, vars);
            const double b = eval(*x.rhs, vars);
            switch (x.op) {
              case '+': return a + b;
              case '-': return a - b;
              case '*': return a * b;
              case '/': return a / b;
              default: return std::pow(a, b);
            }
          } else {
            const double a = eval(*x.arg, vars);
            if (x.fn == "sqrt") return std::sqrt(a);
            if (x.fn == "sin") return std::sin(a);
            if (x.fn == "cos") return std::cos(a);
            if (x.fn == "exp") return std::exp(a);
            return std::abs(a);
          }
        },
        n.v);
  }

  NodePtr root_;
};

/// Evaluates a constant expression such as "3/sqrt(2)".
inline double evaluate(std::string_view text) {
  const double v = Expression::parse(text)();
  if (!std::isfinite(v)) throw expression_error("non-finite value from '" + std::string(text) + "'");
  return v;
}

}  // namespace pst
