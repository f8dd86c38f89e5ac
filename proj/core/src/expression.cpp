#include "nanoplate/expression.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "nanoplate/error.hpp"

namespace nanoplate {

enum class Op { Const, VarX, VarY, Add, Sub, Mul, Div, Pow, Neg, Sin, Cos, Tan, Exp, Log, Sqrt, Tanh, Abs };

struct Expression::Node {
  Op op = Op::Const;
  double value = 0.0;
  std::shared_ptr<const Node> a;
  std::shared_ptr<const Node> b;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;

NodePtr make_const(double v) {
  auto n = std::make_shared<Expression::Node>();
  n->op = Op::Const;
  n->value = v;
  return n;
}

bool is_const(const NodePtr& n, double v) { return n->op == Op::Const && n->value == v; }

NodePtr make(Op op, NodePtr a, NodePtr b = nullptr) {
  // Light constant folding keeps derivative trees small.
  const bool ca = a && a->op == Op::Const;
  const bool cb = b && b->op == Op::Const;
  switch (op) {
    case Op::Add:
      if (ca && cb) return make_const(a->value + b->value);
      if (is_const(a, 0.0)) return b;
      if (is_const(b, 0.0)) return a;
      break;
    case Op::Sub:
      if (ca && cb) return make_const(a->value - b->value);
      if (is_const(b, 0.0)) return a;
      if (is_const(a, 0.0)) return make(Op::Neg, b);
      break;
    case Op::Mul:
      if (ca && cb) return make_const(a->value * b->value);
      if (is_const(a, 0.0) || is_const(b, 0.0)) return make_const(0.0);
      if (is_const(a, 1.0)) return b;
      if (is_const(b, 1.0)) return a;
      break;
    case Op::Div:
      if (ca && cb) return make_const(a->value / b->value);
      if (is_const(a, 0.0)) return make_const(0.0);
      if (is_const(b, 1.0)) return a;
      break;
    case Op::Neg:
      if (ca) return make_const(-a->value);
      break;
    case Op::Pow:
      if (ca && cb) return make_const(std::pow(a->value, b->value));
      if (is_const(b, 1.0)) return a;
      if (is_const(b, 0.0)) return make_const(1.0);
      break;
    default:
      break;
  }
  auto n = std::make_shared<Expression::Node>();
  n->op = op;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

double eval(const Expression::Node& n, Point p) {
  switch (n.op) {
    case Op::Const: return n.value;
    case Op::VarX: return p.x;
    case Op::VarY: return p.y;
    case Op::Add: return eval(*n.a, p) + eval(*n.b, p);
    case Op::Sub: return eval(*n.a, p) - eval(*n.b, p);
    case Op::Mul: return eval(*n.a, p) * eval(*n.b, p);
    case Op::Div: return eval(*n.a, p) / eval(*n.b, p);
    case Op::Pow: return std::pow(eval(*n.a, p), eval(*n.b, p));
    case Op::Neg: return -eval(*n.a, p);
    case Op::Sin: return std::sin(eval(*n.a, p));
    case Op::Cos: return std::cos(eval(*n.a, p));
    case Op::Tan: return std::tan(eval(*n.a, p));
    case Op::Exp: return std::exp(eval(*n.a, p));
    case Op::Log: return std::log(eval(*n.a, p));
    case Op::Sqrt: return std::sqrt(eval(*n.a, p));
    case Op::Tanh: return std::tanh(eval(*n.a, p));
    case Op::Abs: return std::fabs(eval(*n.a, p));
  }
  return 0.0;
}

NodePtr diff(const NodePtr& n, char var) {
  const auto& u = n->a;
  const auto& v = n->b;
  switch (n->op) {
    case Op::Const: return make_const(0.0);
    case Op::VarX: return make_const(var == 'x' ? 1.0 : 0.0);
    case Op::VarY: return make_const(var == 'y' ? 1.0 : 0.0);
    case Op::Add: return make(Op::Add, diff(u, var), diff(v, var));
    case Op::Sub: return make(Op::Sub, diff(u, var), diff(v, var));
    case Op::Mul:
      return make(Op::Add, make(Op::Mul, diff(u, var), v), make(Op::Mul, u, diff(v, var)));
    case Op::Div:
      return make(Op::Div,
                  make(Op::Sub, make(Op::Mul, diff(u, var), v), make(Op::Mul, u, diff(v, var))),
                  make(Op::Mul, v, v));
    case Op::Pow:
      if (v->op == Op::Const) {
        return make(Op::Mul, make(Op::Mul, make_const(v->value), make(Op::Pow, u, make_const(v->value - 1.0))),
                    diff(u, var));
      }
      // d(u^v) = u^v (v' log u + v u'/u)
      return make(Op::Mul, n,
                  make(Op::Add, make(Op::Mul, diff(v, var), make(Op::Log, u)),
                       make(Op::Div, make(Op::Mul, v, diff(u, var)), u)));
    case Op::Neg: return make(Op::Neg, diff(u, var));
    case Op::Sin: return make(Op::Mul, make(Op::Cos, u), diff(u, var));
    case Op::Cos: return make(Op::Neg, make(Op::Mul, make(Op::Sin, u), diff(u, var)));
    case Op::Tan: {
      auto c = make(Op::Cos, u);
      return make(Op::Div, diff(u, var), make(Op::Mul, c, c));
    }
    case Op::Exp: return make(Op::Mul, n, diff(u, var));
    case Op::Log: return make(Op::Div, diff(u, var), u);
    case Op::Sqrt: return make(Op::Div, diff(u, var), make(Op::Mul, make_const(2.0), n));
    case Op::Tanh: return make(Op::Mul, make(Op::Sub, make_const(1.0), make(Op::Mul, n, n)), diff(u, var));
    case Op::Abs: return make(Op::Mul, make(Op::Div, u, n), diff(u, var));
  }
  return make_const(0.0);
}

bool depends_on_position(const Expression::Node& n) {
  if (n.op == Op::VarX || n.op == Op::VarY) return true;
  if (n.a && depends_on_position(*n.a)) return true;
  if (n.b && depends_on_position(*n.b)) return true;
  return false;
}

void print(const Expression::Node& n, std::ostream& os) {
  auto bin = [&](const char* sym) {
    os << '(';
    print(*n.a, os);
    os << sym;
    print(*n.b, os);
    os << ')';
  };
  auto fn = [&](const char* name) {
    os << name << '(';
    print(*n.a, os);
    os << ')';
  };
  switch (n.op) {
    case Op::Const: os << n.value; break;
    case Op::VarX: os << 'x'; break;
    case Op::VarY: os << 'y'; break;
    case Op::Add: bin(" + "); break;
    case Op::Sub: bin(" - "); break;
    case Op::Mul: bin("*"); break;
    case Op::Div: bin("/"); break;
    case Op::Pow: bin("^"); break;
    case Op::Neg: fn("-"); break;
    case Op::Sin: fn("sin"); break;
    case Op::Cos: fn("cos"); break;
    case Op::Tan: fn("tan"); break;
    case Op::Exp: fn("exp"); break;
    case Op::Log: fn("log"); break;
    case Op::Sqrt: fn("sqrt"); break;
    case Op::Tanh: fn("tanh"); break;
    case Op::Abs: fn("abs"); break;
  }
}

class Parser {
 public:
  explicit Parser(const std::string& text) : s_(text) {}

  NodePtr parse() {
    NodePtr e = expr();
    skip_ws();
    if (pos_ != s_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw Error(ErrorCode::InvalidConfig,
                "cannot parse expression '" + s_ + "' at offset " + std::to_string(pos_) + ": " + why);
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = make(Op::Add, lhs, term());
      } else if (accept('-')) {
        lhs = make(Op::Sub, lhs, term());
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = make(Op::Mul, lhs, unary());
      } else if (accept('/')) {
        lhs = make(Op::Div, lhs, unary());
      } else {
        return lhs;
      }
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(Op::Neg, unary());
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) return make(Op::Pow, base, unary());  // right associative
    return base;
  }

  NodePtr primary() {
    skip_ws();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    if (accept('(')) {
      NodePtr e = expr();
      if (!accept(')')) fail("expected ')'");
      return e;
    }
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(s_.substr(pos_), &used);
      } catch (const std::exception&) {
        fail("bad number");
      }
      pos_ += used;
      return make_const(v);
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      const std::string name = s_.substr(start, pos_ - start);
      if (name == "x") return make(Op::VarX, nullptr);
      if (name == "y") return make(Op::VarY, nullptr);
      if (name == "pi") return make_const(std::numbers::pi);
      static const std::pair<const char*, Op> functions[] = {
          {"sin", Op::Sin},   {"cos", Op::Cos},   {"tan", Op::Tan},   {"exp", Op::Exp},
          {"log", Op::Log},   {"sqrt", Op::Sqrt}, {"tanh", Op::Tanh}, {"abs", Op::Abs}};
      for (const auto& [fname, op] : functions) {
        if (name == fname) {
          if (!accept('(')) fail("expected '(' after " + name);
          NodePtr arg = expr();
          if (!accept(')')) fail("expected ')'");
          auto n = std::make_shared<Expression::Node>();
          n->op = op;
          n->a = arg;
          if (arg->op == Op::Const) return make_const(eval(*n, {}));
          return n;
        }
      }
      fail("unknown identifier '" + name + "'");
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  std::string s_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression::Expression() : root_(make_const(0.0)) {}

Expression Expression::parse(const std::string& text) { return Expression(Parser(text).parse()); }

Expression Expression::constant(double value) { return Expression(make_const(value)); }

double Expression::operator()(Point p) const { return eval(*root_, p); }

Expression Expression::derivative(char variable) const {
  NANOPLATE_THROW_IF(variable != 'x' && variable != 'y', ErrorCode::InvalidParameter,
                     "derivative variable must be 'x' or 'y'");
  return Expression(diff(root_, variable));
}

bool Expression::is_constant() const { return !depends_on_position(*root_); }

std::string Expression::to_string() const {
  std::ostringstream os;
  os.precision(17);
  print(*root_, os);
  return os.str();
}

}  // namespace nanoplate
