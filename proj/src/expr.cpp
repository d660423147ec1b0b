#include "spinflat/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "spinflat/errors.hpp"

namespace spinflat {

namespace {

enum class Op {
  Const, VarX, VarY, VarZ,
  Add, Sub, Mul, Div, Pow, Neg,
  Exp, Log, Sqrt, Sin, Cos, Tan, Sinh, Cosh, Tanh, Conj, Re, Im, Abs,
};

struct Node {
  Op op;
  cplx value{};
  int lhs = -1;
  int rhs = -1;
};

struct FunctionName {
  std::string_view name;
  Op op;
};

constexpr FunctionName kFunctions[] = {
    {"exp", Op::Exp},   {"log", Op::Log},   {"sqrt", Op::Sqrt}, {"sin", Op::Sin},
    {"cos", Op::Cos},   {"tan", Op::Tan},   {"sinh", Op::Sinh}, {"cosh", Op::Cosh},
    {"tanh", Op::Tanh}, {"conj", Op::Conj}, {"re", Op::Re},     {"im", Op::Im},
    {"abs", Op::Abs},
};

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  std::vector<Node> run(int& root) {
    root = expression();
    skip_space();
    if (pos_ != src_.size()) fail("unexpected '" + std::string(1, src_[pos_]) + "'");
    return std::move(nodes_);
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    std::ostringstream os;
    os << msg << " at position " << pos_ << " in \"" << src_ << "\"";
    throw ExprError(os.str(), pos_);
  }

  void skip_space() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  int emit(Node n) {
    nodes_.push_back(n);
    return static_cast<int>(nodes_.size()) - 1;
  }

  int expression() {
    int lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = emit({Op::Add, {}, lhs, term()});
      } else if (accept('-')) {
        lhs = emit({Op::Sub, {}, lhs, term()});
      } else {
        return lhs;
      }
    }
  }

  int term() {
    int lhs = unary();
    for (;;) {
      skip_space();
      if (pos_ + 1 < src_.size() && src_[pos_] == '*' && src_[pos_ + 1] == '*') return lhs;
      if (accept('*')) {
        lhs = emit({Op::Mul, {}, lhs, unary()});
      } else if (accept('/')) {
        lhs = emit({Op::Div, {}, lhs, unary()});
      } else {
        return lhs;
      }
    }
  }

  int unary() {
    if (accept('-')) return emit({Op::Neg, {}, unary(), -1});
    if (accept('+')) return unary();
    return power();
  }

  int power() {
    const int base = primary();
    skip_space();
    if (accept('^')) return emit({Op::Pow, {}, base, unary()});
    if (pos_ + 1 < src_.size() && src_[pos_] == '*' && src_[pos_ + 1] == '*') {
      pos_ += 2;
      return emit({Op::Pow, {}, base, unary()});
    }
    return base;
  }

  int primary() {
    skip_space();
    if (pos_ >= src_.size()) fail("unexpected end of expression");
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      const int inner = expression();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    fail("unexpected '" + std::string(1, c) + "'");
  }

  int number() {
    const std::size_t start = pos_;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(src_.data() + pos_, src_.data() + src_.size(), v);
    if (ec != std::errc{}) fail("malformed number");
    pos_ = static_cast<std::size_t>(ptr - src_.data());
    if (pos_ == start) fail("malformed number");
    return emit({Op::Const, cplx(v, 0.0)});
  }

  int identifier() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
      ++pos_;
    const std::string_view name = src_.substr(start, pos_ - start);
    skip_space();
    if (pos_ < src_.size() && src_[pos_] == '(') {
      for (const auto& f : kFunctions) {
        if (f.name == name) {
          ++pos_;
          const int arg = expression();
          if (!accept(')')) fail("expected ')' after argument of " + std::string(name));
          return emit({f.op, {}, arg, -1});
        }
      }
      pos_ = start;
      fail("unknown function '" + std::string(name) + "'");
    }
    if (name == "x") return emit({Op::VarX});
    if (name == "y") return emit({Op::VarY});
    if (name == "z") return emit({Op::VarZ});
    if (name == "i") return emit({Op::Const, cplx(0.0, 1.0)});
    if (name == "pi") return emit({Op::Const, cplx(std::numbers::pi, 0.0)});
    if (name == "e") return emit({Op::Const, cplx(std::numbers::e, 0.0)});
    pos_ = start;
    fail("unknown identifier '" + std::string(name) + "'");
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::vector<Node> nodes_;
};

cplx ipow(cplx base, long n) {
  const bool invert = n < 0;
  unsigned long e = static_cast<unsigned long>(invert ? -n : n);
  cplx result = 1.0;
  while (e) {
    if (e & 1UL) result *= base;
    base *= base;
    e >>= 1;
  }
  return invert ? 1.0 / result : result;
}

}  // namespace

struct ExprFn::Program {
  std::string source;
  std::vector<Node> nodes;
  int root = -1;

  cplx eval(int idx, cplx z) const {
    const Node& n = nodes[static_cast<std::size_t>(idx)];
    switch (n.op) {
      case Op::Const: return n.value;
      case Op::VarX: return z.real();
      case Op::VarY: return z.imag();
      case Op::VarZ: return z;
      case Op::Add: return eval(n.lhs, z) + eval(n.rhs, z);
      case Op::Sub: return eval(n.lhs, z) - eval(n.rhs, z);
      case Op::Mul: return eval(n.lhs, z) * eval(n.rhs, z);
      case Op::Div: return eval(n.lhs, z) / eval(n.rhs, z);
      case Op::Neg: return -eval(n.lhs, z);
      case Op::Pow: {
        const cplx b = eval(n.lhs, z);
        const cplx p = eval(n.rhs, z);
        if (p.imag() == 0.0 && std::abs(p.real()) <= 64.0 && p.real() == std::round(p.real()))
          return ipow(b, static_cast<long>(p.real()));
        return std::pow(b, p);
      }
      case Op::Exp: return std::exp(eval(n.lhs, z));
      case Op::Log: return std::log(eval(n.lhs, z));
      case Op::Sqrt: return std::sqrt(eval(n.lhs, z));
      case Op::Sin: return std::sin(eval(n.lhs, z));
      case Op::Cos: return std::cos(eval(n.lhs, z));
      case Op::Tan: return std::tan(eval(n.lhs, z));
      case Op::Sinh: return std::sinh(eval(n.lhs, z));
      case Op::Cosh: return std::cosh(eval(n.lhs, z));
      case Op::Tanh: return std::tanh(eval(n.lhs, z));
      case Op::Conj: return std::conj(eval(n.lhs, z));
      case Op::Re: return eval(n.lhs, z).real();
      case Op::Im: return eval(n.lhs, z).imag();
      case Op::Abs: return std::abs(eval(n.lhs, z));
    }
    return {};
  }
};

ExprFn ExprFn::parse(std::string_view source) {
  auto program = std::make_shared<Program>();
  program->source = std::string(source);
  Parser parser(program->source);
  program->nodes = parser.run(program->root);
  ExprFn fn;
  fn.program_ = std::move(program);
  return fn;
}

cplx ExprFn::operator()(cplx z) const {
  const cplx v = program_->eval(program_->root, z);
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
    std::ostringstream os;
    os << "expression \"" << program_->source << "\" is not finite at z = " << z;
    throw ExprError(os.str(), std::string::npos);
  }
  return v;
}

double ExprFn::real(double x, double y) const {
  const cplx v = (*this)(cplx(x, y));
  if (std::abs(v.imag()) > 1e-12 * std::max(1.0, std::abs(v.real()))) {
    std::ostringstream os;
    os << "expression \"" << program_->source << "\" is not real at (" << x << ", " << y
       << "): " << v;
    throw ExprError(os.str(), std::string::npos);
  }
  return v.real();
}

const std::string& ExprFn::source() const { return program_->source; }

}  // namespace spinflat
