#include "maglab/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <vector>

#include "maglab/errors.hpp"

namespace maglab {

namespace {

// ---- bump profile ----------------------------------------------------------

// h(u) = exp(-1/u) for u > 0, 0 otherwise.  All derivatives vanish at u = 0,
// so the quotient below is C^inf.
double germ(double u) { return u > 0.0 ? std::exp(-1.0 / u) : 0.0; }

}  // namespace

double bump_value(double s, double r0, double r1) {
  if (s <= r0) return 1.0;
  if (s >= r1) return 0.0;
  const double h1 = germ(r1 - s);
  const double h2 = germ(s - r0);
  return h1 / (h1 + h2);
}

double bump_slope(double s, double r0, double r1) {
  if (s <= r0 || s >= r1) return 0.0;
  const double a = s - r0;
  const double b = r1 - s;
  const double h1 = germ(b);
  const double h2 = germ(a);
  const double sum = h1 + h2;
  return -(h1 * h2) * (1.0 / (b * b) + 1.0 / (a * a)) / (sum * sum);
}

// ---- parser ----------------------------------------------------------------

namespace {

struct Parser {
  std::string_view src;
  std::size_t pos = 0;
  int m;

  explicit Parser(std::string_view s, int dim) : src(s), m(dim) {}

  void skip_ws() {
    while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) ++pos;
  }

  bool eof() {
    skip_ws();
    return pos >= src.size();
  }

  char peek() {
    skip_ws();
    return pos < src.size() ? src[pos] : '\0';
  }

  bool accept(char c) {
    if (peek() == c) {
      ++pos;
      return true;
    }
    return false;
  }

  void expect(char c, const char* what) {
    if (!accept(c)) throw SyntaxError(pos, std::string("expected ") + what);
  }

  ExprPtr make(NodeKind k, ExprPtr a = nullptr, ExprPtr b = nullptr) {
    auto n = std::make_shared<ExprNode>();
    n->kind = k;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
  }

  double parse_number() {
    skip_ws();
    const char* begin = src.data() + pos;
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin) throw SyntaxError(pos, "expected a number");
    pos += static_cast<std::size_t>(end - begin);
    return v;
  }

  int parse_int() {
    skip_ws();
    bool negative = false;
    if (accept('-')) negative = true;
    skip_ws();
    if (pos >= src.size() || !std::isdigit(static_cast<unsigned char>(src[pos])))
      throw SyntaxError(pos, "expected an integer exponent");
    long v = 0;
    while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) {
      v = v * 10 + (src[pos] - '0');
      if (v > 1000) throw SyntaxError(pos, "exponent too large");
      ++pos;
    }
    return static_cast<int>(negative ? -v : v);
  }

  std::string parse_ident() {
    skip_ws();
    std::size_t start = pos;
    while (pos < src.size() &&
           (std::isalnum(static_cast<unsigned char>(src[pos])) || src[pos] == '_'))
      ++pos;
    return std::string(src.substr(start, pos - start));
  }

  ExprPtr parse_expr() {
    skip_ws();
    bool negate = false;
    if (accept('-'))
      negate = true;
    else
      accept('+');
    ExprPtr lhs = parse_term();
    if (negate) lhs = make(NodeKind::Neg, lhs);
    for (;;) {
      if (accept('+'))
        lhs = make(NodeKind::Add, lhs, parse_term());
      else if (accept('-'))
        lhs = make(NodeKind::Sub, lhs, parse_term());
      else
        return lhs;
    }
  }

  ExprPtr parse_term() {
    ExprPtr lhs = parse_factor();
    for (;;) {
      if (accept('*'))
        lhs = make(NodeKind::Mul, lhs, parse_factor());
      else if (accept('/'))
        lhs = make(NodeKind::Div, lhs, parse_factor());
      else
        return lhs;
    }
  }

  ExprPtr parse_factor() {
    ExprPtr base = parse_base();
    if (accept('^')) {
      auto n = std::make_shared<ExprNode>();
      n->kind = NodeKind::Pow;
      n->a = base;
      n->exponent = parse_int();
      return n;
    }
    return base;
  }

  ExprPtr parse_base() {
    skip_ws();
    if (pos >= src.size()) throw SyntaxError(pos, "unexpected end of expression");
    const char c = src[pos];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      auto n = std::make_shared<ExprNode>();
      n->kind = NodeKind::Constant;
      n->value = parse_number();
      return n;
    }
    if (c == '(') {
      ++pos;
      ExprPtr e = parse_expr();
      expect(')', "')'");
      return e;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t ident_pos = pos;
      const std::string name = parse_ident();
      if (name == "t") return var_node(0);
      if (name.size() >= 2 && name[0] == 'x') {
        char* end = nullptr;
        const long idx = std::strtol(name.c_str() + 1, &end, 10);
        if (*end == '\0' && idx >= 2) {
          if (idx > m) throw DimensionOutOfRange(ident_pos, name, m);
          return var_node(static_cast<int>(idx - 1));
        }
      }
      if (name == "sin") return func_node(NodeKind::Sin);
      if (name == "cos") return func_node(NodeKind::Cos);
      if (name == "exp") return func_node(NodeKind::Exp);
      if (name == "sqrt") return func_node(NodeKind::Sqrt);
      if (name == "bump") return bump_node();
      throw UnknownIdentifier(ident_pos, name);
    }
    throw SyntaxError(pos, std::string("unexpected character '") + c + "'");
  }

  ExprPtr var_node(int idx) {
    auto n = std::make_shared<ExprNode>();
    n->kind = NodeKind::Var;
    n->var = idx;
    return n;
  }

  ExprPtr func_node(NodeKind k) {
    expect('(', "'(' after function name");
    ExprPtr arg = parse_expr();
    expect(')', "')'");
    return make(k, arg);
  }

  ExprPtr bump_node() {
    expect('(', "'(' after bump");
    ExprPtr arg = parse_expr();
    expect(',', "',' in bump(expr, r0, r1)");
    const double r0 = parse_number();
    expect(',', "',' in bump(expr, r0, r1)");
    const double r1 = parse_number();
    expect(')', "')'");
    if (!(r0 < r1)) throw SyntaxError(pos, "bump requires r0 < r1");
    auto n = std::make_shared<ExprNode>();
    n->kind = NodeKind::Bump;
    n->a = arg;
    n->lo = r0;
    n->hi = r1;
    return n;
  }
};

}  // namespace

ExprAst parse(std::string_view source, int m) {
  if (m < 2 || m > kMaxDim)
    throw ConfigError("m", "chart dimension must be in [2, " + std::to_string(kMaxDim) + "]");
  Parser p(source, m);
  if (p.eof()) throw SyntaxError(0, "empty expression");
  ExprPtr root = p.parse_expr();
  if (!p.eof()) throw SyntaxError(p.pos, "trailing input");
  return ExprAst(root, m);
}

// ---- printing --------------------------------------------------------------

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Precedence levels: 1 additive, 2 multiplicative, 3 pow, 4 atom.
int precedence(const ExprNode& n) {
  switch (n.kind) {
    case NodeKind::Add:
    case NodeKind::Sub:
    case NodeKind::Neg:
      return 1;
    case NodeKind::Mul:
    case NodeKind::Div:
      return 2;
    case NodeKind::Pow:
      return 3;
    default:
      return 4;
  }
}

void print_node(const ExprNode& n, std::string& out, int parent_level, bool leading);

void print_child(const ExprPtr& c, std::string& out, int level, bool leading) {
  const bool parens = precedence(*c) < level || (!leading && c->kind == NodeKind::Neg);
  if (parens) out += '(';
  print_node(*c, out, parens ? 1 : level, parens || leading);
  if (parens) out += ')';
}

void print_node(const ExprNode& n, std::string& out, int /*parent_level*/, bool leading) {
  switch (n.kind) {
    case NodeKind::Constant:
      out += fmt_double(n.value);
      return;
    case NodeKind::Var:
      out += (n.var == 0) ? "t" : ("x" + std::to_string(n.var + 1));
      return;
    case NodeKind::Neg:
      out += '-';
      print_child(n.a, out, 2, false);
      return;
    case NodeKind::Sin:
    case NodeKind::Cos:
    case NodeKind::Exp:
    case NodeKind::Sqrt: {
      out += (n.kind == NodeKind::Sin)   ? "sin"
             : (n.kind == NodeKind::Cos) ? "cos"
             : (n.kind == NodeKind::Exp) ? "exp"
                                         : "sqrt";
      out += '(';
      print_node(*n.a, out, 1, true);
      out += ')';
      return;
    }
    case NodeKind::Bump:
      out += "bump(";
      print_node(*n.a, out, 1, true);
      out += ", " + fmt_double(n.lo) + ", " + fmt_double(n.hi) + ")";
      return;
    case NodeKind::Add:
      print_child(n.a, out, 1, leading);
      out += " + ";
      print_child(n.b, out, 2, false);
      return;
    case NodeKind::Sub:
      print_child(n.a, out, 1, leading);
      out += " - ";
      print_child(n.b, out, 2, false);
      return;
    case NodeKind::Mul:
      print_child(n.a, out, 2, leading);
      out += "*";
      print_child(n.b, out, 3, false);
      return;
    case NodeKind::Div:
      print_child(n.a, out, 2, leading);
      out += "/";
      print_child(n.b, out, 3, false);
      return;
    case NodeKind::Pow:
      print_child(n.a, out, 4, false);
      out += '^';
      if (n.exponent < 0) {
        out += "-" + std::to_string(-n.exponent);
      } else {
        out += std::to_string(n.exponent);
      }
      return;
  }
}

}  // namespace

std::string to_string(const ExprAst& ast) {
  std::string out;
  print_node(*ast.root(), out, 1, true);
  return out;
}

bool structurally_equal(const ExprAst& lhs, const ExprAst& rhs) {
  struct Cmp {
    static bool eq(const ExprPtr& a, const ExprPtr& b) {
      if (a == b) return true;
      if (!a || !b) return false;
      if (a->kind != b->kind) return false;
      switch (a->kind) {
        case NodeKind::Constant:
          return a->value == b->value;
        case NodeKind::Var:
          return a->var == b->var;
        case NodeKind::Pow:
          return a->exponent == b->exponent && eq(a->a, b->a);
        case NodeKind::Bump:
          return a->lo == b->lo && a->hi == b->hi && eq(a->a, b->a);
        default:
          return eq(a->a, b->a) && eq(a->b, b->b);
      }
    }
  };
  return lhs.dim() == rhs.dim() && Cmp::eq(lhs.root(), rhs.root());
}

// ---- evaluation ------------------------------------------------------------

namespace {

double ipow(double base, int n) {
  if (n < 0) {
    if (base == 0.0) throw EvalDomainError("0 raised to a negative power");
    return 1.0 / ipow(base, -n);
  }
  double r = 1.0;
  double b = base;
  while (n > 0) {
    if (n & 1) r *= b;
    b *= b;
    n >>= 1;
  }
  return r;
}

double eval_node(const ExprNode& n, std::span<const double> p) {
  switch (n.kind) {
    case NodeKind::Constant:
      return n.value;
    case NodeKind::Var:
      return p[static_cast<std::size_t>(n.var)];
    case NodeKind::Neg:
      return -eval_node(*n.a, p);
    case NodeKind::Sin:
      return std::sin(eval_node(*n.a, p));
    case NodeKind::Cos:
      return std::cos(eval_node(*n.a, p));
    case NodeKind::Exp:
      return std::exp(eval_node(*n.a, p));
    case NodeKind::Sqrt: {
      const double u = eval_node(*n.a, p);
      if (u < 0.0) throw EvalDomainError("sqrt of a negative value");
      return std::sqrt(u);
    }
    case NodeKind::Bump:
      return bump_value(eval_node(*n.a, p), n.lo, n.hi);
    case NodeKind::Add:
      return eval_node(*n.a, p) + eval_node(*n.b, p);
    case NodeKind::Sub:
      return eval_node(*n.a, p) - eval_node(*n.b, p);
    case NodeKind::Mul:
      return eval_node(*n.a, p) * eval_node(*n.b, p);
    case NodeKind::Div: {
      const double num = eval_node(*n.a, p);
      const double den = eval_node(*n.b, p);
      if (den == 0.0) throw EvalDomainError("division by zero");
      return num / den;
    }
    case NodeKind::Pow:
      return ipow(eval_node(*n.a, p), n.exponent);
  }
  throw Error("corrupt expression node");
}

Jet jet_node(const ExprNode& n, std::span<const double> p, int m) {
  Jet out;
  out.dim = m;
  switch (n.kind) {
    case NodeKind::Constant:
      out.value = n.value;
      return out;
    case NodeKind::Var:
      out.value = p[static_cast<std::size_t>(n.var)];
      out.partials[static_cast<std::size_t>(n.var)] = 1.0;
      return out;
    case NodeKind::Neg: {
      Jet u = jet_node(*n.a, p, m);
      out.value = -u.value;
      for (int i = 0; i < m; ++i) out.partials[i] = -u.partials[i];
      return out;
    }
    case NodeKind::Sin: {
      Jet u = jet_node(*n.a, p, m);
      const double c = std::cos(u.value);
      out.value = std::sin(u.value);
      for (int i = 0; i < m; ++i) out.partials[i] = c * u.partials[i];
      return out;
    }
    case NodeKind::Cos: {
      Jet u = jet_node(*n.a, p, m);
      const double s = -std::sin(u.value);
      out.value = std::cos(u.value);
      for (int i = 0; i < m; ++i) out.partials[i] = s * u.partials[i];
      return out;
    }
    case NodeKind::Exp: {
      Jet u = jet_node(*n.a, p, m);
      const double e = std::exp(u.value);
      out.value = e;
      for (int i = 0; i < m; ++i) out.partials[i] = e * u.partials[i];
      return out;
    }
    case NodeKind::Sqrt: {
      Jet u = jet_node(*n.a, p, m);
      if (u.value < 0.0) throw EvalDomainError("sqrt of a negative value");
      const double r = std::sqrt(u.value);
      out.value = r;
      if (r == 0.0) {
        for (int i = 0; i < m; ++i) {
          if (u.partials[i] != 0.0)
            throw EvalDomainError("sqrt derivative is singular at zero");
        }
        return out;
      }
      const double inv = 0.5 / r;
      for (int i = 0; i < m; ++i) out.partials[i] = inv * u.partials[i];
      return out;
    }
    case NodeKind::Bump: {
      Jet u = jet_node(*n.a, p, m);
      out.value = bump_value(u.value, n.lo, n.hi);
      const double slope = bump_slope(u.value, n.lo, n.hi);
      for (int i = 0; i < m; ++i) out.partials[i] = slope * u.partials[i];
      return out;
    }
    case NodeKind::Add: {
      Jet u = jet_node(*n.a, p, m);
      Jet v = jet_node(*n.b, p, m);
      out.value = u.value + v.value;
      for (int i = 0; i < m; ++i) out.partials[i] = u.partials[i] + v.partials[i];
      return out;
    }
    case NodeKind::Sub: {
      Jet u = jet_node(*n.a, p, m);
      Jet v = jet_node(*n.b, p, m);
      out.value = u.value - v.value;
      for (int i = 0; i < m; ++i) out.partials[i] = u.partials[i] - v.partials[i];
      return out;
    }
    case NodeKind::Mul: {
      Jet u = jet_node(*n.a, p, m);
      Jet v = jet_node(*n.b, p, m);
      out.value = u.value * v.value;
      for (int i = 0; i < m; ++i)
        out.partials[i] = u.partials[i] * v.value + u.value * v.partials[i];
      return out;
    }
    case NodeKind::Div: {
      Jet u = jet_node(*n.a, p, m);
      Jet v = jet_node(*n.b, p, m);
      if (v.value == 0.0) throw EvalDomainError("division by zero");
      const double inv = 1.0 / v.value;
      out.value = u.value * inv;
      for (int i = 0; i < m; ++i)
        out.partials[i] = (u.partials[i] - out.value * v.partials[i]) * inv;
      return out;
    }
    case NodeKind::Pow: {
      Jet u = jet_node(*n.a, p, m);
      const int e = n.exponent;
      out.value = ipow(u.value, e);
      if (e == 0) return out;  // derivative of the constant 1
      if (u.value == 0.0 && e < 2) {
        if (e == 1) {
          for (int i = 0; i < m; ++i) out.partials[i] = u.partials[i];
          return out;
        }
        throw EvalDomainError("0 raised to a negative power");
      }
      const double factor = static_cast<double>(e) * ipow(u.value, e - 1);
      for (int i = 0; i < m; ++i) out.partials[i] = factor * u.partials[i];
      return out;
    }
  }
  throw Error("corrupt expression node");
}

}  // namespace

double eval_value(const ExprAst& ast, std::span<const double> p) {
  return eval_node(*ast.root(), p);
}

Jet eval_jet(const ExprAst& ast, std::span<const double> p) {
  return jet_node(*ast.root(), p, ast.dim());
}

double check_t_periodicity(const ExprAst& ast, double T, int samples) {
  if (T <= 0.0) throw ConfigError("T", "period must be positive");
  if (samples < 1) samples = 1;
  const int m = ast.dim();
  std::mt19937_64 rng(0xA1FAu);
  std::uniform_real_distribution<double> coord(-0.5, 0.5);
  double worst = 0.0;
  std::vector<double> p(static_cast<std::size_t>(m), 0.0);
  // Probe the axis plus a handful of transverse offsets at each t sample.
  for (int k = 0; k < samples; ++k) {
    const double t = T * static_cast<double>(k) / static_cast<double>(samples);
    for (int probe = 0; probe < 4; ++probe) {
      p[0] = t;
      for (int i = 1; i < m; ++i) p[static_cast<std::size_t>(i)] = probe == 0 ? 0.0 : coord(rng);
      const double f0 = eval_value(ast, p);
      p[0] = t + T;
      const double f1 = eval_value(ast, p);
      worst = std::max(worst, std::abs(f1 - f0));
    }
  }
  return worst;
}

}  // namespace maglab
