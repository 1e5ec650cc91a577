#include "maglab/ast_build.hpp"

#include <cmath>

#include "maglab/errors.hpp"

namespace maglab::ast {

namespace {

ExprPtr node(NodeKind k, ExprPtr a = nullptr, ExprPtr b = nullptr) {
  auto n = std::make_shared<ExprNode>();
  n->kind = k;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

}  // namespace

bool is_const(const ExprPtr& e, double* value) {
  if (!e || e->kind != NodeKind::Constant) return false;
  if (value) *value = e->value;
  return true;
}

ExprPtr cst(double v) {
  auto n = std::make_shared<ExprNode>();
  n->kind = NodeKind::Constant;
  n->value = v;
  return n;
}

ExprPtr var(int index) {
  auto n = std::make_shared<ExprNode>();
  n->kind = NodeKind::Var;
  n->var = index;
  return n;
}

ExprPtr neg(ExprPtr a) {
  double v;
  if (is_const(a, &v)) return cst(-v);
  if (a->kind == NodeKind::Neg) return a->a;
  return node(NodeKind::Neg, std::move(a));
}

ExprPtr add(ExprPtr a, ExprPtr b) {
  double va, vb;
  const bool ca = is_const(a, &va), cb = is_const(b, &vb);
  if (ca && cb) return cst(va + vb);
  if (ca && va == 0.0) return b;
  if (cb && vb == 0.0) return a;
  return node(NodeKind::Add, std::move(a), std::move(b));
}

ExprPtr sub(ExprPtr a, ExprPtr b) {
  double va, vb;
  const bool ca = is_const(a, &va), cb = is_const(b, &vb);
  if (ca && cb) return cst(va - vb);
  if (cb && vb == 0.0) return a;
  if (ca && va == 0.0) return neg(std::move(b));
  return node(NodeKind::Sub, std::move(a), std::move(b));
}

ExprPtr mul(ExprPtr a, ExprPtr b) {
  double va, vb;
  const bool ca = is_const(a, &va), cb = is_const(b, &vb);
  if (ca && cb) return cst(va * vb);
  if (ca) {
    if (va == 0.0) return cst(0.0);
    if (va == 1.0) return b;
  }
  if (cb) {
    if (vb == 0.0) return cst(0.0);
    if (vb == 1.0) return a;
  }
  return node(NodeKind::Mul, std::move(a), std::move(b));
}

ExprPtr div(ExprPtr a, ExprPtr b) {
  double va, vb;
  const bool ca = is_const(a, &va), cb = is_const(b, &vb);
  if (cb && vb != 0.0) {
    if (ca) return cst(va / vb);
    if (vb == 1.0) return a;
  }
  if (ca && va == 0.0 && !(cb && vb == 0.0)) return cst(0.0);
  return node(NodeKind::Div, std::move(a), std::move(b));
}

ExprPtr pow(ExprPtr a, int exponent) {
  double v;
  if (exponent == 0) return cst(1.0);
  if (exponent == 1) return a;
  if (is_const(a, &v) && (v != 0.0 || exponent > 0))
    return cst(std::pow(v, exponent));
  auto n = std::make_shared<ExprNode>();
  n->kind = NodeKind::Pow;
  n->a = std::move(a);
  n->exponent = exponent;
  return n;
}

ExprPtr sin(ExprPtr a) {
  double v;
  if (is_const(a, &v)) return cst(std::sin(v));
  return node(NodeKind::Sin, std::move(a));
}

ExprPtr cos(ExprPtr a) {
  double v;
  if (is_const(a, &v)) return cst(std::cos(v));
  return node(NodeKind::Cos, std::move(a));
}

ExprPtr exp(ExprPtr a) {
  double v;
  if (is_const(a, &v)) return cst(std::exp(v));
  return node(NodeKind::Exp, std::move(a));
}

ExprPtr sqrt(ExprPtr a) {
  double v;
  if (is_const(a, &v)) {
    if (v < 0.0) throw EvalDomainError("sqrt of a negative constant");
    return cst(std::sqrt(v));
  }
  return node(NodeKind::Sqrt, std::move(a));
}

ExprPtr bump(ExprPtr a, double lo, double hi) {
  if (!(lo < hi)) throw ConfigError("bump", "requires r0 < r1");
  double v;
  if (is_const(a, &v)) return cst(bump_value(v, lo, hi));
  auto n = std::make_shared<ExprNode>();
  n->kind = NodeKind::Bump;
  n->a = std::move(a);
  n->lo = lo;
  n->hi = hi;
  return n;
}

namespace {

ExprPtr rebuild(const ExprNode& n, ExprPtr a, ExprPtr b) {
  switch (n.kind) {
    case NodeKind::Neg:
      return neg(std::move(a));
    case NodeKind::Sin:
      return sin(std::move(a));
    case NodeKind::Cos:
      return cos(std::move(a));
    case NodeKind::Exp:
      return exp(std::move(a));
    case NodeKind::Sqrt:
      return sqrt(std::move(a));
    case NodeKind::Bump:
      return bump(std::move(a), n.lo, n.hi);
    case NodeKind::Add:
      return add(std::move(a), std::move(b));
    case NodeKind::Sub:
      return sub(std::move(a), std::move(b));
    case NodeKind::Mul:
      return mul(std::move(a), std::move(b));
    case NodeKind::Div:
      return div(std::move(a), std::move(b));
    case NodeKind::Pow:
      return pow(std::move(a), n.exponent);
    default:
      throw Error("rebuild on a leaf node");
  }
}

template <typename LeafFn>
ExprPtr map_leaves(const ExprPtr& e, const LeafFn& fn) {
  if (e->kind == NodeKind::Constant) return e;
  if (e->kind == NodeKind::Var) return fn(e);
  ExprPtr a = e->a ? map_leaves(e->a, fn) : nullptr;
  ExprPtr b = e->b ? map_leaves(e->b, fn) : nullptr;
  return rebuild(*e, std::move(a), std::move(b));
}

}  // namespace

ExprPtr restrict_to_axis(const ExprPtr& e) {
  return map_leaves(e, [](const ExprPtr& leaf) -> ExprPtr {
    return leaf->var == 0 ? leaf : cst(0.0);
  });
}

ExprPtr scale_t(const ExprPtr& e, double factor) {
  return map_leaves(e, [factor](const ExprPtr& leaf) -> ExprPtr {
    return leaf->var == 0 ? mul(cst(factor), var(0)) : leaf;
  });
}

ExprPtr ddt(const ExprPtr& e) {
  switch (e->kind) {
    case NodeKind::Constant:
      return cst(0.0);
    case NodeKind::Var:
      return cst(e->var == 0 ? 1.0 : 0.0);
    case NodeKind::Neg:
      return neg(ddt(e->a));
    case NodeKind::Sin:
      return mul(cos(e->a), ddt(e->a));
    case NodeKind::Cos:
      return neg(mul(sin(e->a), ddt(e->a)));
    case NodeKind::Exp:
      return mul(exp(e->a), ddt(e->a));
    case NodeKind::Sqrt:
      return div(ddt(e->a), mul(cst(2.0), sqrt(e->a)));
    case NodeKind::Bump: {
      ExprPtr da = ddt(e->a);
      double v;
      if (is_const(da, &v) && v == 0.0) return cst(0.0);
      throw Error("d/dt of bump with a t-dependent argument is not supported");
    }
    case NodeKind::Add:
      return add(ddt(e->a), ddt(e->b));
    case NodeKind::Sub:
      return sub(ddt(e->a), ddt(e->b));
    case NodeKind::Mul:
      return add(mul(ddt(e->a), e->b), mul(e->a, ddt(e->b)));
    case NodeKind::Div:
      return div(sub(mul(ddt(e->a), e->b), mul(e->a, ddt(e->b))), pow(e->b, 2));
    case NodeKind::Pow:
      return mul(mul(cst(static_cast<double>(e->exponent)), pow(e->a, e->exponent - 1)),
                 ddt(e->a));
  }
  throw Error("corrupt expression node");
}

ExprPtr radius_sq(int m) {
  ExprPtr sum = cst(0.0);
  for (int i = 1; i < m; ++i) sum = add(sum, pow(var(i), 2));
  return sum;
}

namespace {

// Minor of a (row-major m x m) with row i and column j removed.
std::vector<ExprPtr> strike(const std::vector<ExprPtr>& a, int m, int row, int col) {
  std::vector<ExprPtr> out;
  out.reserve(static_cast<std::size_t>((m - 1) * (m - 1)));
  for (int i = 0; i < m; ++i) {
    if (i == row) continue;
    for (int j = 0; j < m; ++j) {
      if (j == col) continue;
      out.push_back(a[static_cast<std::size_t>(i * m + j)]);
    }
  }
  return out;
}

}  // namespace

ExprPtr matrix_determinant(const std::vector<ExprPtr>& a, int m) {
  if (m > 5) throw Error("symbolic determinant limited to m <= 5");
  if (m == 1) return a[0];
  ExprPtr det = cst(0.0);
  for (int j = 0; j < m; ++j) {
    ExprPtr term = mul(a[static_cast<std::size_t>(j)],
                       matrix_determinant(strike(a, m, 0, j), m - 1));
    det = (j % 2 == 0) ? add(det, term) : sub(det, term);
  }
  return det;
}

std::vector<ExprPtr> matrix_adjugate(const std::vector<ExprPtr>& a, int m) {
  if (m > 5) throw Error("symbolic adjugate limited to m <= 5");
  std::vector<ExprPtr> adj(static_cast<std::size_t>(m * m));
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      ExprPtr cof = matrix_determinant(strike(a, m, i, j), m - 1);
      if ((i + j) % 2 == 1) cof = neg(cof);
      // adj = transpose of the cofactor matrix
      adj[static_cast<std::size_t>(j * m + i)] = cof;
    }
  }
  return adj;
}

}  // namespace maglab::ast
