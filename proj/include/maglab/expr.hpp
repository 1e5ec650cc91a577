#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>

namespace maglab {

/// Hard cap on the chart dimension m; keeps jets allocation-free.
inline constexpr int kMaxDim = 12;

enum class NodeKind : std::uint8_t {
  Constant,
  Var,   // coordinate index: 0 is t, k>=1 is x_{k+1}
  Neg,
  Sin,
  Cos,
  Exp,
  Sqrt,
  Bump,  // smooth cutoff of the argument, with numeric thresholds lo/hi
  Add,
  Sub,
  Mul,
  Div,
  Pow,   // integer exponent only
};

struct ExprNode;
using ExprPtr = std::shared_ptr<const ExprNode>;

struct ExprNode {
  NodeKind kind;
  double value = 0.0;          // Constant
  int var = -1;                // Var
  int exponent = 0;            // Pow
  double lo = 0.0, hi = 0.0;   // Bump thresholds (argument scale)
  ExprPtr a, b;
};

/// Value and first partial derivatives of a scalar field at a chart point.
/// partials[0] is the t-derivative, partials[k] the x_{k+1}-derivative.
struct Jet {
  double value = 0.0;
  int dim = 0;
  std::array<double, kMaxDim> partials{};

  double partial(int i) const { return partials[static_cast<std::size_t>(i)]; }
};

/// Immutable expression tree over the chart coordinates (t, x2, ..., xm).
class ExprAst {
 public:
  ExprAst() = default;
  ExprAst(ExprPtr root, int dim) : root_(std::move(root)), dim_(dim) {}

  int dim() const { return dim_; }
  const ExprPtr& root() const { return root_; }
  bool valid() const { return root_ != nullptr; }

 private:
  ExprPtr root_;
  int dim_ = 0;
};

// Grammar (README carries the user-facing description):
//   expr   := ['+'|'-'] term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := base ['^' int]
//   base   := number | ident | '(' expr ')' | func '(' expr ')'
//           | 'bump' '(' expr ',' number ',' number ')'
//   func   := sin | cos | exp | sqrt
//   ident  := t | x2 ... x<m>
ExprAst parse(std::string_view source, int m);

/// Canonical printout; parsing it again yields a structurally equal tree.
std::string to_string(const ExprAst& ast);

bool structurally_equal(const ExprAst& lhs, const ExprAst& rhs);

double eval_value(const ExprAst& ast, std::span<const double> p);
Jet eval_jet(const ExprAst& ast, std::span<const double> p);

/// Max over sampled (t, x) of |f(t+T, x) - f(t, x)|.  Zero certifies nothing
/// globally; a large value certifies a violation on the sample set.
double check_t_periodicity(const ExprAst& ast, double T, int samples);

/// Smooth cutoff: 1 for s <= r0, 0 for s >= r1, strictly monotone between,
/// built from the germ h(u) = exp(-1/u) (u > 0).
double bump_value(double s, double r0, double r1);
double bump_slope(double s, double r0, double r1);

}  // namespace maglab
