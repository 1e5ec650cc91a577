#pragma once

#include <vector>

#include "maglab/expr.hpp"

// Tree builders for assembling constructed coefficient fields.  The builders
// fold constants so emitted system files stay readable; the parser itself
// never folds (parsing is structure-faithful).
namespace maglab::ast {

ExprPtr cst(double v);
ExprPtr var(int index);

ExprPtr neg(ExprPtr a);
ExprPtr add(ExprPtr a, ExprPtr b);
ExprPtr sub(ExprPtr a, ExprPtr b);
ExprPtr mul(ExprPtr a, ExprPtr b);
ExprPtr div(ExprPtr a, ExprPtr b);
ExprPtr pow(ExprPtr a, int exponent);
ExprPtr sin(ExprPtr a);
ExprPtr cos(ExprPtr a);
ExprPtr exp(ExprPtr a);
ExprPtr sqrt(ExprPtr a);
ExprPtr bump(ExprPtr a, double lo, double hi);

bool is_const(const ExprPtr& e, double* value = nullptr);

/// Restriction to the axis: substitutes x2 = ... = xm = 0.
ExprPtr restrict_to_axis(const ExprPtr& e);

/// Reparametrizes the t coordinate: t -> factor * t.
ExprPtr scale_t(const ExprPtr& e, double factor);

/// Symbolic derivative with respect to t.  Throws for bump nodes whose
/// argument still depends on t (constant-argument bumps fold away first).
ExprPtr ddt(const ExprPtr& e);

/// Squared transverse radius x2^2 + ... + xm^2.
ExprPtr radius_sq(int m);

// Symbolic dense m x m helpers (row-major), used to express |alpha|_g^2 as a
// printable field.  Cofactor expansion; intended for the desk-scale m <= 5.
std::vector<ExprPtr> matrix_adjugate(const std::vector<ExprPtr>& a, int m);
ExprPtr matrix_determinant(const std::vector<ExprPtr>& a, int m);

}  // namespace maglab::ast
