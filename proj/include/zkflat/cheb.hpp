#pragma once

#include <vector>

#include "zkflat/linalg.hpp"

namespace zkflat {

/// Chebyshev-Gauss-Lobatto collocation on [-1, 0].
///
/// Nodes are returned ascending (x[0] = -1, x[n-1] = 0). Coefficient arrays
/// refer to the Chebyshev series in the mapped variable xi = 2x + 1 on
/// [-1, 1].
namespace cheb {

/// n ascending CGL nodes on [-1, 0] (n >= 2, polynomial degree n-1).
std::vector<double> nodes(int n);

/// First-derivative collocation matrix on the ascending nodes.
Mat diff_matrix(const std::vector<double>& x);

/// Clenshaw-Curtis weights for integration over [-1, 0] on CGL nodes.
std::vector<double> clenshaw_curtis_weights(int n);

/// Nodal values (ascending nodes) -> Chebyshev coefficients.
std::vector<double> to_coeffs(const std::vector<double>& values);

/// Chebyshev coefficients -> nodal values (ascending nodes).
std::vector<double> to_values(const std::vector<double>& coeffs);

/// Coefficients of the x-derivative (includes the chain-rule factor 2).
std::vector<double> diff_coeffs(const std::vector<double>& coeffs);

/// Series value at x = 0 (mapped endpoint xi = 1): plain coefficient sum.
double eval_at_right(const std::vector<double>& coeffs);

/// Series value at arbitrary x in [-1, 0] by Clenshaw recurrence.
double eval(const std::vector<double>& coeffs, double x);

/// Barycentric interpolation from CGL samples to arbitrary points.
std::vector<double> interpolate(const std::vector<double>& x_nodes,
                                const std::vector<double>& values,
                                const std::vector<double>& x_query);

} // namespace cheb

/// Dense differentiation matrix of order `order` (1, 2 or 3) for a uniform
/// grid, centered 4th-order stencils inside and one-sided at the ends.
Mat uniform_diff_matrix(const std::vector<double>& x, int order);

} // namespace zkflat
