#pragma once

#include <vector>

#include "zkflat/params.hpp"

namespace zkflat {

/// Dirichlet sine eigenbasis on (0,1): e_j(y) = sqrt(2) sin(j pi y) with
/// eigenvalues lambda_j = (j pi)^2.
class TransverseBasis {
public:
    explicit TransverseBasis(int j_max);

    int j_max() const { return j_max_; }
    double lambda(int j) const;           // (j pi)^2, 1-based
    double eval(int j, double y) const;   // e_j(y), exact 0 at y = 0, 1
    const std::vector<double>& lambdas() const { return lambdas_; }

private:
    int j_max_ = 0;
    std::vector<double> lambdas_;
};

TransverseBasis make_basis(int j_max);

/// Mode coefficients c_j = int_0^1 f(y) e_j(y) dy, j = 1..j_max, by composite
/// quadrature on the full y grid (endpoints included). Throws if the grid is
/// too coarse for j_max (ny >= 2*j_max + 1).
std::vector<double> sine_analyze(const std::vector<double>& f,
                                 const std::vector<double>& y_nodes,
                                 const TransverseBasis& basis);

/// Samples of sum_j c_j e_j(y) on the y grid.
std::vector<double> sine_synthesize(const std::vector<double>& coeffs,
                                    const std::vector<double>& y_nodes,
                                    const TransverseBasis& basis);

/// Real samples on the x-y (2D) or x-y-t (3D) tensor grid.
struct Field {
    Grid grid;
    int dims = 2;                  // 2 or 3
    std::vector<double> values;    // 2D: [ix*ny + iy]; 3D: [(it*nx + ix)*ny + iy]
    std::string tag;               // state / initial / target / ...

    static Field zeros2d(const Grid& g, std::string tag = "state");
    static Field zeros3d(const Grid& g, std::string tag = "state");

    double& at(int ix, int iy);
    double at(int ix, int iy) const;
    double& at(int it, int ix, int iy);
    double at(int it, int ix, int iy) const;

    /// 2D slice of a 3D field at time node it.
    Field slice(int it) const;

    double max_abs() const;
};

/// Tensor-product quadrature approximation of the L2(Omega) norm of a 2D
/// field.
double l2_norm(const Field& f);

} // namespace zkflat
