#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "zkflat/error.hpp"

namespace zkflat {

/// Physical and synthesis parameters.
///
/// The state lives on (-1,0) x (0,1); the control acts on the x=-1 edge over
/// t in [0, t_final]. gevrey_order is the order s of the switching bump
/// (1 < s < 2; null control needs s >= 3/2), bump_steepness its M > 0.
struct Params {
    double a = 1.0;             // transport velocity, > 0
    double t_final = 1.0;       // horizon T, > 0
    double tau = 0.4;           // switch time, 0 < tau < T
    double gevrey_order = 1.6;  // bump order s in (1,2)
    double bump_steepness = 1.0;
    int i_max = 15;             // series order cutoff, >= 0
    int j_max = 4;              // transverse mode cutoff, >= 1
    int nx = 64;                // x nodes
    int ny = 33;                // y nodes
    int nt = 2000;              // time steps (nt+1 nodes)

    void validate() const {
        require(a > 0.0, "params: a must be > 0");
        require(t_final > 0.0, "params: T must be > 0");
        require(tau > 0.0 && tau < t_final, "params: tau must lie in (0, T)");
        require(gevrey_order > 1.0 && gevrey_order < 2.0,
                "params: gevrey order s must lie in (1, 2)");
        require(bump_steepness > 0.0, "params: bump steepness M must be > 0");
        require(i_max >= 0, "params: i_max must be >= 0");
        require(j_max >= 1, "params: j_max must be >= 1");
        require(nx >= 2 && ny >= 2 && nt >= 2, "params: nx, ny, nt must be >= 2");
        require(ny >= 2 * j_max + 1, "params: ny must be >= 2*j_max+1 (aliasing guard)");
    }

    double dt() const { return t_final / static_cast<double>(nt); }
};

enum class AxisKind { Uniform, Chebyshev };

/// Tensor grid over [-1,0] x [0,1] x [0,T]. Endpoints are included exactly.
struct Grid {
    std::vector<double> x; // ascending, x.front() == -1, x.back() == 0
    std::vector<double> y; // ascending, y.front() == 0,  y.back() == 1
    std::vector<double> t; // ascending, t.front() == 0,  t.back() == T
    AxisKind x_kind = AxisKind::Chebyshev;

    static Grid make(const Params& p, AxisKind x_kind = AxisKind::Chebyshev);

    int nx() const { return static_cast<int>(x.size()); }
    int ny() const { return static_cast<int>(y.size()); }
    int nt() const { return static_cast<int>(t.size()); }

    /// Index of the time node equal to tq (within rounding slack); throws if
    /// tq falls between nodes.
    int time_index(double tq) const;
};

/// Composite quadrature weights for samples on `nodes` (uniform spacing:
/// Simpson with a 3/8 tail when the interval count is odd; Chebyshev nodes:
/// Clenshaw-Curtis).
std::vector<double> quadrature_weights(const std::vector<double>& nodes, AxisKind kind);

} // namespace zkflat
