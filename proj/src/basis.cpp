#include "zkflat/basis.hpp"

#include <cmath>

#include "zkflat/cheb.hpp"

namespace zkflat {

namespace {
constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kSqrt2 = 1.41421356237309504880168872420969808;
} // namespace

Grid Grid::make(const Params& p, AxisKind x_kind) {
    p.validate();
    Grid g;
    g.x_kind = x_kind;
    if (x_kind == AxisKind::Chebyshev) {
        g.x = cheb::nodes(p.nx);
    } else {
        g.x.resize(p.nx);
        for (int i = 0; i < p.nx; ++i)
            g.x[i] = -1.0 + static_cast<double>(i) / (p.nx - 1);
        g.x.back() = 0.0;
    }
    g.y.resize(p.ny);
    for (int i = 0; i < p.ny; ++i) g.y[i] = static_cast<double>(i) / (p.ny - 1);
    g.y.back() = 1.0;
    g.t.resize(p.nt + 1);
    for (int i = 0; i <= p.nt; ++i) g.t[i] = p.t_final * i / p.nt;
    g.t.back() = p.t_final;
    return g;
}

int Grid::time_index(double tq) const {
    const double dt = t.size() > 1 ? t[1] - t[0] : 1.0;
    const double pos = (tq - t.front()) / dt;
    const int k = static_cast<int>(std::lround(pos));
    require(k >= 0 && k < static_cast<int>(t.size()) &&
                std::fabs(pos - k) < 1e-9 * (1.0 + std::fabs(pos)),
            "grid: requested time is not a node");
    return k;
}

std::vector<double> quadrature_weights(const std::vector<double>& nodes, AxisKind kind) {
    const int n = static_cast<int>(nodes.size());
    require(n >= 2, "quadrature: need at least 2 nodes");
    if (kind == AxisKind::Chebyshev) return cheb::clenshaw_curtis_weights(n);
    const double h = nodes[1] - nodes[0];
    std::vector<double> w(n, 0.0);
    if (n == 2) {
        w[0] = w[1] = 0.5 * h;
        return w;
    }
    int start = 0;
    if ((n - 1) % 2 == 1) {
        // Simpson 3/8 on the first three intervals, plain Simpson on the rest.
        w[0] += 3.0 * h / 8.0;
        w[1] += 9.0 * h / 8.0;
        w[2] += 9.0 * h / 8.0;
        w[3] += 3.0 * h / 8.0;
        start = 3;
    }
    for (int k = start; k + 2 <= n - 1; k += 2) {
        w[k] += h / 3.0;
        w[k + 1] += 4.0 * h / 3.0;
        w[k + 2] += h / 3.0;
    }
    return w;
}

TransverseBasis::TransverseBasis(int j_max) : j_max_(j_max) {
    require(j_max >= 1, "basis: j_max must be >= 1");
    lambdas_.resize(j_max);
    for (int j = 1; j <= j_max; ++j) lambdas_[j - 1] = (j * kPi) * (j * kPi);
}

double TransverseBasis::lambda(int j) const {
    require(j >= 1 && j <= j_max_, "basis: mode index out of range");
    return lambdas_[j - 1];
}

double TransverseBasis::eval(int j, double y) const {
    require(j >= 1, "basis: mode index must be >= 1");
    if (y == 0.0 || y == 1.0) return 0.0; // Dirichlet ends, exact
    return kSqrt2 * std::sin(j * kPi * y);
}

TransverseBasis make_basis(int j_max) { return TransverseBasis(j_max); }

std::vector<double> sine_analyze(const std::vector<double>& f,
                                 const std::vector<double>& y_nodes,
                                 const TransverseBasis& basis) {
    const int ny = static_cast<int>(y_nodes.size());
    require(static_cast<int>(f.size()) == ny, "sine_analyze: sample count mismatch");
    require(ny >= 2 * basis.j_max() + 1,
            "sine_analyze: y grid too coarse for j_max (aliasing)");
    const std::vector<double> w = quadrature_weights(y_nodes, AxisKind::Uniform);
    std::vector<double> c(basis.j_max(), 0.0);
    for (int j = 1; j <= basis.j_max(); ++j) {
        double acc = 0.0;
        for (int m = 0; m < ny; ++m) acc += w[m] * f[m] * basis.eval(j, y_nodes[m]);
        c[j - 1] = acc;
    }
    return c;
}

std::vector<double> sine_synthesize(const std::vector<double>& coeffs,
                                    const std::vector<double>& y_nodes,
                                    const TransverseBasis& basis) {
    require(static_cast<int>(coeffs.size()) <= basis.j_max(),
            "sine_synthesize: more coefficients than basis modes");
    std::vector<double> f(y_nodes.size(), 0.0);
    for (size_t m = 0; m < y_nodes.size(); ++m) {
        double acc = 0.0;
        for (size_t j = 0; j < coeffs.size(); ++j)
            acc += coeffs[j] * basis.eval(static_cast<int>(j) + 1, y_nodes[m]);
        f[m] = acc;
    }
    return f;
}

Field Field::zeros2d(const Grid& g, std::string tag) {
    Field f;
    f.grid = g;
    f.dims = 2;
    f.values.assign(static_cast<size_t>(g.nx()) * g.ny(), 0.0);
    f.tag = std::move(tag);
    return f;
}

Field Field::zeros3d(const Grid& g, std::string tag) {
    Field f;
    f.grid = g;
    f.dims = 3;
    f.values.assign(static_cast<size_t>(g.nt()) * g.nx() * g.ny(), 0.0);
    f.tag = std::move(tag);
    return f;
}

double& Field::at(int ix, int iy) {
    return values[static_cast<size_t>(ix) * grid.ny() + iy];
}
double Field::at(int ix, int iy) const {
    return values[static_cast<size_t>(ix) * grid.ny() + iy];
}
double& Field::at(int it, int ix, int iy) {
    return values[(static_cast<size_t>(it) * grid.nx() + ix) * grid.ny() + iy];
}
double Field::at(int it, int ix, int iy) const {
    return values[(static_cast<size_t>(it) * grid.nx() + ix) * grid.ny() + iy];
}

Field Field::slice(int it) const {
    require(dims == 3, "field: slice needs a 3D field");
    Field f = zeros2d(grid, tag);
    for (int ix = 0; ix < grid.nx(); ++ix)
        for (int iy = 0; iy < grid.ny(); ++iy) f.at(ix, iy) = at(it, ix, iy);
    return f;
}

double Field::max_abs() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::fabs(v));
    return m;
}

double l2_norm(const Field& f) {
    require(f.dims == 2, "l2_norm: expects a 2D field");
    const std::vector<double> wx = quadrature_weights(f.grid.x, f.grid.x_kind);
    const std::vector<double> wy = quadrature_weights(f.grid.y, AxisKind::Uniform);
    double acc = 0.0;
    for (int ix = 0; ix < f.grid.nx(); ++ix) {
        double row = 0.0;
        for (int iy = 0; iy < f.grid.ny(); ++iy) {
            const double v = f.at(ix, iy);
            row += wy[iy] * v * v;
        }
        acc += wx[ix] * row;
    }
    return std::sqrt(std::max(0.0, acc));
}

} // namespace zkflat
