#pragma once

#include <string>
#include <vector>

#include "zkflat/basis.hpp"
#include "zkflat/params.hpp"
#include "zkflat/power_series.hpp"

namespace zkflat {

/// Options for the adaptive series construction.
struct GenFunOptions {
    double tail_tol = 1e-14; // absolute tail budget on [-1, 0]
    int degree_cap = 640;
};

/// Series of the base profile for mode j: the solution of
///   g''' - (lambda_j - a) g' = 0,  g(0) = g'(0) = 0, g''(0) = 1.
PowerSeries g0(int j, double a, const GenFunOptions& opt = {});
PowerSeries g0_from_mu(double mu, const GenFunOptions& opt = {});

/// One induction step: the solution of
///   g''' - mu g' = -prev,  g(0) = g'(0) = g''(0) = 0,
/// via the coefficient recursion
///   c_{n+3} = (mu (n+1) c_{n+1} - d_n) / ((n+3)(n+2)(n+1)).
PowerSeries g_next(const PowerSeries& prev, double mu, const GenFunOptions& opt = {});

/// The family g_{i,j} for 0 <= i <= i_max, 1 <= j <= j_max.
struct GenFunTable {
    double a = 0.0;
    int i_max = 0;
    int j_max = 0;
    std::vector<double> lambdas;     // lambda_j, 1-based mode index
    std::vector<PowerSeries> series; // index entry(i, j)

    const PowerSeries& entry(int i, int j) const;
    PowerSeries& entry(int i, int j);

    /// g_{i,j}^{(deriv)}(x) for deriv 0..3.
    double eval(int i, int j, double x, int deriv_order = 0) const;
};

GenFunTable build_table(const Params& p, const TransverseBasis& basis,
                        const GenFunOptions& opt = {}, int threads = 1);

/// Sup-norm certificate |g_{i,j}(x)| <= e^{sqrt(lambda_j)} 3^i i! / (3i+2)!.
double genfun_bound(double lambda_j, int i);

struct BoundViolation {
    int i, j;
    double x, value, bound;
};

struct BoundReport {
    double max_ratio = 0.0;       // max |g| / bound over all samples
    double fitted_c = 0.0;        // smallest C with |g| <= C e^{sqrt(lambda_j)} / (2i)!
    std::vector<BoundViolation> violations;
    bool pass() const { return violations.empty(); }
};

/// Evaluates every table entry at the given sample points against the sup
/// bound; violations are reported, not thrown.
BoundReport check_bound(const GenFunTable& table, const std::vector<double>& samples);

/// Uniformly spaced sample points in [-1, 0].
std::vector<double> bound_samples(int count);

/// Versioned JSON export/import; round trip is bit exact.
std::string table_to_json(const GenFunTable& table);
GenFunTable table_from_json(const std::string& text);

} // namespace zkflat
