#include "zkflat/genfun.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "zkflat/threads.hpp"

namespace zkflat {

namespace {

constexpr int kWindow = 9;

double window_sum(const std::vector<double>& c, size_t end) {
    double acc = 0.0;
    const size_t lo = end >= kWindow ? end - kWindow : 0;
    for (size_t k = lo; k < end; ++k) acc += std::fabs(c[k]);
    return acc;
}

// Tail estimate recovered from the trailing window of a stored series.
double window_tail(const std::vector<double>& c) { return window_sum(c, c.size()); }

/// Shared recursion for (2)-(3): c_{n+3} = (mu (n+1) c_{n+1} - d_n) / ((n+3)(n+2)(n+1))
/// with d = source (zero-padded) and Cauchy data (0, 0, c2).
PowerSeries run_recursion(const std::vector<double>& source, double mu, double c2,
                          const GenFunOptions& opt) {
    PowerSeries out;
    double src_sum = 0.0;
    for (double d : source) src_sum += std::fabs(d);
    if (src_sum == 0.0 && c2 == 0.0) {
        out.coeffs = {0.0, 0.0, 0.0};
        return out;
    }

    std::vector<double>& c = out.coeffs;
    c.assign(3, 0.0);
    c[2] = c2;
    const int src_top = static_cast<int>(source.size()); // d_n == 0 for n >= src_top
    const int min_top = std::max(src_top + 3, 3 * kWindow);

    double prev_window = -1.0;
    while (true) {
        const int n = static_cast<int>(c.size()) - 3; // produce c_{n+3}
        const double dn = n < src_top ? source[n] : 0.0;
        const double denom =
            static_cast<double>(n + 3) * static_cast<double>(n + 2) * static_cast<double>(n + 1);
        c.push_back((mu * (n + 1) * c[n + 1] - dn) / denom);

        const int top = static_cast<int>(c.size()) - 1;
        if (top >= min_top && top % kWindow == 0) {
            const double w = window_sum(c, c.size());
            if (prev_window >= 0.0 && w <= 0.5 * prev_window && w < 0.25 * opt.tail_tol) {
                // Windows halve (at least) from here on, so the dropped tail
                // is below w * sum 2^-k = w.
                out.tail_bound = w;
                out.tail_monotone = true;
                return out;
            }
            prev_window = w;
        }
        if (top >= opt.degree_cap)
            throw Error("genfun: series did not reach tail tolerance within the degree cap");
    }
}

} // namespace

PowerSeries g0_from_mu(double mu, const GenFunOptions& opt) {
    return run_recursion({}, mu, 0.5, opt);
}

PowerSeries g0(int j, double a, const GenFunOptions& opt) {
    require(j >= 1, "g0: mode index must be >= 1");
    require(a > 0.0, "g0: a must be > 0");
    const TransverseBasis basis(j);
    return g0_from_mu(basis.lambda(j) - a, opt);
}

PowerSeries g_next(const PowerSeries& prev, double mu, const GenFunOptions& opt) {
    return run_recursion(prev.coeffs, mu, 0.0, opt);
}

const PowerSeries& GenFunTable::entry(int i, int j) const {
    require(i >= 0 && i <= i_max && j >= 1 && j <= j_max, "table: index out of range");
    return series[static_cast<size_t>(j - 1) * (i_max + 1) + i];
}

PowerSeries& GenFunTable::entry(int i, int j) {
    require(i >= 0 && i <= i_max && j >= 1 && j <= j_max, "table: index out of range");
    return series[static_cast<size_t>(j - 1) * (i_max + 1) + i];
}

double GenFunTable::eval(int i, int j, double x, int deriv_order) const {
    return entry(i, j).eval(x, deriv_order);
}

GenFunTable build_table(const Params& p, const TransverseBasis& basis,
                        const GenFunOptions& opt, int threads) {
    require(basis.j_max() >= p.j_max, "build_table: basis too small for j_max");
    GenFunTable t;
    t.a = p.a;
    t.i_max = p.i_max;
    t.j_max = p.j_max;
    t.lambdas.resize(p.j_max);
    for (int j = 1; j <= p.j_max; ++j) t.lambdas[j - 1] = basis.lambda(j);
    t.series.resize(static_cast<size_t>(p.j_max) * (p.i_max + 1));
    parallel_for(p.j_max, threads, [&](int jm1) {
        const double mu = t.lambdas[jm1] - p.a;
        PowerSeries cur = g0_from_mu(mu, opt);
        t.series[static_cast<size_t>(jm1) * (p.i_max + 1)] = cur;
        for (int i = 1; i <= p.i_max; ++i) {
            cur = g_next(cur, mu, opt);
            t.series[static_cast<size_t>(jm1) * (p.i_max + 1) + i] = cur;
        }
    });
    return t;
}

double genfun_bound(double lambda_j, int i) {
    return std::exp(std::sqrt(lambda_j) + i * std::log(3.0) + std::lgamma(i + 1.0) -
                    std::lgamma(3.0 * i + 3.0));
}

BoundReport check_bound(const GenFunTable& table, const std::vector<double>& samples) {
    BoundReport rep;
    for (int j = 1; j <= table.j_max; ++j) {
        const double lam = table.lambdas[j - 1];
        for (int i = 0; i <= table.i_max; ++i) {
            const PowerSeries& ps = table.entry(i, j);
            const double bound = genfun_bound(lam, i);
            const double slack = 1e-10 * bound + 1e-15 * ps.abs_sum();
            for (double x : samples) {
                const double v = std::fabs(ps.eval(x));
                if (bound > 0.0) rep.max_ratio = std::max(rep.max_ratio, v / bound);
                if (v > bound + slack) rep.violations.push_back({i, j, x, v, bound});
                // Empirical constant in the coarser 1/(2i)! envelope.
                const double logc =
                    (v > 0.0 ? std::log(v) : -750.0) + std::lgamma(2.0 * i + 1.0) - std::sqrt(lam);
                rep.fitted_c = std::max(rep.fitted_c, std::exp(logc));
            }
        }
    }
    return rep;
}

std::vector<double> bound_samples(int count) {
    require(count >= 2, "bound_samples: need at least 2 points");
    std::vector<double> xs(count);
    for (int k = 0; k < count; ++k)
        xs[k] = -1.0 + static_cast<double>(k) / (count - 1);
    xs.back() = 0.0;
    return xs;
}

std::string table_to_json(const GenFunTable& table) {
    nlohmann::ordered_json doc;
    doc["version"] = 1;
    doc["a"] = table.a;
    doc["I_max"] = table.i_max;
    doc["J_max"] = table.j_max;
    nlohmann::ordered_json entries = nlohmann::ordered_json::array();
    for (int j = 1; j <= table.j_max; ++j) {
        for (int i = 0; i <= table.i_max; ++i) {
            const PowerSeries& ps = table.entry(i, j);
            nlohmann::ordered_json e;
            e["i"] = i;
            e["j"] = j;
            e["degree"] = ps.degree();
            e["coeffs"] = ps.coeffs;
            entries.push_back(std::move(e));
        }
    }
    doc["entries"] = std::move(entries);
    return doc.dump(2) + "\n";
}

GenFunTable table_from_json(const std::string& text) {
    const nlohmann::json doc = nlohmann::json::parse(text);
    require(doc.at("version").get<int>() == 1, "table json: unsupported version");
    GenFunTable t;
    t.a = doc.at("a").get<double>();
    t.i_max = doc.at("I_max").get<int>();
    t.j_max = doc.at("J_max").get<int>();
    const TransverseBasis basis(t.j_max);
    t.lambdas.resize(t.j_max);
    for (int j = 1; j <= t.j_max; ++j) t.lambdas[j - 1] = basis.lambda(j);
    t.series.resize(static_cast<size_t>(t.j_max) * (t.i_max + 1));
    for (const auto& e : doc.at("entries")) {
        const int i = e.at("i").get<int>();
        const int j = e.at("j").get<int>();
        PowerSeries ps;
        ps.coeffs = e.at("coeffs").get<std::vector<double>>();
        require(ps.degree() == e.at("degree").get<int>(), "table json: degree mismatch");
        ps.tail_bound = window_tail(ps.coeffs);
        t.entry(i, j) = std::move(ps);
    }
    return t;
}

} // namespace zkflat
