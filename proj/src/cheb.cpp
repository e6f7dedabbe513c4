#include "zkflat/cheb.hpp"

#include <cmath>

#include "zkflat/error.hpp"

namespace zkflat {
namespace cheb {

namespace {
constexpr double kPi = 3.14159265358979323846264338327950288;
} // namespace

std::vector<double> nodes(int n) {
    require(n >= 2, "cheb: need at least 2 nodes");
    const int N = n - 1;
    std::vector<double> x(n);
    // xi_k = cos(k pi / N) descending; map x = (xi - 1)/2 and reverse.
    for (int k = 0; k <= N; ++k) {
        const double xi = std::cos(kPi * k / N);
        x[N - k] = (xi - 1.0) * 0.5;
    }
    x[0] = -1.0;
    x[N] = 0.0;
    if (N % 2 == 0) x[N / 2] = -0.5;
    return x;
}

Mat diff_matrix(const std::vector<double>& x) {
    const int n = static_cast<int>(x.size());
    const int N = n - 1;
    // Barycentric weights for CGL nodes are (-1)^k with halved endpoints,
    // invariant under the affine map.
    std::vector<double> w(n);
    for (int i = 0; i < n; ++i) w[i] = (i % 2 == 0) ? 1.0 : -1.0;
    w[0] *= 0.5;
    w[N] *= 0.5;
    Mat d(n, n);
    for (int i = 0; i < n; ++i) {
        double diag = 0.0;
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            const double v = (w[j] / w[i]) / (x[i] - x[j]);
            d(i, j) = v;
            diag -= v;
        }
        d(i, i) = diag;
    }
    return d;
}

std::vector<double> clenshaw_curtis_weights(int n) {
    require(n >= 2, "cheb: need at least 2 nodes");
    const int N = n - 1;
    std::vector<double> w(n, 0.0);
    if (N == 1) {
        w[0] = w[1] = 0.25; // trapezoid on [-1,0]
        return w;
    }
    // Trefethen's clencurt, scaled from [-1,1] to [-1,0] (factor 1/2) and
    // stored against ascending nodes (weights are symmetric anyway).
    const bool even = (N % 2 == 0);
    const double end = even ? 1.0 / (N * N - 1.0) : 1.0 / (N * N);
    w[0] = w[N] = 0.5 * end;
    for (int i = 1; i < N; ++i) {
        const double theta = kPi * i / N;
        double v = 1.0;
        const int kmax = even ? N / 2 - 1 : (N - 1) / 2;
        for (int k = 1; k <= kmax; ++k)
            v -= 2.0 * std::cos(2.0 * k * theta) / (4.0 * k * k - 1.0);
        if (even) v -= std::cos(N * theta) / (N * N - 1.0);
        w[i] = 0.5 * 2.0 * v / N;
    }
    return w;
}

std::vector<double> to_coeffs(const std::vector<double>& values) {
    const int n = static_cast<int>(values.size());
    const int N = n - 1;
    std::vector<double> a(n, 0.0);
    // a_k = (2/(N c_k)) sum'' f(xi_m) cos(k m pi / N); values ascending in x
    // correspond to descending xi, i.e. f(xi_m) = values[N - m].
    for (int k = 0; k <= N; ++k) {
        double acc = 0.0;
        for (int m = 0; m <= N; ++m) {
            const double fm = values[N - m];
            const double cm = (m == 0 || m == N) ? 0.5 : 1.0;
            acc += cm * fm * std::cos(kPi * k * m / N);
        }
        const double ck = (k == 0 || k == N) ? 2.0 : 1.0;
        a[k] = 2.0 * acc / (N * ck);
    }
    return a;
}

std::vector<double> to_values(const std::vector<double>& coeffs) {
    const int n = static_cast<int>(coeffs.size());
    const int N = n - 1;
    std::vector<double> v(n, 0.0);
    for (int m = 0; m <= N; ++m) {
        double acc = 0.0;
        for (int k = 0; k <= N; ++k) acc += coeffs[k] * std::cos(kPi * k * m / N);
        v[N - m] = acc;
    }
    return v;
}

std::vector<double> diff_coeffs(const std::vector<double>& coeffs) {
    const int n = static_cast<int>(coeffs.size());
    const int N = n - 1;
    std::vector<double> b(n, 0.0);
    if (N == 0) return b;
    b[N] = 0.0;
    if (N >= 1) b[N - 1] = 2.0 * N * coeffs[N];
    for (int k = N - 1; k >= 1; --k)
        b[k - 1] = (k + 1 < n ? b[k + 1] : 0.0) + 2.0 * k * coeffs[k];
    b[0] *= 0.5;
    for (double& c : b) c *= 2.0; // d xi/dx = 2
    return b;
}

double eval_at_right(const std::vector<double>& coeffs) {
    double acc = 0.0;
    for (double c : coeffs) acc += c;
    return acc;
}

double eval(const std::vector<double>& coeffs, double x) {
    const double xi = 2.0 * x + 1.0;
    double b1 = 0.0, b2 = 0.0;
    for (int k = static_cast<int>(coeffs.size()) - 1; k >= 1; --k) {
        const double b0 = 2.0 * xi * b1 - b2 + coeffs[k];
        b2 = b1;
        b1 = b0;
    }
    return xi * b1 - b2 + (coeffs.empty() ? 0.0 : coeffs[0]);
}

std::vector<double> interpolate(const std::vector<double>& x_nodes,
                                const std::vector<double>& values,
                                const std::vector<double>& x_query) {
    const int n = static_cast<int>(x_nodes.size());
    const int N = n - 1;
    std::vector<double> w(n);
    for (int i = 0; i < n; ++i) w[i] = (i % 2 == 0) ? 1.0 : -1.0;
    w[0] *= 0.5;
    w[N] *= 0.5;
    std::vector<double> out(x_query.size(), 0.0);
    for (size_t q = 0; q < x_query.size(); ++q) {
        const double xq = x_query[q];
        double num = 0.0, den = 0.0;
        bool hit = false;
        for (int i = 0; i < n; ++i) {
            const double dx = xq - x_nodes[i];
            if (dx == 0.0) {
                out[q] = values[i];
                hit = true;
                break;
            }
            const double c = w[i] / dx;
            num += c * values[i];
            den += c;
        }
        if (!hit) out[q] = num / den;
    }
    return out;
}

} // namespace cheb

Mat uniform_diff_matrix(const std::vector<double>& x, int order) {
    require(order >= 1 && order <= 3, "uniform_diff_matrix: order must be 1..3");
    const int n = static_cast<int>(x.size());
    require(n >= 8, "uniform_diff_matrix: need at least 8 nodes");
    const double h = x[1] - x[0];
    Mat d(n, n);
    auto set_row = [&](int i, int start, std::initializer_list<double> coef, double scale) {
        int j = start;
        for (double c : coef) d(i, j++) = c * scale;
    };
    // 4th-order centered stencils inside; lower-order one-sided rows at the
    // edges (residual checks only use interior rows).
    for (int i = 0; i < n; ++i) {
        if (order == 1) {
            if (i >= 2 && i <= n - 3)
                set_row(i, i - 2, {1, -8, 0, 8, -1}, 1.0 / (12.0 * h));
            else if (i == 0)
                set_row(i, 0, {-3, 4, -1}, 1.0 / (2.0 * h));
            else if (i == 1)
                set_row(i, 0, {-1, 0, 1}, 1.0 / (2.0 * h));
            else if (i == n - 2)
                set_row(i, n - 3, {-1, 0, 1}, 1.0 / (2.0 * h));
            else
                set_row(i, n - 3, {1, -4, 3}, 1.0 / (2.0 * h));
        } else if (order == 2) {
            if (i >= 2 && i <= n - 3)
                set_row(i, i - 2, {-1, 16, -30, 16, -1}, 1.0 / (12.0 * h * h));
            else if (i == 0)
                set_row(i, 0, {2, -5, 4, -1}, 1.0 / (h * h));
            else if (i == 1 || i == n - 2)
                set_row(i, i - 1, {1, -2, 1}, 1.0 / (h * h));
            else
                set_row(i, n - 4, {-1, 4, -5, 2}, 1.0 / (h * h));
        } else {
            if (i >= 3 && i <= n - 4)
                set_row(i, i - 3, {1, -8, 13, 0, -13, 8, -1}, 1.0 / (8.0 * h * h * h));
            else if (i <= 1)
                set_row(i, i, {-5, 18, -24, 14, -3}, 1.0 / (2.0 * h * h * h));
            else if (i == 2)
                set_row(i, 0, {-1, 2, 0, -2, 1}, 1.0 / (2.0 * h * h * h));
            else if (i == n - 3)
                set_row(i, n - 5, {-1, 2, 0, -2, 1}, 1.0 / (2.0 * h * h * h));
            else
                set_row(i, i - 4, {3, -14, 24, -18, 5}, 1.0 / (2.0 * h * h * h));
        }
    }
    return d;
}

} // namespace zkflat
