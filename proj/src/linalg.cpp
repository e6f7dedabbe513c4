#include "zkflat/linalg.hpp"

#include <cmath>

namespace zkflat {

void matrix_exponential(const Mat& a, Mat* exp_out, Mat* phi1_out) {
    const int n = a.rows();
    require(n == a.cols(), "matrix_exponential: square matrix required");

    double norm1 = 0.0;
    for (int c = 0; c < n; ++c) {
        double col = 0.0;
        for (int r = 0; r < n; ++r) col += std::fabs(a(r, c));
        norm1 = std::max(norm1, col);
    }
    int squarings = 0;
    double scale = 1.0;
    while (norm1 * scale > 0.25) {
        scale *= 0.5;
        ++squarings;
    }

    Mat b(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) b(r, c) = a(r, c) * scale;

    // Taylor sums: exp = sum b^k / k!, phi1 = sum b^k / (k+1)!
    Mat e = Mat::identity(n);
    Mat p = Mat::identity(n);
    Mat term = Mat::identity(n);
    double fact = 1.0;
    for (int k = 1; k <= 24; ++k) {
        term = term * b;
        fact *= k;
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) {
                e(r, c) += term(r, c) / fact;
                p(r, c) += term(r, c) / (fact * (k + 1.0));
            }
    }
    for (int s = 0; s < squarings; ++s) {
        Mat ep = e;
        for (int r = 0; r < n; ++r) ep(r, r) += 1.0;
        p = ep * p;
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) p(r, c) *= 0.5;
        e = e * e;
    }
    if (exp_out) *exp_out = std::move(e);
    if (phi1_out) *phi1_out = std::move(p);
}

Mat exp_weighted_gram(const Mat& a, const Mat& q) {
    const int n = a.rows();
    require(n == a.cols() && q.rows() == n && q.cols() == n,
            "exp_weighted_gram: shape mismatch");

    double norm1 = 0.0;
    for (int c = 0; c < n; ++c) {
        double col = 0.0;
        for (int r = 0; r < n; ++r) col += std::fabs(a(r, c));
        norm1 = std::max(norm1, col);
    }
    int doublings = 0;
    double scale = 1.0;
    while (norm1 * scale > 0.25) {
        scale *= 0.5;
        ++doublings;
    }

    Mat b(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) b(r, c) = a(r, c) * scale;

    // Gauss-Legendre 8 on [0, 1]; e^{s B} has tiny norm, so the integrand is
    // resolved far past machine precision.
    static const double gx[8] = {0.01985507175123188, 0.10166676129318664,
                                 0.2372337950418355,  0.40828267875217505,
                                 0.5917173212478249,  0.7627662049581645,
                                 0.8983332387068134,  0.9801449282487681};
    static const double gw[8] = {0.05061426814518813, 0.11119051722668724,
                                 0.15685332293894363, 0.18134189168918097,
                                 0.18134189168918097, 0.15685332293894363,
                                 0.11119051722668724, 0.05061426814518813};
    Mat y(n, n);
    Mat bs(n, n);
    for (int g = 0; g < 8; ++g) {
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) bs(r, c) = b(r, c) * gx[g];
        Mat e;
        matrix_exponential(bs, &e, nullptr);
        const Mat qe = q * e;
        // y += w * e^T q e
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) {
                double acc = 0.0;
                for (int k = 0; k < n; ++k) acc += e(k, r) * qe(k, c);
                y(r, c) += gw[g] * acc;
            }
    }
    // Y(2B) = (Y(B) + E^T Y(B) E) / 2, E(2B) = E^2
    Mat e;
    matrix_exponential(b, &e, nullptr);
    for (int d = 0; d < doublings; ++d) {
        const Mat ye = y * e;
        Mat eye(n, n);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) {
                double acc = 0.0;
                for (int k = 0; k < n; ++k) acc += e(k, r) * ye(k, c);
                eye(r, c) = acc;
            }
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) y(r, c) = 0.5 * (y(r, c) + eye(r, c));
        e = e * e;
    }
    return y;
}

} // namespace zkflat
