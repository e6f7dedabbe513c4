#pragma once

#include <cmath>
#include <vector>

#include "zkflat/error.hpp"

namespace zkflat {

/// Dense row-major matrix, just large enough for collocation work.
class Mat {
public:
    Mat() = default;
    Mat(int rows, int cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols, fill) {}

    static Mat identity(int n) {
        Mat m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    double& operator()(int i, int j) { return data_[static_cast<size_t>(i) * cols_ + j]; }
    double operator()(int i, int j) const { return data_[static_cast<size_t>(i) * cols_ + j]; }

    const double* row(int i) const { return data_.data() + static_cast<size_t>(i) * cols_; }
    double* row(int i) { return data_.data() + static_cast<size_t>(i) * cols_; }

    Mat operator*(const Mat& rhs) const {
        require(cols_ == rhs.rows_, "mat mul: shape mismatch");
        Mat out(rows_, rhs.cols_);
        for (int i = 0; i < rows_; ++i) {
            for (int k = 0; k < cols_; ++k) {
                const double aik = (*this)(i, k);
                if (aik == 0.0) continue;
                const double* rk = rhs.row(k);
                double* oi = out.row(i);
                for (int j = 0; j < rhs.cols_; ++j) oi[j] += aik * rk[j];
            }
        }
        return out;
    }

    std::vector<double> apply(const std::vector<double>& v) const {
        require(static_cast<int>(v.size()) == cols_, "mat apply: size mismatch");
        std::vector<double> out(rows_, 0.0);
        for (int i = 0; i < rows_; ++i) {
            const double* ri = row(i);
            double acc = 0.0;
            for (int j = 0; j < cols_; ++j) acc += ri[j] * v[j];
            out[i] = acc;
        }
        return out;
    }

private:
    int rows_ = 0, cols_ = 0;
    std::vector<double> data_;
};

/// LU factorization with partial pivoting; factor once, solve many.
class LuSolver {
public:
    explicit LuSolver(Mat a) : lu_(std::move(a)), piv_(lu_.rows()) {
        const int n = lu_.rows();
        require(n == lu_.cols(), "lu: matrix must be square");
        for (int k = 0; k < n; ++k) {
            int p = k;
            double best = std::fabs(lu_(k, k));
            for (int i = k + 1; i < n; ++i) {
                const double v = std::fabs(lu_(i, k));
                if (v > best) { best = v; p = i; }
            }
            require(best > 0.0, "lu: singular matrix");
            piv_[k] = p;
            if (p != k)
                for (int j = 0; j < n; ++j) std::swap(lu_(k, j), lu_(p, j));
            const double inv = 1.0 / lu_(k, k);
            for (int i = k + 1; i < n; ++i) {
                const double m = lu_(i, k) * inv;
                lu_(i, k) = m;
                if (m == 0.0) continue;
                for (int j = k + 1; j < n; ++j) lu_(i, j) -= m * lu_(k, j);
            }
        }
    }

    std::vector<double> solve(std::vector<double> b) const {
        const int n = lu_.rows();
        require(static_cast<int>(b.size()) == n, "lu solve: size mismatch");
        for (int k = 0; k < n; ++k) {
            if (piv_[k] != k) std::swap(b[k], b[piv_[k]]);
            for (int i = k + 1; i < n; ++i) b[i] -= lu_(i, k) * b[k];
        }
        for (int i = n - 1; i >= 0; --i) {
            for (int j = i + 1; j < n; ++j) b[i] -= lu_(i, j) * b[j];
            b[i] /= lu_(i, i);
        }
        return b;
    }

private:
    Mat lu_;
    std::vector<int> piv_;
};

/// exp(a) and phi1(a) = (exp(a) - I) a^{-1} by scaled Taylor series with
/// argument halving (exp(2z) = exp(z)^2, phi1(2z) = (exp(z) + I) phi1(z) / 2).
void matrix_exponential(const Mat& a, Mat* exp_out, Mat* phi1_out);

/// Y = int_0^1 e^{s a^T} q e^{s a} ds, stable for stiff dissipative a.
Mat exp_weighted_gram(const Mat& a, const Mat& q);

/// Cholesky factorization a = L L^T of a symmetric positive definite matrix.
class Cholesky {
public:
    explicit Cholesky(const Mat& a) : l_(a.rows(), a.cols()) {
        const int n = a.rows();
        require(n == a.cols(), "cholesky: square matrix required");
        for (int j = 0; j < n; ++j) {
            double d = a(j, j);
            for (int k = 0; k < j; ++k) d -= l_(j, k) * l_(j, k);
            require(d > 0.0, "cholesky: matrix not positive definite");
            l_(j, j) = std::sqrt(d);
            for (int i = j + 1; i < n; ++i) {
                double s = a(i, j);
                for (int k = 0; k < j; ++k) s -= l_(i, k) * l_(j, k);
                l_(i, j) = s / l_(j, j);
            }
        }
    }

    const Mat& lower() const { return l_; }

    std::vector<double> solve_lower(std::vector<double> b) const { // L x = b
        const int n = l_.rows();
        for (int i = 0; i < n; ++i) {
            for (int k = 0; k < i; ++k) b[i] -= l_(i, k) * b[k];
            b[i] /= l_(i, i);
        }
        return b;
    }

    std::vector<double> solve_upper(std::vector<double> b) const { // L^T x = b
        const int n = l_.rows();
        for (int i = n - 1; i >= 0; --i) {
            for (int k = i + 1; k < n; ++k) b[i] -= l_(k, i) * b[k];
            b[i] /= l_(i, i);
        }
        return b;
    }

private:
    Mat l_;
};

} // namespace zkflat
