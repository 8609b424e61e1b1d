#include "coastcast/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "coastcast/error.hpp"

namespace coastcast {

std::vector<double> solve_least_squares(const Matrix& a, std::span<const double> y,
                                        double rank_tol) {
    const std::size_t n = a.rows();
    const std::size_t d = a.cols();
    if (y.size() != n) raise(errc::bad_argument, "solve_least_squares: size mismatch");
    if (n < d) raise(errc::rank_deficient, "fewer rows than columns");

    Matrix r = a;
    std::vector<double> rhs(y.begin(), y.end());

    // Householder triangularization, reflecting rhs along the way.
    for (std::size_t k = 0; k < d; ++k) {
        double norm = 0.0;
        for (std::size_t i = k; i < n; ++i) norm += r(i, k) * r(i, k);
        norm = std::sqrt(norm);
        if (norm == 0.0) continue; // column already zero below diagonal
        if (r(k, k) > 0) norm = -norm;
        std::vector<double> v(n - k);
        v[0] = r(k, k) - norm;
        for (std::size_t i = k + 1; i < n; ++i) v[i - k] = r(i, k);
        double vtv = 0.0;
        for (double x : v) vtv += x * x;
        if (vtv == 0.0) continue;
        r(k, k) = norm;
        for (std::size_t i = k + 1; i < n; ++i) r(i, k) = 0.0;
        for (std::size_t j = k + 1; j < d; ++j) {
            double dot = 0.0;
            for (std::size_t i = k; i < n; ++i) dot += v[i - k] * r(i, j);
            const double f = 2.0 * dot / vtv;
            for (std::size_t i = k; i < n; ++i) r(i, j) -= f * v[i - k];
        }
        double dot = 0.0;
        for (std::size_t i = k; i < n; ++i) dot += v[i - k] * rhs[i];
        const double f = 2.0 * dot / vtv;
        for (std::size_t i = k; i < n; ++i) rhs[i] -= f * v[i - k];
    }

    double max_diag = 0.0;
    for (std::size_t k = 0; k < d; ++k) max_diag = std::max(max_diag, std::fabs(r(k, k)));
    if (max_diag == 0.0) raise(errc::rank_deficient, "zero matrix");

    std::vector<double> x(d, 0.0);
    for (std::size_t kk = d; kk-- > 0;) {
        if (std::fabs(r(kk, kk)) <= rank_tol * max_diag) {
            raise(errc::rank_deficient,
                  "column " + std::to_string(kk) + " is linearly dependent");
        }
        double s = rhs[kk];
        for (std::size_t j = kk + 1; j < d; ++j) s -= r(kk, j) * x[j];
        x[kk] = s / r(kk, kk);
    }
    return x;
}

std::vector<double> solve_ridge(const Matrix& a, std::span<const double> y,
                                double lambda) {
    const std::size_t n = a.rows();
    const std::size_t d = a.cols();
    if (y.size() != n) raise(errc::bad_argument, "solve_ridge: size mismatch");

    Matrix g(d, d);
    std::vector<double> b(d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = a.row(i);
        for (std::size_t p = 0; p < d; ++p) {
            b[p] += row[p] * y[i];
            for (std::size_t q = p; q < d; ++q) g(p, q) += row[p] * row[q];
        }
    }
    for (std::size_t p = 0; p < d; ++p) {
        g(p, p) += lambda;
        for (std::size_t q = 0; q < p; ++q) g(p, q) = g(q, p);
    }

    // Cholesky G = L L^T
    Matrix l(d, d);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double s = g(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            if (i == j) {
                if (s <= 0.0) raise(errc::rank_deficient, "ridge system not SPD");
                l(i, i) = std::sqrt(s);
            } else {
                l(i, j) = s / l(j, j);
            }
        }
    }
    std::vector<double> z(d, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
        double s = b[i];
        for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * z[k];
        z[i] = s / l(i, i);
    }
    std::vector<double> x(d, 0.0);
    for (std::size_t ii = d; ii-- > 0;) {
        double s = z[ii];
        for (std::size_t k = ii + 1; k < d; ++k) s -= l(k, ii) * x[k];
        x[ii] = s / l(ii, ii);
    }
    return x;
}

namespace {

double off_diagonal_norm(const Matrix& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            if (i != j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
}

} // namespace

SymEigen jacobi_eigen_sym(Matrix a, double tol, int max_sweeps) {
    const std::size_t d = a.rows();
    if (d != a.cols()) raise(errc::bad_argument, "jacobi: matrix not square");

    Matrix v(d, d);
    for (std::size_t i = 0; i < d; ++i) v(i, i) = 1.0;

    SymEigen out;
    double off = off_diagonal_norm(a);
    int sweep = 0;
    while (off > tol && sweep < max_sweeps) {
        ++sweep;
        for (std::size_t p = 0; p + 1 < d; ++p) {
            for (std::size_t q = p + 1; q < d; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t i = 0; i < d; ++i) {
                    const double aip = a(i, p);
                    const double aiq = a(i, q);
                    a(i, p) = c * aip - s * aiq;
                    a(i, q) = s * aip + c * aiq;
                }
                for (std::size_t j = 0; j < d; ++j) {
                    const double apj = a(p, j);
                    const double aqj = a(q, j);
                    a(p, j) = c * apj - s * aqj;
                    a(q, j) = s * apj + c * aqj;
                }
                for (std::size_t i = 0; i < d; ++i) {
                    const double vip = v(i, p);
                    const double viq = v(i, q);
                    v(i, p) = c * vip - s * viq;
                    v(i, q) = s * vip + c * viq;
                }
            }
        }
        const double next = off_diagonal_norm(a);
        if (next >= off && next > tol) break; // numerically stuck
        off = next;
    }

    std::vector<std::size_t> order(d);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });

    out.values.resize(d);
    out.vectors = Matrix(d, d);
    for (std::size_t j = 0; j < d; ++j) {
        const std::size_t src = order[j];
        out.values[j] = a(src, src);
        std::size_t arg = 0;
        double best = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            if (std::fabs(v(i, src)) > best) {
                best = std::fabs(v(i, src));
                arg = i;
            }
        }
        const double sign = v(arg, src) < 0.0 ? -1.0 : 1.0;
        for (std::size_t i = 0; i < d; ++i) out.vectors(i, j) = sign * v(i, src);
    }
    out.off_norm = off;
    out.sweeps = sweep;
    return out;
}

} // namespace coastcast
