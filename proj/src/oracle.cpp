#include "amcsim/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace amcsim::oracle {

Vec mvm(const Matrix& a, const Vec& x) {
    return a * x;
}

Vec solve_linear(const Matrix& a, const Vec& y) {
    if (!a.is_square()) throw DimensionError("solve: matrix must be square");
    if (a.rows() != y.size()) throw DimensionError("solve: right-hand side length mismatch");
    const std::size_t n = a.rows();
    const double pivot_floor = 1e-12 * a.max_abs();

    Matrix lu = a;
    Vec b = y;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        double best = std::fabs(lu(k, k));
        for (std::size_t i = k + 1; i < n; ++i) {
            const double v = std::fabs(lu(i, k));
            if (v > best) {
                best = v;
                piv = i;
            }
        }
        if (best <= pivot_floor) {
            throw SingularMatrixError("solve: singular matrix (pivot " + std::to_string(best) +
                                      " at column " + std::to_string(k) + ")");
        }
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(lu(k, j), lu(piv, j));
            std::swap(b[k], b[piv]);
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = lu(i, k) / lu(k, k);
            if (f == 0.0) continue;
            for (std::size_t j = k; j < n; ++j) lu(i, j) -= f * lu(k, j);
            b[i] -= f * b[k];
        }
    }
    Vec x(n, 0.0);
    for (std::size_t ii = n; ii-- > 0;) {
        double s = b[ii];
        for (std::size_t j = ii + 1; j < n; ++j) s -= lu(ii, j) * x[j];
        x[ii] = s / lu(ii, ii);
    }
    return x;
}

OracleResult solve(const Matrix& a, const Vec& y) {
    OracleResult r;
    r.method = Method::direct_solve;
    r.value = solve_linear(a, y);
    r.residual = norm2(a * r.value - y);
    return r;
}

OracleResult pinv_left_solve(const Matrix& a, const Vec& y) {
    if (a.rows() < a.cols()) {
        throw DimensionError("pinv_left_solve: matrix must have rows >= cols");
    }
    if (a.rows() != y.size()) throw DimensionError("pinv_left_solve: rhs length mismatch");
    const Matrix at = a.transpose();
    const Matrix gram = at * a;
    OracleResult r;
    r.method = Method::normal_equations;
    try {
        r.value = solve_linear(gram, at * y);
    } catch (const SingularMatrixError&) {
        throw SingularMatrixError("pinv_left_solve: A^T A is rank deficient");
    }
    r.residual = norm2(at * (y - a * r.value));
    return r;
}

OracleResult pinv_right_solve(const Matrix& a, const Vec& y) {
    if (a.rows() > a.cols()) {
        throw DimensionError("pinv_right_solve: matrix must have rows <= cols");
    }
    if (a.rows() != y.size()) throw DimensionError("pinv_right_solve: rhs length mismatch");
    const Matrix at = a.transpose();
    const Matrix gram = a * at;
    OracleResult r;
    r.method = Method::min_norm;
    try {
        r.value = at * solve_linear(gram, y);
    } catch (const SingularMatrixError&) {
        throw SingularMatrixError("pinv_right_solve: A A^T is rank deficient");
    }
    r.residual = norm2(a * r.value - y);
    return r;
}

namespace {

OracleResult power_iterate_matrix(const Matrix& it_matrix, const Matrix& rayleigh_matrix,
                                  double tol, std::size_t max_iters, std::uint64_t seed) {
    const std::size_t n = it_matrix.rows();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    Vec v(n);
    for (double& x : v) x = uni(rng);
    double nv = norm2(v);
    if (nv == 0.0) v[0] = nv = 1.0;
    for (double& x : v) x /= nv;

    for (std::size_t iter = 1; iter <= max_iters; ++iter) {
        Vec w = it_matrix * v;
        const double nw = norm2(w);
        if (nw == 0.0) {
            throw ConvergenceError("power_iteration: iterate vanished", iter);
        }
        // Align sign with the previous iterate so negative dominant
        // eigenvalues do not make the direction alternate.
        const double align = dot(w, v) >= 0.0 ? 1.0 : -1.0;
        for (std::size_t i = 0; i < n; ++i) w[i] *= align / nw;
        v = w;

        const Vec av = rayleigh_matrix * v;
        const double lambda = dot(v, av);
        if (norm2(av - lambda * v) <= tol) {
            OracleResult r;
            r.method = Method::power_iteration;
            r.value = v;
            r.eigenvalue = lambda;
            r.residual = norm2(av - lambda * v);
            return r;
        }
    }
    throw ConvergenceError("power_iteration: eigengap too small", max_iters);
}

} // namespace

OracleResult power_iteration(const Matrix& a, double tol, std::size_t max_iters,
                             std::uint64_t seed) {
    if (!a.is_square()) throw DimensionError("power_iteration: matrix must be square");
    return power_iterate_matrix(a, a, tol, max_iters, seed);
}

OracleResult most_negative_eigenpair(const Matrix& a, double tol, std::size_t max_iters,
                                     std::uint64_t seed) {
    if (!a.is_square()) throw DimensionError("most_negative_eigenpair: matrix must be square");
    // Shift so the smallest eigenvalue of a becomes dominant: for sigma above
    // the largest eigenvalue, sigma*I - a has dominant eigenpair
    // (sigma - lambda_min, v_min). Gershgorin bound keeps sigma cheap.
    double sigma = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double radius = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) {
            if (i != j) radius += std::fabs(a(i, j));
        }
        sigma = std::max(sigma, a(i, i) + radius);
    }
    sigma += 1.0;
    Matrix flipped = a;
    flipped *= -1.0;
    for (std::size_t i = 0; i < a.rows(); ++i) flipped(i, i) += sigma;
    return power_iterate_matrix(flipped, a, tol, max_iters, seed);
}

} // namespace amcsim::oracle
