// Reference linear-algebra routes used as ground truth when checking circuit
// steady states: direct elimination, normal equations, minimum-norm solve and
// power iteration. Kept independent of the circuit builders and integrator.
#pragma once

#include "amcsim/matrix.hpp"

#include <cstdint>

namespace amcsim::oracle {

class SingularMatrixError : public std::runtime_error {
public:
    explicit SingularMatrixError(const std::string& msg) : std::runtime_error(msg) {}
};

enum class Method { direct_solve, normal_equations, min_norm, power_iteration, dense_mvm };

struct OracleResult {
    Vec value;             // solution vector (eigenvector for power_iteration)
    double eigenvalue = 0; // populated by power_iteration only
    double residual = 0;   // method-specific residual norm, recomputed on construction
    Method method = Method::direct_solve;
};

Vec mvm(const Matrix& a, const Vec& x);

/// Gaussian elimination with partial pivoting; rejects pivots below 1e-12*max|a|.
Vec solve_linear(const Matrix& a, const Vec& y);

/// x = A^-1 y with residual ||Ax - y||_2.
OracleResult solve(const Matrix& a, const Vec& y);

/// Least-squares solution x = (A^T A)^-1 A^T y for tall full-column-rank A;
/// residual is the optimality condition ||A^T (y - A x)||_2.
OracleResult pinv_left_solve(const Matrix& a, const Vec& y);

/// Minimum-norm solution x = A^T (A A^T)^-1 y for broad full-row-rank A;
/// residual is ||A x - y||_2.
OracleResult pinv_right_solve(const Matrix& a, const Vec& y);

/// Dominant eigenpair by power iteration with sign-aligned normalization.
/// The eigenvalue is the Rayleigh quotient, so a dominant negative eigenvalue
/// keeps its sign. residual = ||A v - lambda v||_2.
OracleResult power_iteration(const Matrix& a, double tol = 1e-10,
                             std::size_t max_iters = 100000, std::uint64_t seed = 1);

/// Eigenpair of the algebraically smallest eigenvalue, found by power
/// iteration on the spectrum-flipped matrix sigma*I - A.
OracleResult most_negative_eigenpair(const Matrix& a, double tol = 1e-10,
                                     std::size_t max_iters = 100000, std::uint64_t seed = 1);

} // namespace amcsim::oracle
