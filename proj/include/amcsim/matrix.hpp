// Dense real matrix foundation: arithmetic, canonical nonnegative splitting,
// the row-conductance normalizer of the feedback circuits, definiteness checks
// and a dense eigenvalue solver.
#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace amcsim {

using Vec = std::vector<double>;
using Complex = std::complex<double>;

class DimensionError : public std::invalid_argument {
public:
    explicit DimensionError(const std::string& msg) : std::invalid_argument(msg) {}
};

class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& msg, std::size_t iterations)
        : std::runtime_error(msg + " (after " + std::to_string(iterations) + " iterations)"),
          iterations_(iterations) {}
    std::size_t iterations() const { return iterations_; }

private:
    std::size_t iterations_;
};

/// Dense row-major matrix of dimensionless real entries.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    Matrix(std::initializer_list<std::initializer_list<double>> init);

    static Matrix identity(std::size_t n);
    static Matrix diagonal(const Vec& d);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return rows_ == 0 || cols_ == 0; }
    bool is_square() const { return rows_ == cols_ && rows_ > 0; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    const Vec& data() const { return data_; }
    Vec& data() { return data_; }

    Matrix transpose() const;
    double trace() const;
    double row_sum(std::size_t i) const;
    double max_abs() const;
    double frobenius_norm() const;
    bool is_nonnegative() const;

    Matrix& operator+=(const Matrix& rhs);
    Matrix& operator-=(const Matrix& rhs);
    Matrix& operator*=(double s);

    friend Matrix operator+(Matrix lhs, const Matrix& rhs) { return lhs += rhs; }
    friend Matrix operator-(Matrix lhs, const Matrix& rhs) { return lhs -= rhs; }
    friend Matrix operator*(Matrix lhs, double s) { return lhs *= s; }
    friend Matrix operator*(double s, Matrix rhs) { return rhs *= s; }
    friend Matrix operator*(const Matrix& lhs, const Matrix& rhs);
    friend Vec operator*(const Matrix& lhs, const Vec& x);
    friend bool operator==(const Matrix& lhs, const Matrix& rhs) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    Vec data_;
};

/// Canonical decomposition A = plus - minus with both parts elementwise >= 0
/// and elementwise min(plus, minus) = 0.
struct SplitPair {
    Matrix plus;
    Matrix minus;
};

/// All eigenvalues of one square matrix.
struct Spectrum {
    std::vector<Complex> values;
    std::size_t source_dim = 0;
};

SplitPair split_canonical(const Matrix& a);

/// Diagonal of normalized total conductance per row node: D_ii = 1 + sum_j a_ij.
/// The unit term is the load conductance expressed in units of g0. Defined on
/// the nonnegative mapped form; for split circuits the caller passes plus+minus.
Matrix row_conductance_diag(const Matrix& a);

/// Left-multiplies by the inverse of row_conductance_diag(a): returns D^-1 * m.
Matrix apply_inverse_row_diag(const Matrix& a, const Matrix& m);

/// True iff the symmetric part (a + a^T)/2 admits a Cholesky factorization
/// with strictly positive pivots.
bool is_positive_definite(const Matrix& a);

/// All eigenvalues via Householder-Hessenberg reduction and Francis
/// double-shift QR. Deterministic; complex eigenvalues of a real matrix come
/// out in exact conjugate pairs. Throws ConvergenceError past the sweep cap.
Spectrum eigenvalues(const Matrix& a, std::size_t dim_cap = 256);

/// Smallest real part over the spectrum of a.
double min_real_eigenvalue(const Matrix& a);

// Vector helpers.
double dot(const Vec& a, const Vec& b);
double norm2(const Vec& v);
double max_abs(const Vec& v);
Vec operator-(const Vec& a, const Vec& b);
Vec operator+(const Vec& a, const Vec& b);
Vec operator*(double s, Vec v);

// Text format: one row per line, whitespace-separated decimal entries.
Matrix parse_matrix_text(const std::string& text);
Matrix load_matrix_file(const std::string& path);
std::string format_matrix_text(const Matrix& a);

} // namespace amcsim
