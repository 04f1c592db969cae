#include "amcsim/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace amcsim {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {
    if (rows == 0 || cols == 0) {
        throw DimensionError("matrix dimensions must be at least 1x1");
    }
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> init) {
    rows_ = init.size();
    if (rows_ == 0) throw DimensionError("matrix dimensions must be at least 1x1");
    cols_ = init.begin()->size();
    if (cols_ == 0) throw DimensionError("matrix dimensions must be at least 1x1");
    data_.reserve(rows_ * cols_);
    for (const auto& row : init) {
        if (row.size() != cols_) throw DimensionError("ragged initializer rows");
        data_.insert(data_.end(), row.begin(), row.end());
    }
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::diagonal(const Vec& d) {
    Matrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
}

Matrix Matrix::transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

double Matrix::trace() const {
    if (!is_square()) throw DimensionError("trace requires a square matrix");
    double t = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
    return t;
}

double Matrix::row_sum(std::size_t i) const {
    double s = 0.0;
    for (std::size_t j = 0; j < cols_; ++j) s += (*this)(i, j);
    return s;
}

double Matrix::max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::fabs(v));
    return m;
}

double Matrix::frobenius_norm() const {
    double s = 0.0;
    for (double v : data_) s += v * v;
    return std::sqrt(s);
}

bool Matrix::is_nonnegative() const {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return v >= 0.0; });
}

Matrix& Matrix::operator+=(const Matrix& rhs) {
    if (rows_ != rhs.rows_ || cols_ != rhs.cols_) throw DimensionError("matrix add: shape mismatch");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += rhs.data_[k];
    return *this;
}

Matrix& Matrix::operator-=(const Matrix& rhs) {
    if (rows_ != rhs.rows_ || cols_ != rhs.cols_) throw DimensionError("matrix sub: shape mismatch");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= rhs.data_[k];
    return *this;
}

Matrix& Matrix::operator*=(double s) {
    for (double& v : data_) v *= s;
    return *this;
}

Matrix operator*(const Matrix& lhs, const Matrix& rhs) {
    if (lhs.cols_ != rhs.rows_) throw DimensionError("matrix multiply: inner dimension mismatch");
    Matrix out(lhs.rows_, rhs.cols_);
    for (std::size_t i = 0; i < lhs.rows_; ++i) {
        for (std::size_t k = 0; k < lhs.cols_; ++k) {
            const double a = lhs(i, k);
            if (a == 0.0) continue;
            for (std::size_t j = 0; j < rhs.cols_; ++j) out(i, j) += a * rhs(k, j);
        }
    }
    return out;
}

Vec operator*(const Matrix& lhs, const Vec& x) {
    if (lhs.cols_ != x.size()) throw DimensionError("matrix-vector multiply: dimension mismatch");
    Vec y(lhs.rows_, 0.0);
    for (std::size_t i = 0; i < lhs.rows_; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < lhs.cols_; ++j) s += lhs(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

SplitPair split_canonical(const Matrix& a) {
    SplitPair sp{Matrix(a.rows(), a.cols()), Matrix(a.rows(), a.cols())};
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            const double v = a(i, j);
            if (v >= 0.0) {
                sp.plus(i, j) = v;
            } else {
                sp.minus(i, j) = -v;
            }
        }
    }
    return sp;
}

Matrix row_conductance_diag(const Matrix& a) {
    if (!a.is_square()) throw DimensionError("row_conductance_diag requires a square matrix");
    Matrix d(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) d(i, i) = 1.0 + a.row_sum(i);
    return d;
}

Matrix apply_inverse_row_diag(const Matrix& a, const Matrix& m) {
    if (!a.is_square() || a.rows() != m.rows()) {
        throw DimensionError("apply_inverse_row_diag: shape mismatch");
    }
    Matrix out = m;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const double d = 1.0 + a.row_sum(i);
        for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) /= d;
    }
    return out;
}

bool is_positive_definite(const Matrix& a) {
    if (!a.is_square()) throw DimensionError("is_positive_definite requires a square matrix");
    const std::size_t n = a.rows();
    // Cholesky of the symmetric part; PD iff every pivot stays strictly positive.
    Matrix s(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) s(i, j) = 0.5 * (a(i, j) + a(j, i));
    Matrix l(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        double pivot = s(k, k);
        for (std::size_t m = 0; m < k; ++m) pivot -= l(k, m) * l(k, m);
        if (!(pivot > 0.0)) return false;
        l(k, k) = std::sqrt(pivot);
        for (std::size_t i = k + 1; i < n; ++i) {
            double v = s(i, k);
            for (std::size_t m = 0; m < k; ++m) v -= l(i, m) * l(k, m);
            l(i, k) = v / l(k, k);
        }
    }
    return true;
}

double min_real_eigenvalue(const Matrix& a) {
    const Spectrum sp = eigenvalues(a);
    double m = sp.values.front().real();
    for (const Complex& v : sp.values) m = std::min(m, v.real());
    return m;
}

double dot(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw DimensionError("dot: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(const Vec& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

double max_abs(const Vec& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::fabs(x));
    return m;
}

Vec operator-(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw DimensionError("vector sub: size mismatch");
    Vec out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
    return out;
}

Vec operator+(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw DimensionError("vector add: size mismatch");
    Vec out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
    return out;
}

Vec operator*(double s, Vec v) {
    for (double& x : v) x *= s;
    return v;
}

Matrix parse_matrix_text(const std::string& text) {
    std::vector<Vec> rows;
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
        std::istringstream fields(line);
        Vec row;
        double v;
        while (fields >> v) row.push_back(v);
        if (!fields.eof()) {
            throw std::invalid_argument("matrix text: non-numeric token on row " +
                                        std::to_string(rows.size() + 1));
        }
        if (!row.empty()) rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::invalid_argument("matrix text: no rows");
    const std::size_t cols = rows.front().size();
    Matrix m(rows.size(), cols);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != cols) {
            throw std::invalid_argument("matrix text: row " + std::to_string(i + 1) +
                                        " has " + std::to_string(rows[i].size()) +
                                        " entries, expected " + std::to_string(cols));
        }
        for (std::size_t j = 0; j < cols; ++j) m(i, j) = rows[i][j];
    }
    return m;
}

Matrix load_matrix_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open matrix file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_matrix_text(buf.str());
}

std::string format_matrix_text(const Matrix& a) {
    std::ostringstream out;
    out.precision(17);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            if (j) out << ' ';
            out << a(i, j);
        }
        out << '\n';
    }
    return out.str();
}

} // namespace amcsim
