#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>
#include <sstream>

#include "amcsim/matrix.hpp"
#include "test_support.hpp"

using namespace amcsim;
using testsup::charpoly_roots;
using testsup::det_cofactor;
using testsup::random_matrix;
using testsup::random_spd_dd;
using testsup::sort_complex;

namespace {
Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    Matrix m(rows.size(), rows.begin()->size());
    std::size_t i = 0;
    for (const auto& r : rows) {
        std::size_t j = 0;
        for (double v : r) m(i, j++) = v;
        ++i;
    }
    return m;
}

std::vector<Complex> sorted(const Spectrum& s) {
    std::vector<Complex> v = s.values;
    sort_complex(v);
    return v;
}
}  // namespace

TEST_CASE("matrix basics and shape errors") {
    Matrix a(2, 3);
    CHECK(a.rows() == 2);
    CHECK(a.cols() == 3);
    CHECK(!a.is_square());
    a(1, 2) = 5.0;
    CHECK(a(1, 2) == 5.0);
    CHECK(a.max_abs() == 5.0);

    Matrix b(3, 2);
    CHECK_THROWS_AS(a += b, DimensionError);
    CHECK_NOTHROW(a * b);
    CHECK_THROWS_AS(b * b, DimensionError);
    CHECK_THROWS_AS(a.trace(), DimensionError);

    Vec x{1.0, 2.0};
    CHECK_THROWS_AS(a * x, DimensionError);

    Matrix t = a.transpose();
    CHECK(t.rows() == 3);
    CHECK(t(2, 1) == 5.0);
}

TEST_CASE("canonical split: examples") {
    // [[1,-2],[-3,4]] -> plus [[1,0],[0,4]], minus [[0,2],[3,0]]
    auto sp = split_canonical(from_rows({{1, -2}, {-3, 4}}));
    CHECK(sp.plus == from_rows({{1, 0}, {0, 4}}));
    CHECK(sp.minus == from_rows({{0, 2}, {3, 0}}));

    auto nn = split_canonical(from_rows({{1, 2}, {3, 4}}));
    CHECK(nn.plus == from_rows({{1, 2}, {3, 4}}));
    CHECK(nn.minus == from_rows({{0, 0}, {0, 0}}));

    auto np = split_canonical(from_rows({{-1.5}}));
    CHECK(np.plus(0, 0) == 0.0);
    CHECK(np.minus(0, 0) == 1.5);
}

TEST_CASE("canonical split: reconstruction, nonnegativity, disjoint support") {
    std::mt19937_64 g(42);
    for (int trial = 0; trial < 100; ++trial) {
        std::uniform_int_distribution<std::size_t> dim(1, 8);
        const std::size_t n = dim(g);
        const std::size_t m = dim(g);
        Matrix a = random_matrix(g, n, m, -10.0, 10.0);
        auto sp = split_canonical(a);
        CHECK(sp.plus.is_nonnegative());
        CHECK(sp.minus.is_nonnegative());
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < m; ++j) {
                // exact, not approximate: the split is pure selection
                CHECK(sp.plus(i, j) - sp.minus(i, j) == a(i, j));
                CHECK((sp.plus(i, j) == 0.0 || sp.minus(i, j) == 0.0));
            }
    }
}

TEST_CASE("row conductance diagonal") {
    Matrix u = row_conductance_diag(from_rows({{2, 1}, {1, 3}}));
    CHECK(u(0, 0) == doctest::Approx(4.0));
    CHECK(u(1, 1) == doctest::Approx(5.0));
    CHECK(u(0, 1) == 0.0);
    CHECK(u(1, 0) == 0.0);

    Matrix ui = row_conductance_diag(from_rows({{1, 0}, {0, 1}}));
    CHECK(ui(0, 0) == doctest::Approx(2.0));
    CHECK(ui(1, 1) == doctest::Approx(2.0));

    Matrix uz = row_conductance_diag(from_rows({{0, 0}, {0, 0}}));
    CHECK(uz(0, 0) == doctest::Approx(1.0));
    CHECK(uz(1, 1) == doctest::Approx(1.0));

    CHECK_THROWS_AS(row_conductance_diag(Matrix(2, 3)), DimensionError);

    // entries are always >= 1 for nonnegative input
    std::mt19937_64 g(7);
    for (int trial = 0; trial < 20; ++trial) {
        Matrix a = random_matrix(g, 4, 4, 0.0, 5.0);
        Matrix u4 = row_conductance_diag(a);
        for (std::size_t i = 0; i < 4; ++i) CHECK(u4(i, i) >= 1.0);
    }
}

TEST_CASE("positive definiteness probe") {
    CHECK(is_positive_definite(from_rows({{2, 1}, {1, 2}})));
    CHECK(!is_positive_definite(from_rows({{1, 2}, {2, 1}})));
    CHECK(!is_positive_definite(from_rows({{0, 0}, {0, 0}})));
    CHECK(is_positive_definite(from_rows({{1e-8}})));
    CHECK(!is_positive_definite(from_rows({{-1.0}})));
    // non-symmetric input: symmetric part decides
    CHECK(is_positive_definite(from_rows({{2, -1}, {1, 2}})));
}

TEST_CASE("eigenvalues: closed-form examples") {
    auto d = sorted(eigenvalues(from_rows({{3, 0}, {0, 1}})));
    CHECK(d[0].real() == doctest::Approx(1.0));
    CHECK(d[1].real() == doctest::Approx(3.0));
    CHECK(std::abs(d[0].imag()) < 1e-12);
    CHECK(std::abs(d[1].imag()) < 1e-12);

    // rotation generator: pure imaginary pair, exact conjugates
    auto r = eigenvalues(from_rows({{0, -1}, {1, 0}}));
    REQUIRE(r.values.size() == 2);
    std::vector<Complex> rv = r.values;
    sort_complex(rv);
    CHECK(rv[0].real() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(rv[0].imag() == doctest::Approx(-1.0));
    CHECK(rv[1].imag() == doctest::Approx(1.0));
    CHECK(rv[0].imag() == -rv[1].imag());  // exact pairing
    CHECK(rv[0].real() == rv[1].real());

    auto s = sorted(eigenvalues(from_rows({{2, 1}, {1, 2}})));
    CHECK(s[0].real() == doctest::Approx(1.0));
    CHECK(s[1].real() == doctest::Approx(3.0));

    auto z = eigenvalues(Matrix(3, 3));
    CHECK(z.values.size() == 3);
    CHECK(z.source_dim == 3);
    for (const auto& v : z.values) CHECK(std::abs(v) == 0.0);
}

TEST_CASE("eigenvalues vs closed-form characteristic roots") {
    std::mt19937_64 g(2026);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = (trial % 2 == 0) ? 2 : 3;
        Matrix a = random_matrix(g, n, n, -5.0, 5.0);
        auto got = eigenvalues(a);
        auto want = charpoly_roots(a);
        const double scale = std::max(1.0, a.max_abs());
        CHECK(testsup::pairing_error(got.values, want) < 1e-9 * scale);
    }
}

TEST_CASE("eigenvalue sum matches trace, product matches determinant") {
    std::mt19937_64 g(99);
    for (int trial = 0; trial < 60; ++trial) {
        std::uniform_int_distribution<std::size_t> dim(2, 6);
        const std::size_t n = dim(g);
        Matrix a = random_matrix(g, n, n, -3.0, 3.0);
        auto ev = eigenvalues(a);
        Complex sum(0, 0), prod(1, 0);
        for (const auto& v : ev.values) {
            sum += v;
            prod *= v;
        }
        CHECK(std::abs(sum.real() - a.trace()) < 1e-8 * std::max(1.0, a.max_abs()) * n);
        CHECK(std::abs(sum.imag()) < 1e-8 * std::max(1.0, a.max_abs()) * n);
        const double det = det_cofactor(a);
        const double mag = std::max(1.0, std::abs(det));
        CHECK(std::abs(prod - Complex(det, 0)) < 1e-6 * mag);
    }
}

TEST_CASE("normalized system matrix of a PD operand has positive-real spectrum") {
    std::mt19937_64 g(11);
    int done = 0;
    while (done < 200) {
        std::uniform_int_distribution<std::size_t> dim(2, 12);
        const std::size_t n = dim(g);
        Matrix a = random_spd_dd(g, n);
        REQUIRE(is_positive_definite(a));
        Matrix u_inv_a = apply_inverse_row_diag(a, a);
        auto ev = eigenvalues(u_inv_a);
        for (const auto& v : ev.values) {
            CHECK(v.real() > 0.0);
            CHECK(std::abs(v.imag()) <= 1e-9 * std::max(1.0, std::abs(v.real())));
        }
        ++done;
    }
}

TEST_CASE("minimum real eigenvalue") {
    CHECK(min_real_eigenvalue(from_rows({{2, 1}, {1, 2}}))
          == doctest::Approx(1.0).epsilon(1e-9));
    Matrix d3 = from_rows({{0.03, 0, 0}, {0, 0.5, 0}, {0, 0, 1}});
    CHECK(min_real_eigenvalue(d3) == doctest::Approx(0.03).epsilon(1e-9));
    CHECK(min_real_eigenvalue(Matrix(2, 2)) == doctest::Approx(0.0));
}

TEST_CASE("eigensolver dimension cap") {
    Matrix big(4, 4);
    for (std::size_t i = 0; i < 4; ++i) big(i, i) = 1.0;
    CHECK_THROWS_AS(eigenvalues(big, 3), DimensionError);
    CHECK_NOTHROW(eigenvalues(big, 4));
}

TEST_CASE("spectrum length always equals dimension") {
    std::mt19937_64 g(5);
    for (int trial = 0; trial < 30; ++trial) {
        std::uniform_int_distribution<std::size_t> dim(1, 10);
        const std::size_t n = dim(g);
        Matrix a = random_matrix(g, n, n, -1.0, 1.0);
        auto ev = eigenvalues(a);
        CHECK(ev.values.size() == n);
        CHECK(ev.source_dim == n);
    }
}

TEST_CASE("matrix text round trip and parse errors") {
    Matrix a = from_rows({{1.5, -2.0}, {0.0, 3.25}});
    std::string text = format_matrix_text(a);
    Matrix b = parse_matrix_text(text);
    CHECK(a == b);

    CHECK_THROWS(parse_matrix_text("1 2\n3\n"));       // ragged
    CHECK_THROWS(parse_matrix_text("1 2\n3 apple\n")); // non-numeric
    CHECK_THROWS(parse_matrix_text(""));
    CHECK_THROWS(parse_matrix_text("   \n  \n"));

    // blank lines are tolerated
    Matrix c = parse_matrix_text("1 2\n\n3 4\n");
    CHECK(c == from_rows({{1, 2}, {3, 4}}));
}

TEST_CASE("vector helpers") {
    Vec a{3.0, 4.0};
    CHECK(norm2(a) == doctest::Approx(5.0));
    CHECK(max_abs(a) == doctest::Approx(4.0));
    CHECK(dot(a, a) == doctest::Approx(25.0));
    Vec b{1.0, 1.0};
    Vec d = a - b;
    CHECK(d[0] == doctest::Approx(2.0));
    Vec s = 2.0 * a;
    CHECK(s[1] == doctest::Approx(8.0));
    CHECK_THROWS_AS(dot(a, Vec{1.0}), DimensionError);
}
