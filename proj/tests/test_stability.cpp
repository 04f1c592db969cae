#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "amcsim/circuits.hpp"
#include "amcsim/device.hpp"
#include "amcsim/dynamics.hpp"
#include "amcsim/matrix.hpp"
#include "amcsim/stability.hpp"
#include "test_support.hpp"

using namespace amcsim;
using testsup::random_spd_dd;
using testsup::random_tall;

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

DeviceConfig dev() {
    DeviceConfig cfg;
    cfg.g0 = 100e-6;
    cfg.g_max = 500e-6;
    return cfg;
}

Matrix window_scaled_spd(std::mt19937_64& g, std::size_t n) {
    Matrix a = random_spd_dd(g, n);
    a *= 4.0 / a.max_abs();
    return a;
}
}  // namespace

TEST_CASE("poles: identity inversion sits at -f_gbwp/2") {
    OAParams oa;
    oa.l0 = 1e6;
    auto sys = build_inversion(map_matrix(from_rows({{1, 0}, {0, 1}}), dev()),
                               Vec{1.0, 1.0}, oa);
    auto rep = poles(sys);
    REQUIRE(rep.poles.size() == 2);
    for (const auto& p : rep.poles) {
        CHECK(p.real() == doctest::Approx(-0.5 * oa.f_gbwp).epsilon(1e-2));
        CHECK(std::abs(p.imag()) < 1e-6 * oa.f_gbwp);
    }
    CHECK(rep.verdict == Verdict::stable);
    REQUIRE(rep.has_dominant);
    CHECK(rep.bound_time ==
          doctest::Approx(std::log(100.0) / (0.5 * oa.f_gbwp)).epsilon(1.5e-2));
    REQUIRE(rep.has_lambda_min);
    CHECK(rep.lambda_min == doctest::Approx(0.5).epsilon(1e-9));

    auto one = build_inversion(map_matrix(from_rows({{1}}), dev()), Vec{1.0}, oa);
    auto rep1 = poles(one);
    CHECK(rep1.poles[0].real() == doctest::Approx(-0.5 * oa.f_gbwp).epsilon(1e-2));
}

TEST_CASE("poles: split inversion of a 10x10 PD operand") {
    OAParams oa;
    std::mt19937_64 g(71);
    Matrix a = window_scaled_spd(g, 10);
    // flip a few symmetric pairs negative so the minus array is active
    for (std::size_t k = 0; k < 5; ++k) {
        a(k, k + 1) = -a(k, k + 1);
        a(k + 1, k) = a(k, k + 1);
    }
    REQUIRE(is_positive_definite(a));
    auto sys = build_inversion_split(map_split(split_canonical(a), dev()),
                                     Vec(10, 1.0), oa, oa);
    auto rep = poles(sys);
    CHECK(rep.poles.size() == 20);
    for (const auto& p : rep.poles) CHECK(p.real() < 0.0);
    bool any_imag = false;
    for (const auto& p : rep.poles) any_imag = any_imag || std::abs(p.imag()) > 0.0;
    CHECK(any_imag);
    CHECK(rep.verdict == Verdict::stable);
}

TEST_CASE("ideal inversion poles") {
    auto p = ideal_inversion_poles(from_rows({{1, 0}, {0, 1}}), 1e6);
    REQUIRE(p.size() == 2);
    for (const auto& v : p) {
        CHECK(v.real() == doctest::Approx(-0.5e6).epsilon(1e-9));
        CHECK(v.imag() == 0.0);
    }

    // closed-form 2x2 reference for U^-1 A, U = diag(4, 5)
    Matrix a = from_rows({{2, 1}, {1, 3}});
    const double tr = 2.0 / 4.0 + 3.0 / 5.0;
    const double det = (2.0 / 4.0) * (3.0 / 5.0) - (1.0 / 4.0) * (1.0 / 5.0);
    const double disc = std::sqrt(tr * tr - 4.0 * det);
    std::vector<Complex> want{Complex(-1e6 * (tr + disc) / 2.0, 0.0),
                              Complex(-1e6 * (tr - disc) / 2.0, 0.0)};
    auto got = ideal_inversion_poles(a, 1e6);
    CHECK(testsup::pairing_error(got, want) < 1e-6 * 1e6);

    CHECK_THROWS_AS(ideal_inversion_poles(Matrix(2, 3), 1e6), DimensionError);
    CHECK_THROWS_AS(ideal_inversion_poles(from_rows({{1, -1}, {0, 1}}), 1e6),
                    std::invalid_argument);
}

TEST_CASE("verdict classification") {
    const double tol = 1.0;
    CHECK(verdict({Complex(-5, 0), Complex(-2, 3)}, tol) == Verdict::stable);
    CHECK(verdict({Complex(0, 0), Complex(-2, 0)}, tol) == Verdict::marginal);
    CHECK(verdict({Complex(0.5, 2), Complex(-2, 0)}, tol) == Verdict::marginal);
    CHECK(verdict({Complex(2, 0), Complex(-5, 0)}, tol) == Verdict::unstable);
    CHECK(verdict({Complex(-0.5, 0)}, tol) == Verdict::marginal);
    CHECK(std::string(to_string(Verdict::stable)) == "stable");
    CHECK(std::string(to_string(Verdict::marginal)) == "marginal");
    CHECK(std::string(to_string(Verdict::unstable)) == "unstable");
}

TEST_CASE("response bound") {
    CHECK(response_bound(0.5, 1e6) == doctest::Approx(9.2103e-6).epsilon(1e-4));
    CHECK(response_bound(1.0, 1e6) ==
          doctest::Approx(response_bound(0.5, 1e6) / 2.0).epsilon(1e-12));
    // the published lambda_min pair: bound ratio matches the observed ordering
    CHECK(response_bound(0.007, 1e6) / response_bound(0.03, 1e6) ==
          doctest::Approx(0.03 / 0.007).epsilon(1e-12));
    CHECK_THROWS_AS(response_bound(0.0, 1e6), std::invalid_argument);
    CHECK_THROWS_AS(response_bound(-0.1, 1e6), std::invalid_argument);
    CHECK_THROWS_AS(response_bound(0.5, 0.0), std::invalid_argument);
}

TEST_CASE("finite-gain poles track the ideal law at high gain") {
    OAParams oa;
    oa.l0 = 1e6;
    std::mt19937_64 g(83);
    for (int trial = 0; trial < 10; ++trial) {
        std::uniform_int_distribution<std::size_t> dim(2, 8);
        Matrix a = window_scaled_spd(g, dim(g));
        auto sys = build_inversion(map_matrix(a, dev()), Vec(a.rows(), 1.0), oa);
        auto got = poles(sys);
        auto want = ideal_inversion_poles(a, oa.f_gbwp);
        double scale = 0.0;
        for (const auto& w : want) scale = std::max(scale, std::abs(w));
        CHECK(testsup::pairing_error(got.poles, want) < 1e-2 * scale);
    }
}

TEST_CASE("PD inversion verdicts are stable across 100 random operands") {
    OAParams oa;
    std::mt19937_64 g(5);
    for (int trial = 0; trial < 100; ++trial) {
        std::uniform_int_distribution<std::size_t> dim(2, 8);
        Matrix a = window_scaled_spd(g, dim(g));
        auto rep = poles(build_inversion(map_matrix(a, dev()), Vec(a.rows(), 1.0), oa));
        CHECK(rep.verdict == Verdict::stable);
    }
}

TEST_CASE("split-inversion PD verdicts are stable with 2n poles") {
    OAParams oa;
    std::mt19937_64 g(6);
    for (int trial = 0; trial < 50; ++trial) {
        std::uniform_int_distribution<std::size_t> dim(2, 6);
        const std::size_t n = dim(g);
        Matrix a = window_scaled_spd(g, n);
        if (n > 1) {  // make the split nontrivial while keeping PD symmetry
            a(0, 1) = -a(0, 1);
            a(1, 0) = a(0, 1);
        }
        if (!is_positive_definite(a)) continue;
        auto rep = poles(
            build_inversion_split(map_split(split_canonical(a), dev()), Vec(n, 1.0), oa, oa));
        CHECK(rep.poles.size() == 2 * n);
        CHECK(rep.verdict == Verdict::stable);
    }
}

TEST_CASE("pinv circuits never cross the origin tolerance") {
    OAParams oa;
    TIAConfig tia;
    std::mt19937_64 g(7);
    for (int trial = 0; trial < 50; ++trial) {
        std::uniform_int_distribution<std::size_t> md(1, 4);
        const std::size_t m = md(g);
        const std::size_t n = m + 1 + (trial % 3);
        Matrix tall = random_tall(g, n, m);
        tall *= 4.0 / tall.max_abs();

        auto left = poles(build_pinv_left(map_matrix(tall, dev()), Vec(n, 1.0), tia, oa, oa));
        for (const auto& p : left.poles) CHECK(p.real() <= left.origin_tol);
        CHECK(left.verdict != Verdict::unstable);

        auto right = poles(build_pinv_right(map_matrix(tall, dev()), Vec(m, 1.0), tia, oa, oa));
        for (const auto& p : right.poles) CHECK(p.real() <= right.origin_tol);
        CHECK(right.verdict != Verdict::unstable);
    }
}

TEST_CASE("measured settle time stays within three response bounds") {
    OAParams oa;
    std::mt19937_64 g(95);
    for (int trial = 0; trial < 4; ++trial) {
        Matrix a = window_scaled_spd(g, 4);
        const double lam = min_real_eigenvalue(apply_inverse_row_diag(a, a));
        const double bound = response_bound(lam, oa.f_gbwp);
        auto sys = build_inversion(map_matrix(a, dev()), Vec(4, 1.0), oa);
        auto traj = integrate(sys, 8.0 * bound, initial_state(sys, 1));
        auto rep = settle_time(traj, steady_state(sys), sys.output_indices, 0.01);
        REQUIRE(rep.settled);
        CHECK(rep.settle_time <= 3.0 * bound);
    }
}

TEST_CASE("pole report JSON layout") {
    OAParams oa;
    auto sys = build_inversion(map_matrix(from_rows({{2, 1}, {1, 2}}), dev()),
                               Vec{1.0, 1.0}, oa);
    auto rep = poles(sys);
    auto doc = to_json(rep);
    REQUIRE(doc["poles"].size() == 2);
    CHECK(doc["poles"][0].contains("re"));
    CHECK(doc["poles"][0].contains("im"));
    CHECK(doc["dominant"].contains("re"));
    CHECK(doc["lambda_min"].is_number());
    CHECK(doc["verdict"] == "stable");
    CHECK(doc["bound_time"].is_number());

    // mvm has no lambda_min diagnostic: null, not a number
    TIAConfig tia;
    auto mv = build_mvm(map_matrix(from_rows({{1, 0}, {0, 1}}), dev()),
                        Vec{-1.0, -1.0}, tia, oa);
    auto doc2 = to_json(poles(mv));
    CHECK(doc2["lambda_min"].is_null());
}
