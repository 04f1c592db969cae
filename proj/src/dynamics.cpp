#include "amcsim/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <random>

#include "amcsim/oracle.hpp"

namespace amcsim {

namespace {

constexpr std::size_t kMaxSteps = 20'000'000;
constexpr std::size_t kMaxSamples = 200'000;

// dstate = j*state + drive, written into out without allocating.
void derivative(const Matrix& j, const Vec& drive, const Vec& state, Vec& out) {
    const std::size_t n = drive.size();
    for (std::size_t i = 0; i < n; ++i) {
        double acc = drive[i];
        for (std::size_t k = 0; k < n; ++k) acc += j(i, k) * state[k];
        out[i] = acc;
    }
}

// Holds sat-masked states at the rail; returns whether anything clamped.
bool clamp_state(const CircuitSystem& sys, Vec& state) {
    bool clamped = false;
    for (std::size_t i = 0; i < state.size(); ++i) {
        if (!sys.sat_mask[i]) continue;
        if (state[i] > sys.v_sat) {
            state[i] = sys.v_sat;
            clamped = true;
        } else if (state[i] < -sys.v_sat) {
            state[i] = -sys.v_sat;
            clamped = true;
        }
    }
    return clamped;
}

bool all_finite(const Vec& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

}  // namespace

double stable_step(const CircuitSystem& sys) {
    const Spectrum spectrum = eigenvalues(sys.j);
    double max_re = 0.0;
    for (const Complex& z : spectrum.values) max_re = std::max(max_re, std::fabs(z.real()));
    if (max_re == 0.0) return std::numeric_limits<double>::infinity();
    return 0.1 / max_re;
}

Trajectory integrate(const CircuitSystem& sys, double t_end, const Vec& x0) {
    double dt = stable_step(sys);
    if (!std::isfinite(dt)) dt = t_end / 100.0;
    return integrate_fixed(sys, t_end, x0, dt);
}

Trajectory integrate_fixed(const CircuitSystem& sys, double t_end, const Vec& x0, double dt) {
    if (!(t_end > 0.0)) throw std::invalid_argument("integrate: t_end must be > 0");
    if (!(dt > 0.0)) throw std::invalid_argument("integrate: dt must be > 0");
    if (x0.size() != sys.state_dim)
        throw DimensionError("integrate: x0 length does not match state_dim");

    const double raw_steps = std::ceil(t_end / dt - 1e-9);
    if (raw_steps > static_cast<double>(kMaxSteps))
        throw ConvergenceError("integrate: step-size underflow, stiffness beyond configured bound",
                               static_cast<std::size_t>(kMaxSteps));
    const std::size_t n_steps = std::max<std::size_t>(1, static_cast<std::size_t>(raw_steps));
    dt = t_end / static_cast<double>(n_steps);
    const std::size_t stride = n_steps / kMaxSamples + 1;

    const std::size_t dim = sys.state_dim;
    Vec state = x0;
    bool clamp_pending = clamp_state(sys, state);

    Trajectory traj;
    traj.dt = dt;
    traj.times.push_back(0.0);
    traj.states.push_back(state);
    traj.clamped_events.push_back(clamp_pending);
    clamp_pending = false;

    Vec k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim);
    for (std::size_t step = 1; step <= n_steps; ++step) {
        derivative(sys.j, sys.drive, state, k1);
        for (std::size_t i = 0; i < dim; ++i) tmp[i] = state[i] + 0.5 * dt * k1[i];
        derivative(sys.j, sys.drive, tmp, k2);
        for (std::size_t i = 0; i < dim; ++i) tmp[i] = state[i] + 0.5 * dt * k2[i];
        derivative(sys.j, sys.drive, tmp, k3);
        for (std::size_t i = 0; i < dim; ++i) tmp[i] = state[i] + dt * k3[i];
        derivative(sys.j, sys.drive, tmp, k4);
        for (std::size_t i = 0; i < dim; ++i)
            state[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        clamp_pending = clamp_state(sys, state) || clamp_pending;

        if (step % stride == 0 || step == n_steps) {
            if (!all_finite(state))
                throw ConvergenceError("integrate: non-finite state", step);
            traj.times.push_back(static_cast<double>(step) * dt);
            traj.states.push_back(state);
            traj.clamped_events.push_back(clamp_pending);
            clamp_pending = false;
        }
    }
    return traj;
}

Vec steady_state(const CircuitSystem& sys) {
    if (sys.topology == Topology::eigenvector)
        throw std::invalid_argument(
            "steady_state: eigenvector topology has no linear steady state");
    const Vec rhs = -1.0 * sys.drive;
    const Vec full = oracle::solve_linear(sys.j, rhs);
    return sys.output_of(full);
}

SettleReport settle_time(const Trajectory& traj, const Vec& x_star,
                         const std::vector<std::size_t>& output_indices, double tol) {
    if (traj.times.empty()) throw std::invalid_argument("settle_time: empty trajectory");
    const double ref_norm = norm2(x_star);
    if (!(ref_norm > 0.0)) throw std::invalid_argument("settle_time: zero reference norm");
    if (x_star.size() != output_indices.size())
        throw DimensionError("settle_time: reference length does not match output_indices");

    // Scan from the end: the criterion must hold for every later sample, so a
    // first crossing on an oscillatory trajectory does not count as settled.
    std::size_t settle_idx = traj.times.size();
    for (std::size_t k = traj.times.size(); k-- > 0;) {
        double err_sq = 0.0;
        for (std::size_t o = 0; o < output_indices.size(); ++o) {
            const double d = traj.states[k][output_indices[o]] - x_star[o];
            err_sq += d * d;
        }
        if (std::sqrt(err_sq) / ref_norm > tol) break;
        settle_idx = k;
    }

    SettleReport report;
    report.reference = x_star;
    report.criterion = tol;
    if (settle_idx < traj.times.size()) {
        report.settled = true;
        report.settle_time = traj.times[settle_idx];
    }
    return report;
}

EigenMeasurement measure_eigen_result(const CircuitSystem& sys, const Trajectory& traj,
                                      const Matrix& a) {
    if (sys.topology != Topology::eigenvector)
        throw std::invalid_argument("measure_eigen_result: not an eigenvector system");
    if (traj.times.size() < 2)
        throw std::invalid_argument("measure_eigen_result: trajectory too short");
    if (!a.is_square() || a.rows() != sys.output_indices.size())
        throw DimensionError("measure_eigen_result: matrix does not match output dimension");

    const double t_last = traj.times.back();
    const double window_start = t_last - 10.0 / sys.f_gbwp;

    // Direction samples over the trailing window, sign-aligned to the final
    // one so a symmetric limit cycle would still show as variance.
    std::vector<Vec> directions;
    Vec final_out = sys.output_of(traj.states.back());
    const double final_norm = norm2(final_out);
    if (!(final_norm > 1e-9))
        throw ConvergenceError("measure_eigen_result: output decayed to zero, not settled",
                               traj.times.size());
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        if (traj.times[k] < window_start) continue;
        Vec out = sys.output_of(traj.states[k]);
        const double nrm = norm2(out);
        if (!(nrm > 0.0))
            throw ConvergenceError("measure_eigen_result: zero output inside settle window", k);
        const double sign = dot(out, final_out) < 0.0 ? -1.0 : 1.0;
        for (double& x : out) x *= sign / nrm;
        directions.push_back(std::move(out));
    }
    if (directions.size() < 2)
        throw ConvergenceError("measure_eigen_result: too few samples in settle window",
                               directions.size());

    const std::size_t dim = final_out.size();
    Vec mean(dim, 0.0);
    for (const Vec& d : directions)
        for (std::size_t i = 0; i < dim; ++i) mean[i] += d[i];
    for (double& x : mean) x /= static_cast<double>(directions.size());
    double variance = 0.0;
    for (const Vec& d : directions) {
        double acc = 0.0;
        for (std::size_t i = 0; i < dim; ++i) {
            const double dd = d[i] - mean[i];
            acc += dd * dd;
        }
        variance += acc;
    }
    variance /= static_cast<double>(directions.size());
    if (variance > 1e-6)
        throw ConvergenceError("measure_eigen_result: direction variance above settle threshold",
                               directions.size());

    const oracle::OracleResult dominant = sys.eigen_sign == EigenSign::negative
                                              ? oracle::most_negative_eigenpair(a)
                                              : oracle::power_iteration(a);
    const double denom = final_norm * norm2(dominant.value);
    double cosang = std::fabs(dot(final_out, dominant.value)) / denom;
    cosang = std::min(cosang, 1.0);

    EigenMeasurement m;
    m.angle = std::acos(cosang);
    m.rayleigh = dot(final_out, a * final_out) / dot(final_out, final_out);
    m.amplitude_ratio = max_abs(final_out) / sys.v_sat;
    return m;
}

Vec initial_state(const CircuitSystem& sys, std::uint64_t seed) {
    Vec s(sys.state_dim, 0.0);
    if (sys.topology == Topology::eigenvector) {
        // A zero state is an unstable fixed point of the self-sustained loop.
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> dist(-1e-3, 1e-3);
        for (double& x : s) x = dist(rng);
    }
    return s;
}

void write_trajectory_csv(const Trajectory& traj, std::ostream& out) {
    const std::size_t dim = traj.states.empty() ? 0 : traj.states.front().size();
    out << 't';
    for (std::size_t i = 0; i < dim; ++i) out << ",s" << i;
    out << '\n';
    char buf[32];
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        std::snprintf(buf, sizeof(buf), "%.17g", traj.times[k]);
        out << buf;
        for (std::size_t i = 0; i < dim; ++i) {
            std::snprintf(buf, sizeof(buf), "%.17g", traj.states[k][i]);
            out << ',' << buf;
        }
        out << '\n';
    }
}

}  // namespace amcsim
