#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "amcsim/circuits.hpp"
#include "amcsim/matrix.hpp"

namespace amcsim {

// Sampled transient of a CircuitSystem. Long integrations are thinned to a
// bounded number of samples; the final step is always recorded.
struct Trajectory {
    std::vector<double> times;        // seconds, strictly increasing
    std::vector<Vec> states;          // volts, one vector per sample
    std::vector<bool> clamped_events; // any rail clamp since the previous sample
    double dt = 0.0;                  // integration step actually used
};

struct SettleReport {
    bool settled = false;
    double settle_time = 0.0; // meaningful only when settled
    Vec reference;            // steady-state output x*
    double criterion = 0.01;  // relative tolerance on ||x - x*|| / ||x*||
};

struct EigenMeasurement {
    double angle = 0.0;           // radians between final output and oracle eigenvector
    double rayleigh = 0.0;        // x^T A x / x^T x of the final output
    double amplitude_ratio = 0.0; // max |x_i| / v_sat
};

// Step bound 0.1/max|Re(eig(j))| keeping the fastest mode well resolved.
double stable_step(const CircuitSystem& sys);

// Classic fourth-order fixed-step integration with post-step rail clamping of
// sat-masked states. Deterministic. Throws ConvergenceError when the step
// count exceeds the configured cap or a state goes non-finite.
Trajectory integrate(const CircuitSystem& sys, double t_end, const Vec& x0);
Trajectory integrate_fixed(const CircuitSystem& sys, double t_end, const Vec& x0, double dt);

// Algebraic steady state j*x = -drive projected onto the output indices.
// Refused for the eigenvector topology, which has no linear steady state.
Vec steady_state(const CircuitSystem& sys);

// Earliest sampled time after which the relative-norm criterion holds for all
// later samples, matching the 1% computing-time definition.
SettleReport settle_time(const Trajectory& traj, const Vec& x_star,
                         const std::vector<std::size_t>& output_indices, double tol = 0.01);

// Direction-settled eigenvector readout compared against the oracle dominant
// eigenpair of a. Requires the output direction variance over the trailing
// 10/f_gbwp window to sit below 1e-6.
EigenMeasurement measure_eigen_result(const CircuitSystem& sys, const Trajectory& traj,
                                      const Matrix& a);

// Zero state except for the self-sustained eigenvector topology, which starts
// from a seeded uniform perturbation in [-1 mV, 1 mV].
Vec initial_state(const CircuitSystem& sys, std::uint64_t seed);

// CSV with header t,s0,s1,...; times in seconds, states in volts.
void write_trajectory_csv(const Trajectory& traj, std::ostream& out);

}  // namespace amcsim
