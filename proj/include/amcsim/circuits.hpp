#pragma once

#include <cstddef>
#include <vector>

#include <json.hpp>

#include "amcsim/device.hpp"
#include "amcsim/matrix.hpp"

namespace amcsim {

// Single-pole op-amp macromodel L(s) = l0/(1 + s/omega0) with
// f_gbwp = l0*omega0. Frequencies are rates in 1/s throughout.
struct OAParams {
    double l0 = 1e5;      // DC open-loop gain
    double f_gbwp = 1e6;  // gain-bandwidth product, 1/s
    double v_sat = 10.0;  // output saturation level, volts

    double omega0() const { return f_gbwp / l0; }
    void validate() const;
};

// Transimpedance feedback conductance; the pinv builders call it c.
struct TIAConfig {
    double g_f = 100e-6;

    void validate() const;
};

enum class Topology {
    mvm,
    mvm_split_col,
    mvm_split_row,
    inversion,
    inversion_split,
    pinv_left,
    pinv_right,
    eigenvector,
};

const char* to_string(Topology t);
Topology topology_from_string(const std::string& s);

enum class EigenSign { positive, negative };

// Explicit linear state-space model of one analog topology:
//   d(state)/dt = j*state + drive
// except that states with sat_mask hold at +/-v_sat whenever the unclamped
// update would push them further outside the rail.
struct CircuitSystem {
    Topology topology = Topology::mvm;
    std::size_t state_dim = 0;
    Matrix j;                                 // 1/s
    Vec drive;                                // V/s
    std::vector<bool> sat_mask;
    std::vector<std::size_t> output_indices;  // states forming the result vector
    double v_sat = 10.0;
    double f_gbwp = 1e6;                      // dominant-stage GBWP, 1/s
    Matrix operand;                           // signed operand as realised on the device
    Vec input;                                // applied input vector, volts
    double lambda_feedback = 0.0;             // eigenvector feedback scale, 0 elsewhere
    EigenSign eigen_sign = EigenSign::positive;
    nlohmann::ordered_json meta;

    Vec output_of(const Vec& state) const;
};

// A sign-split operand realised as two conductance arrays.
struct MappedSplit {
    ConductanceMatrix plus;
    ConductanceMatrix minus;
};

MappedSplit map_split(const SplitPair& sp, const DeviceConfig& cfg);

// One TIA per row; the applied voltages are the electrical inputs, so callers
// feed -x to read +A*x off the outputs (the stage inverts).
CircuitSystem build_mvm(const ConductanceMatrix& gm, const Vec& x_in,
                        const TIAConfig& tia, const OAParams& oa);

// Column-wise split: the plus array sees -x and the minus array +x, so the
// outputs settle to (A+ - A-)x * g0/g_f with x given mathematically.
CircuitSystem build_mvm_split_col(const MappedSplit& split, const Vec& x,
                                  const TIAConfig& tia, const OAParams& oa);

// Row-wise split: x drives the columns directly and each output is the
// differential transimpedance of the paired rows, modeled as one first-order
// stage with bandwidth f_gbwp.
CircuitSystem build_mvm_split_row(const MappedSplit& split, const Vec& x,
                                  const TIAConfig& tia, const OAParams& oa);

// Global feedback solver: steady x = A^-1 y up to O(1/l0). The load
// conductance is fixed at g0, which makes the constant term of the
// row-conductance diagonal exactly the normalized load.
CircuitSystem build_inversion(const ConductanceMatrix& gm, const Vec& y_in,
                              const OAParams& oa);

// Split-operand solver with analog inverters regenerating -x; 2n states.
CircuitSystem build_inversion_split(const MappedSplit& split, const Vec& y_in,
                                    const OAParams& oa, const OAParams& inverter_oa);

// Least-squares stage pair: n TIA states followed by m integrator states;
// steady x = (A^T A)^-1 A^T y. Accepts square operands as well (n >= m).
CircuitSystem build_pinv_left(const ConductanceMatrix& gm, const Vec& y_in,
                              const TIAConfig& tia, const OAParams& oa1,
                              const OAParams& oa2);

// Minimum-norm stage pair; gm_t stores A^T for a broad A (m <= n rows);
// steady x = A^T (A A^T)^-1 y read from the lag-stage states.
CircuitSystem build_pinv_right(const ConductanceMatrix& gm_t, const Vec& y_in,
                               const TIAConfig& tia, const OAParams& oa1,
                               const OAParams& oa2);

// Self-sustained positive-feedback loop whose saturated fixed point is the
// dominant eigenvector. lambda_mapped must sit slightly below the nominal
// eigenvalue so the loop gain exceeds one. The positive variant carries the
// inverter stage (2n states); the negative variant drops it (n states).
CircuitSystem build_eigenvector(const ConductanceMatrix& gm, double lambda_mapped,
                                EigenSign sign, const OAParams& oa,
                                const OAParams& inverter_oa);

nlohmann::ordered_json to_json(const CircuitSystem& sys);

}  // namespace amcsim
