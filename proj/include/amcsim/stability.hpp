#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "amcsim/circuits.hpp"
#include "amcsim/matrix.hpp"

namespace amcsim {

enum class Verdict { stable, marginal, unstable };

const char* to_string(Verdict v);

// Pole diagnostics of one circuit. The dominant pole is the slowest decaying
// mode: largest real part among poles farther than origin_tol from the
// imaginary axis, so non-decaying bounded modes do not count.
struct PoleReport {
    std::vector<Complex> poles;  // 1/s
    Complex dominant{0.0, 0.0};
    bool has_dominant = false;
    double lambda_min = 0.0;  // min Re of the normalized operand spectrum
    bool has_lambda_min = false;
    Verdict verdict = Verdict::stable;
    double bound_time = 0.0;  // ln(100)/|Re dominant|, valid with has_dominant
    double origin_tol = 0.0;  // 1/s
};

// Exact finite-gain poles: the eigenvalues of the system state matrix.
PoleReport poles(const CircuitSystem& sys);

// Infinite-gain limit of the feedback solver: -f_gbwp * lambda(U^-1 a).
std::vector<Complex> ideal_inversion_poles(const Matrix& a, double f_gbwp);

// Stable: every pole decays. Marginal: poles on the axis within origin_tol
// but none beyond it. Unstable otherwise.
Verdict verdict(const std::vector<Complex>& poles, double origin_tol);

// Settle-time bound of the 1% criterion for a first-order mode at the
// normalized dominant eigenvalue: ln(100)/(f_gbwp * lambda_min).
double response_bound(double lambda_min, double f_gbwp);

nlohmann::ordered_json to_json(const PoleReport& report);

}  // namespace amcsim
