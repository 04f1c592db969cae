#include "amcsim/stability.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace amcsim {

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::stable: return "stable";
        case Verdict::marginal: return "marginal";
        case Verdict::unstable: return "unstable";
    }
    return "stable";
}

Verdict verdict(const std::vector<Complex>& poles, double origin_tol) {
    bool any_origin = false;
    for (const Complex& p : poles) {
        if (p.real() > origin_tol) return Verdict::unstable;
        if (std::fabs(p.real()) <= origin_tol) any_origin = true;
    }
    return any_origin ? Verdict::marginal : Verdict::stable;
}

PoleReport poles(const CircuitSystem& sys) {
    PoleReport report;
    report.origin_tol = 1e-6 * sys.f_gbwp;
    report.poles = eigenvalues(sys.j).values;
    report.verdict = verdict(report.poles, report.origin_tol);

    for (const Complex& p : report.poles) {
        if (std::fabs(p.real()) <= report.origin_tol) continue;
        if (!report.has_dominant || p.real() >= report.dominant.real()) {
            report.dominant = p;
            report.has_dominant = true;
        }
    }
    if (report.has_dominant)
        report.bound_time = std::log(100.0) / std::fabs(report.dominant.real());

    if (sys.topology == Topology::inversion) {
        report.lambda_min = min_real_eigenvalue(apply_inverse_row_diag(sys.operand, sys.operand));
        report.has_lambda_min = true;
    }
    return report;
}

std::vector<Complex> ideal_inversion_poles(const Matrix& a, double f_gbwp) {
    if (!a.is_square()) throw DimensionError("ideal_inversion_poles: operand must be square");
    if (!a.is_nonnegative())
        throw std::invalid_argument("ideal_inversion_poles: operand must be nonnegative");
    const Spectrum spectrum = eigenvalues(apply_inverse_row_diag(a, a));
    std::vector<Complex> out;
    out.reserve(spectrum.values.size());
    for (const Complex& lam : spectrum.values) out.push_back(-f_gbwp * lam);
    std::sort(out.begin(), out.end(), [](const Complex& p, const Complex& q) {
        return p.real() != q.real() ? p.real() < q.real() : p.imag() < q.imag();
    });
    return out;
}

double response_bound(double lambda_min, double f_gbwp) {
    if (!(lambda_min > 0.0))
        throw std::invalid_argument("response_bound: lambda_min must be > 0 (stable circuit)");
    if (!(f_gbwp > 0.0)) throw std::invalid_argument("response_bound: f_gbwp must be > 0");
    return std::log(100.0) / (f_gbwp * lambda_min);
}

nlohmann::ordered_json to_json(const PoleReport& report) {
    nlohmann::ordered_json j;
    auto pole_list = nlohmann::ordered_json::array();
    for (const Complex& p : report.poles)
        pole_list.push_back({{"re", p.real()}, {"im", p.imag()}});
    j["poles"] = std::move(pole_list);
    if (report.has_dominant)
        j["dominant"] = {{"re", report.dominant.real()}, {"im", report.dominant.imag()}};
    else
        j["dominant"] = nullptr;
    if (report.has_lambda_min)
        j["lambda_min"] = report.lambda_min;
    else
        j["lambda_min"] = nullptr;
    j["verdict"] = to_string(report.verdict);
    if (report.has_dominant)
        j["bound_time"] = report.bound_time;
    else
        j["bound_time"] = nullptr;
    return j;
}

}  // namespace amcsim
