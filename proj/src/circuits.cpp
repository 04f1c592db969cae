#include "amcsim/circuits.hpp"

#include <cstdio>
#include <stdexcept>
#include <string>

namespace amcsim {

void OAParams::validate() const {
    if (!(l0 > 1.0)) throw std::invalid_argument("OAParams: l0 must be > 1");
    if (!(f_gbwp > 0.0)) throw std::invalid_argument("OAParams: f_gbwp must be > 0");
    if (!(v_sat > 0.0)) throw std::invalid_argument("OAParams: v_sat must be > 0");
}

void TIAConfig::validate() const {
    if (!(g_f > 0.0)) throw std::invalid_argument("TIAConfig: g_f must be > 0");
}

const char* to_string(Topology t) {
    switch (t) {
        case Topology::mvm: return "mvm";
        case Topology::mvm_split_col: return "mvm_split_col";
        case Topology::mvm_split_row: return "mvm_split_row";
        case Topology::inversion: return "inversion";
        case Topology::inversion_split: return "inversion_split";
        case Topology::pinv_left: return "pinv_left";
        case Topology::pinv_right: return "pinv_right";
        case Topology::eigenvector: return "eigenvector";
    }
    return "mvm";
}

Topology topology_from_string(const std::string& s) {
    if (s == "mvm") return Topology::mvm;
    if (s == "mvm_split_col") return Topology::mvm_split_col;
    if (s == "mvm_split_row") return Topology::mvm_split_row;
    if (s == "inversion") return Topology::inversion;
    if (s == "inversion_split") return Topology::inversion_split;
    if (s == "pinv_left") return Topology::pinv_left;
    if (s == "pinv_right") return Topology::pinv_right;
    if (s == "eigenvector") return Topology::eigenvector;
    throw std::invalid_argument("unknown topology '" + s + "'");
}

Vec CircuitSystem::output_of(const Vec& state) const {
    if (state.size() != state_dim)
        throw DimensionError("output_of: state length does not match state_dim");
    Vec out(output_indices.size());
    for (std::size_t k = 0; k < output_indices.size(); ++k) out[k] = state[output_indices[k]];
    return out;
}

MappedSplit map_split(const SplitPair& sp, const DeviceConfig& cfg) {
    return MappedSplit{map_matrix(sp.plus, cfg), map_matrix(sp.minus, cfg)};
}

namespace {

void require_nonnegative(const ConductanceMatrix& gm, const char* who) {
    gm.config.validate();
    if (!gm.g.is_nonnegative())
        throw std::invalid_argument(std::string(who) + ": conductances must be nonnegative");
}

void require_length(const Vec& v, std::size_t want, const char* who, const char* name) {
    if (v.size() != want) {
        char buf[128];
        std::snprintf(buf, sizeof(buf), "%s: %s has length %zu, expected %zu", who, name,
                      v.size(), want);
        throw DimensionError(buf);
    }
}

void require_matched_split(const MappedSplit& split, const char* who) {
    require_nonnegative(split.plus, who);
    require_nonnegative(split.minus, who);
    if (split.plus.g.rows() != split.minus.g.rows() ||
        split.plus.g.cols() != split.minus.g.cols())
        throw DimensionError(std::string(who) + ": split halves differ in shape");
    if (split.plus.config.g0 != split.minus.config.g0)
        throw std::invalid_argument(std::string(who) + ": split halves use different g0");
}

Vec col_sums(const Matrix& m) {
    Vec s(m.cols(), 0.0);
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) s[j] += m(i, j);
    return s;
}

nlohmann::ordered_json oa_json(const OAParams& oa) {
    return {{"l0", oa.l0}, {"f_gbwp", oa.f_gbwp}, {"v_sat", oa.v_sat}};
}

nlohmann::ordered_json matrix_rows(const Matrix& m) {
    auto rows = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        auto row = nlohmann::ordered_json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

CircuitSystem build_mvm(const ConductanceMatrix& gm, const Vec& x_in, const TIAConfig& tia,
                        const OAParams& oa) {
    oa.validate();
    tia.validate();
    require_nonnegative(gm, "build_mvm");
    const std::size_t n = gm.g.rows();
    const std::size_t m = gm.g.cols();
    require_length(x_in, m, "build_mvm", "x_in");

    const double w0 = oa.omega0();
    CircuitSystem sys;
    sys.topology = Topology::mvm;
    sys.state_dim = n;
    sys.j = Matrix(n, n);
    sys.drive = Vec(n, 0.0);
    sys.sat_mask.assign(n, false);
    for (std::size_t i = 0; i < n; ++i) sys.output_indices.push_back(i);

    // Inverting node: v-_i = (sum_j g_ij x_j + g_f v_i)/(g_f + S_i), so the
    // stage is diagonal; drive carries the device currents.
    for (std::size_t i = 0; i < n; ++i) {
        const double s_i = gm.g.row_sum(i);
        const double denom = tia.g_f + s_i;
        double current = 0.0;
        for (std::size_t jj = 0; jj < m; ++jj) current += gm.g(i, jj) * x_in[jj];
        sys.j(i, i) = -w0 * (oa.l0 * tia.g_f / denom + 1.0);
        sys.drive[i] = -w0 * oa.l0 * current / denom;
    }

    sys.v_sat = oa.v_sat;
    sys.f_gbwp = oa.f_gbwp;
    sys.operand = read_matrix(gm);
    sys.input = x_in;
    sys.meta = {{"g0", gm.config.g0},
                {"g_f", tia.g_f},
                {"oa", oa_json(oa)},
                {"conductances", to_json(gm)}};
    return sys;
}

CircuitSystem build_mvm_split_col(const MappedSplit& split, const Vec& x, const TIAConfig& tia,
                                  const OAParams& oa) {
    oa.validate();
    tia.validate();
    require_matched_split(split, "build_mvm_split_col");
    const std::size_t n = split.plus.g.rows();
    const std::size_t m = split.plus.g.cols();
    require_length(x, m, "build_mvm_split_col", "x");

    const double w0 = oa.omega0();
    CircuitSystem sys;
    sys.topology = Topology::mvm_split_col;
    sys.state_dim = n;
    sys.j = Matrix(n, n);
    sys.drive = Vec(n, 0.0);
    sys.sat_mask.assign(n, false);
    for (std::size_t i = 0; i < n; ++i) sys.output_indices.push_back(i);

    // Plus columns see -x and minus columns +x; both arrays load the node.
    for (std::size_t i = 0; i < n; ++i) {
        const double s_i = split.plus.g.row_sum(i) + split.minus.g.row_sum(i);
        const double denom = tia.g_f + s_i;
        double current = 0.0;
        for (std::size_t jj = 0; jj < m; ++jj)
            current += (split.minus.g(i, jj) - split.plus.g(i, jj)) * x[jj];
        sys.j(i, i) = -w0 * (oa.l0 * tia.g_f / denom + 1.0);
        sys.drive[i] = -w0 * oa.l0 * current / denom;
    }

    sys.v_sat = oa.v_sat;
    sys.f_gbwp = oa.f_gbwp;
    sys.operand = read_matrix(split.plus) - read_matrix(split.minus);
    sys.input = x;
    sys.meta = {{"g0", split.plus.config.g0},
                {"g_f", tia.g_f},
                {"oa", oa_json(oa)},
                {"conductances_plus", to_json(split.plus)},
                {"conductances_minus", to_json(split.minus)}};
    return sys;
}

CircuitSystem build_mvm_split_row(const MappedSplit& split, const Vec& x, const TIAConfig& tia,
                                  const OAParams& oa) {
    oa.validate();
    tia.validate();
    require_matched_split(split, "build_mvm_split_row");
    const std::size_t n = split.plus.g.rows();
    const std::size_t m = split.plus.g.cols();
    require_length(x, m, "build_mvm_split_row", "x");

    CircuitSystem sys;
    sys.topology = Topology::mvm_split_row;
    sys.state_dim = n;
    sys.j = Matrix(n, n);
    sys.drive = Vec(n, 0.0);
    sys.sat_mask.assign(n, false);
    for (std::size_t i = 0; i < n; ++i) sys.output_indices.push_back(i);

    // The three-OA readout collapses to one differential transimpedance stage
    // whose inverting node is loaded by both paired rows, so its finite-gain
    // error matches the column-split TIA exactly (the equivalence contract).
    const double w0 = oa.omega0();
    for (std::size_t i = 0; i < n; ++i) {
        double diff = 0.0;
        double pair_sum = tia.g_f;
        for (std::size_t jj = 0; jj < m; ++jj) {
            diff += (split.plus.g(i, jj) - split.minus.g(i, jj)) * x[jj];
            pair_sum += split.plus.g(i, jj) + split.minus.g(i, jj);
        }
        sys.j(i, i) = -w0 * (oa.l0 * tia.g_f / pair_sum + 1.0);
        sys.drive[i] = w0 * oa.l0 * diff / pair_sum;
    }

    sys.v_sat = oa.v_sat;
    sys.f_gbwp = oa.f_gbwp;
    sys.operand = read_matrix(split.plus) - read_matrix(split.minus);
    sys.input = x;
    sys.meta = {{"g0", split.plus.config.g0},
                {"g_f", tia.g_f},
                {"oa", oa_json(oa)},
                {"conductances_plus", to_json(split.plus)},
                {"conductances_minus", to_json(split.minus)}};
    return sys;
}

CircuitSystem build_inversion(const ConductanceMatrix& gm, const Vec& y_in, const OAParams& oa) {
    oa.validate();
    require_nonnegative(gm, "build_inversion");
    const std::size_t n = gm.g.rows();
    if (gm.g.cols() != n) throw DimensionError("build_inversion: operand must be square");
    require_length(y_in, n, "build_inversion", "y_in");

    const Matrix a = read_matrix(gm);
    const double w0 = oa.omega0();
    CircuitSystem sys;
    sys.topology = Topology::inversion;
    sys.state_dim = n;
    sys.j = Matrix(n, n);
    sys.drive = Vec(n, 0.0);
    sys.sat_mask.assign(n, false);
    for (std::size_t i = 0; i < n; ++i) sys.output_indices.push_back(i);

    // dx/dt = w0 (l0 U^-1 (y - A x) - x) with U_ii = 1 + row_sum(A); the unit
    // term is the load conductance normalized to g0.
    for (std::size_t i = 0; i < n; ++i) {
        const double u_i = 1.0 + a.row_sum(i);
        for (std::size_t k = 0; k < n; ++k) sys.j(i, k) = -w0 * oa.l0 * a(i, k) / u_i;
        sys.j(i, i) -= w0;
        sys.drive[i] = w0 * oa.l0 * y_in[i] / u_i;
    }

    sys.v_sat = oa.v_sat;
    sys.f_gbwp = oa.f_gbwp;
    sys.operand = a;
    sys.input = y_in;
    sys.meta = {{"g0", gm.config.g0}, {"oa", oa_json(oa)}, {"conductances", to_json(gm)}};
    return sys;
}

CircuitSystem build_inversion_split(const MappedSplit& split, const Vec& y_in, const OAParams& oa,
                                    const OAParams& inverter_oa) {
    oa.validate();
    inverter_oa.validate();
    require_matched_split(split, "build_inversion_split");
    const std::size_t n = split.plus.g.rows();
    if (split.plus.g.cols() != n)
        throw DimensionError("build_inversion_split: operand must be square");
    require_length(y_in, n, "build_inversion_split", "y_in");

    const Matrix ap = read_matrix(split.plus);
    const Matrix am = read_matrix(split.minus);
    const double w0 = oa.omega0();
    const double half_bw = inverter_oa.f_gbwp / 2.0;  // unity-gain inverter lag

    CircuitSystem sys;
    sys.topology = Topology::inversion_split;
    sys.state_dim = 2 * n;
    sys.j = Matrix(2 * n, 2 * n);
    sys.drive = Vec(2 * n, 0.0);
    sys.sat_mask.assign(2 * n, false);
    for (std::size_t i = 0; i < n; ++i) sys.output_indices.push_back(i);

    // States [x; w]: dx/dt = w0 (l0 Us^-1 (y - A+ x - A- w) - x),
    // dw/dt = (f_inv/2)(-x - w); at steady state w = -x and A x = y.
    for (std::size_t i = 0; i < n; ++i) {
        const double u_i = 1.0 + ap.row_sum(i) + am.row_sum(i);
        for (std::size_t k = 0; k < n; ++k) {
            sys.j(i, k) = -w0 * oa.l0 * ap(i, k) / u_i;
            sys.j(i, n + k) = -w0 * oa.l0 * am(i, k) / u_i;
        }
        sys.j(i, i) -= w0;
        sys.drive[i] = w0 * oa.l0 * y_in[i] / u_i;
        sys.j(n + i, i) = -half_bw;
        sys.j(n + i, n + i) = -half_bw;
    }

    sys.v_sat = oa.v_sat;
    sys.f_gbwp = oa.f_gbwp;
    sys.operand = ap - am;
    sys.input = y_in;
    sys.meta = {{"g0", split.plus.config.g0},
                {"oa", oa_json(oa)},
                {"inverter_oa", oa_json(inverter_oa)},
                {"conductances_plus", to_json(split.plus)},
                {"conductances_minus", to_json(split.minus)}};
    return sys;
}

CircuitSystem build_pinv_left(const ConductanceMatrix& gm, const Vec& y_in, const TIAConfig& tia,
                              const OAParams& oa1, const OAParams& oa2) {
    oa1.validate();
    oa2.validate();
    tia.validate();
    require_nonnegative(gm, "build_pinv_left");
    const std::size_t n = gm.g.rows();
    const std::size_t m = gm.g.cols();
    if (n < m) throw DimensionError("build_pinv_left: operand must have rows >= cols");
    require_length(y_in, n, "build_pinv_left", "y_in");

    const Matrix a = read_matrix(gm);
    const double g0 = gm.config.g0;
    const double c = tia.g_f;
    const Vec col = col_sums(a);
    for (std::size_t jj = 0; jj < m; ++jj)
        if (!(col[jj] > 0.0)) {
            char buf[96];
            std::snprintf(buf, sizeof(buf),
                          "build_pinv_left: column %zu sums to zero (A^T A singular)", jj);
            throw std::invalid_argument(buf);
        }

    const double w1 = oa1.omega0();
    CircuitSystem sys;
    sys.topology = Topology::pinv_left;
    sys.state_dim = n + m;
    sys.j = Matrix(n + m, n + m);
    sys.drive = Vec(n + m, 0.0);
    sys.sat_mask.assign(n + m, false);
    for (std::size_t jj = 0; jj < m; ++jj) sys.output_indices.push_back(n + jj);

    // TIA stage: dv/dt = w1 (l0 (g0 y - g0 A x - c v)/(c + g0 S_i) - v), so
    // v settles to g0 (y - A x)/c up to O(1/l0).
    for (std::size_t i = 0; i < n; ++i) {
        const double d_i = c + g0 * a.row_sum(i);
        sys.j(i, i) = -w1 * (oa1.l0 * c / d_i + 1.0);
        for (std::size_t jj = 0; jj < m; ++jj)
            sys.j(i, n + jj) = -w1 * oa1.l0 * g0 * a(i, jj) / d_i;
        sys.drive[i] = w1 * oa1.l0 * g0 * y_in[i] / d_i;
    }
    // Integrator stage: dx_j/dt = f2 (A^T v)_j / C_j; steady A^T v = 0 is the
    // normal-equation optimality condition.
    for (std::size_t jj = 0; jj < m; ++jj)
        for (std::size_t i = 0; i < n; ++i)
            sys.j(n + jj, i) = oa2.f_gbwp * a(i, jj) / col[jj];

    sys.v_sat = oa1.v_sat;
    sys.f_gbwp = oa1.f_gbwp;
    sys.operand = a;
    sys.input = y_in;
    sys.meta = {{"g0", g0},
                {"c", c},
                {"oa_tia", oa_json(oa1)},
                {"oa_integrator", oa_json(oa2)},
                {"conductances", to_json(gm)}};
    return sys;
}

CircuitSystem build_pinv_right(const ConductanceMatrix& gm_t, const Vec& y_in, const TIAConfig& tia,
                               const OAParams& oa1, const OAParams& oa2) {
    oa1.validate();
    oa2.validate();
    tia.validate();
    require_nonnegative(gm_t, "build_pinv_right");
    const std::size_t n = gm_t.g.rows();
    const std::size_t m = gm_t.g.cols();
    if (n < m) throw DimensionError("build_pinv_right: transposed operand must have rows >= cols");
    require_length(y_in, m, "build_pinv_right", "y_in");

    const Matrix at = read_matrix(gm_t);  // A^T, so A is m x n broad
    const double g0 = gm_t.config.g0;
    const double c = tia.g_f;
    const Vec a_row = col_sums(at);  // row sums of A
    for (std::size_t jj = 0; jj < m; ++jj)
        if (!(a_row[jj] > 0.0)) {
            char buf[96];
            std::snprintf(buf, sizeof(buf),
                          "build_pinv_right: row %zu of A sums to zero (A A^T singular)", jj);
            throw std::invalid_argument(buf);
        }

    const double w1 = oa1.omega0();
    CircuitSystem sys;
    sys.topology = Topology::pinv_right;
    sys.state_dim = n + m;
    sys.j = Matrix(n + m, n + m);
    sys.drive = Vec(n + m, 0.0);
    sys.sat_mask.assign(n + m, false);
    for (std::size_t i = 0; i < n; ++i) sys.output_indices.push_back(i);

    // Lag stage: du/dt = w1 (l0 (g0 A^T w - c u)/(c + g0 R_i) - u); the g0/c
    // scale on u cancels against the integrator constraint A u = y below.
    for (std::size_t i = 0; i < n; ++i) {
        const double d_i = c + g0 * at.row_sum(i);
        sys.j(i, i) = -w1 * (oa1.l0 * c / d_i + 1.0);
        for (std::size_t jj = 0; jj < m; ++jj)
            sys.j(i, n + jj) = w1 * oa1.l0 * g0 * at(i, jj) / d_i;
    }
    // Integrator stage: dw_j/dt = f2 (y_j - (A u)_j)/D_j.
    for (std::size_t jj = 0; jj < m; ++jj) {
        for (std::size_t k = 0; k < n; ++k)
            sys.j(n + jj, k) = -oa2.f_gbwp * at(k, jj) / a_row[jj];
        sys.drive[n + jj] = oa2.f_gbwp * y_in[jj] / a_row[jj];
    }

    sys.v_sat = oa1.v_sat;
    sys.f_gbwp = oa1.f_gbwp;
    sys.operand = at.transpose();
    sys.input = y_in;
    sys.meta = {{"g0", g0},
                {"c", c},
                {"oa_lag", oa_json(oa1)},
                {"oa_integrator", oa_json(oa2)},
                {"conductances_transposed", to_json(gm_t)}};
    return sys;
}

CircuitSystem build_eigenvector(const ConductanceMatrix& gm, double lambda_mapped, EigenSign sign,
                                const OAParams& oa, const OAParams& inverter_oa) {
    oa.validate();
    inverter_oa.validate();
    require_nonnegative(gm, "build_eigenvector");
    const std::size_t n = gm.g.rows();
    if (gm.g.cols() != n) throw DimensionError("build_eigenvector: operand must be square");
    if (!(lambda_mapped > 0.0))
        throw std::invalid_argument("build_eigenvector: lambda_mapped must be > 0");

    const Matrix a = read_matrix(gm);
    const double w0 = oa.omega0();
    const double lam = lambda_mapped;

    CircuitSystem sys;
    sys.topology = Topology::eigenvector;
    sys.lambda_feedback = lam;
    sys.eigen_sign = sign;
    sys.v_sat = oa.v_sat;
    sys.f_gbwp = oa.f_gbwp;
    sys.operand = a;
    sys.meta = {{"g0", gm.config.g0},
                {"lambda_mapped", lam},
                {"sign", sign == EigenSign::positive ? "positive" : "negative"},
                {"oa", oa_json(oa)},
                {"inverter_oa", oa_json(inverter_oa)},
                {"conductances", to_json(gm)}};

    if (sign == EigenSign::positive) {
        // States [u; x]: TIA outputs u with feedback conductance lam*g0, and
        // inverter outputs x = -u regenerating the loop, clamped at the rail.
        const double half_bw = inverter_oa.f_gbwp / 2.0;
        sys.state_dim = 2 * n;
        sys.j = Matrix(2 * n, 2 * n);
        sys.drive = Vec(2 * n, 0.0);
        sys.sat_mask.assign(2 * n, false);
        for (std::size_t i = 0; i < n; ++i) {
            const double denom = a.row_sum(i) + lam;
            sys.j(i, i) = -w0 * (oa.l0 * lam / denom + 1.0);
            for (std::size_t k = 0; k < n; ++k) sys.j(i, n + k) += -w0 * oa.l0 * a(i, k) / denom;
            sys.j(n + i, i) = -half_bw;
            sys.j(n + i, n + i) = -half_bw;
            sys.sat_mask[n + i] = true;
            sys.output_indices.push_back(n + i);
        }
    } else {
        // Inverters removed: the TIA outputs feed the columns directly and
        // the loop locks onto the most negative eigenvalue.
        sys.state_dim = n;
        sys.j = Matrix(n, n);
        sys.drive = Vec(n, 0.0);
        sys.sat_mask.assign(n, true);
        for (std::size_t i = 0; i < n; ++i) {
            const double denom = a.row_sum(i) + lam;
            for (std::size_t k = 0; k < n; ++k) sys.j(i, k) = -w0 * oa.l0 * a(i, k) / denom;
            sys.j(i, i) += -w0 * (oa.l0 * lam / denom + 1.0);
            sys.output_indices.push_back(i);
        }
    }
    return sys;
}

nlohmann::ordered_json to_json(const CircuitSystem& sys) {
    nlohmann::ordered_json j;
    j["topology"] = to_string(sys.topology);
    j["state_dim"] = sys.state_dim;
    j["j"] = matrix_rows(sys.j);
    j["drive"] = sys.drive;
    auto mask = nlohmann::ordered_json::array();
    for (bool b : sys.sat_mask) mask.push_back(b ? 1 : 0);
    j["sat_mask"] = std::move(mask);
    j["output_indices"] = sys.output_indices;
    j["meta"] = sys.meta;
    j["meta"]["v_sat"] = sys.v_sat;
    j["meta"]["f_gbwp"] = sys.f_gbwp;
    return j;
}

}  // namespace amcsim
