#include "amcsim/device.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

namespace amcsim {

void DeviceConfig::validate() const {
    if (!(g0 > 0.0)) throw std::invalid_argument("DeviceConfig: g0 must be > 0");
    if (g_min < 0.0) throw std::invalid_argument("DeviceConfig: g_min must be >= 0");
    if (!(g_min < g_max)) throw std::invalid_argument("DeviceConfig: requires g_min < g_max");
    if (levels < 2) throw std::invalid_argument("DeviceConfig: levels must be >= 2");
    if (sigma_prog < 0.0) throw std::invalid_argument("DeviceConfig: sigma_prog must be >= 0");
    if (!(verify_window > 0.0)) throw std::invalid_argument("DeviceConfig: verify_window must be > 0");
    if (max_verify_iters < 1) throw std::invalid_argument("DeviceConfig: max_verify_iters must be >= 1");
}

const char* to_string(Provenance p) {
    switch (p) {
        case Provenance::ideal: return "ideal";
        case Provenance::quantized: return "quantized";
        case Provenance::programmed: return "programmed";
    }
    return "ideal";
}

Provenance provenance_from_string(const std::string& s) {
    if (s == "ideal") return Provenance::ideal;
    if (s == "quantized") return Provenance::quantized;
    if (s == "programmed") return Provenance::programmed;
    throw std::invalid_argument("unknown provenance '" + s + "'");
}

MapError::MapError(Kind kind, std::size_t row, std::size_t col, double value,
                   double feasible_g0, const std::string& what)
    : std::invalid_argument(what),
      kind_(kind),
      row_(row),
      col_(col),
      value_(value),
      feasible_g0_(feasible_g0) {}

namespace {

std::string map_error_message(MapError::Kind kind, std::size_t i, std::size_t j,
                              double value, double g, double feasible_g0) {
    char buf[192];
    switch (kind) {
        case MapError::Kind::negative_entry:
            std::snprintf(buf, sizeof(buf),
                          "map_matrix: negative entry %.17g at (%zu, %zu); split the matrix "
                          "into nonnegative parts first",
                          value, i, j);
            break;
        case MapError::Kind::above_window:
            std::snprintf(buf, sizeof(buf),
                          "map_matrix: entry %.17g at (%zu, %zu) maps to %.17g S above g_max; "
                          "largest feasible g0 is %.17g S",
                          value, i, j, g, feasible_g0);
            break;
        case MapError::Kind::below_window:
            std::snprintf(buf, sizeof(buf),
                          "map_matrix: entry %.17g at (%zu, %zu) maps to %.17g S below g_min",
                          value, i, j, g);
            break;
    }
    return buf;
}

}  // namespace

ConductanceMatrix map_matrix(const Matrix& a, const DeviceConfig& cfg) {
    cfg.validate();
    const double max_entry = a.max_abs();
    const double feasible_g0 = max_entry > 0.0 ? cfg.g_max / max_entry : 0.0;

    ConductanceMatrix out;
    out.g = Matrix(a.rows(), a.cols());
    out.config = cfg;
    out.provenance = Provenance::ideal;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            const double v = a(i, j);
            if (v < 0.0) {
                throw MapError(MapError::Kind::negative_entry, i, j, v, 0.0,
                               map_error_message(MapError::Kind::negative_entry, i, j, v, 0.0, 0.0));
            }
            if (v == 0.0) continue;
            const double g = v * cfg.g0;
            if (g > cfg.g_max) {
                throw MapError(MapError::Kind::above_window, i, j, v, feasible_g0,
                               map_error_message(MapError::Kind::above_window, i, j, v, g, feasible_g0));
            }
            if (g < cfg.g_min) {
                throw MapError(MapError::Kind::below_window, i, j, v, 0.0,
                               map_error_message(MapError::Kind::below_window, i, j, v, g, 0.0));
            }
            out.g(i, j) = g;
        }
    }
    return out;
}

ConductanceMatrix quantize(const ConductanceMatrix& gm) {
    if (gm.provenance != Provenance::ideal)
        throw std::invalid_argument("quantize: requires ideal provenance");
    gm.config.validate();

    const double step = (gm.config.g_max - gm.config.g_min) / (gm.config.levels - 1);
    ConductanceMatrix out = gm;
    out.provenance = Provenance::quantized;
    for (std::size_t i = 0; i < out.g.rows(); ++i) {
        for (std::size_t j = 0; j < out.g.cols(); ++j) {
            const double g = out.g(i, j);
            if (g == 0.0) continue;
            double k = std::round((g - gm.config.g_min) / step);
            k = std::clamp(k, 0.0, static_cast<double>(gm.config.levels - 1));
            out.g(i, j) = gm.config.g_min + k * step;
        }
    }
    return out;
}

ConductanceMatrix program_with_verify(const ConductanceMatrix& gm, std::uint64_t seed) {
    if (gm.provenance == Provenance::programmed)
        throw std::invalid_argument("program_with_verify: input is already programmed");
    gm.config.validate();

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    const double eps = gm.config.verify_window;
    const double sigma = gm.config.sigma_prog;

    ConductanceMatrix out = gm;
    out.provenance = Provenance::programmed;
    out.clamp_events = 0;
    out.total_verify_iters = 0;
    for (std::size_t i = 0; i < out.g.rows(); ++i) {
        for (std::size_t j = 0; j < out.g.cols(); ++j) {
            const double target = gm.g(i, j);
            if (target == 0.0) continue;  // unmapped cell: no pulses, no RNG draws
            double actual = target;
            bool accepted = false;
            for (int iter = 1; iter <= gm.config.max_verify_iters; ++iter) {
                actual = target * (1.0 + sigma * noise(rng));
                ++out.total_verify_iters;
                if (std::fabs(actual - target) <= eps * target) {
                    accepted = true;
                    break;
                }
            }
            if (!accepted) {
                actual = std::clamp(actual, target * (1.0 - eps), target * (1.0 + eps));
                ++out.clamp_events;
            }
            // Noise inside the verify window may still poke past the device
            // window when the target sits at its edge; pull it back in. The
            // target itself is in the window, so this never grows the error.
            out.g(i, j) = std::clamp(actual, gm.config.g_min, gm.config.g_max);
        }
    }
    return out;
}

Matrix read_matrix(const ConductanceMatrix& gm) {
    Matrix a(gm.g.rows(), gm.g.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            a(i, j) = gm.g(i, j) / gm.config.g0;
    return a;
}

nlohmann::ordered_json to_json(const ConductanceMatrix& gm) {
    nlohmann::ordered_json j;
    j["g0"] = gm.config.g0;
    j["g_min"] = gm.config.g_min;
    j["g_max"] = gm.config.g_max;
    j["levels"] = gm.config.levels;
    j["sigma_prog"] = gm.config.sigma_prog;
    j["verify_window"] = gm.config.verify_window;
    j["provenance"] = to_string(gm.provenance);
    j["rows"] = gm.g.rows();
    j["cols"] = gm.g.cols();
    nlohmann::ordered_json entries = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < gm.g.rows(); ++i)
        for (std::size_t k = 0; k < gm.g.cols(); ++k)
            entries.push_back(gm.g(i, k));
    j["entries"] = std::move(entries);
    return j;
}

ConductanceMatrix conductance_from_json(const nlohmann::ordered_json& j) {
    ConductanceMatrix gm;
    try {
        gm.config.g0 = j.at("g0").get<double>();
        gm.config.g_min = j.at("g_min").get<double>();
        gm.config.g_max = j.at("g_max").get<double>();
        gm.config.levels = j.at("levels").get<int>();
        gm.config.sigma_prog = j.at("sigma_prog").get<double>();
        gm.config.verify_window = j.at("verify_window").get<double>();
        gm.provenance = provenance_from_string(j.at("provenance").get<std::string>());
        const auto rows = j.at("rows").get<std::size_t>();
        const auto cols = j.at("cols").get<std::size_t>();
        const auto& entries = j.at("entries");
        if (entries.size() != rows * cols)
            throw std::invalid_argument("conductance_from_json: entries length != rows*cols");
        gm.g = Matrix(rows, cols);
        std::size_t idx = 0;
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t k = 0; k < cols; ++k)
                gm.g(i, k) = entries.at(idx++).get<double>();
    } catch (const nlohmann::ordered_json::exception& e) {
        throw std::invalid_argument(std::string("conductance_from_json: ") + e.what());
    }
    gm.config.validate();
    return gm;
}

}  // namespace amcsim
