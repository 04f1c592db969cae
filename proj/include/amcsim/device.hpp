#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "amcsim/matrix.hpp"

namespace amcsim {

// Crosspoint device window and programming behaviour. Conductances in siemens.
struct DeviceConfig {
    double g0 = 100e-6;           // unit conductance: matrix entry 1.0 maps to g0
    double g_min = 0.0;           // lower edge of the programmable window
    double g_max = 500e-6;        // upper edge of the programmable window
    int levels = 64;              // programmable states, uniformly spaced on [g_min, g_max]
    double sigma_prog = 0.0;      // relative std-dev of multiplicative programming noise
    double verify_window = 0.01;  // relative error accepted by program/verify
    int max_verify_iters = 100;   // reprogram attempts before clamping to the window edge

    // Throws std::invalid_argument naming the offending field.
    void validate() const;
};

enum class Provenance { ideal, quantized, programmed };

const char* to_string(Provenance p);
Provenance provenance_from_string(const std::string& s);

// A matrix realised as device conductances. Entries are either exactly zero
// (unmapped cell) or lie inside the device window.
struct ConductanceMatrix {
    Matrix g;
    DeviceConfig config;
    Provenance provenance = Provenance::ideal;
    // Programming statistics, populated by program_with_verify. Not serialized.
    long clamp_events = 0;
    long total_verify_iters = 0;
};

// Raised by map_matrix when an entry cannot be realised on the device.
class MapError : public std::invalid_argument {
public:
    enum class Kind { negative_entry, above_window, below_window };

    MapError(Kind kind, std::size_t row, std::size_t col, double value,
             double feasible_g0, const std::string& what);

    Kind kind() const { return kind_; }
    std::size_t row() const { return row_; }
    std::size_t col() const { return col_; }
    // Offending matrix entry (dimensionless) and, for window overflow, the
    // largest unit conductance that would fit the whole matrix.
    double value() const { return value_; }
    double feasible_g0() const { return feasible_g0_; }

private:
    Kind kind_;
    std::size_t row_;
    std::size_t col_;
    double value_;
    double feasible_g0_;
};

// g[i][j] = a[i][j] * g0. Refuses negative entries (split the matrix first)
// and entries that fall outside the device window; it never rescales silently.
ConductanceMatrix map_matrix(const Matrix& a, const DeviceConfig& cfg);

// Snaps every nonzero entry to the nearest of `levels` uniformly spaced
// values on [g_min, g_max]. Requires ideal provenance.
ConductanceMatrix quantize(const ConductanceMatrix& gm);

// Resamples each nonzero entry as target*(1 + N(0, sigma_prog)) until it lands
// within the verify window, up to max_verify_iters; a miss is clamped to the
// window edge and counted in clamp_events. Deterministic for a fixed seed.
ConductanceMatrix program_with_verify(const ConductanceMatrix& gm, std::uint64_t seed);

// a[i][j] = g[i][j] / g0, the inverse of map_matrix.
Matrix read_matrix(const ConductanceMatrix& gm);

nlohmann::ordered_json to_json(const ConductanceMatrix& gm);
ConductanceMatrix conductance_from_json(const nlohmann::ordered_json& j);

}  // namespace amcsim
