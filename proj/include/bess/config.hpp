#pragma once

#include <string>

#include "bess/battery.hpp"
#include "bess/core.hpp"
#include "bess/droop.hpp"

namespace bess {

/// Ornstein-Uhlenbeck parameters for the synthetic grid trace.
struct OuParams {
    double f_reversion = 0.1;    ///< [1/s]
    double f_vol = 0.02;         ///< [Hz / sqrt(s)]
    double vac_reversion = 0.1;  ///< [1/s]
    double vac_vol = 0.002;      ///< [pu / sqrt(s)]
    double dt_s = 0.1;           ///< sample spacing [s]
};

/// Everything the controller reads from the config file.
struct Config {
    BaseQuantities base{720e3, 700.0, 300.0, 50.0};
    ControlParams control{0.05, 0.1, 0.95, 1e-6};
    DroopConfig droop{};
    TTCParams battery{};
    OuParams trace{};
};

/// Load and fully validate a config file. Every invariant is enforced
/// here; errors name the dotted key (and line where applicable).
Config load_config(const std::string& path);
Config parse_config(const std::string& text, const std::string& origin);

/// Serialize a config back to the file format. parse(render(c)) == c.
std::string render_config(const Config& cfg);

}  // namespace bess
