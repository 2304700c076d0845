#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "constants.hpp"
#include "errors.hpp"
#include "junction.hpp"
#include "resonator_params.hpp"
#include "units.hpp"

namespace qcrlab {

/// Device description. Frequencies and rates are stored as linear
/// frequencies (omega / 2 pi, Hz) exactly as quoted in the parameter table and
/// converted to angular units by the accessors.
struct DeviceConfig {
    double omega_r = 4.671e9;
    double omega_q = 3.953e9;
    double omega_ro = 7.436e9;
    double alpha = -275e6;
    double chi_r = 2.2e6;
    double chi_ro = 0.6e6;
    double g_r = 76e6;
    double g_ro = 169e6;
    double delta = 203.0 * constants::micro_eV;
    double gamma_dr = 1.1e6;
    double gamma_0 = 1.3e6;
    double gamma_d = 1.96e-3;
    double r_t = 29.4e3;
    double c_nis = 0.54e-15;
    double z_0 = 50.0;
    double omega_n_afm = 3.6e9;
    double omega_n_vfm = 3.2e9;
    // Smallest round value for which the population at -70 dBm, 3.2 GHz is <= 0.25.
    double rho = 2.0e-2;
    double n_c = 0.92;
    double t_qp = 0.060;
    int n_max = 9;

    JunctionParams junction() const { return {delta, gamma_d, r_t, t_qp}; }

    ResonatorParams resonator() const {
        return {constants::two_pi * omega_r, constants::two_pi * gamma_dr, constants::two_pi * gamma_0,
                rho, n_c, n_max};
    }

    void validate() const {
        junction().validate();
        resonator().validate();
        require(z_0 > 0.0, "z_0 must be positive");
        require(omega_n_afm > 0.0 && omega_n_vfm > 0.0, "noise center frequencies must be positive");
    }

    bool operator==(const DeviceConfig&) const = default;

    /// Canonical text form in base SI units; parse(serialize()) == *this.
    std::string serialize() const;
    static DeviceConfig parse(std::string_view text);
    static DeviceConfig load(const std::string& path);

    /// Applies a single `key=value` (or `key: value`) assignment.
    void set(std::string_view key, std::string_view value);
};

namespace detail {

struct ConfigKey {
    std::string_view name;
    units::Dimension dim;
    double DeviceConfig::*field;
    std::string_view base_unit;
};

inline const std::vector<ConfigKey>& config_keys() {
    using D = units::Dimension;
    static const std::vector<ConfigKey> keys = {
        {"omega_r", D::Frequency, &DeviceConfig::omega_r, "Hz"},
        {"omega_q", D::Frequency, &DeviceConfig::omega_q, "Hz"},
        {"omega_ro", D::Frequency, &DeviceConfig::omega_ro, "Hz"},
        {"alpha", D::Frequency, &DeviceConfig::alpha, "Hz"},
        {"chi_r", D::Frequency, &DeviceConfig::chi_r, "Hz"},
        {"chi_ro", D::Frequency, &DeviceConfig::chi_ro, "Hz"},
        {"g_r", D::Frequency, &DeviceConfig::g_r, "Hz"},
        {"g_ro", D::Frequency, &DeviceConfig::g_ro, "Hz"},
        {"delta", D::Energy, &DeviceConfig::delta, "J"},
        {"gamma_dr", D::Frequency, &DeviceConfig::gamma_dr, "Hz"},
        {"gamma_0", D::Frequency, &DeviceConfig::gamma_0, "Hz"},
        {"gamma_d", D::Dimensionless, &DeviceConfig::gamma_d, ""},
        {"r_t", D::Resistance, &DeviceConfig::r_t, "Ohm"},
        {"c_nis", D::Capacitance, &DeviceConfig::c_nis, "F"},
        {"z_0", D::Resistance, &DeviceConfig::z_0, "Ohm"},
        {"omega_n_afm", D::Frequency, &DeviceConfig::omega_n_afm, "Hz"},
        {"omega_n_vfm", D::Frequency, &DeviceConfig::omega_n_vfm, "Hz"},
        {"rho", D::Dimensionless, &DeviceConfig::rho, ""},
        {"n_c", D::Dimensionless, &DeviceConfig::n_c, ""},
        {"t_qp", D::Temperature, &DeviceConfig::t_qp, "K"},
    };
    return keys;
}

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace detail

inline void DeviceConfig::set(std::string_view key, std::string_view value) {
    key = units::trim(key);
    if (key == "n_max") {
        const double v = units::parse(value, units::Dimension::Dimensionless);
        if (v != std::floor(v)) throw Error(ErrorCode::InvalidArgument, "n_max must be an integer");
        n_max = static_cast<int>(v);
        return;
    }
    for (const auto& k : detail::config_keys()) {
        if (k.name == key) {
            this->*k.field = units::parse(value, k.dim);
            return;
        }
    }
    throw Error(ErrorCode::ConfigInvalid, "unknown key '" + std::string(key) + "'");
}

inline std::string DeviceConfig::serialize() const {
    std::ostringstream out;
    for (const auto& k : detail::config_keys()) {
        out << k.name << ": " << detail::format_double(this->*k.field);
        if (!k.base_unit.empty()) out << ' ' << k.base_unit;
        out << '\n';
    }
    out << "n_max: " << n_max << '\n';
    return out.str();
}

/// Reads `key: value unit` lines; '#' starts a comment. Keys left out keep
/// their defaults. All problems are collected into one ConfigInvalid error.
inline DeviceConfig DeviceConfig::parse(std::string_view text) {
    DeviceConfig cfg;
    std::vector<std::string> seen;
    std::string problems;
    std::size_t line_no = 0;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view = line;
        if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
        view = units::trim(view);
        if (view.empty()) continue;
        const auto colon = view.find(':');
        if (colon == std::string_view::npos) {
            problems += "line " + std::to_string(line_no) + ": expected 'key: value'\n";
            continue;
        }
        const std::string key(units::trim(view.substr(0, colon)));
        if (std::find(seen.begin(), seen.end(), key) != seen.end()) {
            problems += "line " + std::to_string(line_no) + " (" + key + "): duplicate key\n";
            continue;
        }
        seen.push_back(key);
        try {
            cfg.set(key, view.substr(colon + 1));
        } catch (const Error& e) {
            problems += "line " + std::to_string(line_no) + " (" + key + "): " + e.what() + "\n";
        }
    }
    if (problems.empty()) {
        try {
            cfg.validate();
        } catch (const Error& e) {
            problems += e.what();
        }
    }
    if (!problems.empty()) throw Error(ErrorCode::ConfigInvalid, problems);
    return cfg;
}

inline DeviceConfig DeviceConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ConfigInvalid, "cannot open config file '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse(buffer.str());
}

/// 64-bit FNV-1a, used to fingerprint configurations in output headers.
inline std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string config_hash(const DeviceConfig& cfg) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(cfg.serialize())));
    return buf;
}

}  // namespace qcrlab
