#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "config.hpp"
#include "csv.hpp"
#include "errors.hpp"
#include "parallel.hpp"
#include "photon_assisted.hpp"
#include "resonator.hpp"
#include "units.hpp"
#include "version.hpp"

namespace qcrlab {

/// Drive settings on top of a device config. Powers are incident at the
/// junction (p_noise) or at the resonator driveline (p_in), in W.
struct DriveSettings {
    double v_dc = 0.0;
    double p_noise = 0.0;
    std::optional<double> v_ac;  // overrides p_noise when set
    std::optional<double> omega_ac;  // linear frequency, Hz; defaults to the AFM noise center
    double p_in = 0.0;

    static bool is_drive_key(std::string_view key) {
        return key == "v_dc" || key == "v_ac" || key == "p_noise" || key == "omega_ac" || key == "p_in";
    }

    void set(std::string_view key, std::string_view value) {
        using units::Dimension;
        if (key == "v_dc") v_dc = units::parse(value, Dimension::Voltage);
        else if (key == "v_ac") v_ac = units::parse(value, Dimension::Voltage);
        else if (key == "p_noise") p_noise = units::parse(value, Dimension::Power);
        else if (key == "omega_ac") omega_ac = units::parse(value, Dimension::Frequency);
        else if (key == "p_in") p_in = units::parse(value, Dimension::Power);
        else throw Error(ErrorCode::InvalidArgument, "unknown drive key '" + std::string(key) + "'");
    }

    DriveCondition drive(const DeviceConfig& cfg) const {
        DriveCondition d;
        d.V_dc = v_dc;
        d.V_ac = v_ac ? *v_ac : vac_from_power(p_noise, cfg.z_0);
        d.omega_ac = constants::two_pi * omega_ac.value_or(cfg.omega_n_afm);
        d.validate();
        return d;
    }
};

enum class SweepVariable { VDc, PNoise, PIn };

/// `VAR:START:STOP:N` with VAR one of v_dc, p_noise, p_in. Power sweeps are
/// spaced evenly in dBm.
struct SweepSpec {
    SweepVariable variable = SweepVariable::VDc;
    double start = 0.0;  // V for v_dc, dBm for powers
    double stop = 400e-6;
    int points = 201;
    std::vector<std::string> outputs;

    static SweepSpec parse(std::string_view text) {
        std::vector<std::string_view> parts;
        std::size_t begin = 0;
        while (true) {
            const auto colon = text.find(':', begin);
            parts.push_back(text.substr(begin, colon - begin));
            if (colon == std::string_view::npos) break;
            begin = colon + 1;
        }
        if (parts.size() != 4) throw Error(ErrorCode::InvalidArgument, "sweep must be VAR:START:STOP:N");
        SweepSpec s;
        const auto var = units::trim(parts[0]);
        auto power_dbm = [](std::string_view v) {
            if (units::is_dbm(v)) return units::split_quantity(v).value;
            return watt_to_dbm(units::parse(v, units::Dimension::Power));
        };
        if (var == "v_dc") {
            s.variable = SweepVariable::VDc;
            s.start = units::parse(parts[1], units::Dimension::Voltage);
            s.stop = units::parse(parts[2], units::Dimension::Voltage);
        } else if (var == "p_noise" || var == "p_in") {
            s.variable = var == "p_noise" ? SweepVariable::PNoise : SweepVariable::PIn;
            s.start = power_dbm(parts[1]);
            s.stop = power_dbm(parts[2]);
        } else {
            throw Error(ErrorCode::InvalidArgument, "unknown sweep variable '" + std::string(var) + "'");
        }
        const double n = units::parse_number(parts[3]);
        if (n != std::floor(n)) throw Error(ErrorCode::InvalidArgument, "sweep point count must be an integer");
        s.points = static_cast<int>(n);
        s.validate();
        return s;
    }

    void validate() const {
        require(points >= 2, "sweep needs at least 2 points");
        require(start < stop, "sweep start must be below stop");
    }

    double value(int i) const { return start + (stop - start) * i / (points - 1); }

    std::string column() const {
        switch (variable) {
            case SweepVariable::VDc: return "v_dc_V";
            case SweepVariable::PNoise: return "p_noise_dBm";
            case SweepVariable::PIn: return "p_in_dBm";
        }
        return "";
    }

    std::vector<std::string> effective_outputs() const {
        if (!outputs.empty()) return outputs;
        switch (variable) {
            case SweepVariable::VDc: return {"current_A"};
            case SweepVariable::PNoise: return {"gamma_qcr_hz", "t_qcr_K", "n_bar", "t_eff_mK"};
            case SweepVariable::PIn: return {"n_coherent", "gamma_total_hz"};
        }
        return {};
    }
};

inline const std::vector<std::string>& known_observables() {
    static const std::vector<std::string> names = {"current_A", "gamma_qcr_hz", "t_qcr_K", "n_bar",
                                                   "t_eff_mK",  "n_coherent",   "gamma_total_hz"};
    return names;
}

/// Evaluates the requested observables at every sweep point. Points run in
/// parallel; rows come out in sweep order. The table carries the tool version
/// and the config fingerprint as metadata.
inline csv::Table run_sweep(const DeviceConfig& config, const SweepSpec& spec, const DriveSettings& fixed,
                            const QuadratureConfig& quad) {
    config.validate();
    spec.validate();
    quad.validate();
    const auto outputs = spec.effective_outputs();
    for (const auto& o : outputs) {
        if (std::find(known_observables().begin(), known_observables().end(), o) == known_observables().end()) {
            throw Error(ErrorCode::InvalidArgument, "unknown output '" + o + "'");
        }
    }
    auto wants = [&](std::string_view name) {
        return std::find(outputs.begin(), outputs.end(), name) != outputs.end();
    };
    const bool need_current = wants("current_A");
    const bool need_rates = wants("gamma_qcr_hz") || wants("t_qcr_K") || wants("n_bar") || wants("t_eff_mK") ||
                            wants("n_coherent") || wants("gamma_total_hz");

    const JunctionParams junction = config.junction();
    const ResonatorParams resonator = config.resonator();

    csv::Table table;
    table.metadata.push_back(std::string("qcrlab ") + kVersion);
    table.metadata.push_back("config_hash " + config_hash(config));
    table.columns.push_back(spec.column());
    table.columns.insert(table.columns.end(), outputs.begin(), outputs.end());
    table.rows.resize(static_cast<std::size_t>(spec.points));

    parallel_for(table.rows.size(), [&](std::size_t i) {
        const double x = spec.value(static_cast<int>(i));
        DriveSettings settings = fixed;
        switch (spec.variable) {
            case SweepVariable::VDc: settings.v_dc = x; break;
            case SweepVariable::PNoise:
                settings.p_noise = dbm_to_watt(x);
                settings.v_ac.reset();
                break;
            case SweepVariable::PIn: settings.p_in = dbm_to_watt(x); break;
        }
        const DriveCondition drive = settings.drive(config);
        double current = 0.0;
        if (need_current) current = tunneling_current(drive, junction, quad);
        QcrRates rates;
        if (need_rates) rates = qcr_rates(drive, junction, resonator, quad);
        const double gamma = rates.gamma();
        const auto t_bath = temperature_from_rates(rates, resonator.omega_R);

        std::vector<double> row{x};
        for (const auto& o : outputs) {
            if (o == "current_A") {
                row.push_back(current);
            } else if (o == "gamma_qcr_hz") {
                row.push_back(gamma / constants::two_pi);
            } else if (o == "gamma_total_hz") {
                row.push_back((gamma + resonator.gamma_c()) / constants::two_pi);
            } else if (o == "t_qcr_K") {
                row.push_back(t_bath.kelvin);
            } else if (o == "n_bar" || o == "t_eff_mK") {
                const double n = (rates.emit + resonator.n_c * resonator.gamma_c()) / (gamma + resonator.gamma_c());
                row.push_back(o == "n_bar" ? n : 1e3 * temp_from_occupation(n, resonator.omega_R));
            } else if (o == "n_coherent") {
                row.push_back(coherent_population(settings.p_in, gamma, resonator));
            }
        }
        table.rows[i] = std::move(row);
    });
    return table;
}

}  // namespace qcrlab
