// qcrlab command-line front end.
//
// Exit codes: 0 success, 1 validation or usage error, 2 numerical failure.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <qcrlab/qcrlab.hpp>

namespace {

using namespace qcrlab;

struct CommonOptions {
    std::string config_path;
    std::string output = "-";
    std::vector<std::string> fixes;
    double tol = 0.0;
};

struct Context {
    DeviceConfig config;
    DriveSettings drive;
    QuadratureConfig quad;
};

Context make_context(const CommonOptions& opt) {
    Context ctx;
    if (!opt.config_path.empty()) ctx.config = DeviceConfig::load(opt.config_path);
    for (const auto& fix : opt.fixes) {
        const auto eq = fix.find('=');
        if (eq == std::string::npos) throw Error(ErrorCode::InvalidArgument, "--fix expects KEY=VALUE, got '" + fix + "'");
        const std::string key(units::trim(std::string_view(fix).substr(0, eq)));
        const std::string value = fix.substr(eq + 1);
        if (DriveSettings::is_drive_key(key)) {
            ctx.drive.set(key, value);
        } else {
            ctx.config.set(key, value);
        }
    }
    ctx.config.validate();
    if (opt.tol > 0.0) ctx.quad.rel_tol = opt.tol;
    ctx.quad.validate();
    return ctx;
}

std::string command_line(int argc, char** argv) {
    std::string out = "qcrlab";
    for (int i = 1; i < argc; ++i) {
        out += ' ';
        out += argv[i];
    }
    return out;
}

class Output {
public:
    explicit Output(const std::string& path) {
        if (path != "-") {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_) throw Error(ErrorCode::InvalidArgument, "cannot write '" + path + "'");
        }
    }
    std::ostream& stream() { return file_ ? *file_ : std::cout; }

private:
    std::unique_ptr<std::ofstream> file_;
};

void add_common(CLI::App* cmd, CommonOptions& opt) {
    cmd->add_option("--config", opt.config_path, "Device config file (default: built-in parameter table)");
    cmd->add_option("--output,-o", opt.output, "Output path, '-' for standard output");
    cmd->add_option("--fix", opt.fixes, "Override KEY=VALUE (config or drive key; units required)");
    cmd->add_option("--tol", opt.tol, "Relative quadrature tolerance");
}

struct NamedRow {
    std::string name;
    double value;
    double sigma;
    std::string unit;
};

void write_named(std::ostream& out, const std::vector<std::string>& metadata, const std::vector<NamedRow>& rows) {
    for (const auto& m : metadata) out << "# " << m << '\n';
    out << "parameter,value,sigma,unit\n";
    for (const auto& r : rows) {
        out << r.name << ',' << csv::format_value(r.value) << ',' << csv::format_value(r.sigma) << ',' << r.unit
            << '\n';
    }
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto t = units::trim(item);
        if (!t.empty()) out.emplace_back(t);
    }
    return out;
}

DistributionFamily parse_family(const std::string& name) {
    if (name == "thermal") return DistributionFamily::Thermal;
    if (name == "poisson") return DistributionFamily::Poisson;
    throw Error(ErrorCode::InvalidArgument, "family must be 'thermal' or 'poisson'");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"qcrlab: noise-driven quantum-circuit refrigerator models and fits"};
    app.require_subcommand(1);
    const std::string cmdline = command_line(argc, argv);

    // iv
    CommonOptions iv_opt;
    std::string iv_sweep = "v_dc:0V:400uV:201";
    auto* iv = app.add_subcommand("iv", "Tunneling current versus dc bias (IV CSV)");
    add_common(iv, iv_opt);
    iv->add_option("--sweep", iv_sweep, "v_dc:START:STOP:N");

    // sweep
    CommonOptions sw_opt;
    std::string sw_sweep;
    std::string sw_outputs;
    auto* sw = app.add_subcommand("sweep", "Observables over a v_dc, p_noise, or p_in sweep");
    add_common(sw, sw_opt);
    sw->add_option("--sweep", sw_sweep, "VAR:START:STOP:N")->required();
    sw->add_option("--outputs", sw_outputs,
                   "Comma list of current_A, gamma_qcr_hz, gamma_total_hz, t_qcr_K, n_bar, t_eff_mK, n_coherent");

    // fit-iv
    CommonOptions fi_opt;
    std::string fi_data;
    std::string fi_mode = "dc_only";
    std::string fi_free;
    int fi_starts = 5;
    auto* fi = app.add_subcommand("fit-iv", "Fit junction parameters to an IV CSV");
    add_common(fi, fi_opt);
    fi->add_option("--data", fi_data, "IV CSV with columns v_dc_volts,current_amps")->required();
    fi->add_option("--mode", fi_mode, "dc_only or noise_driven")->check(CLI::IsMember({"dc_only", "noise_driven"}));
    fi->add_option("--free", fi_free, "Comma list of fitted parameters: delta,gamma_d,r_t,t_qp,v_ac");
    fi->add_option("--starts", fi_starts, "Number of deterministic starting points")->check(CLI::PositiveNumber);

    // fit-spectrum
    CommonOptions fs_opt;
    std::string fs_data;
    std::string fs_family = "thermal";
    std::string fs_spacing;
    std::string fs_linewidth = "0.5 MHz";
    double fs_init = 1.0;
    auto* fs = app.add_subcommand("fit-spectrum", "Fit a thermal or Poisson population to a qubit spectrum");
    add_common(fs, fs_opt);
    fs->add_option("--data", fs_data, "Spectrum CSV with columns detuning_hz,magnitude")->required();
    fs->add_option("--family", fs_family, "thermal or poisson");
    fs->add_option("--spacing", fs_spacing, "Peak spacing per photon (default 2 chi_r)");
    fs->add_option("--linewidth", fs_linewidth, "Peak FWHM");
    fs->add_option("--init", fs_init, "Initial mean photon number")->check(CLI::PositiveNumber);

    // synth-spectrum
    CommonOptions ss_opt;
    std::string ss_family = "thermal";
    double ss_nbar = 1.0;
    std::string ss_spacing;
    std::string ss_linewidth = "0.5 MHz";
    std::string ss_step;
    double ss_noise = 0.0;
    double ss_baseline = 0.0;
    std::uint64_t ss_seed = 1;
    auto* ss = app.add_subcommand("synth-spectrum", "Synthesize a qubit spectrum for a photon distribution");
    add_common(ss, ss_opt);
    ss->add_option("--family", ss_family, "thermal or poisson");
    ss->add_option("--nbar", ss_nbar, "Mean photon number")->check(CLI::NonNegativeNumber);
    ss->add_option("--spacing", ss_spacing, "Peak spacing per photon (default 2 chi_r)");
    ss->add_option("--linewidth", ss_linewidth, "Peak FWHM");
    ss->add_option("--step", ss_step, "Detuning grid step (default linewidth/8)");
    ss->add_option("--noise", ss_noise, "Gaussian noise, fraction of the largest magnitude")->check(CLI::NonNegativeNumber);
    ss->add_option("--baseline", ss_baseline, "Constant background");
    ss->add_option("--seed", ss_seed, "Noise seed");

    // convert
    CommonOptions cv_opt;
    std::string cv_nbar, cv_temp, cv_power, cv_freq;
    auto* cv = app.add_subcommand("convert", "Unit conversions: nbar<->T, dBm<->W, P_N->V_ac");
    add_common(cv, cv_opt);
    cv->add_option("--nbar", cv_nbar, "Mean occupation to convert to temperature");
    cv->add_option("--temp", cv_temp, "Temperature to convert to occupation");
    cv->add_option("--power", cv_power, "Power (dBm or W) to convert and map to V_ac via z_0");
    cv->add_option("--freq", cv_freq, "Mode frequency for nbar<->T (default omega_r)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*iv) {
            auto ctx = make_context(iv_opt);
            auto spec = SweepSpec::parse(iv_sweep);
            if (spec.variable != SweepVariable::VDc) throw Error(ErrorCode::InvalidArgument, "iv sweeps v_dc only");
            spec.outputs = {"current_A"};
            auto table = run_sweep(ctx.config, spec, ctx.drive, ctx.quad);
            table.columns = csv::kIvColumns;
            table.metadata.push_back("command " + cmdline);
            Output out(iv_opt.output);
            csv::write(out.stream(), table);
        } else if (*sw) {
            auto ctx = make_context(sw_opt);
            auto spec = SweepSpec::parse(sw_sweep);
            spec.outputs = split_list(sw_outputs);
            auto table = run_sweep(ctx.config, spec, ctx.drive, ctx.quad);
            table.metadata.push_back("command " + cmdline);
            Output out(sw_opt.output);
            csv::write(out.stream(), table);
        } else if (*fi) {
            auto ctx = make_context(fi_opt);
            const auto data = csv::parse_iv(csv::read_file(fi_data));
            IvFitOptions options;
            options.mode = fi_mode == "noise_driven" ? IvFitMode::NoiseDriven : IvFitMode::DcOnly;
            options.init = ctx.config.junction();
            options.quad = ctx.quad;
            options.starts = fi_starts;
            const auto drive = ctx.drive.drive(ctx.config);
            options.V_ac_init = drive.V_ac;
            options.omega_ac = drive.omega_ac;
            if (!fi_free.empty()) {
                const auto names = split_list(fi_free);
                auto has = [&](const char* n) { return std::find(names.begin(), names.end(), n) != names.end(); };
                for (const auto& n : names) {
                    if (n != "delta" && n != "gamma_d" && n != "r_t" && n != "t_qp" && n != "v_ac") {
                        throw Error(ErrorCode::InvalidArgument, "unknown fit parameter '" + n + "'");
                    }
                }
                options.fit_delta = has("delta");
                options.fit_gamma_D = has("gamma_d");
                options.fit_R_T = has("r_t");
                options.fit_T_qp = has("t_qp");
                options.fit_V_ac = has("v_ac");
            }
            const auto fit = fit_iv_curve(data, options);
            std::vector<NamedRow> rows = {
                {"delta", fit.value("delta") / constants::micro_eV, fit.error("delta") / constants::micro_eV, "ueV"},
                {"gamma_d", fit.value("gamma_D"), fit.error("gamma_D"), "1"},
                {"r_t", fit.value("R_T"), fit.error("R_T"), "Ohm"},
                {"t_qp", fit.value("T_qp"), fit.error("T_qp"), "K"},
            };
            if (fit.params.count("V_ac")) rows.push_back({"v_ac", fit.value("V_ac"), fit.error("V_ac"), "V"});
            Output out(fi_opt.output);
            write_named(out.stream(),
                        {std::string("qcrlab ") + kVersion, "command " + cmdline,
                         "residual_norm_A " + csv::format_value(fit.residual_norm),
                         std::string("converged ") + (fit.converged ? "true" : "false"),
                         "iterations " + std::to_string(fit.iterations)},
                        rows);
        } else if (*fs) {
            auto ctx = make_context(fs_opt);
            const auto trace = csv::parse_spectrum(csv::read_file(fs_data));
            const double spacing = fs_spacing.empty() ? 2.0 * ctx.config.chi_r
                                                      : units::parse(fs_spacing, units::Dimension::Frequency);
            const double width = units::parse(fs_linewidth, units::Dimension::Frequency);
            const int n_max = ctx.config.n_max;
            const auto peaks = PeakModel::uniform(spacing, width, n_max);
            const auto family = parse_family(fs_family);
            const auto weights = extract_peak_weights(trace, peaks, n_max);
            if (weights.degenerate) throw Error(ErrorCode::PeaksNotResolved, "no spectral weight found in trace");
            const auto fit = fit_population(trace, family, peaks, n_max, fs_init);
            const double omega = constants::two_pi * ctx.config.omega_r;
            const double n_bar = fit.value("n_bar");
            const double t_eff = n_bar > 0.0 ? temp_from_occupation(n_bar, omega) : 0.0;
            // dT/dn for the uncertainty of the effective temperature.
            const double x = constants::hbar * omega / (constants::k_B * t_eff);
            const double dT_dn = n_bar > 0.0 ? t_eff / (x * n_bar * (n_bar + 1.0)) : 0.0;
            std::vector<NamedRow> rows = {
                {"n_bar", n_bar, fit.error("n_bar"), "1"},
                {"t_eff", t_eff, dT_dn * fit.error("n_bar"), "K"},
                {"scale", fit.value("scale"), fit.error("scale"), "1"},
                {"baseline", fit.value("baseline"), fit.error("baseline"), "1"},
            };
            for (std::size_t n = 0; n < weights.weights.size(); ++n) {
                rows.push_back({"weight_" + std::to_string(n), weights.weights[n], 0.0, "1"});
            }
            Output out(fs_opt.output);
            write_named(out.stream(),
                        {std::string("qcrlab ") + kVersion, "command " + cmdline,
                         std::string("family ") + std::string(to_string(family)),
                         "residual_norm " + csv::format_value(fit.residual_norm),
                         std::string("converged ") + (fit.converged ? "true" : "false")},
                        rows);
        } else if (*ss) {
            auto ctx = make_context(ss_opt);
            const double spacing = ss_spacing.empty() ? 2.0 * ctx.config.chi_r
                                                      : units::parse(ss_spacing, units::Dimension::Frequency);
            const double width = units::parse(ss_linewidth, units::Dimension::Frequency);
            const double step = ss_step.empty() ? width / 8.0 : units::parse(ss_step, units::Dimension::Frequency);
            const int n_max = ctx.config.n_max;
            const auto peaks = PeakModel::uniform(spacing, width, n_max, ss_baseline);
            const auto dist = make_distribution(parse_family(ss_family), ss_nbar, n_max);
            const auto grid = detuning_grid(peaks, n_max, step);
            auto trace = synthesize_spectrum(dist, peaks, grid);
            if (ss_noise > 0.0) {
                const double peak = *std::max_element(trace.magnitude.begin(), trace.magnitude.end());
                std::mt19937_64 rng(ss_seed);
                std::normal_distribution<double> noise(0.0, ss_noise * peak);
                for (double& m : trace.magnitude) m += noise(rng);
            }
            auto table = csv::spectrum_table(trace);
            table.metadata = {std::string("qcrlab ") + kVersion, "command " + cmdline};
            Output out(ss_opt.output);
            csv::write(out.stream(), table);
        } else if (*cv) {
            auto ctx = make_context(cv_opt);
            const double freq = cv_freq.empty() ? ctx.config.omega_r : units::parse(cv_freq, units::Dimension::Frequency);
            const double omega = constants::two_pi * freq;
            std::vector<std::vector<std::string>> rows;
            if (!cv_nbar.empty()) {
                const double n = units::parse(cv_nbar, units::Dimension::Dimensionless);
                rows.push_back({"temperature", csv::format_value(temp_from_occupation(n, omega)), "K"});
            }
            if (!cv_temp.empty()) {
                const double t = units::parse(cv_temp, units::Dimension::Temperature);
                rows.push_back({"nbar", csv::format_value(bose_occupation(t, omega)), "1"});
            }
            if (!cv_power.empty()) {
                const double p = units::parse(cv_power, units::Dimension::Power);
                rows.push_back({"power", csv::format_value(p), "W"});
                if (p > 0.0) rows.push_back({"power_dbm", csv::format_value(watt_to_dbm(p)), "dBm"});
                rows.push_back({"v_ac", csv::format_value(vac_from_power(p, ctx.config.z_0)), "V"});
            }
            if (rows.empty()) throw Error(ErrorCode::InvalidArgument, "convert needs --nbar, --temp, or --power");
            Output out(cv_opt.output);
            out.stream() << "quantity,value,unit\n";
            for (const auto& r : rows) out.stream() << r[0] << ',' << r[1] << ',' << r[2] << '\n';
        }
    } catch (const Error& e) {
        std::cerr << "qcrlab: " << e.what() << '\n';
        return e.is_validation() ? 1 : 2;
    } catch (const std::exception& e) {
        std::cerr << "qcrlab: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
