#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "constants.hpp"
#include "errors.hpp"
#include "junction.hpp"
#include "nls.hpp"
#include "parallel.hpp"
#include "photon_assisted.hpp"

namespace qcrlab {

/// Measured current-voltage curve, optionally under a sinusoidal drive.
struct IvDataset {
    struct Drive {
        double V_ac = 0.0;
        double omega_ac = 0.0;
    };
    std::vector<double> v_dc;
    std::vector<double> current;
    std::optional<Drive> drive;

    void validate() const {
        require(v_dc.size() == current.size(), "voltage and current lengths differ");
        require(v_dc.size() >= 20, "IV dataset needs at least 20 points");
        for (std::size_t i = 1; i < v_dc.size(); ++i) require(v_dc[i] >= v_dc[i - 1], "v_dc must be sorted");
    }
};

enum class IvFitMode { DcOnly, NoiseDriven };

struct IvFitOptions {
    IvFitMode mode = IvFitMode::DcOnly;
    JunctionParams init;
    double V_ac_init = 0.0;
    double omega_ac = constants::two_pi * 3.6e9;

    bool fit_delta = true;
    bool fit_gamma_D = true;
    bool fit_R_T = true;
    bool fit_T_qp = true;
    bool fit_V_ac = true;  // noise-driven mode only

    double delta_min = 50.0 * constants::micro_eV;
    double delta_max = 400.0 * constants::micro_eV;
    double gamma_D_min = 1e-6;
    double gamma_D_max = 0.5;
    double R_T_min = 1e2;
    double R_T_max = 1e8;
    double T_qp_min = 0.010;
    double T_qp_max = 0.500;
    double V_ac_max = 5e-3;

    int starts = 5;
    double quad_tighten = 10.0;
    QuadratureConfig quad;
    NlsOptions nls{.tol = 1e-9, .max_iterations = 100, .throw_on_divergence = false};
};

/// Model currents at each bias point of `v_dc`.
inline std::vector<double> model_iv(std::span<const double> v_dc, const JunctionParams& junction,
                                    double V_ac, double omega_ac, const QuadratureConfig& quad) {
    std::vector<double> out(v_dc.size());
    DriveCondition drive{0.0, V_ac, omega_ac};
    parallel_for(v_dc.size(), [&](std::size_t i) {
        out[i] = tunneling_current(drive.with_dc(v_dc[i]), junction, quad);
    });
    return out;
}

namespace detail {

struct IvParameter {
    std::string name;
    bool log_scale;
    double unit;          // internal linear coordinate is value / unit
    double lower, upper;  // physical units
    std::function<double&(JunctionParams&, double&)> slot;

    double to_internal(double v) const { return log_scale ? std::log(v) : v / unit; }
    double to_physical(double u) const { return log_scale ? std::exp(u) : u * unit; }
};

}  // namespace detail

/// Extracts junction parameters (and optionally the ac amplitude) by bounded
/// least squares of the tunneling-current model against the data. Gap and
/// temperature are fitted linearly; Dynes parameter, resistance, and ac
/// amplitude in log space. Several deterministic starting points are tried and
/// the lowest residual wins.
inline FitResult fit_iv_curve(const IvDataset& data, const IvFitOptions& options) {
    data.validate();
    options.init.validate();
    require(options.starts >= 1, "at least one start required");
    const bool driven = options.mode == IvFitMode::NoiseDriven;
    if (driven) require(options.omega_ac > 0.0, "omega_ac must be positive in noise-driven mode");

    double v_max = 0.0;
    for (double v : data.v_dc) v_max = std::max(v_max, std::abs(v));
    if (options.fit_delta && constants::e * v_max <= options.init.delta) {
        throw Error(ErrorCode::DataOutOfRange,
                    "all bias points lie below the gap; delta is not identifiable");
    }

    std::vector<detail::IvParameter> params;
    auto add = [&](bool enabled, std::string name, bool log_scale, double lo, double hi,
                   std::function<double&(JunctionParams&, double&)> slot, double unit = 1.0) {
        if (enabled) params.push_back({std::move(name), log_scale, unit, lo, hi, std::move(slot)});
    };
    add(options.fit_delta, "delta", false, options.delta_min, options.delta_max,
        [](JunctionParams& j, double&) -> double& { return j.delta; }, constants::micro_eV);
    add(options.fit_gamma_D, "gamma_D", true, options.gamma_D_min, options.gamma_D_max,
        [](JunctionParams& j, double&) -> double& { return j.gamma_D; });
    add(options.fit_R_T, "R_T", true, options.R_T_min, options.R_T_max,
        [](JunctionParams& j, double&) -> double& { return j.R_T; });
    add(options.fit_T_qp, "T_qp", false, options.T_qp_min, options.T_qp_max,
        [](JunctionParams& j, double&) -> double& { return j.T_qp; });
    const double V_ac_floor = 1e-9;
    add(driven && options.fit_V_ac, "V_ac", true, V_ac_floor, options.V_ac_max,
        [](JunctionParams&, double& v) -> double& { return v; });
    require(!params.empty(), "no parameters selected for fitting");

    const auto n = static_cast<Eigen::Index>(params.size());
    Bounds bounds{Eigen::VectorXd(n), Eigen::VectorXd(n)};
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& p = params[static_cast<std::size_t>(i)];
        bounds.lower[i] = p.to_internal(p.lower);
        bounds.upper[i] = p.to_internal(p.upper);
    }

    const double init_V_ac = driven ? std::max(options.V_ac_init, V_ac_floor) : 0.0;
    auto unpack = [&](const Eigen::VectorXd& x, JunctionParams& j, double& V_ac) {
        j = options.init;
        V_ac = init_V_ac;
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto& p = params[static_cast<std::size_t>(i)];
            p.slot(j, V_ac) = p.to_physical(x[i]);
        }
    };

    double scale = 0.0;
    for (double c : data.current) scale = std::max(scale, std::abs(c));
    if (!(scale > 0.0)) scale = 1.0;
    const QuadratureConfig quad = options.quad.tightened(options.quad_tighten);
    const auto m = static_cast<Eigen::Index>(data.v_dc.size());
    auto residual = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
        JunctionParams j;
        double V_ac = 0.0;
        unpack(x, j, V_ac);
        const auto model = model_iv(data.v_dc, j, driven ? V_ac : 0.0, options.omega_ac, quad);
        Eigen::VectorXd r(m);
        for (Eigen::Index i = 0; i < m; ++i) {
            const auto k = static_cast<std::size_t>(i);
            r[i] = (model[k] - data.current[k]) / scale;
        }
        return r;
    };

    Eigen::VectorXd x0(n);
    {
        JunctionParams j = options.init;
        double V_ac = init_V_ac;
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto& p = params[static_cast<std::size_t>(i)];
            x0[i] = std::clamp(p.to_internal(p.slot(j, V_ac)), bounds.lower[i], bounds.upper[i]);
        }
    }

    std::optional<NlsResult> best;
    for (int s = 0; s < options.starts; ++s) {
        Eigen::VectorXd start = x0;
        if (s > 0) {
            // Additive-recurrence points in the box, pulled halfway toward the
            // user's initial guess.
            for (Eigen::Index i = 0; i < n; ++i) {
                const double golden = 0.6180339887498949 + 0.1 * static_cast<double>(i);
                const double u = std::fmod(0.5 + s * golden, 1.0);
                const double spread = bounds.lower[i] + u * (bounds.upper[i] - bounds.lower[i]);
                start[i] = 0.5 * (x0[i] + spread);
            }
        }
        auto r = nls_minimize(residual, start, bounds, options.nls);
        if (!best || r.residual_norm < best->residual_norm) best = std::move(r);
    }
    if (!best->converged) {
        throw Error(ErrorCode::FitDiverged, "IV fit did not converge from any start");
    }

    FitResult out;
    JunctionParams j;
    double V_ac = 0.0;
    unpack(best->x, j, V_ac);
    out.params = {{"delta", j.delta}, {"gamma_D", j.gamma_D}, {"R_T", j.R_T}, {"T_qp", j.T_qp}};
    out.sigma = {{"delta", 0.0}, {"gamma_D", 0.0}, {"R_T", 0.0}, {"T_qp", 0.0}};
    if (driven) {
        out.params["V_ac"] = V_ac;
        out.sigma["V_ac"] = 0.0;
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& p = params[static_cast<std::size_t>(i)];
        const double value = out.params[p.name];
        out.sigma[p.name] = p.log_scale ? value * best->sigma[i] : best->sigma[i] * p.unit;
    }
    out.residual_norm = best->residual_norm * scale;
    out.initial_residual_norm = best->initial_residual_norm * scale;
    out.converged = best->converged;
    out.singular_jacobian = best->singular_jacobian;
    out.iterations = best->iterations;
    return out;
}

}  // namespace qcrlab
