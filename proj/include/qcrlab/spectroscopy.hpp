#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>
#include <Eigen/Dense>

#include "errors.hpp"
#include "nls.hpp"

namespace qcrlab {

enum class DistributionFamily { Thermal, Poisson, Empirical };

inline std::string_view to_string(DistributionFamily f) {
    switch (f) {
        case DistributionFamily::Thermal: return "thermal";
        case DistributionFamily::Poisson: return "poisson";
        case DistributionFamily::Empirical: return "empirical";
    }
    return "unknown";
}

/// Photon-number distribution truncated at n_max; `tail` is the probability
/// mass above n_max, so sum(probs) + tail == 1.
struct FockDistribution {
    std::vector<double> probs;
    DistributionFamily family = DistributionFamily::Empirical;
    double mean = 0.0;
    double tail = 0.0;

    int n_max() const { return static_cast<int>(probs.size()) - 1; }
    double sum() const { return std::accumulate(probs.begin(), probs.end(), 0.0); }
};

/// Bose-Einstein (thermal) distribution p(n) = nbar^n / (nbar + 1)^(n + 1).
inline FockDistribution thermal_distribution(double n_bar, int n_max) {
    require(std::isfinite(n_bar) && n_bar >= 0.0, "mean population must be nonnegative");
    require(n_max >= 0, "n_max must be nonnegative");
    FockDistribution d;
    d.family = DistributionFamily::Thermal;
    d.mean = n_bar;
    const double ratio = n_bar / (n_bar + 1.0);
    double p = 1.0 / (n_bar + 1.0);
    d.probs.reserve(static_cast<std::size_t>(n_max) + 1);
    for (int n = 0; n <= n_max; ++n) {
        d.probs.push_back(p);
        p *= ratio;
    }
    d.tail = std::pow(ratio, n_max + 1);
    return d;
}

/// Poisson distribution of a coherent state, p(n) = exp(-nbar) nbar^n / n!.
inline FockDistribution poisson_distribution(double n_bar, int n_max) {
    require(std::isfinite(n_bar) && n_bar >= 0.0, "mean population must be nonnegative");
    require(n_max >= 0, "n_max must be nonnegative");
    FockDistribution d;
    d.family = DistributionFamily::Poisson;
    d.mean = n_bar;
    double p = std::exp(-n_bar);
    d.probs.reserve(static_cast<std::size_t>(n_max) + 1);
    for (int n = 0; n <= n_max; ++n) {
        d.probs.push_back(p);
        p *= n_bar / (n + 1);
    }
    // P(N > n_max) is the regularized lower incomplete gamma P(n_max + 1, nbar).
    d.tail = n_bar == 0.0 ? 0.0 : boost::math::gamma_p(static_cast<double>(n_max) + 1.0, n_bar);
    return d;
}

inline FockDistribution make_distribution(DistributionFamily family, double n_bar, int n_max) {
    switch (family) {
        case DistributionFamily::Thermal: return thermal_distribution(n_bar, n_max);
        case DistributionFamily::Poisson: return poisson_distribution(n_bar, n_max);
        case DistributionFamily::Empirical: break;
    }
    throw Error(ErrorCode::InvalidArgument, "empirical distributions have no parametric form");
}

/// Measured qubit spectrum: magnitude versus probe detuning (Hz).
struct SpectrumTrace {
    std::vector<double> detuning;
    std::vector<double> magnitude;

    void validate() const {
        require(detuning.size() == magnitude.size(), "detuning and magnitude lengths differ");
        require(detuning.size() >= 16, "spectrum needs at least 16 points");
        for (std::size_t i = 1; i < detuning.size(); ++i) {
            require(detuning[i] > detuning[i - 1], "detuning must be strictly increasing");
        }
    }
};

/// Equidistant Lorentzian lines: Fock state n sits at detuning -n * spacing.
/// Linewidths are full widths at half maximum, all in Hz.
struct PeakModel {
    double spacing = 4.4e6;
    std::vector<double> linewidths;
    double baseline = 0.0;

    static PeakModel uniform(double spacing, double linewidth, int n_max, double baseline = 0.0) {
        return {spacing, std::vector<double>(static_cast<std::size_t>(n_max) + 1, linewidth), baseline};
    }

    void validate(int n_max) const {
        require(spacing > 0.0, "peak spacing must be positive");
        require(static_cast<int>(linewidths.size()) >= n_max + 1, "one linewidth per Fock state required");
        for (double w : linewidths) require(w > 0.0, "linewidths must be positive");
    }

    double line(int n, double detuning) const {
        const double x = 2.0 * (detuning + n * spacing) / linewidths[static_cast<std::size_t>(n)];
        return 1.0 / (1.0 + x * x);
    }
};

/// Evenly spaced detuning grid covering peaks 0..n_max with half a spacing of margin.
inline std::vector<double> detuning_grid(const PeakModel& peaks, int n_max, double step) {
    require(step > 0.0, "grid step must be positive");
    const double lo = -(n_max + 0.5) * peaks.spacing;
    const double hi = 0.5 * peaks.spacing;
    const auto count = static_cast<std::size_t>(std::ceil((hi - lo) / step)) + 1;
    std::vector<double> grid(count);
    for (std::size_t i = 0; i < count; ++i) grid[i] = lo + static_cast<double>(i) * step;
    return grid;
}

inline SpectrumTrace synthesize_spectrum(const FockDistribution& dist, const PeakModel& peaks,
                                         std::span<const double> grid) {
    const int n_max = dist.n_max();
    peaks.validate(n_max);
    require(grid.size() >= 16, "grid needs at least 16 points");
    require(grid.front() <= -(n_max + 0.5) * peaks.spacing && grid.back() >= 0.5 * peaks.spacing,
            "grid must cover [-(n_max + 0.5) spacing, 0.5 spacing]");
    const double min_width = *std::min_element(peaks.linewidths.begin(), peaks.linewidths.begin() + n_max + 1);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (grid[i] - grid[i - 1] > min_width / 4.0) {
            throw Error(ErrorCode::GridTooCoarse, "grid step exceeds a quarter of the narrowest linewidth");
        }
    }
    SpectrumTrace out;
    out.detuning.assign(grid.begin(), grid.end());
    out.magnitude.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double m = peaks.baseline;
        for (int n = 0; n <= n_max; ++n) m += dist.probs[static_cast<std::size_t>(n)] * peaks.line(n, grid[i]);
        out.magnitude[i] = m;
    }
    out.validate();
    return out;
}

namespace detail {

/// Lawson-Hanson nonnegative least squares; columns listed in `free` are
/// unconstrained and never leave the passive set.
inline Eigen::VectorXd nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const std::vector<bool>& free) {
    const Eigen::Index p = A.cols();
    std::vector<bool> passive(free);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(p);

    auto solve_passive = [&]() {
        std::vector<Eigen::Index> idx;
        for (Eigen::Index j = 0; j < p; ++j)
            if (passive[static_cast<std::size_t>(j)]) idx.push_back(j);
        Eigen::VectorXd z = Eigen::VectorXd::Zero(p);
        if (idx.empty()) return z;
        Eigen::MatrixXd sub(A.rows(), static_cast<Eigen::Index>(idx.size()));
        for (std::size_t k = 0; k < idx.size(); ++k) sub.col(static_cast<Eigen::Index>(k)) = A.col(idx[k]);
        const Eigen::VectorXd zs = sub.colPivHouseholderQr().solve(b);
        for (std::size_t k = 0; k < idx.size(); ++k) z[idx[k]] = zs[static_cast<Eigen::Index>(k)];
        return z;
    };

    x = solve_passive();
    const double tol = 1e-12 * std::max(1.0, A.norm() * b.norm());
    for (int outer = 0; outer < 3 * p + 10; ++outer) {
        const Eigen::VectorXd w = A.transpose() * (b - A * x);
        Eigen::Index best = -1;
        double best_w = tol;
        for (Eigen::Index j = 0; j < p; ++j) {
            if (!passive[static_cast<std::size_t>(j)] && w[j] > best_w) {
                best_w = w[j];
                best = j;
            }
        }
        if (best < 0) break;
        passive[static_cast<std::size_t>(best)] = true;
        for (int inner = 0; inner < 3 * p + 10; ++inner) {
            const Eigen::VectorXd z = solve_passive();
            double alpha = 1.0;
            bool feasible = true;
            for (Eigen::Index j = 0; j < p; ++j) {
                const auto sj = static_cast<std::size_t>(j);
                if (passive[sj] && !free[sj] && z[j] <= 0.0) {
                    feasible = false;
                    const double denom = x[j] - z[j];
                    if (denom > 0.0) alpha = std::min(alpha, x[j] / denom);
                }
            }
            if (feasible) {
                x = z;
                break;
            }
            x += alpha * (z - x);
            for (Eigen::Index j = 0; j < p; ++j) {
                const auto sj = static_cast<std::size_t>(j);
                if (passive[sj] && !free[sj] && x[j] <= tol) {
                    passive[sj] = false;
                    x[j] = 0.0;
                }
            }
        }
    }
    return x;
}

inline Eigen::MatrixXd peak_design(const SpectrumTrace& trace, const PeakModel& peaks, int n_max) {
    const auto m = static_cast<Eigen::Index>(trace.detuning.size());
    Eigen::MatrixXd A(m, n_max + 2);
    for (Eigen::Index i = 0; i < m; ++i) {
        const double d = trace.detuning[static_cast<std::size_t>(i)];
        for (int n = 0; n <= n_max; ++n) A(i, n) = peaks.line(n, d);
        A(i, n_max + 1) = 1.0;
    }
    return A;
}

}  // namespace detail

struct PeakWeights {
    std::vector<double> weights;     // normalized to sum 1
    std::vector<double> amplitudes;  // raw peak heights
    double baseline = 0.0;
    bool degenerate = false;         // all amplitudes zero
};

/// Nonnegative peak heights of the multi-Lorentzian model (plus a free
/// baseline) fitted to the trace by constrained least squares.
inline PeakWeights extract_peak_weights(const SpectrumTrace& trace, const PeakModel& peaks, int n_max) {
    trace.validate();
    peaks.validate(n_max);
    const double widest = *std::max_element(peaks.linewidths.begin(), peaks.linewidths.begin() + n_max + 1);
    if (peaks.spacing < 2.0 * widest) {
        throw Error(ErrorCode::PeaksNotResolved, "peak spacing is below twice the widest linewidth");
    }
    const Eigen::MatrixXd A = detail::peak_design(trace, peaks, n_max);
    const Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(trace.magnitude.data(), A.rows());
    std::vector<bool> free(static_cast<std::size_t>(n_max) + 2, false);
    free.back() = true;
    const Eigen::VectorXd x = detail::nnls(A, b, free);

    PeakWeights out;
    out.baseline = x[n_max + 1];
    out.amplitudes.assign(x.data(), x.data() + n_max + 1);
    const double total = std::accumulate(out.amplitudes.begin(), out.amplitudes.end(), 0.0);
    out.degenerate = !(total > 0.0);
    out.weights.resize(out.amplitudes.size(), 0.0);
    if (!out.degenerate) {
        for (std::size_t n = 0; n < out.amplitudes.size(); ++n) out.weights[n] = out.amplitudes[n] / total;
    }
    return out;
}

namespace detail {

inline Eigen::VectorXd normalized_probs(DistributionFamily family, double n_bar, int n_max) {
    const auto d = make_distribution(family, n_bar, n_max);
    Eigen::VectorXd q = Eigen::Map<const Eigen::VectorXd>(d.probs.data(), n_max + 1);
    return q / q.sum();
}

inline constexpr double kMaxPopulation = 100.0;
inline constexpr double kMinPopulation = 1e-9;

}  // namespace detail

/// Fits the mean photon number of `family` to normalized peak weights.
inline FitResult fit_population(std::span<const double> weights, DistributionFamily family, double init,
                                const NlsOptions& opt = {}) {
    require(family != DistributionFamily::Empirical, "fit family must be thermal or poisson");
    require(init > 0.0, "initial mean population must be positive");
    require(weights.size() >= 2, "need at least two weights");
    const int n_max = static_cast<int>(weights.size()) - 1;
    const Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(weights.data(), n_max + 1);
    auto residual = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
        return detail::normalized_probs(family, x[0], n_max) - w;
    };
    Bounds bounds{Eigen::VectorXd::Constant(1, detail::kMinPopulation),
                  Eigen::VectorXd::Constant(1, detail::kMaxPopulation)};
    Eigen::VectorXd x0(1);
    x0[0] = std::clamp(init, detail::kMinPopulation, detail::kMaxPopulation);
    const auto r = nls_minimize(residual, x0, bounds, opt);
    FitResult out;
    out.params["n_bar"] = r.x[0];
    out.sigma["n_bar"] = r.sigma[0];
    out.residual_norm = r.residual_norm;
    out.initial_residual_norm = r.initial_residual_norm;
    out.converged = r.converged;
    out.singular_jacobian = r.singular_jacobian;
    out.iterations = r.iterations;
    return out;
}

/// Fits the mean photon number directly to a spectrum trace. The model is
/// baseline + scale * sum_n q(n) L_n with q the distribution renormalized over
/// 0..n_max; scale and baseline are fitted alongside n_bar.
inline FitResult fit_population(const SpectrumTrace& trace, DistributionFamily family, const PeakModel& peaks,
                                int n_max, double init, const NlsOptions& opt = {}) {
    require(family != DistributionFamily::Empirical, "fit family must be thermal or poisson");
    require(init > 0.0, "initial mean population must be positive");
    const auto start = extract_peak_weights(trace, peaks, n_max);
    const Eigen::MatrixXd A = detail::peak_design(trace, peaks, n_max);
    const Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(trace.magnitude.data(), A.rows());
    const Eigen::MatrixXd lines = A.leftCols(n_max + 1);

    auto residual = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
        const Eigen::VectorXd q = detail::normalized_probs(family, x[0], n_max);
        return (lines * q * x[1]).array() + x[2] - b.array();
    };
    const double inf = std::numeric_limits<double>::infinity();
    Bounds bounds{Eigen::Vector3d(detail::kMinPopulation, 0.0, -inf),
                  Eigen::Vector3d(detail::kMaxPopulation, inf, inf)};
    double scale = std::accumulate(start.amplitudes.begin(), start.amplitudes.end(), 0.0);
    if (!(scale > 0.0)) scale = std::max(b.maxCoeff() - b.minCoeff(), 1e-300);
    Eigen::VectorXd x0(3);
    x0 << std::clamp(init, detail::kMinPopulation, detail::kMaxPopulation), scale, start.baseline;
    const auto r = nls_minimize(residual, x0, bounds, opt);
    FitResult out;
    out.params = {{"n_bar", r.x[0]}, {"scale", r.x[1]}, {"baseline", r.x[2]}};
    out.sigma = {{"n_bar", r.sigma[0]}, {"scale", r.sigma[1]}, {"baseline", r.sigma[2]}};
    out.residual_norm = r.residual_norm;
    out.initial_residual_norm = r.initial_residual_norm;
    out.converged = r.converged;
    out.singular_jacobian = r.singular_jacobian;
    out.iterations = r.iterations;
    return out;
}

}  // namespace qcrlab
