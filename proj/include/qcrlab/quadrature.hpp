#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"

namespace qcrlab {

/// Tolerances for the tunneling-rate integral. `abs_tol` is in s^-1 (the unit
/// of the forward rate); `window_kT` is the half-width of the thermal window
/// around each Fermi edge in units of k_B T.
struct QuadratureConfig {
    double rel_tol = 1e-8;
    double abs_tol = 1e-3;
    double window_kT = 40.0;
    int max_subdivisions = 4000;

    void validate() const {
        require(rel_tol > 0.0 && rel_tol <= 1e-3, "rel_tol must lie in (0, 1e-3]");
        require(abs_tol >= 0.0, "abs_tol must be nonnegative");
        require(window_kT >= 10.0, "window_kT must be >= 10");
        require(max_subdivisions >= 1, "max_subdivisions must be positive");
    }

    /// Same configuration with both tolerances scaled by `factor`.
    QuadratureConfig tightened(double factor) const {
        QuadratureConfig out = *this;
        out.rel_tol /= factor;
        out.abs_tol /= factor;
        return out;
    }
};

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
    int intervals = 0;
    int evaluations = 0;
};

namespace detail {

// 21-point Kronrod extension of the 10-point Gauss rule (QUADPACK qk21).
inline constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};
inline constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077600525452218, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
inline constexpr std::array<double, 5> kWg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Panel {
    double a, b, value, error;
    bool operator<(const Panel& other) const { return error < other.error; }
};

template <class F>
Panel gauss_kronrod21(F& f, double a, double b) {
    const double centre = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(centre);
    double kronrod = fc * kWgk[10];
    double gauss = 0.0;
    for (int j = 0; j < 10; ++j) {
        const double dx = half * kXgk[j];
        const double sum = f(centre - dx) + f(centre + dx);
        kronrod += kWgk[j] * sum;
        if (j % 2 == 1) gauss += kWg[j / 2] * sum;
    }
    kronrod *= half;
    gauss *= half;
    return {a, b, kronrod, std::abs(kronrod - gauss)};
}

}  // namespace detail

/// Globally adaptive 21-point Gauss-Kronrod quadrature over the sorted
/// `breakpoints`, which are always kept as panel edges. The panel with the
/// largest error estimate is bisected until the total estimate falls below
/// max(abs_tol, rel_tol * |value|).
template <class F>
QuadratureResult integrate_adaptive(F&& f, std::span<const double> breakpoints, double abs_tol,
                                    double rel_tol, int max_subdivisions) {
    require(breakpoints.size() >= 2, "integrate_adaptive needs at least two breakpoints");
    std::priority_queue<detail::Panel> panels;
    QuadratureResult out;
    double value = 0.0;
    double error = 0.0;
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        const double a = breakpoints[i];
        const double b = breakpoints[i + 1];
        if (!(b > a)) continue;
        auto panel = detail::gauss_kronrod21(f, a, b);
        out.evaluations += 21;
        value += panel.value;
        error += panel.error;
        panels.push(panel);
    }
    int splits = 0;
    while (!panels.empty()) {
        if (!std::isfinite(value) || !std::isfinite(error)) {
            throw Error(ErrorCode::QuadratureNotConverged, "integrand is not finite on the interval");
        }
        if (error <= std::max(abs_tol, rel_tol * std::abs(value))) break;
        if (splits >= max_subdivisions) {
            throw Error(ErrorCode::QuadratureNotConverged,
                        "error estimate " + std::to_string(error) + " after " +
                            std::to_string(splits) + " subdivisions");
        }
        const detail::Panel worst = panels.top();
        panels.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            // Panel cannot be split further in double precision.
            throw Error(ErrorCode::QuadratureNotConverged, "panel width underflow");
        }
        const auto left = detail::gauss_kronrod21(f, worst.a, mid);
        const auto right = detail::gauss_kronrod21(f, mid, worst.b);
        out.evaluations += 42;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        panels.push(left);
        panels.push(right);
        ++splits;
    }
    // Recompute the sums from the panels to shed accumulated rounding.
    value = 0.0;
    error = 0.0;
    out.intervals = static_cast<int>(panels.size());
    while (!panels.empty()) {
        value += panels.top().value;
        error += panels.top().error;
        panels.pop();
    }
    out.value = value;
    out.error = error;
    return out;
}

}  // namespace qcrlab
