#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include <Eigen/Dense>

#include "errors.hpp"

namespace qcrlab {

/// Estimated parameters with 1-sigma uncertainties.
struct FitResult {
    std::map<std::string, double> params;
    std::map<std::string, double> sigma;
    double residual_norm = 0.0;
    double initial_residual_norm = 0.0;
    bool converged = false;
    bool singular_jacobian = false;
    int iterations = 0;

    double value(const std::string& name) const { return params.at(name); }
    double error(const std::string& name) const { return sigma.at(name); }
};

struct Bounds {
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;

    static Bounds unbounded(Eigen::Index n) {
        const double inf = std::numeric_limits<double>::infinity();
        return {Eigen::VectorXd::Constant(n, -inf), Eigen::VectorXd::Constant(n, inf)};
    }
};

struct NlsOptions {
    double tol = 1e-10;            // relative cost change / step size / gradient
    int max_iterations = 200;
    double fd_rel_step = 1e-6;     // central-difference step relative to |x|
    double fd_min_step = 1e-9;     // absolute floor on the step
    double initial_damping = 1e-3; // Marquardt tau
    bool throw_on_divergence = true;
};

struct NlsResult {
    Eigen::VectorXd x;
    Eigen::VectorXd residuals;
    Eigen::MatrixXd jacobian;
    Eigen::MatrixXd covariance;
    Eigen::VectorXd sigma;
    double residual_norm = 0.0;
    double initial_residual_norm = 0.0;
    bool converged = false;
    bool singular_jacobian = false;
    int iterations = 0;
    int evaluations = 0;
};

namespace detail {

template <class Residual>
Eigen::MatrixXd fd_jacobian(Residual& residual, const Eigen::VectorXd& x, const Eigen::VectorXd& r0,
                            const Bounds& bounds, const NlsOptions& opt, int& evaluations) {
    Eigen::MatrixXd J(r0.size(), x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double step = std::max(opt.fd_rel_step * std::abs(x[i]), opt.fd_min_step);
        Eigen::VectorXd xp = x;
        Eigen::VectorXd xm = x;
        xp[i] = std::min(x[i] + step, bounds.upper[i]);
        xm[i] = std::max(x[i] - step, bounds.lower[i]);
        const double span = xp[i] - xm[i];
        if (!(span > 0.0)) {
            J.col(i).setZero();
            continue;
        }
        const Eigen::VectorXd rp = xp[i] == x[i] ? r0 : Eigen::VectorXd(residual(xp));
        const Eigen::VectorXd rm = xm[i] == x[i] ? r0 : Eigen::VectorXd(residual(xm));
        evaluations += (xp[i] != x[i]) + (xm[i] != x[i]);
        J.col(i) = (rp - rm) / span;
    }
    return J;
}

inline Eigen::VectorXd clamp(const Eigen::VectorXd& x, const Bounds& b) {
    return x.cwiseMax(b.lower).cwiseMin(b.upper);
}

}  // namespace detail

/// Bounded Levenberg-Marquardt minimization of 0.5 * |r(x)|^2.
///
/// Each iteration first tries the undamped Gauss-Newton step and keeps it when
/// the quadratic model predicts the decrease well; otherwise the damping is
/// raised until the projected step lowers the cost. Accepted steps never raise
/// the residual norm. The covariance is s^2 (J^T J)^-1 at the optimum with
/// s^2 = |r|^2 / (m - n).
template <class Residual>
NlsResult nls_minimize(Residual&& residual, Eigen::VectorXd x, const Bounds& bounds,
                       const NlsOptions& opt = {}) {
    const Eigen::Index n = x.size();
    require(bounds.lower.size() == n && bounds.upper.size() == n, "bounds dimension mismatch");
    require((x.array() >= bounds.lower.array()).all() && (x.array() <= bounds.upper.array()).all(),
            "initial point outside bounds");
    require(opt.tol > 0.0, "tolerance must be positive");

    NlsResult out;
    Eigen::VectorXd r = residual(x);
    out.evaluations = 1;
    const Eigen::Index m = r.size();
    require(m >= n, "fewer residuals than parameters");
    double cost = 0.5 * r.squaredNorm();
    out.initial_residual_norm = r.norm();
    require(std::isfinite(cost), "residual is not finite at the initial point");

    double lambda = -1.0;
    double nu = 2.0;
    bool converged = cost == 0.0;
    int iter = 0;
    Eigen::MatrixXd J;
    while (!converged && iter < opt.max_iterations) {
        ++iter;
        J = detail::fd_jacobian(residual, x, r, bounds, opt, out.evaluations);
        const Eigen::VectorXd g = J.transpose() * r;
        const Eigen::MatrixXd A = J.transpose() * J;
        if (g.lpNorm<Eigen::Infinity>() <= opt.tol * std::max(1.0, cost)) {
            converged = true;
            break;
        }
        if (lambda < 0.0) lambda = opt.initial_damping * A.diagonal().maxCoeff();
        const Eigen::VectorXd diag = A.diagonal().cwiseMax(1e-12 * std::max(A.diagonal().maxCoeff(), 1e-300));

        bool accepted = false;
        bool stalled = false;
        bool try_gauss_newton = true;
        Eigen::VectorXd x_new, r_new, step;
        double cost_new = cost;
        while (!accepted) {
            Eigen::MatrixXd system = A;
            if (!try_gauss_newton) system.diagonal() += lambda * diag;
            const Eigen::VectorXd delta = system.ldlt().solve(-g);
            const Eigen::VectorXd target = x + delta;
            x_new = detail::clamp(target, bounds);
            step = x_new - x;
            if (try_gauss_newton && x_new != target) {
                // A Gauss-Newton step cut by the bounds is a poor step.
                try_gauss_newton = false;
                continue;
            }
            if (!step.allFinite() || step.norm() == 0.0) {
                if (try_gauss_newton) {
                    try_gauss_newton = false;
                    continue;
                }
                stalled = true;
                break;
            }
            r_new = residual(x_new);
            ++out.evaluations;
            cost_new = 0.5 * r_new.squaredNorm();
            const double predicted = -(g.dot(step) + 0.5 * step.dot(A * step));
            const double ratio = predicted > 0.0 ? (cost - cost_new) / predicted : -1.0;
            if (try_gauss_newton) {
                try_gauss_newton = false;
                if (std::isfinite(cost_new) && cost_new < cost && ratio > 0.75) {
                    accepted = true;
                    lambda = std::max(lambda / 3.0, 1e-12 * A.diagonal().maxCoeff());
                    nu = 2.0;
                }
                continue;
            }
            if (std::isfinite(cost_new) && cost_new < cost && ratio > 1e-4) {
                accepted = true;
                lambda *= std::max(1.0 / 3.0, 1.0 - std::pow(2.0 * ratio - 1.0, 3));
                nu = 2.0;
            } else {
                lambda *= nu;
                nu *= 2.0;
                if (!(lambda < 1e16 * std::max(1.0, A.diagonal().maxCoeff()))) {
                    stalled = true;
                    break;
                }
            }
        }
        if (stalled) {
            // No descent direction left at working precision.
            converged = true;
            break;
        }
        const double decrease = cost - cost_new;
        x = x_new;
        r = r_new;
        cost = cost_new;
        if (cost == 0.0 || decrease <= opt.tol * cost ||
            step.norm() <= opt.tol * (x.norm() + opt.tol)) {
            converged = true;
        }
    }

    out.x = x;
    out.residuals = r;
    out.residual_norm = r.norm();
    out.iterations = iter;
    out.converged = converged;
    if (!converged && opt.throw_on_divergence) {
        throw Error(ErrorCode::FitDiverged,
                    "no convergence after " + std::to_string(opt.max_iterations) + " iterations");
    }

    J = detail::fd_jacobian(residual, x, r, bounds, opt, out.evaluations);
    out.jacobian = J;
    const Eigen::MatrixXd A = J.transpose() * J;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
    const double inf = std::numeric_limits<double>::infinity();
    if (lu.rank() < n || !std::isfinite(A.norm())) {
        out.singular_jacobian = true;
        out.covariance = Eigen::MatrixXd::Constant(n, n, inf);
        out.sigma = Eigen::VectorXd::Constant(n, inf);
    } else {
        const double dof = static_cast<double>(std::max<Eigen::Index>(m - n, 1));
        const double s2 = r.squaredNorm() / dof;
        out.covariance = s2 * lu.inverse();
        out.sigma = out.covariance.diagonal().cwiseMax(0.0).cwiseSqrt();
    }
    return out;
}

}  // namespace qcrlab
