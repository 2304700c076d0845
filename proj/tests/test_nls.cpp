#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "qcrlab/nls.hpp"

using namespace qcrlab;

TEST(Nls, LinearModelExact) {
    std::vector<double> xs = {0.5, 1.0, 2.0, 3.5, 5.0};
    auto residual = [&](const Eigen::VectorXd& p) {
        Eigen::VectorXd r(static_cast<Eigen::Index>(xs.size()));
        for (std::size_t i = 0; i < xs.size(); ++i) r[static_cast<Eigen::Index>(i)] = p[0] * xs[i] - 2.75 * xs[i];
        return r;
    };
    const auto r = nls_minimize(residual, Eigen::VectorXd::Constant(1, 1.0), Bounds::unbounded(1));
    EXPECT_TRUE(r.converged);
    EXPECT_LE(r.iterations, 2);
    EXPECT_NEAR(r.x[0], 2.75, 1e-12);
}

TEST(Nls, QuadraticMinimum) {
    auto residual = [](const Eigen::VectorXd& p) {
        Eigen::VectorXd r(3);
        r << p[0] - 3.0, 2.0 * (p[1] + 2.0), 0.5 * (p[0] - 3.0) * (p[1] + 2.0);
        return r;
    };
    const auto r = nls_minimize(residual, Eigen::VectorXd::Zero(2), Bounds::unbounded(2));
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.x[0], 3.0, 1e-8);
    EXPECT_NEAR(r.x[1], -2.0, 1e-8);
}

TEST(Nls, Stationarity) {
    // Exponential decay with noise: residuals orthogonal to Jacobian columns.
    std::mt19937_64 rng(73);
    std::normal_distribution<double> noise(0.0, 0.01);
    std::vector<double> t, y;
    for (int i = 0; i < 40; ++i) {
        t.push_back(0.1 * i);
        y.push_back(2.0 * std::exp(-1.3 * t.back()) + 0.1 + noise(rng));
    }
    auto residual = [&](const Eigen::VectorXd& p) {
        Eigen::VectorXd r(40);
        for (int i = 0; i < 40; ++i) r[i] = p[0] * std::exp(-p[1] * t[static_cast<std::size_t>(i)]) + p[2] - y[static_cast<std::size_t>(i)];
        return r;
    };
    Eigen::VectorXd x0(3);
    x0 << 1.0, 0.5, 0.0;
    const auto r = nls_minimize(residual, x0, Bounds::unbounded(3));
    EXPECT_TRUE(r.converged);
    const Eigen::VectorXd g = r.jacobian.transpose() * r.residuals;
    EXPECT_LT(g.norm(), 1e-7 * r.jacobian.norm() * std::max(r.residuals.norm(), 1.0));
    EXPECT_NEAR(r.x[1], 1.3, 0.1);
    for (int i = 0; i < 3; ++i) EXPECT_GT(r.sigma[i], 0.0);
    EXPECT_LE(r.residual_norm, r.initial_residual_norm);
}

TEST(Nls, CovarianceOfLinearRegression) {
    // For a straight line the Gauss-Newton covariance is exact.
    std::mt19937_64 rng(79);
    std::normal_distribution<double> noise(0.0, 0.05);
    const int m = 30;
    Eigen::MatrixXd A(m, 2);
    Eigen::VectorXd y(m);
    for (int i = 0; i < m; ++i) {
        A(i, 0) = 1.0;
        A(i, 1) = 0.2 * i;
        y[i] = 1.0 + 0.7 * A(i, 1) + noise(rng);
    }
    auto residual = [&](const Eigen::VectorXd& p) { return Eigen::VectorXd(A * p - y); };
    const auto r = nls_minimize(residual, Eigen::VectorXd::Zero(2), Bounds::unbounded(2));
    const Eigen::VectorXd ls = A.colPivHouseholderQr().solve(y);
    EXPECT_NEAR((r.x - ls).norm(), 0.0, 1e-9);
    const double s2 = (A * ls - y).squaredNorm() / (m - 2);
    const Eigen::MatrixXd cov = s2 * (A.transpose() * A).inverse();
    EXPECT_NEAR(r.sigma[0], std::sqrt(cov(0, 0)), 1e-6 * std::sqrt(cov(0, 0)));
    EXPECT_NEAR(r.sigma[1], std::sqrt(cov(1, 1)), 1e-6 * std::sqrt(cov(1, 1)));
}

TEST(Nls, BoundsRespected) {
    auto residual = [](const Eigen::VectorXd& p) {
        Eigen::VectorXd r(2);
        r << p[0] - 5.0, p[1] + 1.0;
        return r;
    };
    Bounds b{Eigen::Vector2d(0.0, 0.0), Eigen::Vector2d(2.0, 3.0)};
    const auto r = nls_minimize(residual, Eigen::Vector2d(1.0, 1.0), b);
    EXPECT_NEAR(r.x[0], 2.0, 1e-12);
    EXPECT_NEAR(r.x[1], 0.0, 1e-12);
    EXPECT_THROW(nls_minimize(residual, Eigen::Vector2d(3.0, 1.0), b), Error);
}

TEST(Nls, SingularJacobianReported) {
    // Only the sum of the parameters is identifiable.
    auto residual = [](const Eigen::VectorXd& p) {
        Eigen::VectorXd r(3);
        r << p[0] + p[1] - 1.0, 2.0 * (p[0] + p[1]) - 2.0, p[0] + p[1] - 1.0;
        return r;
    };
    const auto r = nls_minimize(residual, Eigen::Vector2d(0.0, 0.0), Bounds::unbounded(2));
    EXPECT_TRUE(r.singular_jacobian);
    EXPECT_TRUE(std::isinf(r.sigma[0]));
    EXPECT_NEAR(r.x[0] + r.x[1], 1.0, 1e-9);
}

TEST(Nls, Divergence) {
    // Rosenbrock from far away with a tiny iteration budget.
    auto residual = [](const Eigen::VectorXd& p) {
        Eigen::VectorXd r(2);
        r << 10.0 * (p[1] - p[0] * p[0]), 1.0 - p[0];
        return r;
    };
    NlsOptions opt;
    opt.max_iterations = 2;
    try {
        nls_minimize(residual, Eigen::Vector2d(-1.2, 1.0), Bounds::unbounded(2), opt);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::FitDiverged);
    }
    opt.throw_on_divergence = false;
    const auto r = nls_minimize(residual, Eigen::Vector2d(-1.2, 1.0), Bounds::unbounded(2), opt);
    EXPECT_FALSE(r.converged);
    opt.max_iterations = 200;
    const auto ok = nls_minimize(residual, Eigen::Vector2d(-1.2, 1.0), Bounds::unbounded(2), opt);
    EXPECT_TRUE(ok.converged);
    EXPECT_NEAR(ok.x[0], 1.0, 1e-6);
    EXPECT_NEAR(ok.x[1], 1.0, 1e-6);
}
