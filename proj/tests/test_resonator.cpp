#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "qcrlab/resonator.hpp"

using namespace qcrlab;

namespace {

JunctionParams junction(double T_qp) {
    JunctionParams j;
    j.T_qp = T_qp;
    return j;
}

double dbm_vac(double dbm) { return vac_from_power(dbm_to_watt(dbm), 50.0); }

}  // namespace

TEST(ResonatorParams, Validation) {
    ResonatorParams r;
    EXPECT_NO_THROW(r.validate());
    r.rho = 0.0;
    EXPECT_THROW(r.validate(), Error);
    r = {};
    r.n_max = 4;
    EXPECT_THROW(r.validate(), Error);
    r = {};
    r.gamma_0 = -1.0;
    EXPECT_THROW(r.validate(), Error);
}

TEST(MatrixElement, Examples) {
    EXPECT_EQ(matrix_element_sq(0, 0, 0.3), 1.0);
    EXPECT_DOUBLE_EQ(matrix_element_sq(1, 0, 1e-3), 1e-3);
    EXPECT_DOUBLE_EQ(matrix_element_sq(2, 1, 1e-3), 2e-3);
    EXPECT_DOUBLE_EQ(matrix_element_sq(0, 1, 1e-3), 1e-3);
    EXPECT_EQ(matrix_element_sq(0, 2, 1e-3), 0.0);
    EXPECT_THROW(matrix_element_sq(-1, 0, 1e-3), Error);
}

TEST(GammaQcr, NoChannelsAtZeroTemperature) {
    JunctionParams j = junction(0.0);
    j.gamma_D = 1e-12;
    ResonatorParams r;
    const auto rates = qcr_rates({0.0, 0.0}, j, r, {});
    EXPECT_LT(std::abs(rates.gamma()), 1.0);
    EXPECT_FALSE(gamma_qcr({0.0, 0.0}, j, r, {}).negative_damping);
}

TEST(GammaQcr, EvenInBias) {
    const auto j = junction(0.060);
    ResonatorParams r;
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> vdc(0.0, 500e-6);
    std::uniform_real_distribution<double> vac(0.0, 250e-6);
    for (int i = 0; i < 20; ++i) {
        DriveCondition d{vdc(rng), vac(rng), constants::two_pi * 3.2e9};
        const auto a = qcr_rates(d, j, r, {});
        const auto b = qcr_rates(d.with_dc(-d.V_dc), j, r, {});
        EXPECT_NEAR(a.gamma(), b.gamma(), 1e-12 * std::abs(a.absorb));
        const auto ta = temperature_from_rates(a, r.omega_R);
        const auto tb = temperature_from_rates(b, r.omega_R);
        EXPECT_EQ(ta.tag, tb.tag);
        if (ta.tag == TemperatureTag::Finite) {
            EXPECT_NEAR(ta.kelvin, tb.kelvin, 1e-9 * ta.kelvin);
        }
    }
}

TEST(GammaQcr, ActivationByNoise) {
    const auto j = junction(0.060);
    ResonatorParams r;
    const double omega = constants::two_pi * 3.6e9;
    const double low = gamma_qcr({0.0, dbm_vac(-100.0), omega}, j, r, {}).gamma;
    const double high = gamma_qcr({0.0, dbm_vac(-70.0), omega}, j, r, {}).gamma;
    EXPECT_GT(low, 0.0);
    EXPECT_GE(high / low, 100.0);
    EXPECT_NEAR(DampingRate{constants::two_pi * 5.0}.hz(), 5.0, 1e-12);
}

TEST(TQcr, Examples) {
    const double omega = constants::two_pi * 4.671e9;
    const auto t = temperature_from_rates({std::exp(1.0), 1.0}, omega);
    EXPECT_EQ(t.tag, TemperatureTag::Finite);
    EXPECT_NEAR(t.kelvin, 0.2241, 0.0001);
    EXPECT_NEAR(t.kelvin, oracle::h * 4.671e9 / oracle::k_B, 1e-12);

    EXPECT_EQ(temperature_from_rates({1.0, 0.0}, omega).kelvin, 0.0);
    const auto near_one = temperature_from_rates({1.0 + 1e-9, 1.0}, omega);
    EXPECT_GT(near_one.kelvin, 1e7);
    EXPECT_EQ(temperature_from_rates({1.0, 1.0}, omega).tag, TemperatureTag::Infinite);
    const auto neg = temperature_from_rates({1.0, 2.0}, omega);
    EXPECT_EQ(neg.tag, TemperatureTag::Negative);
    EXPECT_LT(neg.kelvin, 0.0);
    EXPECT_EQ(temperature_from_rates({0.0, 0.0}, omega).tag, TemperatureTag::Undefined);
}

TEST(Bose, ClosedForms) {
    const double omega = constants::two_pi * 4.671e9;
    EXPECT_NEAR(temp_from_occupation(1.0, omega), 0.2241 / std::log(2.0), 0.0005);
    EXPECT_NEAR(temp_from_occupation(0.92, omega), 0.305, 0.001);
    EXPECT_NEAR(temp_from_occupation(0.217, omega), 0.130, 0.001);
    EXPECT_NEAR(bose_occupation(0.3, omega), oracle::bose(0.3, 4.671e9), 1e-13);
    EXPECT_THROW(bose_occupation(0.0, omega), Error);
    EXPECT_THROW(temp_from_occupation(0.0, omega), Error);
}

TEST(Bose, RoundTrip) {
    const double omega = constants::two_pi * 4.671e9;
    std::mt19937_64 rng(37);
    std::uniform_real_distribution<double> ts(0.010, 1.0);
    for (int i = 0; i < 500; ++i) {
        const double T = ts(rng);
        EXPECT_NEAR(temp_from_occupation(bose_occupation(T, omega), omega), T, 1e-12 * T);
    }
}

TEST(WeightedPopulation, ConvexCombination) {
    EXPECT_EQ(weighted_population(0.1, 0.0, 0.92, 1.0), 0.92);
    EXPECT_THROW(weighted_population(0.1, 0.0, 0.92, 0.0), Error);
    try {
        weighted_population(0.1, -1.0, 0.92, 1.0);
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DivisionDegenerate);
    }
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u(0.0, 5.0);
    for (int i = 0; i < 1000; ++i) {
        const double a = u(rng), b = u(rng), ga = u(rng), gb = u(rng) + 1e-3;
        const double n = weighted_population(a, ga, b, gb);
        EXPECT_GE(n, std::min(a, b) - 1e-12);
        EXPECT_LE(n, std::max(a, b) + 1e-12);
    }
}

TEST(WeightedPopulation, MonotoneCooling) {
    const double n_c = 0.92, n_q = 0.05, g_c = 1.0;
    double prev = n_c;
    for (int i = 0; i <= 100; ++i) {
        const double n = weighted_population(n_q, 0.1 * i, n_c, g_c);
        EXPECT_LE(n, prev + 1e-15);
        prev = n;
    }
}

TEST(SteadyState, OffStateNearColdBath) {
    const auto j = junction(0.060);
    ResonatorParams r;
    r.rho = 1e-4;
    r.n_c = 0.92;
    const auto s = steady_state_population({0.0, 0.0, constants::two_pi * 3.2e9}, j, r, {});
    EXPECT_NEAR(s.n_bar, 0.92, 0.01 * 0.92);
    EXPECT_LT(s.gamma_qcr, 1e-2 * r.gamma_c());
}

TEST(SteadyState, MatchesWeightedPopulation) {
    const auto j = junction(0.060);
    ResonatorParams r;
    r.rho = 2e-2;
    r.n_c = 0.92;
    const DriveCondition d{0.0, dbm_vac(-70.0), constants::two_pi * 3.2e9};
    const auto s = steady_state_population(d, j, r, {});
    ASSERT_EQ(s.t_qcr.tag, TemperatureTag::Finite);
    EXPECT_NEAR(s.n_bar, weighted_population(s.n_qcr, s.gamma_qcr, r.n_c, r.gamma_c()), 1e-12);
    EXPECT_NEAR(s.n_qcr, bose_occupation(s.t_qcr.kelvin, r.omega_R), 1e-9 * s.n_qcr);
    EXPECT_LT(s.n_bar, 0.92);
}

TEST(SteadyState, ColdBathAloneReachesGroundState) {
    JunctionParams cold = junction(0.0);
    cold.gamma_D = 1e-6;
    ResonatorParams r;
    r.gamma_dr = 0.0;
    r.gamma_0 = 0.0;
    r.n_c = 0.92;
    const auto s = steady_state_population({0.0, 0.0}, cold, r, {});
    EXPECT_GT(s.gamma_qcr, 0.0);
    EXPECT_EQ(s.n_bar, 0.0);
    EXPECT_EQ(s.t_qcr.kelvin, 0.0);
}

TEST(Coherent, MatchedAndOverdamped) {
    ResonatorParams r;
    const double P = 1e-17;
    const double g_qcr = r.gamma_dr - r.gamma_0 + constants::two_pi * 0.5e6;
    r.gamma_dr = g_qcr + r.gamma_0;
    EXPECT_NEAR(coherent_population(P, g_qcr, r), P / (constants::hbar * r.omega_R * (g_qcr + r.gamma_0)),
                1e-12);
    ResonatorParams d;
    EXPECT_LT(coherent_population(P, 1e15, d), 1e-9);
    EXPECT_THROW(coherent_population(-1.0, 0.0, d), Error);
}

TEST(Coherent, AnchorAndClosedForm) {
    ResonatorParams r;
    const double P = dbm_to_watt(-134.3);
    EXPECT_NEAR(P, 3.72e-17, 0.01e-17);
    const double n = coherent_population(P, 0.0, r);
    EXPECT_NEAR(n, 1.46, 0.01);
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> g(0.0, 2e7);
    for (int i = 0; i < 100; ++i) {
        const double gq = g(rng);
        const double expect = oracle::coherent_closed_form(P, 4.671e9, r.gamma_dr, gq, r.gamma_0);
        EXPECT_NEAR(coherent_population(P, gq, r), expect, 1e-12 * expect);
    }
}

TEST(Coherent, NonincreasingPastMatching) {
    ResonatorParams r;
    const double P = 3.72e-17;
    double prev = coherent_population(P, 0.0, r);  // gamma_dr < gamma_0 already
    for (int i = 1; i <= 200; ++i) {
        const double n = coherent_population(P, 1e5 * i, r);
        EXPECT_LE(n, prev);
        prev = n;
    }
}

TEST(InferGamma, RoundTrip) {
    std::mt19937_64 rng(47);
    std::uniform_real_distribution<double> g(0.0, 1e8);
    std::uniform_real_distribution<double> p(-140.0, -120.0);
    ResonatorParams r;
    for (int i = 0; i < 100; ++i) {
        const double gq = g(rng);
        const double P = dbm_to_watt(p(rng));
        const auto inferred = infer_gamma_from_population(coherent_population(P, gq, r), P, r);
        EXPECT_NEAR(inferred.gamma_qcr, gq, 1e-9 * std::max(gq, r.gamma_c()));
        EXPECT_NEAR(inferred.gamma_total, inferred.gamma_qcr + r.gamma_c(), 1e-6);
    }
}

TEST(InferGamma, OffStateAndInfeasible) {
    ResonatorParams r;
    const double P = 3.72e-17;
    const double n0 = coherent_population(P, 0.0, r);
    const auto off = infer_gamma_from_population(n0, P, r);
    EXPECT_NEAR(off.gamma_qcr, 0.0, 1e-6);
    EXPECT_NEAR(off.gamma_total / constants::two_pi, 2.4e6, 1.0);
    try {
        infer_gamma_from_population(1.5 * n0, P, r);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NoRootInBracket);
    }
    EXPECT_THROW(infer_gamma_from_population(0.0, P, r), Error);
}
