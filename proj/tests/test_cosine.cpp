#include "cdm/cosine_fit.hpp"
#include "cdm/rng.hpp"

#include <cmath>

#include <gtest/gtest.h>

using namespace cdm;

namespace {

struct Samples {
    Eigen::VectorXd rows, cols;
};

Samples generate(double A, double P, double phi, double C, int n, double step = 1.0) {
    Samples s{Eigen::VectorXd(n), Eigen::VectorXd(n)};
    for (int i = 0; i < n; ++i) {
        s.rows(i) = i * step;
        s.cols(i) = A * std::cos(2 * kPi * s.rows(i) / P + phi) + C;
    }
    return s;
}

double phase_gap(double a, double b) {
    const double d = std::fmod(std::abs(a - b), 2 * kPi);
    return std::min(d, 2 * kPi - d);
}

}  // namespace

TEST(FitCosine, ExactSamples) {
    const Samples s = generate(12, 90, 0.4, 200, 300);
    const auto f = fit_cosine(s.rows, s.cols);
    EXPECT_NEAR(f.amplitude, 12, 1e-6);
    EXPECT_NEAR(f.period, 90, 1e-6);
    EXPECT_NEAR(f.phase, 0.4, 1e-6);
    EXPECT_NEAR(f.offset, 200, 1e-6);
    EXPECT_LT(f.rms_residual, 1e-6);
}

TEST(FitCosine, CostNeverIncreases) {
    SplitMix64 rng(17);
    for (int k = 0; k < 30; ++k) {
        Samples s = generate(rng.uniform(3, 30), rng.uniform(30, 120), rng.uniform(-3, 3), rng.uniform(0, 500), 400);
        for (int i = 0; i < s.cols.size(); ++i) s.cols(i) += rng.uniform(-0.5, 0.5);
        const auto f = fit_cosine(s.rows, s.cols);
        for (std::size_t i = 1; i < f.cost_trace.size(); ++i) EXPECT_LE(f.cost_trace[i], f.cost_trace[i - 1]);
    }
}

TEST(FitCosine, QuantisedSamples) {
    SplitMix64 rng(5);
    for (int k = 0; k < 30; ++k) {
        const double A = rng.uniform(5, 30), P = rng.uniform(40, 150), phi = rng.uniform(-kPi, kPi);
        Samples s = generate(A, P, phi, 250, static_cast<int>(4 * P));
        s.cols = s.cols.array().round();
        const auto f = fit_cosine(s.rows, s.cols);
        EXPECT_NEAR(f.period, P, 0.005 * P) << k;
        EXPECT_NEAR(f.amplitude, A, 0.5) << k;
        EXPECT_LT(phase_gap(f.phase, phi), 0.1) << k;
    }
}

TEST(FitCosine, ScalarFloat) {
    const Samples s = generate(10, 60, 1.0, 100, 240);
    const Eigen::VectorXf r = s.rows.cast<float>(), c = s.cols.cast<float>();
    const auto f = fit_cosine(r, c);
    EXPECT_NEAR(f.period, 60.0f, 1e-2f);
}

TEST(FitCosine, ContractErrors) {
    const Samples flat{Eigen::VectorXd::LinSpaced(50, 0, 49), Eigen::VectorXd::Constant(50, 50.0)};
    try {
        fit_cosine(flat.rows, flat.cols);
        FAIL() << "expected an error";
    } catch (const InsufficientData& e) {
        EXPECT_NE(std::string(e.what()).find("no oscillation"), std::string::npos);
    }
    const Samples few = generate(10, 90, 0, 0, 7);
    EXPECT_THROW(fit_cosine(few.rows, few.cols), InsufficientData);
    const Samples short_span = generate(10, 90, 0, 0, 60);
    try {
        fit_cosine(short_span.rows, short_span.cols);
        FAIL() << "expected an error";
    } catch (const InsufficientData& e) {
        EXPECT_NE(std::string(e.what()).find("insufficient periods"), std::string::npos);
    }
    EXPECT_THROW(fit_cosine(Eigen::VectorXd::Zero(10), Eigen::VectorXd::Zero(9)), Error);
}

TEST(Extrema, AnalyticRows) {
    CosineFit<double> f;
    f.amplitude = 5;
    f.period = 90;
    f.phase = 0;
    const auto e = extrema_rows(f, 0.0, 270.0);
    EXPECT_EQ(e.crests, (std::vector<double>{0, 90, 180, 270}));
    ASSERT_EQ(e.troughs.size(), 3u);
    EXPECT_NEAR(e.troughs[0], 45, 1e-9);
    EXPECT_NEAR(e.troughs[1], 135, 1e-9);
    EXPECT_NEAR(e.troughs[2], 225, 1e-9);
    const auto none = extrema_rows(f, 10.0, 30.0);
    EXPECT_TRUE(none.crests.empty() && none.troughs.empty());
}

TEST(Extrema, AreStationaryPoints) {
    SplitMix64 rng(2);
    for (int k = 0; k < 50; ++k) {
        CosineFit<double> f;
        f.amplitude = rng.uniform(1, 20);
        f.period = rng.uniform(10, 200);
        f.phase = rng.uniform(-kPi, kPi);
        f.offset = rng.uniform(-100, 100);
        const auto e = extrema_rows(f, -300.0, 300.0);
        for (double r : e.crests) EXPECT_NEAR(f(r), f.offset + f.amplitude, 1e-9);
        for (double r : e.troughs) EXPECT_NEAR(f(r), f.offset - f.amplitude, 1e-9);
    }
}
