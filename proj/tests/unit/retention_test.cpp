#include "vcp/retention/retention.hpp"

#include <cmath>
#include <filesystem>

#include <gtest/gtest.h>

#include "vcp/codemetrics/parser.hpp"
#include "vcp/error.hpp"
#include "vcp/rng.hpp"

namespace vcp::retention {
namespace {

const std::filesystem::path kDir = std::filesystem::path(VCP_FIXTURE_DIR) / "retention";

SessionLog log_at(std::vector<double> times, Phase phase = Phase::AiBuild, const std::string& source = "") {
    SessionLog log;
    log.student = "s";
    log.phase = phase;
    for (double t : times) log.events.push_back({t, EventKind::Edit, std::nullopt});
    log.final_unit = codemetrics::parse(source, "u");
    return log;
}

// Closed-form 2x2 normal equations by Cramer's rule.
std::pair<double, double> cramer_calibration(const std::vector<CalibrationRow>& rows) {
    double s11 = 0, s12 = 0, s22 = 0, b1 = 0, b2 = 0;
    for (const auto& r : rows) {
        const double x1 = r.velocity_ratio * r.ln_cc, x2 = r.velocity_ratio * r.volume_v;
        s11 += x1 * x1;
        s12 += x1 * x2;
        s22 += x2 * x2;
        b1 += x1;
        b2 += x2;
    }
    const double det = s11 * s22 - s12 * s12;
    return {(b1 * s22 - b2 * s12) / det, (s11 * b2 - s12 * b1) / det};
}

TEST(ActiveMinutes, Examples) {
    EXPECT_DOUBLE_EQ(active_minutes(log_at({0, 60})), 3.0);
    EXPECT_DOUBLE_EQ(active_minutes(log_at({42})), 2.0);
    EXPECT_DOUBLE_EQ(active_minutes(log_at({0, 1000})), 4.0);
    EXPECT_EQ(active_minutes(log_at({})), 0.0);
}

TEST(ActiveMinutes, MonotoneInGapAndInclusion) {
    Rng rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> times;
        double t = 0;
        const int n = 1 + static_cast<int>(rng.below(15));
        for (int i = 0; i < n; ++i) times.push_back(t += rng.uniform() * 400);
        const auto log = log_at(times);
        double prev = 0.0;
        for (double gap : {0.0, 30.0, 60.0, 120.0, 300.0, 1000.0}) {
            const double m = active_minutes(log, gap);
            ASSERT_GE(m, prev);
            prev = m;
        }
        auto bigger = times;
        bigger.push_back(rng.uniform() * t);
        std::sort(bigger.begin(), bigger.end());
        ASSERT_GE(active_minutes(log_at(bigger)), active_minutes(log));
    }
}

TEST(SessionLogFile, LoadsFixtureAndComputesVelocity) {
    const auto log = load_session_log(kDir / "build_log.jsonl");
    EXPECT_EQ(log.student, "r01");
    EXPECT_EQ(log.phase, Phase::AiBuild);
    ASSERT_EQ(log.events.size(), 6u);
    EXPECT_EQ(log.events[0].payload, "sum the array");
    // Windows [0,220], [400,570], [1000,1120] give 510 s.
    EXPECT_DOUBLE_EQ(active_minutes(log), 8.5);
    // Hand count: operators = for < + [] return (n1 6, N1 10); operands total 0 i n 1 a (n2 6, N2 14).
    const double volume = 24.0 * std::log2(12.0);
    EXPECT_NEAR(velocity(log), volume / 8.5, 1e-12);
    EXPECT_DOUBLE_EQ(velocity(log, VelocityUnit::Loc), 5.0 / 8.5);
}

TEST(SessionLogFile, RejectsMalformedLogs) {
    EXPECT_THROW(load_session_log(kDir / "bad_prompt_in_refactor.jsonl"), ValidationError);
    EXPECT_THROW(load_session_log(kDir / "bad_time_order.jsonl"), ValidationError);
    try {
        load_session_log(kDir / "bad_kind.jsonl");
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find(":2:"), std::string::npos) << e.what();
        EXPECT_NE(std::string(e.what()).find("typing"), std::string::npos);
    }
}

TEST(Velocity, EmptyUnitAndZeroTime) {
    EXPECT_EQ(velocity(log_at({0})), 0.0);
    EXPECT_THROW(velocity(log_at({})), ComputationError);
    EXPECT_THROW(velocity(log_at({0, 10}), VelocityUnit::HalsteadBits, 0.0), ComputationError);
}

TEST(Omega, Examples) {
    codemetrics::CodeMetrics m;
    m.cc = 1;
    m.halstead.volume_v = 500;
    EXPECT_EQ(omega(m, {1.0, 0.0}), 0.0);

    OmegaCalibration cal;
    cal.alpha = 0.5;
    cal.beta = 0.001;
    m.cc = 7;
    m.halstead.volume_v = 1000;
    EXPECT_NEAR(omega(m, cal), 0.5 * std::log(7.0) + 1.0, 1e-15);
}

TEST(MCsr, Arithmetic) {
    EXPECT_DOUBLE_EQ(m_csr(5.0, 5.0, 1.0), 1.0);
    EXPECT_EQ(m_csr(0.0, 5.0, 1.3), 0.0);
    EXPECT_DOUBLE_EQ(m_csr(4.0, 10.0, 1.25), 0.5);
    EXPECT_THROW(m_csr(1.0, 0.0, 1.0), ComputationError);
}

TEST(MCsr, HomogeneityOverRandomFixtures) {
    Rng rng(200);
    for (int i = 0; i < 200; ++i) {
        const double vr = rng.uniform() * 50, vb = 0.1 + rng.uniform() * 50, om = rng.uniform() * 3;
        const double c = 0.1 + rng.uniform() * 10;
        const double base = m_csr(vr, vb, om);
        ASSERT_NEAR(m_csr(c * vr, vb, om), c * base, 1e-12 * (1 + std::abs(c * base)));
        ASSERT_NEAR(m_csr(vr, c * vb, om), base / c, 1e-12 * (1 + std::abs(base / c)));
    }
}

TEST(MCsr, FixturePair) {
    const auto build = load_session_log(kDir / "build_log.jsonl");
    const auto refactor = load_session_log(kDir / "refactor_log.jsonl");
    OmegaCalibration cal;
    cal.alpha = 0.8;
    cal.beta = 0.002;
    cal.calibrated = true;
    const auto r = m_csr(build, refactor, cal);
    // Same volume in both units; active time 510 s vs 340 s.
    EXPECT_NEAR(r.v_rec / r.v_build, 1.5, 1e-12);
    const double v = 24.0 * std::log2(12.0);
    EXPECT_NEAR(r.omega, 0.8 * std::log(2.0) + 0.002 * v, 1e-12);
    EXPECT_NEAR(r.omega_build, r.omega, 1e-12);
    EXPECT_NEAR(r.m_csr, 1.5 * r.omega, 1e-12);
    EXPECT_NEAR(r.delta_t, 89000.0 / 3600.0, 1e-12);
    EXPECT_EQ(r.test_pass_events, 1u);
    EXPECT_EQ(r.test_fail_events, 0u);
    EXPECT_FALSE(r.degenerate_omega);

    EXPECT_THROW(m_csr(refactor, build, cal), ValidationError);
    EXPECT_THROW(m_csr(build, refactor, OmegaCalibration::uncalibrated()), ValidationError);
    ScoringOptions opts;
    opts.allow_uncalibrated = true;
    EXPECT_NO_THROW(m_csr(build, refactor, OmegaCalibration::uncalibrated(), opts));
    auto other = load_session_log(kDir / "refactor_log.jsonl");
    other.student = "r02";
    EXPECT_THROW(m_csr(build, other, cal), ValidationError);
}

TEST(Calibrate, MatchesCramerOracleAndExactFitGivesMeanOne) {
    Rng rng(17);
    for (int trial = 0; trial < 100; ++trial) {
        const double alpha = 0.1 + rng.uniform(), beta = 1e-4 + rng.uniform() * 0.01;
        std::vector<CalibrationRow> rows;
        const int n = 2 + static_cast<int>(rng.below(8));
        for (int i = 0; i < n; ++i) {
            const double ln_cc = std::log(1.0 + 1 + rng.below(12));
            const double v = 20 + rng.uniform() * 800;
            rows.push_back({"p" + std::to_string(i), 1.0 / (alpha * ln_cc + beta * v), ln_cc, v});
        }
        const auto cal = calibrate_omega(rows, "synthetic");
        ASSERT_NEAR(cal.alpha, alpha, 1e-8 * (1 + alpha));
        ASSERT_NEAR(cal.beta, beta, 1e-8);
        ASSERT_LT(cal.residual_ss, 1e-18);
        double mean = 0;
        for (const auto& r : rows) mean += m_csr(r.velocity_ratio, 1.0, cal.alpha * r.ln_cc + cal.beta * r.volume_v);
        ASSERT_NEAR(mean / n, 1.0, 1e-9);

        for (auto& r : rows) r.velocity_ratio *= 1.0 + 0.2 * (rng.uniform() - 0.5);
        const auto noisy = calibrate_omega(rows, "synthetic");
        const auto [a, b] = cramer_calibration(rows);
        ASSERT_NEAR(noisy.alpha, a, 1e-9 * (1 + std::abs(a)));
        ASSERT_NEAR(noisy.beta, b, 1e-9 * (1 + std::abs(b)));
    }
}

TEST(Calibrate, RankDeficientDesign) {
    std::vector<CalibrationRow> rows{{"e1", 0.5, std::log(3.0), 100}, {"e2", 0.5, std::log(3.0), 100}};
    try {
        calibrate_omega(rows, "x");
        FAIL();
    } catch (const ComputationError& e) {
        EXPECT_NE(std::string(e.what()).find("e1, e2"), std::string::npos) << e.what();
    }
    const auto cal = calibrate_omega(rows, "x", {.allow_min_norm = true});
    EXPECT_TRUE(cal.underdetermined);
    EXPECT_NEAR(cal.alpha * std::log(3.0) + cal.beta * 100, 2.0, 1e-9);
    // Minimum norm: coefficient vector parallel to the single design row.
    EXPECT_NEAR(cal.alpha / cal.beta, std::log(3.0) / 100, 1e-9);

    std::vector<CalibrationRow> zero{{"a", 1, 0, 0}, {"b", 1, 0, 0}};
    EXPECT_THROW(calibrate_omega(zero, "x", {.allow_min_norm = true}), ComputationError);
    EXPECT_THROW(calibrate_omega(std::vector<CalibrationRow>{{"a", 1, 1, 1}}, "x"), ComputationError);
}

TEST(Calibrate, ResidualZeroWhenRatiosAllOne) {
    std::vector<CalibrationRow> rows{{"a", 1.0, std::log(2.0), 0.0}, {"b", 1.0, std::log(2.0), 50.0}};
    const auto cal = calibrate_omega(rows, "x");
    EXPECT_NEAR(cal.alpha, 1.0 / std::log(2.0), 1e-12);
    EXPECT_NEAR(cal.beta, 0.0, 1e-15);
    EXPECT_LT(cal.residual_ss, 1e-24);
}

// Golden values for the shipped expert panel, from an independent numpy lstsq.
TEST(Calibrate, StudyExpertPanelGolden) {
    const auto dir = std::filesystem::path(VCP_FIXTURE_DIR) / "study" / "experts";
    std::vector<SessionPair> pairs;
    for (int i = 1; i <= 6; ++i) {
        const auto id = "e" + std::to_string(i);
        pairs.push_back({load_session_log(dir / (id + "_build.jsonl")), load_session_log(dir / (id + "_refactor.jsonl"))});
    }
    const auto cal = calibrate_omega(pairs, "expert-panel");
    EXPECT_NEAR(cal.alpha, 1.1872668235498876, 1e-12);
    EXPECT_NEAR(cal.beta, -0.0005465236494063416, 1e-15);
    EXPECT_FALSE(cal.underdetermined);
    double mean = 0.0;
    for (const auto& p : pairs) {
        const auto r = m_csr(p.build, p.refactor, cal, {});
        mean += r.m_csr / 6.0;
    }
    EXPECT_NEAR(mean, 0.9489441183680745, 1e-12);
}

TEST(Calibrate, JsonRoundTrip) {
    OmegaCalibration cal;
    cal.alpha = 0.25;
    cal.beta = 0.003;
    cal.baseline_source = "experts-v1";
    cal.calibrated = true;
    cal.n_pairs = 6;
    const auto back = calibration_from_json(to_json(cal), "mem");
    EXPECT_EQ(back.alpha, cal.alpha);
    EXPECT_EQ(back.beta, cal.beta);
    EXPECT_EQ(back.baseline_source, "experts-v1");
    EXPECT_TRUE(back.calibrated);
    EXPECT_EQ(back.n_pairs, 6u);
    auto bad = to_json(cal);
    bad["gamma"] = 1;
    EXPECT_THROW(calibration_from_json(bad, "mem"), ValidationError);
}

TEST(FitDecay, NoiselessExamples) {
    std::vector<DecayObservation> obs;
    for (double t : {0.0, 5.0, 10.0}) obs.push_back({t, std::exp(-0.1 * t)});
    auto fit = fit_decay(obs);
    EXPECT_NEAR(fit.lambda, 0.1, 1e-12);
    EXPECT_NEAR(fit.s0, 1.0, 1e-12);

    fit = fit_decay({{0, 0.8}, {3, 0.8}, {9, 0.8}});
    EXPECT_NEAR(fit.lambda, 0.0, 1e-15);
    EXPECT_NEAR(fit.s0, 0.8, 1e-15);
}

TEST(FitDecay, ExactOnRandomNoiselessExponentials) {
    Rng rng(5);
    for (int i = 0; i < 300; ++i) {
        const double s0 = 0.01 + rng.uniform() * 5, lambda = rng.uniform() * 0.5;
        std::vector<DecayObservation> obs;
        const int n = 2 + static_cast<int>(rng.below(10));
        for (int k = 0; k < n; ++k) {
            const double t = k * 3.0 + rng.uniform();
            obs.push_back({t, s0 * std::exp(-lambda * t)});
        }
        const auto fit = fit_decay(obs);
        ASSERT_NEAR(fit.lambda, lambda, 1e-12);
        ASSERT_NEAR(fit.s0, s0, 1e-11 * s0);
    }
}

TEST(FitDecay, NoisySyntheticSetRecoversLambda) {
    Rng rng(7);
    std::vector<DecayObservation> obs;
    for (int i = 0; i < 12; ++i) {
        const double t = 2.0 * i;
        obs.push_back({t, std::exp(-0.2 * t + 0.05 * rng.normal())});
    }
    const auto fit = fit_decay(obs);
    EXPECT_NEAR(fit.lambda, 0.2, 0.05);
    EXPECT_GT(fit.rms_residual, 0.0);
}

TEST(FitDecay, ZerosExcludedAndErrors) {
    const auto fit = fit_decay({{0, 1.0}, {1, 0.0}, {2, std::exp(-0.6)}});
    EXPECT_EQ(fit.excluded_zero, 1u);
    EXPECT_EQ(fit.used, 2u);
    EXPECT_NEAR(fit.lambda, 0.3, 1e-12);
    EXPECT_THROW(fit_decay({{0, 1.0}, {1, 0.0}}), ComputationError);
    EXPECT_THROW(fit_decay({{1, 1.0}, {1, 0.5}}), ComputationError);
    EXPECT_THROW(fit_decay({{1, -1.0}, {2, 0.5}}), ValidationError);
}

}  // namespace
}  // namespace vcp::retention
