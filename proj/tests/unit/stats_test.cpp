#include "vcp/stats/stats.hpp"

#include <cmath>
#include <array>
#include <filesystem>
#include <map>

#include <Eigen/Dense>
#include <boost/math/distributions/non_central_t.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <gtest/gtest.h>

#include "vcp/error.hpp"
#include "vcp/rng.hpp"

namespace vcp::stats {
namespace {

const std::filesystem::path kStats = std::filesystem::path(VCP_FIXTURE_DIR) / "stats";

void load_pairs(std::vector<double>& x, std::vector<double>& y) {
    for (const auto& rec : read_json_lines(kStats / "spearman_n20.jsonl")) {
        x.push_back(rec.value["x"].get<double>());
        y.push_back(rec.value["y"].get<double>());
    }
}

TEST(Ranks, AverageTies) {
    EXPECT_EQ(average_ranks({10, 20, 20, 5}), (std::vector<double>{2, 3.5, 3.5, 1}));
    EXPECT_EQ(average_ranks({1, 1, 1, 1}), (std::vector<double>{2.5, 2.5, 2.5, 2.5}));
}

TEST(Spearman, PerfectMonotone) {
    std::vector<double> x{1, 2, 3, 7, 9, 20};
    EXPECT_EQ(spearman(x, x).rho, 1.0);
    EXPECT_EQ(spearman(x, x).p_t, 0.0);
    std::vector<double> y(x.rbegin(), x.rend());
    EXPECT_EQ(spearman(x, y).rho, -1.0);
    std::vector<double> sq;
    for (double v : x) sq.push_back(std::exp(v / 3));
    EXPECT_EQ(spearman(x, sq).rho, 1.0);
}

TEST(Spearman, Errors) {
    EXPECT_THROW(spearman({1, 2, 3}, {1, 2, 3}), ValidationError);
    EXPECT_THROW(spearman({1, 2, 3, 4}, {1, 2, 3}), ValidationError);
    EXPECT_THROW(spearman({1, 2, 3, 4}, {5, 5, 5, 5}), ComputationError);
}

TEST(Spearman, MatchesSquaredRankDifferenceFormulaWithoutTies) {
    Rng rng(8);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 4 + rng.below(40);
        std::vector<double> x(n), y(n);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = static_cast<double>(i) + rng.uniform() * 0.5;
            y[i] = rng.uniform();
        }
        const auto rx = average_ranks(x), ry = average_ranks(y);
        double d2 = 0;
        for (std::size_t i = 0; i < n; ++i) d2 += (rx[i] - ry[i]) * (rx[i] - ry[i]);
        const double nd = static_cast<double>(n);
        ASSERT_NEAR(spearman(x, y).rho, 1 - 6 * d2 / (nd * (nd * nd - 1)), 1e-12);
    }
}

TEST(Spearman, InvariantUnderMonotoneTransforms) {
    Rng rng(12);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> x, y, fx, fy;
        for (int i = 0; i < 15; ++i) {
            x.push_back(static_cast<double>(rng.below(8)));
            y.push_back(rng.normal());
        }
        for (double v : x) fx.push_back(std::pow(v + 1, 3) - 5);
        for (double v : y) fy.push_back(-std::exp(-v));
        if (std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; })) continue;
        ASSERT_NEAR(spearman(fx, fy).rho, spearman(x, y).rho, 1e-12);
    }
}

TEST(Spearman, FixtureSignificance) {
    std::vector<double> x, y;
    load_pairs(x, y);
    ASSERT_EQ(x.size(), 20u);
    const auto r = spearman(x, y, 100000, 42);
    EXPECT_NEAR(r.rho, 0.58, 0.005);
    // Reference values: rho = 1 - 6 * 558 / 7980; t-approximation p from a scientific Python stack.
    EXPECT_NEAR(r.rho, 1.0 - 6.0 * 558.0 / 7980.0, 1e-12);
    EXPECT_NEAR(r.p_t, 0.0072900732244842075, 1e-9);
    EXPECT_GE(r.p_t, 0.006);
    EXPECT_LE(r.p_t, 0.010);
    ASSERT_TRUE(r.p_permutation);
    EXPECT_NEAR(*r.p_permutation, r.p_t, 0.002);
    EXPECT_EQ(spearman(x, y, 100000, 42).p_permutation, r.p_permutation);
}

TEST(Kappa, Examples) {
    std::vector<std::string> a, b;
    const auto add = [&](const std::string& x, const std::string& y, int count) {
        for (int i = 0; i < count; ++i) {
            a.push_back(x);
            b.push_back(y);
        }
    };
    add("yes", "yes", 45);
    add("yes", "no", 5);
    add("no", "yes", 5);
    add("no", "no", 45);
    const auto k = cohens_kappa(a, b);
    EXPECT_DOUBLE_EQ(k.p_observed, 0.9);
    EXPECT_DOUBLE_EQ(k.p_expected, 0.5);
    EXPECT_NEAR(k.kappa, 0.8, 1e-15);

    std::vector<std::string> same{"a", "b", "c", "a"};
    EXPECT_EQ(cohens_kappa(same, same).kappa, 1.0);
    EXPECT_THROW(cohens_kappa({"a", "a"}, {"a", "a"}), ComputationError);
    EXPECT_THROW(cohens_kappa({"a"}, {"a", "b"}), ValidationError);
    EXPECT_THROW(cohens_kappa({}, {}), ValidationError);
}

TEST(Kappa, IndependentRatersNearZero) {
    Rng rng(100000);
    const std::vector<std::string> cats{"low", "mid", "high"};
    std::vector<std::string> a, b;
    for (int i = 0; i < 100000; ++i) {
        a.push_back(cats[rng.below(3)]);
        b.push_back(cats[rng.below(3)]);
    }
    EXPECT_NEAR(cohens_kappa(a, b).kappa, 0.0, 0.01);
}

TEST(Kappa, InvariantUnderRelabeling) {
    Rng rng(4);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<std::string> a, b, ra, rb;
        for (int i = 0; i < 30; ++i) {
            a.push_back(std::to_string(rng.below(4)));
            b.push_back(rng.uniform() < 0.6 ? a.back() : std::to_string(rng.below(4)));
        }
        const auto relabel = [](const std::string& s) { return "z" + std::to_string(9 - std::stoi(s)); };
        for (std::size_t i = 0; i < a.size(); ++i) {
            ra.push_back(relabel(a[i]));
            rb.push_back(relabel(b[i]));
        }
        ASSERT_NEAR(cohens_kappa(ra, rb).kappa, cohens_kappa(a, b).kappa, 1e-14);
    }
}

double exact_power(const PowerSpec& spec, std::size_t n) {
    const double nd = static_cast<double>(n);
    const double df = spec.design == Design::TwoSample ? 2 * nd - 2 : nd - 1;
    const double ncp = spec.design == Design::TwoSample ? spec.effect_size_d * std::sqrt(nd / 2)
                                                        : spec.effect_size_d * std::sqrt(nd);
    const double c = boost::math::quantile(boost::math::complement(boost::math::students_t(df), spec.alpha / 2));
    const boost::math::non_central_t nct(df, ncp);
    return boost::math::cdf(boost::math::complement(nct, c)) + boost::math::cdf(nct, -c);
}

TEST(Power, ConditionalEstimatorTracksNoncentralT) {
    for (auto design : {Design::TwoSample, Design::Paired}) {
        PowerSpec spec;
        spec.design = design;
        spec.replicates = 200000;
        for (std::size_t n : {5u, 20u, 34u, 64u}) {
            const double mc = monte_carlo_power(spec, n);
            ASSERT_NEAR(mc, exact_power(spec, n), 0.0015) << to_string(design) << " n=" << n;
        }
    }
}

TEST(Power, CrudeEstimatorWithinSamplingError) {
    PowerSpec spec;
    spec.estimator = PowerEstimator::Crude;
    spec.replicates = 20000;
    const double exact = exact_power(spec, 40);
    const double se = std::sqrt(exact * (1 - exact) / 20000);
    EXPECT_NEAR(monte_carlo_power(spec, 40), exact, 4 * se);
}

TEST(Power, RequiredNExamples) {
    PowerSpec spec;
    const auto two = required_n(spec);
    EXPECT_TRUE(two.n == 63 || two.n == 64) << two.n;
    EXPECT_NEAR(two.normal_approx_n, 62.79, 0.01);
    EXPECT_EQ(two.normal_approx_n_ceil, 63u);
    spec.design = Design::Paired;
    const auto paired = required_n(spec);
    EXPECT_GE(paired.n, 33u);
    EXPECT_LE(paired.n, 35u);
    EXPECT_NEAR(paired.normal_approx_n, 31.40, 0.01);
    spec.effect_size_d = 3.0;
    EXPECT_LE(required_n(spec).n, 5u);
    spec.design = Design::TwoSample;
    EXPECT_LE(required_n(spec).n, 5u);
}

TEST(Power, MonotoneInEffectAndTarget) {
    PowerSpec spec;
    spec.replicates = 5000;
    std::size_t prev = kMaxSampleSize;
    for (double d : {0.3, 0.5, 0.8, 1.2, 2.0}) {
        spec.effect_size_d = d;
        const auto n = required_n(spec).n;
        ASSERT_LE(n, prev);
        prev = n;
    }
    spec.effect_size_d = 0.6;
    prev = 0;
    for (double target : {0.5, 0.7, 0.8, 0.9, 0.95}) {
        spec.target_power = target;
        const auto n = required_n(spec).n;
        ASSERT_GE(n, prev);
        prev = n;
    }
}

TEST(Power, UnreachableAndInvalid) {
    PowerSpec spec;
    spec.effect_size_d = 0.001;
    spec.replicates = 200;
    EXPECT_THROW(required_n(spec), ComputationError);
    spec.effect_size_d = 0.0;
    EXPECT_THROW(required_n(spec), ValidationError);
    spec.effect_size_d = 0.5;
    spec.alpha = 1.0;
    EXPECT_THROW(required_n(spec), ValidationError);
}

TEST(Attrition, Examples) {
    auto r = attrition_target(64, 0.2);
    EXPECT_EQ(r.raw_target, 80u);
    EXPECT_EQ(r.target, 80u);
    EXPECT_EQ(attrition_target(80, 0.0).target, 80u);
    r = attrition_target(64, 0.2, false, 100);
    EXPECT_TRUE(r.stated_exceeds_formula);
    r = attrition_target(65, 0.2, true);
    EXPECT_EQ(r.raw_target, 82u);
    EXPECT_EQ(r.target, 90u);
    EXPECT_FALSE(attrition_target(64, 0.2, false, 80).stated_exceeds_formula);
    EXPECT_THROW(attrition_target(64, 1.0), ValidationError);
    EXPECT_THROW(attrition_target(64, -0.1), ValidationError);
}

TEST(Cohort, NoiselessAndDeterministic) {
    CohortParams p{1.0, 0.4, 0.25, 0.0, 0.0};
    const auto data = simulate_cohort(p, 3, 4, 9);
    ASSERT_EQ(data.observations.size(), 24u);
    for (const auto& o : data.observations) ASSERT_EQ(o.y, 1.0 + 0.4 * o.condition + 0.25 * o.time);
    EXPECT_EQ(data.observations.front().student, "s0001");
    EXPECT_EQ(data.observations.back().condition, 1);

    p.sigma_u = p.sigma_e = 0.5;
    EXPECT_EQ(to_json_lines(simulate_cohort(p, 5, 3, 77)), to_json_lines(simulate_cohort(p, 5, 3, 77)));
    EXPECT_NE(to_json_lines(simulate_cohort(p, 5, 3, 77)), to_json_lines(simulate_cohort(p, 5, 3, 78)));
}

TEST(Cohort, NullCalibrationOfOccasionMeanTTest) {
    const CohortParams p{0.0, 0.0, 0.1, 0.5, 0.5};
    int rejections = 0;
    const int seeds = 1000;
    for (int seed = 0; seed < seeds; ++seed) {
        const auto data = simulate_cohort(p, 15, 4, static_cast<std::uint64_t>(seed));
        std::map<std::string, std::pair<int, double>> means;
        for (const auto& o : data.observations) {
            means[o.student].first = o.condition;
            means[o.student].second += o.y / 4.0;
        }
        double s[2] = {0, 0}, q[2] = {0, 0};
        int n[2] = {0, 0};
        for (const auto& [_, cm] : means) {
            s[cm.first] += cm.second;
            q[cm.first] += cm.second * cm.second;
            ++n[cm.first];
        }
        const double m0 = s[0] / n[0], m1 = s[1] / n[1];
        const double pooled = ((q[0] - n[0] * m0 * m0) + (q[1] - n[1] * m1 * m1)) / (n[0] + n[1] - 2);
        const double t = (m1 - m0) / std::sqrt(pooled * (1.0 / n[0] + 1.0 / n[1]));
        const boost::math::students_t dist(n[0] + n[1] - 2);
        if (2 * boost::math::cdf(boost::math::complement(dist, std::abs(t))) < 0.05) ++rejections;
    }
    const double rate = rejections / static_cast<double>(seeds);
    EXPECT_NEAR(rate, 0.05, 3 * std::sqrt(0.05 * 0.95 / seeds));
}

TEST(Cohort, GroupDifferenceConvergesAtLargeN) {
    const CohortParams p{1.0, 0.4, 0.2, 0.5, 0.5};
    const auto data = simulate_cohort(p, 10000, 1, 2026);
    double s[2] = {0, 0};
    for (const auto& o : data.observations) s[o.condition] += o.y;
    const double diff = (s[1] - s[0]) / 10000.0;
    const double se = std::sqrt(2 * (0.25 + 0.25) / 10000.0);
    EXPECT_NEAR(diff, 0.4, 3 * se);
}

TEST(Cohort, JsonLinesRoundTrip) {
    const auto data = simulate_cohort({}, 3, 2, 5);
    const auto path = std::filesystem::temp_directory_path() / "vcp_cohort_roundtrip.jsonl";
    write_text_file(path, to_json_lines(data));
    const auto back = read_cohort(path);
    ASSERT_EQ(back.observations.size(), data.observations.size());
    for (std::size_t i = 0; i < back.observations.size(); ++i) {
        EXPECT_EQ(back.observations[i].y, data.observations[i].y);
        EXPECT_EQ(back.observations[i].condition, data.observations[i].condition);
    }
    write_text_file(path, "{\"student\":\"a\",\"occasion\":0,\"condition\":\"vibe\",\"time\":0,\"y\":1}\n"
                          "{\"student\":\"a\",\"occasion\":0,\"condition\":\"vibe\",\"time\":0,\"y\":2}\n");
    EXPECT_THROW(read_cohort(path), ValidationError);
    std::filesystem::remove(path);
}

// Dense route: -2 REML log-likelihood from the full covariance matrix.
double dense_reml_deviance(const CohortDataset& data, double theta) {
    const auto n = static_cast<Eigen::Index>(data.observations.size());
    Eigen::MatrixXd x(n, 3), h = Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& o = data.observations[static_cast<std::size_t>(i)];
        x.row(i) << 1.0, o.condition, o.time;
        y(i) = o.y;
        for (Eigen::Index k = 0; k < n; ++k)
            if (data.observations[static_cast<std::size_t>(k)].student == o.student) h(i, k) += theta;
    }
    const Eigen::MatrixXd hinv = h.inverse();
    const Eigen::MatrixXd a = x.transpose() * hinv * x;
    const Eigen::VectorXd beta = a.ldlt().solve(x.transpose() * hinv * y);
    const Eigen::VectorXd r = y - x * beta;
    const double dof = static_cast<double>(n) - 3;
    const double sigma2 = r.dot(hinv * r) / dof;
    return dof * std::log(sigma2) + std::log(h.determinant()) + std::log(a.determinant()) +
           dof * (1 + std::log(2 * M_PI));
}

// OLS through explicit Gaussian elimination on the 3x3 normal equations.
std::array<double, 3> ols(const CohortDataset& data) {
    double m[3][4] = {};
    for (const auto& o : data.observations) {
        const double x[3] = {1.0, static_cast<double>(o.condition), o.time};
        for (int i = 0; i < 3; ++i) {
            for (int k = 0; k < 3; ++k) m[i][k] += x[i] * x[k];
            m[i][3] += x[i] * o.y;
        }
    }
    for (int c = 0; c < 3; ++c)
        for (int r = c + 1; r < 3; ++r) {
            const double f = m[r][c] / m[c][c];
            for (int k = c; k < 4; ++k) m[r][k] -= f * m[c][k];
        }
    std::array<double, 3> b{};
    for (int r = 2; r >= 0; --r) {
        double s = m[r][3];
        for (int k = r + 1; k < 3; ++k) s -= m[r][k] * b[static_cast<std::size_t>(k)];
        b[static_cast<std::size_t>(r)] = s / m[r][r];
    }
    return b;
}

CohortDataset unbalanced(std::uint64_t seed) {
    auto data = simulate_cohort({0.5, 0.4, 0.3, 0.6, 0.4}, 6, 4, seed);
    Rng rng(seed, 99);
    std::vector<Observation> kept;
    for (const auto& o : data.observations)
        if (o.occasion < 2 || rng.uniform() < 0.6) kept.push_back(o);
    data.observations = kept;
    return data;
}

TEST(MixedModel, DevianceMatchesDenseComputation) {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const auto data = unbalanced(seed);
        for (double theta : {0.0, 0.05, 0.7, 3.0, 40.0})
            ASSERT_NEAR(reml_deviance(data, theta), dense_reml_deviance(data, theta), 1e-8) << theta;
    }
}

TEST(MixedModel, ThetaMinimizesDevianceOnFineGrid) {
    for (std::uint64_t seed : {4u, 5u, 6u, 7u}) {
        const auto data = unbalanced(seed);
        const auto fit = fit_mixed(data);
        const double best = reml_deviance(data, fit.theta);
        for (double t = 0.0; t < 10.0; t += 0.01) ASSERT_LE(best, reml_deviance(data, t) + 1e-9) << t;
        EXPECT_NEAR(fit.reml_loglik, -0.5 * best, 1e-9);
        EXPECT_LE(fit.ci95_beta1_low, fit.beta1);
        EXPECT_GE(fit.ci95_beta1_high, fit.beta1);
    }
}

TEST(MixedModel, NoiselessRecovery) {
    auto data = simulate_cohort({1.0, 0.4, 0.25, 0.0, 0.0}, 5, 4, 3);
    Rng rng(31);
    for (auto& o : data.observations) o.y += 1e-12 * rng.normal();
    const auto fit = fit_mixed(data);
    EXPECT_NEAR(fit.beta0, 1.0, 1e-6);
    EXPECT_NEAR(fit.beta1, 0.4, 1e-6);
    EXPECT_NEAR(fit.beta2, 0.25, 1e-6);
}

TEST(MixedModel, ReducesToOlsWhenThetaIsZero) {
    const auto data = unbalanced(11);
    const auto b = ols(data);
    const auto fit = fit_mixed(data, {.pinned_theta = 0.0});
    EXPECT_NEAR(fit.beta0, b[0], 1e-9);
    EXPECT_NEAR(fit.beta1, b[1], 1e-9);
    EXPECT_NEAR(fit.beta2, b[2], 1e-9);
    EXPECT_EQ(fit.sigma_u, 0.0);
    EXPECT_TRUE(fit.theta_pinned);

    const auto balanced = simulate_cohort({0.2, 0.4, 0.1, 0.0, 0.5}, 20, 4, 12);
    const auto free_fit = fit_mixed(balanced);
    const auto bb = ols(balanced);
    EXPECT_LT(free_fit.theta, 0.1);
    EXPECT_NEAR(free_fit.beta0, bb[0], 1e-6);
    EXPECT_NEAR(free_fit.beta1, bb[1], 1e-6);
    EXPECT_NEAR(free_fit.beta2, bb[2], 1e-6);
}

TEST(MixedModel, DesignErrors) {
    auto data = simulate_cohort({}, 3, 3, 1);
    auto one_condition = data;
    for (auto& o : one_condition.observations) o.condition = 0;
    EXPECT_THROW(fit_mixed(one_condition), ValidationError);
    auto flat_time = data;
    for (auto& o : flat_time.observations) o.time = 2.0;
    EXPECT_THROW(fit_mixed(flat_time), ComputationError);
    EXPECT_THROW(fit_mixed(simulate_cohort({}, 3, 1, 1)), ValidationError);
    EXPECT_THROW(fit_mixed(simulate_cohort({}, 1, 3, 1)), ValidationError);
}

}  // namespace
}  // namespace vcp::stats
