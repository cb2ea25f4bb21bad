#include "vcp/composite/composite.hpp"

#include <cmath>

#include <gtest/gtest.h>

#include "vcp/error.hpp"
#include "vcp/rng.hpp"

namespace vcp::composite {
namespace {

StudentRecord rec(double m_csr, double m_ht, double e_gap, double t_dev = 0.0) {
    return {"s", std::nullopt, m_csr, m_ht, e_gap, t_dev};
}

TEST(Utility, Examples) {
    Rng rng(1);
    for (int i = 0; i < 50; ++i) {
        const double a = rng.uniform(), b = rng.uniform() * (1 - a);
        const UtilityWeights w{a, b, 1 - a - b, 0.0};
        ASSERT_NEAR(utility(rec(1, 1 - 1e-300, 0), w), 1.0, 1e-12);
        ASSERT_NEAR(utility(rec(0, 1e-300, 1), w), 0.0, 1e-12);
    }
    const UtilityWeights w{1.0 / 3, 1.0 / 3, 1.0 / 3, 0.05};
    EXPECT_NEAR(utility(rec(0.9, 0.6, 0.3, 2.0), w), 0.633333333333, 1e-9);
}

TEST(BreakEven, Examples) {
    const UtilityWeights w{1.0 / 3, 1.0 / 3, 1.0 / 3, 0.05};
    EXPECT_EQ(break_even(rec(0.7, 0.6, 0.2), rec(0.7, 0.6, 0.2), w), 0.0);
    EXPECT_NEAR(break_even(rec(0.7, 0.6, 0.2), rec(0.8, 0.6, 0.2), w), 0.666666666667, 1e-9);
    EXPECT_LT(break_even(rec(0.9, 0.8, 0.1), rec(0.7, 0.6, 0.2), w), 0.0);
    EXPECT_THROW(break_even(rec(0.7, 0.6, 0.2), rec(0.8, 0.6, 0.2), {1.0 / 3, 1.0 / 3, 1.0 / 3, 0.0}),
                 ComputationError);
}

TEST(BreakEven, SubstitutionAndScaling) {
    Rng rng(1000);
    for (int i = 0; i < 1000; ++i) {
        const double a = rng.uniform(), b = rng.uniform() * (1 - a);
        const UtilityWeights w{a, b, 1 - a - b, 0.01 + rng.uniform()};
        auto vibe = rec(rng.uniform() * 1.5, 0.01 + 0.98 * rng.uniform(), rng.uniform(), rng.uniform() * 10);
        auto trad = rec(rng.uniform() * 1.5, 0.01 + 0.98 * rng.uniform(), rng.uniform());
        const double dt = break_even(vibe, trad, w);
        trad.t_dev = vibe.t_dev + dt;
        ASSERT_LE(std::abs(utility(vibe, w) - utility(trad, w)), 1e-12);

        const double c = 0.5 + rng.uniform();
        auto trad2 = trad;
        trad2.m_csr = vibe.m_csr + c * (trad.m_csr - vibe.m_csr);
        trad2.m_ht = vibe.m_ht + c * (trad.m_ht - vibe.m_ht);
        trad2.e_gap = vibe.e_gap + c * (trad.e_gap - vibe.e_gap);
        ASSERT_NEAR(break_even(vibe, trad2, w), c * dt, 1e-12 * (1 + std::abs(c * dt)));
    }
}

TEST(Zone, Examples) {
    EXPECT_EQ(classify_zone(rec(0.5, 0.9, 0.1)).zone, Zone::FoundationalAcquisition);
    EXPECT_EQ(classify_zone(rec(0.5, 0.9, 0.1)).control_metric, "m_csr");
    const auto arch = classify_zone(rec(0.9, 0.3, 0.2));
    EXPECT_EQ(arch.zone, Zone::ArchitecturalExploration);
    EXPECT_EQ(arch.control_metric, "e_gap");
    EXPECT_FALSE(arch.foundational_review);
    const auto pro = classify_zone(rec(0.9, 0.9, 0.2));
    EXPECT_EQ(pro.zone, Zone::ProfessionalEfficiency);
    EXPECT_EQ(pro.control_metric, "m_ht");
    const auto review = classify_zone(rec(0.9, 0.9, 0.45));
    EXPECT_EQ(review.zone, Zone::ArchitecturalExploration);
    EXPECT_TRUE(review.foundational_review);
}

TEST(Zone, BoundaryStraddling) {
    const double up = std::nextafter(0.8, 1.0), down = std::nextafter(0.3, 0.0), over = std::nextafter(0.3, 1.0);
    EXPECT_EQ(classify_zone(rec(0.8, 0.9, 0.1)).zone, Zone::FoundationalAcquisition);
    EXPECT_EQ(classify_zone(rec(up, 0.9, 0.1)).zone, Zone::ProfessionalEfficiency);
    EXPECT_EQ(classify_zone(rec(up, 0.4, 0.3)).zone, Zone::ArchitecturalExploration);
    EXPECT_FALSE(classify_zone(rec(up, 0.4, down)).foundational_review);
    EXPECT_TRUE(classify_zone(rec(up, 0.4, over)).foundational_review);
    EXPECT_EQ(classify_zone(rec(up, 0.5, 0.3)).zone, Zone::ProfessionalEfficiency);
    EXPECT_EQ(classify_zone(rec(up, std::nextafter(0.5, 0.0), 0.3)).zone, Zone::ArchitecturalExploration);
}

TEST(Zone, RaisingMcsrNeverReturnsToFoundational) {
    Rng rng(9);
    for (int i = 0; i < 2000; ++i) {
        auto r = rec(rng.uniform() * 1.2, 0.01 + 0.98 * rng.uniform(), rng.uniform());
        const auto before = classify_zone(r).zone;
        r.m_csr += rng.uniform();
        if (before != Zone::FoundationalAcquisition) ASSERT_NE(classify_zone(r).zone, Zone::FoundationalAcquisition);
    }
}

TEST(CompositeValidation, RecordsAndWeights) {
    EXPECT_NO_THROW(rec(0.5, 0.5, 0.5).validate());
    EXPECT_THROW(rec(-0.1, 0.5, 0.5).validate(), ValidationError);
    EXPECT_THROW(rec(0.5, 1.0, 0.5).validate(), ValidationError);
    EXPECT_THROW(rec(0.5, 0.5, 1.1).validate(), ValidationError);
    EXPECT_THROW(rec(0.5, 0.5, 0.5, -1).validate(), ValidationError);
    EXPECT_NO_THROW(UtilityWeights{}.validate());
    EXPECT_THROW((UtilityWeights{0.5, 0.5, 0.5, 0}.validate()), ValidationError);
    EXPECT_THROW((UtilityWeights{1.2, -0.2, 0, 0}.validate()), ValidationError);
    EXPECT_THROW((UtilityWeights{1, 0, 0, -1}.validate()), ValidationError);

    Json j = to_json(rec(0.5, 0.5, 0.5));
    EXPECT_EQ(student_record_from_json(j, "mem").m_csr, 0.5);
    j["extra"] = 1;
    EXPECT_THROW(student_record_from_json(j, "mem"), ValidationError);
}

TEST(Summary, PerConditionMeansAndSd) {
    std::vector<StudentRecord> rs{{"a", "vibe", 0.2, 0.5, 0.4, 1}, {"b", "vibe", 0.6, 0.5, 0.2, 1},
                                  {"c", "trad", 0.9, 0.7, 0.1, 2}};
    const auto s = cohort_summary(rs, {});
    ASSERT_EQ(s.size(), 2u);
    EXPECT_EQ(s[0].condition, "trad");
    EXPECT_EQ(s[0].m_csr.n, 1u);
    EXPECT_EQ(s[0].m_csr.sd, 0.0);
    EXPECT_EQ(s[1].condition, "vibe");
    EXPECT_NEAR(s[1].m_csr.mean, 0.4, 1e-15);
    EXPECT_NEAR(s[1].m_csr.sd, std::sqrt(0.08), 1e-15);
    EXPECT_NEAR(s[1].e_gap.mean, 0.3, 1e-15);
}

}  // namespace
}  // namespace vcp::composite
