#pragma once

// Pedagogical utility, break-even time saving and zone classification.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vcp/json_io.hpp"

namespace vcp::composite {

struct StudentRecord {
    std::string student;
    std::optional<std::string> condition;
    double m_csr = 0.0;
    double m_ht = 0.5;
    double e_gap = 0.0;
    double t_dev = 0.0;  ///< hours

    /// m_csr >= 0, m_ht in (0,1), e_gap in [0,1], t_dev >= 0, all finite.
    void validate() const;
};

struct UtilityWeights {
    double w1 = 1.0 / 3.0;
    double w2 = 1.0 / 3.0;
    double w3 = 1.0 / 3.0;
    double gamma = 0.0;  ///< utility per hour

    /// Non-negative weights summing to 1 within 1e-9; gamma >= 0.
    void validate() const;
};

/// w1 m_csr + w2 m_ht + w3 (1 - e_gap) - gamma t_dev.
double utility(const StudentRecord& rec, const UtilityWeights& w);

/// Minimum (t_dev_trad - t_dev_vibe) in hours at which U_vibe >= U_trad.
/// Negative when the vibe record dominates. Throws ComputationError when gamma == 0.
double break_even(const StudentRecord& vibe, const StudentRecord& trad, const UtilityWeights& w);

enum class Zone { FoundationalAcquisition, ArchitecturalExploration, ProfessionalEfficiency };
const char* to_string(Zone z);

struct ZoneThresholds {
    double m_csr = 0.8;  ///< strictly above: past foundational
    double e_gap = 0.3;  ///< at or below: explanation in place
    double m_ht = 0.5;   ///< at or above: professional
};

struct ZoneResult {
    Zone zone = Zone::FoundationalAcquisition;
    std::string control_metric;  ///< "m_csr", "e_gap" or "m_ht"
    bool foundational_review = false;  ///< m_csr past threshold but e_gap above it
};

ZoneResult classify_zone(const StudentRecord& rec, const ZoneThresholds& t = {});

struct MetricSummary {
    std::size_t n = 0;
    double mean = 0.0;
    double sd = 0.0;  ///< sample standard deviation; 0 when n < 2
};

MetricSummary summarize(const std::vector<double>& values);

struct ConditionSummary {
    std::string condition;
    MetricSummary m_csr, m_ht, e_gap, utility;
};

/// One entry per condition (records without one are grouped under "all"), sorted by name.
std::vector<ConditionSummary> cohort_summary(const std::vector<StudentRecord>& records, const UtilityWeights& w);

StudentRecord student_record_from_json(const Json& doc, const std::string& where);
Json to_json(const StudentRecord& rec);
Json to_json(const UtilityWeights& w);
Json to_json(const ZoneThresholds& t);
Json to_json(const MetricSummary& s);
Json to_json(const ConditionSummary& s);

}  // namespace vcp::composite
