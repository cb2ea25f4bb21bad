#include "vcp/composite/composite.hpp"

#include <cmath>

#include "vcp/error.hpp"

namespace vcp::composite {

void StudentRecord::validate() const {
    const auto fail = [&](const std::string& what) {
        throw ValidationError("student '" + student + "': " + what);
    };
    if (!std::isfinite(m_csr) || m_csr < 0.0) fail("m_csr must be finite and >= 0");
    if (!(m_ht > 0.0 && m_ht < 1.0)) fail("m_ht must lie in (0, 1)");
    if (!(e_gap >= 0.0 && e_gap <= 1.0)) fail("e_gap must lie in [0, 1]");
    if (!std::isfinite(t_dev) || t_dev < 0.0) fail("t_dev must be finite and >= 0");
}

void UtilityWeights::validate() const {
    for (double w : {w1, w2, w3})
        if (!(w >= 0.0) || !std::isfinite(w)) throw ValidationError("utility weights must be finite and >= 0");
    if (std::abs(w1 + w2 + w3 - 1.0) > 1e-9)
        throw ValidationError("utility weights must sum to 1 (got " + std::to_string(w1 + w2 + w3) + ")");
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw ValidationError("gamma must be finite and >= 0");
}

double utility(const StudentRecord& rec, const UtilityWeights& w) {
    return w.w1 * rec.m_csr + w.w2 * rec.m_ht + w.w3 * (1.0 - rec.e_gap) - w.gamma * rec.t_dev;
}

double break_even(const StudentRecord& vibe, const StudentRecord& trad, const UtilityWeights& w) {
    if (w.gamma == 0.0) throw ComputationError("break_even: no break-even point when gamma = 0");
    const double deficit = w.w1 * (trad.m_csr - vibe.m_csr) + w.w2 * (trad.m_ht - vibe.m_ht) +
                           w.w3 * (vibe.e_gap - trad.e_gap);
    return deficit / w.gamma;
}

const char* to_string(Zone z) {
    switch (z) {
        case Zone::FoundationalAcquisition: return "foundational_acquisition";
        case Zone::ArchitecturalExploration: return "architectural_exploration";
        case Zone::ProfessionalEfficiency: return "professional_efficiency";
    }
    return "?";
}

ZoneResult classify_zone(const StudentRecord& rec, const ZoneThresholds& t) {
    if (!(rec.m_csr > t.m_csr)) return {Zone::FoundationalAcquisition, "m_csr", false};
    if (rec.e_gap > t.e_gap) return {Zone::ArchitecturalExploration, "e_gap", true};
    if (rec.m_ht >= t.m_ht) return {Zone::ProfessionalEfficiency, "m_ht", false};
    return {Zone::ArchitecturalExploration, "e_gap", false};
}

MetricSummary summarize(const std::vector<double>& values) {
    MetricSummary s;
    s.n = values.size();
    if (values.empty()) return s;
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = sum / static_cast<double>(s.n);
    if (s.n < 2) return s;
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.sd = std::sqrt(ss / static_cast<double>(s.n - 1));
    return s;
}

std::vector<ConditionSummary> cohort_summary(const std::vector<StudentRecord>& records, const UtilityWeights& w) {
    struct Columns {
        std::vector<double> m_csr, m_ht, e_gap, u;
    };
    std::map<std::string, Columns> groups;
    for (const auto& r : records) {
        auto& g = groups[r.condition.value_or("all")];
        g.m_csr.push_back(r.m_csr);
        g.m_ht.push_back(r.m_ht);
        g.e_gap.push_back(r.e_gap);
        g.u.push_back(utility(r, w));
    }
    std::vector<ConditionSummary> out;
    for (const auto& [name, g] : groups)
        out.push_back({name, summarize(g.m_csr), summarize(g.m_ht), summarize(g.e_gap), summarize(g.u)});
    return out;
}

StudentRecord student_record_from_json(const Json& doc, const std::string& where) {
    reject_unknown_keys(doc, {"student", "condition", "m_csr", "m_ht", "e_gap", "t_dev"}, where);
    StudentRecord r;
    r.student = require_string(doc, "student", where);
    if (doc.contains("condition")) r.condition = require_string(doc, "condition", where);
    r.m_csr = require_number(doc, "m_csr", where);
    r.m_ht = require_number(doc, "m_ht", where);
    r.e_gap = require_number(doc, "e_gap", where);
    r.t_dev = require_number(doc, "t_dev", where);
    try {
        r.validate();
    } catch (const ValidationError& e) {
        throw ValidationError(where + ": " + e.what());
    }
    return r;
}

Json to_json(const StudentRecord& rec) {
    Json j;
    j["student"] = rec.student;
    if (rec.condition) j["condition"] = *rec.condition;
    j["m_csr"] = rec.m_csr;
    j["m_ht"] = rec.m_ht;
    j["e_gap"] = rec.e_gap;
    j["t_dev"] = rec.t_dev;
    return j;
}

Json to_json(const UtilityWeights& w) { return {{"w1", w.w1}, {"w2", w.w2}, {"w3", w.w3}, {"gamma", w.gamma}}; }

Json to_json(const ZoneThresholds& t) { return {{"m_csr", t.m_csr}, {"e_gap", t.e_gap}, {"m_ht", t.m_ht}}; }

Json to_json(const MetricSummary& s) { return {{"n", s.n}, {"mean", s.mean}, {"sd", s.sd}}; }

Json to_json(const ConditionSummary& s) {
    return {{"condition", s.condition},
            {"m_csr", to_json(s.m_csr)},
            {"m_ht", to_json(s.m_ht)},
            {"e_gap", to_json(s.e_gap)},
            {"utility", to_json(s.utility)}};
}

}  // namespace vcp::composite
