#include "vcp/retention/retention.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Dense>

#include "vcp/codemetrics/parser.hpp"
#include "vcp/error.hpp"

namespace vcp::retention {

const char* to_string(Phase p) { return p == Phase::AiBuild ? "ai_build" : "cold_refactor"; }

const char* to_string(EventKind k) {
    switch (k) {
        case EventKind::Edit: return "edit";
        case EventKind::Prompt: return "prompt";
        case EventKind::Paste: return "paste";
        case EventKind::Run: return "run";
        case EventKind::TestPass: return "test_pass";
        case EventKind::TestFail: return "test_fail";
    }
    return "?";
}

const char* to_string(VelocityUnit u) { return u == VelocityUnit::HalsteadBits ? "halstead-bits" : "loc"; }

std::optional<Phase> phase_from_string(const std::string& text) {
    if (text == "ai_build") return Phase::AiBuild;
    if (text == "cold_refactor") return Phase::ColdRefactor;
    return std::nullopt;
}

std::optional<EventKind> event_kind_from_string(const std::string& text) {
    for (auto k : {EventKind::Edit, EventKind::Prompt, EventKind::Paste, EventKind::Run, EventKind::TestPass,
                   EventKind::TestFail})
        if (text == to_string(k)) return k;
    return std::nullopt;
}

std::optional<VelocityUnit> velocity_unit_from_string(const std::string& text) {
    if (text == "halstead-bits") return VelocityUnit::HalsteadBits;
    if (text == "loc") return VelocityUnit::Loc;
    return std::nullopt;
}

void SessionLog::validate() const {
    for (std::size_t i = 1; i < events.size(); ++i)
        if (events[i].t < events[i - 1].t)
            throw ValidationError("session log for '" + student + "': timestamps decrease at event " +
                                  std::to_string(i + 1));
    if (phase == Phase::ColdRefactor)
        for (std::size_t i = 0; i < events.size(); ++i)
            if (events[i].kind == EventKind::Prompt || events[i].kind == EventKind::Paste)
                throw ValidationError("session log for '" + student + "': cold_refactor contains a " +
                                      to_string(events[i].kind) + " event (event " + std::to_string(i + 1) + ")");
}

SessionLog load_session_log(const std::filesystem::path& path) {
    const auto records = read_json_lines(path);
    if (records.empty()) throw ValidationError(path.string() + ": empty session log");
    SessionLog log;
    const auto& trailer = records.back();
    if (!trailer.value.contains("final_unit"))
        throw ValidationError(trailer.where + ": last record must be the trailer {student, phase, final_unit}");
    reject_unknown_keys(trailer.value, {"student", "phase", "final_unit"}, trailer.where);
    log.student = require_string(trailer.value, "student", trailer.where);
    const auto phase_text = require_string(trailer.value, "phase", trailer.where);
    const auto phase = phase_from_string(phase_text);
    if (!phase)
        throw ValidationError(trailer.where + ": field 'phase' must be 'ai_build' or 'cold_refactor', got '" +
                              phase_text + "'");
    log.phase = *phase;

    for (std::size_t i = 0; i + 1 < records.size(); ++i) {
        const auto& rec = records[i];
        reject_unknown_keys(rec.value, {"t", "kind", "payload"}, rec.where);
        SessionEvent e;
        e.t = require_number(rec.value, "t", rec.where);
        const auto kind_text = require_string(rec.value, "kind", rec.where);
        const auto kind = event_kind_from_string(kind_text);
        if (!kind) throw ValidationError(rec.where + ": unknown event kind '" + kind_text + "'");
        e.kind = *kind;
        if (rec.value.contains("payload")) e.payload = require_string(rec.value, "payload", rec.where);
        log.events.push_back(std::move(e));
    }

    const auto unit_path = path.parent_path() / require_string(trailer.value, "final_unit", trailer.where);
    try {
        log.final_unit = codemetrics::parse(read_text_file(unit_path), unit_path.stem().string());
    } catch (const codemetrics::ParseError& e) {
        throw ValidationError(unit_path.string() + ": " + e.what());
    }
    try {
        log.validate();
    } catch (const ValidationError& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
    return log;
}

double active_minutes(const SessionLog& log, double idle_gap) {
    if (log.events.empty()) return 0.0;
    std::vector<double> times;
    times.reserve(log.events.size());
    for (const auto& e : log.events) times.push_back(e.t);
    std::sort(times.begin(), times.end());
    double total = 0.0;
    double start = times.front();
    double end = start + idle_gap;
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (times[i] > end) {
            total += end - start;
            start = times[i];
        }
        end = times[i] + idle_gap;
    }
    total += end - start;
    return total / 60.0;
}

std::size_t lines_of_code(const codemetrics::SourceUnit& unit) {
    std::istringstream in(unit.text);
    std::string line;
    std::size_t count = 0;
    while (std::getline(in, line)) {
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        if (line.compare(first, 2, "//") == 0) continue;
        ++count;
    }
    return count;
}

double velocity(const SessionLog& log, VelocityUnit unit, double idle_gap) {
    const double minutes = active_minutes(log, idle_gap);
    if (!(minutes > 0.0))
        throw ComputationError("velocity undefined for '" + log.student + "' (" + to_string(log.phase) +
                               "): no active time");
    const double size = unit == VelocityUnit::HalsteadBits ? codemetrics::halstead(log.final_unit).volume_v
                                                           : static_cast<double>(lines_of_code(log.final_unit));
    return size / minutes;
}

double omega(const codemetrics::CodeMetrics& metrics, const OmegaCalibration& cal) {
    return cal.alpha * std::log(static_cast<double>(metrics.cc)) + cal.beta * metrics.halstead.volume_v;
}

OmegaCalibration calibrate_omega(const std::vector<CalibrationRow>& rows, std::string baseline_source,
                                 const CalibrationOptions& options) {
    if (rows.size() < 2) throw ComputationError("calibrate_omega: need at least 2 expert pairs");
    const auto m = static_cast<Eigen::Index>(rows.size());
    Eigen::MatrixXd design(m, 2);
    for (Eigen::Index i = 0; i < m; ++i) {
        const auto& r = rows[static_cast<std::size_t>(i)];
        if (!std::isfinite(r.velocity_ratio) || !std::isfinite(r.ln_cc) || !std::isfinite(r.volume_v))
            throw ComputationError("calibrate_omega: non-finite input in row '" + r.label + "'");
        design(i, 0) = r.velocity_ratio * r.ln_cc;
        design(i, 1) = r.velocity_ratio * r.volume_v;
    }
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(m);

    // Rank from singular values of the column-scaled design, so the
    // bits-scale volume column does not mask the log-scale one.
    Eigen::Vector2d scale = design.colwise().norm().transpose();
    for (int c = 0; c < 2; ++c)
        if (scale(c) == 0.0) scale(c) = 1.0;
    const Eigen::MatrixXd scaled = design * scale.cwiseInverse().asDiagonal();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(scaled, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto sv = svd.singularValues();
    const double tol = 1e-10 * std::max(1.0, sv(0));
    const int rank = (sv(0) > tol) + (sv(1) > tol);

    OmegaCalibration cal;
    cal.baseline_source = std::move(baseline_source);
    cal.calibrated = true;
    cal.n_pairs = rows.size();

    if (rank == 2) {
        const Eigen::Matrix2d normal = design.transpose() * design;
        const Eigen::Vector2d rhs = design.transpose() * ones;
        const Eigen::Vector2d coef = normal.inverse() * rhs;
        cal.alpha = coef(0);
        cal.beta = coef(1);
    } else {
        std::string names;
        for (const auto& r : rows) names += (names.empty() ? "" : ", ") + r.label;
        if (rank == 0)
            throw ComputationError("calibrate_omega: design matrix is zero (every row has ln CC = 0 and V = 0): " +
                                   names);
        if (!options.allow_min_norm)
            throw ComputationError("calibrate_omega: rank-deficient design, (ln CC, V) rows are collinear: " + names);
        // Minimum-norm least squares via the pseudo-inverse of the unscaled design.
        Eigen::JacobiSVD<Eigen::MatrixXd> raw(design, Eigen::ComputeThinU | Eigen::ComputeThinV);
        raw.setThreshold(1e-10);
        const Eigen::Vector2d coef = raw.solve(ones);
        cal.alpha = coef(0);
        cal.beta = coef(1);
        cal.underdetermined = true;
    }
    const Eigen::VectorXd residual = design * Eigen::Vector2d(cal.alpha, cal.beta) - ones;
    cal.residual_ss = residual.squaredNorm();
    return cal;
}

CalibrationRow calibration_row(const SessionPair& pair, const VelocityOptions& velocity_options) {
    const double v_build = velocity(pair.build, velocity_options.unit, velocity_options.idle_gap);
    const double v_rec = velocity(pair.refactor, velocity_options.unit, velocity_options.idle_gap);
    if (!(v_build > 0.0))
        throw ComputationError("calibration pair '" + pair.build.student + "': build velocity is zero");
    const auto target = codemetrics::metrics(pair.refactor.final_unit);
    return {pair.build.student, v_rec / v_build, std::log(static_cast<double>(target.cc)),
            target.halstead.volume_v};
}

OmegaCalibration calibrate_omega(const std::vector<SessionPair>& expert_pairs, std::string baseline_source,
                                 const VelocityOptions& velocity_options, const CalibrationOptions& options) {
    std::vector<CalibrationRow> rows;
    for (const auto& p : expert_pairs) rows.push_back(calibration_row(p, velocity_options));
    return calibrate_omega(rows, std::move(baseline_source), options);
}

double m_csr(double v_rec, double v_build, double omega_value) {
    if (!(v_build > 0.0)) throw ComputationError("m_csr undefined: build velocity is zero");
    return (v_rec / v_build) * omega_value;
}

RetentionResult m_csr(const SessionLog& build, const SessionLog& refactor, const OmegaCalibration& cal,
                      const ScoringOptions& options) {
    if (build.phase != Phase::AiBuild)
        throw ValidationError("m_csr: build log for '" + build.student + "' has phase " + to_string(build.phase));
    if (refactor.phase != Phase::ColdRefactor)
        throw ValidationError("m_csr: refactor log for '" + refactor.student + "' has phase " +
                              to_string(refactor.phase));
    if (build.student != refactor.student)
        throw ValidationError("m_csr: student mismatch ('" + build.student + "' vs '" + refactor.student + "')");
    if (!cal.calibrated && !options.allow_uncalibrated)
        throw ValidationError("m_csr: refusing to score with an uncalibrated Omega (pass a calibration or allow "
                              "uncalibrated scoring)");

    RetentionResult r;
    r.student = build.student;
    r.v_build = velocity(build, options.velocity.unit, options.velocity.idle_gap);
    r.v_rec = velocity(refactor, options.velocity.unit, options.velocity.idle_gap);
    r.omega = omega(codemetrics::metrics(refactor.final_unit), cal);
    r.omega_build = omega(codemetrics::metrics(build.final_unit), cal);
    r.degenerate_omega = r.omega == 0.0;
    r.m_csr = m_csr(r.v_rec, r.v_build, r.omega);
    if (!build.events.empty() && !refactor.events.empty())
        r.delta_t = (refactor.events.front().t - build.events.back().t) / 3600.0;
    for (const auto& e : refactor.events) {
        r.test_pass_events += e.kind == EventKind::TestPass;
        r.test_fail_events += e.kind == EventKind::TestFail;
    }
    return r;
}

DecayFit fit_decay(const std::vector<DecayObservation>& observations) {
    DecayFit fit;
    std::vector<std::pair<double, double>> points;
    for (const auto& o : observations) {
        if (!(o.s >= 0.0) || !std::isfinite(o.t))
            throw ValidationError("fit_decay: observation with invalid t or negative s");
        if (o.s == 0.0) {
            ++fit.excluded_zero;
            continue;
        }
        points.emplace_back(o.t, std::log(o.s));
    }
    const auto n = static_cast<double>(points.size());
    double mean_t = 0.0, mean_y = 0.0;
    for (const auto& [t, y] : points) {
        mean_t += t;
        mean_y += y;
    }
    if (points.size() < 2) throw ComputationError("fit_decay: fewer than 2 observations with s > 0");
    mean_t /= n;
    mean_y /= n;
    double stt = 0.0, sty = 0.0;
    for (const auto& [t, y] : points) {
        stt += (t - mean_t) * (t - mean_t);
        sty += (t - mean_t) * (y - mean_y);
    }
    if (!(stt > 0.0)) throw ComputationError("fit_decay: all usable observations share one t");
    const double slope = sty / stt;
    const double intercept = mean_y - slope * mean_t;
    fit.lambda = -slope;
    fit.s0 = std::exp(intercept);
    fit.used = points.size();
    double ss = 0.0;
    for (const auto& [t, y] : points) {
        const double e = y - (intercept + slope * t);
        ss += e * e;
    }
    fit.rms_residual = std::sqrt(ss / n);
    return fit;
}

Json to_json(const OmegaCalibration& cal) {
    Json j;
    j["alpha"] = cal.alpha;
    j["beta"] = cal.beta;
    j["baseline_source"] = cal.baseline_source;
    j["calibrated"] = cal.calibrated;
    j["underdetermined"] = cal.underdetermined;
    j["residual_ss"] = cal.residual_ss;
    j["n_pairs"] = cal.n_pairs;
    return j;
}

OmegaCalibration calibration_from_json(const Json& doc, const std::string& where) {
    reject_unknown_keys(doc, {"alpha", "beta", "baseline_source", "calibrated", "underdetermined", "residual_ss",
                              "n_pairs"},
                        where);
    OmegaCalibration cal;
    cal.alpha = require_number(doc, "alpha", where);
    cal.beta = require_number(doc, "beta", where);
    cal.baseline_source = require_string(doc, "baseline_source", where);
    cal.calibrated = doc.contains("calibrated") ? require_bool(doc, "calibrated", where) : true;
    if (doc.contains("underdetermined")) cal.underdetermined = require_bool(doc, "underdetermined", where);
    if (doc.contains("residual_ss")) cal.residual_ss = require_number(doc, "residual_ss", where);
    if (doc.contains("n_pairs")) cal.n_pairs = static_cast<std::size_t>(require_integer(doc, "n_pairs", where));
    return cal;
}

Json to_json(const RetentionResult& r) {
    Json j;
    j["student"] = r.student;
    j["v_build"] = r.v_build;
    j["v_rec"] = r.v_rec;
    j["omega"] = r.omega;
    j["omega_build"] = r.omega_build;
    j["m_csr"] = r.m_csr;
    j["delta_t"] = r.delta_t;
    j["degenerate_omega"] = r.degenerate_omega;
    j["test_pass_events"] = r.test_pass_events;
    j["test_fail_events"] = r.test_fail_events;
    return j;
}

}  // namespace vcp::retention
