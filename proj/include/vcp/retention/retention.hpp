#pragma once

// Skill-retention scoring from paired build / cold-refactor sessions.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "vcp/codemetrics/ast.hpp"
#include "vcp/codemetrics/metrics.hpp"
#include "vcp/json_io.hpp"

namespace vcp::retention {

enum class Phase { AiBuild, ColdRefactor };
enum class EventKind { Edit, Prompt, Paste, Run, TestPass, TestFail };
enum class VelocityUnit { HalsteadBits, Loc };

const char* to_string(Phase p);
const char* to_string(EventKind k);
const char* to_string(VelocityUnit u);
std::optional<Phase> phase_from_string(const std::string& text);
std::optional<EventKind> event_kind_from_string(const std::string& text);
std::optional<VelocityUnit> velocity_unit_from_string(const std::string& text);

struct SessionEvent {
    double t = 0.0;  ///< seconds
    EventKind kind = EventKind::Edit;
    std::optional<std::string> payload;
};

struct SessionLog {
    std::string student;
    Phase phase = Phase::AiBuild;
    std::vector<SessionEvent> events;
    codemetrics::SourceUnit final_unit;

    /// Timestamps non-decreasing; no prompt/paste events in a cold refactor.
    void validate() const;
};

inline constexpr double kDefaultIdleGap = 120.0;

/// Event-record lines {t, kind, payload?} followed by a trailer record
/// {student, phase, final_unit} whose path is relative to the log file.
SessionLog load_session_log(const std::filesystem::path& path);

/// Length of the union of [t, t + idle_gap] over all events, in minutes.
double active_minutes(const SessionLog& log, double idle_gap = kDefaultIdleGap);

/// Non-blank lines that are not comment-only.
std::size_t lines_of_code(const codemetrics::SourceUnit& unit);

/// Size of the final unit (Halstead bits or LOC) per active minute.
/// Throws ComputationError when the log has no active time.
double velocity(const SessionLog& log, VelocityUnit unit = VelocityUnit::HalsteadBits,
                double idle_gap = kDefaultIdleGap);

struct OmegaCalibration {
    double alpha = 1.0;
    double beta = 0.0;
    std::string baseline_source = "uncalibrated";
    bool calibrated = false;
    bool underdetermined = false;  ///< minimum-norm solution of a rank-1 design
    double residual_ss = 0.0;
    std::size_t n_pairs = 0;

    static OmegaCalibration uncalibrated() { return {}; }
};

/// alpha * ln(cc) + beta * volume_v.
double omega(const codemetrics::CodeMetrics& metrics, const OmegaCalibration& cal);

/// One expert observation: velocity ratio and the refactor target's size.
struct CalibrationRow {
    std::string label;
    double velocity_ratio = 0.0;  ///< v_rec / v_build
    double ln_cc = 0.0;
    double volume_v = 0.0;
};

struct CalibrationOptions {
    bool allow_min_norm = false;  ///< accept a rank-1 design and return the minimum-norm solution
};

/// Least squares for sum_i (ratio_i * (alpha ln CC_i + beta V_i) - 1)^2.
/// Full-rank designs are solved through the normal equations. Rank-deficient
/// designs throw ComputationError naming the collinear rows unless
/// allow_min_norm is set and the rank is 1.
OmegaCalibration calibrate_omega(const std::vector<CalibrationRow>& rows, std::string baseline_source,
                                 const CalibrationOptions& options = {});

struct VelocityOptions {
    VelocityUnit unit = VelocityUnit::HalsteadBits;
    double idle_gap = kDefaultIdleGap;
};

struct SessionPair {
    SessionLog build;
    SessionLog refactor;
};

CalibrationRow calibration_row(const SessionPair& pair, const VelocityOptions& velocity = {});

OmegaCalibration calibrate_omega(const std::vector<SessionPair>& expert_pairs, std::string baseline_source,
                                 const VelocityOptions& velocity = {}, const CalibrationOptions& options = {});

struct RetentionResult {
    std::string student;
    double v_build = 0.0;
    double v_rec = 0.0;
    double omega = 0.0;        ///< on the refactor target (used for m_csr)
    double omega_build = 0.0;  ///< on the AI-built artifact, reported only
    double m_csr = 0.0;
    double delta_t = 0.0;      ///< hours from last build event to first refactor event
    bool degenerate_omega = false;
    std::size_t test_pass_events = 0;
    std::size_t test_fail_events = 0;
};

/// (v_rec / v_build) * omega. Throws ComputationError when v_build <= 0.
double m_csr(double v_rec, double v_build, double omega);

struct ScoringOptions {
    VelocityOptions velocity;
    bool allow_uncalibrated = false;
};

/// Throws ValidationError on phase or student mismatch, or when `cal` is
/// uncalibrated and allow_uncalibrated is not set.
RetentionResult m_csr(const SessionLog& build, const SessionLog& refactor, const OmegaCalibration& cal,
                      const ScoringOptions& options = {});

struct DecayObservation {
    double t = 0.0;  ///< hours
    double s = 0.0;  ///< retained skill, >= 0
};

struct DecayFit {
    double s0 = 0.0;
    double lambda = 0.0;
    double rms_residual = 0.0;  ///< in ln(s)
    std::size_t used = 0;
    std::size_t excluded_zero = 0;
};

/// Least squares on ln s = ln s0 - lambda t; s = 0 points are excluded and
/// counted. Throws ComputationError with fewer than two usable distinct t.
DecayFit fit_decay(const std::vector<DecayObservation>& observations);

Json to_json(const OmegaCalibration& cal);
OmegaCalibration calibration_from_json(const Json& doc, const std::string& where);
Json to_json(const RetentionResult& r);

}  // namespace vcp::retention
