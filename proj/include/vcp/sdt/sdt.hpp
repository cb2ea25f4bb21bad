#pragma once

// Signal-detection scoring of hallucination-trap reviews under the
// equal-variance Gaussian model.

#include <optional>
#include <string>
#include <vector>

#include "vcp/json_io.hpp"

namespace vcp::sdt {

enum class GroundTruth { Trap, Clean };
enum class Correction { HalfCount, None };

const char* to_string(GroundTruth g);
const char* to_string(Correction c);
std::optional<GroundTruth> ground_truth_from_string(const std::string& text);
std::optional<Correction> correction_from_string(const std::string& text);

struct TrapResponse {
    std::string item_id;
    GroundTruth ground_truth = GroundTruth::Clean;
    bool flagged = false;
};

struct TrapResponseSet {
    std::string reviewer;
    std::vector<TrapResponse> items;

    std::size_t n_trap() const;
    std::size_t n_clean() const;
    /// Throws ValidationError: duplicate item ids, no trap items, or no clean items.
    void validate() const;
};

struct Rates {
    std::size_t hits = 0;
    std::size_t false_alarms = 0;
    std::size_t n_trap = 0;
    std::size_t n_clean = 0;
    double hit_rate = 0.0;
    double fa_rate = 0.0;
    double hit_rate_corrected = 0.0;
    double fa_rate_corrected = 0.0;
    bool correction_applied = false;
};

/// Raw and corrected hit / false-alarm rates. Half-count correction replaces
/// a rate of exactly 0 with 1/(2n) and exactly 1 with 1 - 1/(2n).
Rates rates(const TrapResponseSet& responses, Correction correction = Correction::HalfCount);

/// Z(H) - Z(F). Rates of exactly 0 or 1 throw DomainError.
double d_prime(double hit_rate, double fa_rate);

/// 1 / (1 + exp(-k (d' - delta))). Throws DomainError for k < 0.
double m_ht(double d_prime, double k, double delta);

struct SdtConfig {
    double k = 1.5;
    double delta = 1.0;
    Correction correction = Correction::HalfCount;
};

struct SdtResult {
    std::string reviewer;
    Rates rates;
    double d_prime = 0.0;
    double criterion_c = 0.0;  ///< -(Z(H) + Z(F)) / 2, diagnostic only
    double m_ht = 0.5;
    SdtConfig config;
};

SdtResult score(const TrapResponseSet& responses, const SdtConfig& config = {});

/// Groups trap-response records ({reviewer, item_id, ground_truth, flagged})
/// by reviewer, sorted by reviewer id. When `answer_key` maps item ids to
/// ground truth, records may omit ground_truth; a disagreeing record is a
/// ValidationError.
std::vector<TrapResponseSet> response_sets_from_records(
    const std::vector<Record>& records,
    const std::vector<std::pair<std::string, GroundTruth>>* answer_key = nullptr);

Json to_json(const SdtResult& result);

}  // namespace vcp::sdt
