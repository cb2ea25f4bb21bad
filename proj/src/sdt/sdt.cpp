#include "vcp/sdt/sdt.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "vcp/error.hpp"
#include "vcp/sdt/normal.hpp"

namespace vcp::sdt {

const char* to_string(GroundTruth g) { return g == GroundTruth::Trap ? "trap" : "clean"; }

const char* to_string(Correction c) { return c == Correction::HalfCount ? "half-count" : "none"; }

std::optional<GroundTruth> ground_truth_from_string(const std::string& text) {
    if (text == "trap") return GroundTruth::Trap;
    if (text == "clean") return GroundTruth::Clean;
    return std::nullopt;
}

std::optional<Correction> correction_from_string(const std::string& text) {
    if (text == "half-count") return Correction::HalfCount;
    if (text == "none") return Correction::None;
    return std::nullopt;
}

std::size_t TrapResponseSet::n_trap() const {
    return static_cast<std::size_t>(std::count_if(items.begin(), items.end(), [](const auto& r) {
        return r.ground_truth == GroundTruth::Trap;
    }));
}

std::size_t TrapResponseSet::n_clean() const { return items.size() - n_trap(); }

void TrapResponseSet::validate() const {
    std::set<std::string> ids;
    for (const auto& r : items)
        if (!ids.insert(r.item_id).second)
            throw ValidationError("reviewer '" + reviewer + "': duplicate item_id '" + r.item_id + "'");
    if (n_trap() == 0) throw ValidationError("reviewer '" + reviewer + "': no trap items");
    if (n_clean() == 0) throw ValidationError("reviewer '" + reviewer + "': no clean items");
}

namespace {

double half_count(double rate, std::size_t n, bool& applied) {
    const double half = 1.0 / (2.0 * static_cast<double>(n));
    if (rate == 0.0) {
        applied = true;
        return half;
    }
    if (rate == 1.0) {
        applied = true;
        return 1.0 - half;
    }
    return rate;
}

}  // namespace

Rates rates(const TrapResponseSet& responses, Correction correction) {
    responses.validate();
    Rates r;
    r.n_trap = responses.n_trap();
    r.n_clean = responses.n_clean();
    for (const auto& item : responses.items) {
        if (!item.flagged) continue;
        if (item.ground_truth == GroundTruth::Trap) ++r.hits;
        else ++r.false_alarms;
    }
    r.hit_rate = static_cast<double>(r.hits) / static_cast<double>(r.n_trap);
    r.fa_rate = static_cast<double>(r.false_alarms) / static_cast<double>(r.n_clean);
    r.hit_rate_corrected = r.hit_rate;
    r.fa_rate_corrected = r.fa_rate;
    if (correction == Correction::HalfCount) {
        r.hit_rate_corrected = half_count(r.hit_rate, r.n_trap, r.correction_applied);
        r.fa_rate_corrected = half_count(r.fa_rate, r.n_clean, r.correction_applied);
    }
    return r;
}

double d_prime(double hit_rate, double fa_rate) {
    auto check = [](double rate, const char* name) {
        if (!(rate > 0.0 && rate < 1.0))
            throw DomainError(std::string("d_prime: ") + name + " " + std::to_string(rate) +
                              " is not strictly inside (0, 1); apply half-count correction first");
    };
    check(hit_rate, "hit rate");
    check(fa_rate, "false-alarm rate");
    if (hit_rate == fa_rate) return 0.0;
    return inverse_normal_cdf(hit_rate) - inverse_normal_cdf(fa_rate);
}

double m_ht(double d_prime, double k, double delta) {
    if (!(k >= 0.0)) throw DomainError("m_ht: steepness k must be >= 0");
    return 1.0 / (1.0 + std::exp(-k * (d_prime - delta)));
}

SdtResult score(const TrapResponseSet& responses, const SdtConfig& config) {
    SdtResult out;
    out.reviewer = responses.reviewer;
    out.config = config;
    out.rates = rates(responses, config.correction);
    out.d_prime = d_prime(out.rates.hit_rate_corrected, out.rates.fa_rate_corrected);
    out.criterion_c = -0.5 * (inverse_normal_cdf(out.rates.hit_rate_corrected) +
                              inverse_normal_cdf(out.rates.fa_rate_corrected));
    out.m_ht = m_ht(out.d_prime, config.k, config.delta);
    return out;
}

std::vector<TrapResponseSet> response_sets_from_records(
    const std::vector<Record>& records,
    const std::vector<std::pair<std::string, GroundTruth>>* answer_key) {
    std::map<std::string, GroundTruth> key;
    if (answer_key) key.insert(answer_key->begin(), answer_key->end());

    std::map<std::string, TrapResponseSet> by_reviewer;
    for (const auto& rec : records) {
        const auto& obj = rec.value;
        reject_unknown_keys(obj, {"reviewer", "item_id", "ground_truth", "flagged"}, rec.where);
        TrapResponse r;
        const auto reviewer = require_string(obj, "reviewer", rec.where);
        r.item_id = require_string(obj, "item_id", rec.where);
        r.flagged = require_bool(obj, "flagged", rec.where);

        std::optional<GroundTruth> stated;
        if (obj.contains("ground_truth")) {
            const auto text = require_string(obj, "ground_truth", rec.where);
            stated = ground_truth_from_string(text);
            if (!stated)
                throw ValidationError(rec.where + ": field 'ground_truth' must be 'trap' or 'clean', got '" +
                                      text + "'");
        }
        if (answer_key) {
            const auto it = key.find(r.item_id);
            if (it == key.end())
                throw ValidationError(rec.where + ": item_id '" + r.item_id + "' not in answer key");
            if (stated && *stated != it->second)
                throw ValidationError(rec.where + ": ground_truth disagrees with answer key for '" +
                                      r.item_id + "'");
            stated = it->second;
        }
        if (!stated) throw ValidationError(rec.where + ": missing field 'ground_truth'");
        r.ground_truth = *stated;

        auto& set = by_reviewer[reviewer];
        set.reviewer = reviewer;
        set.items.push_back(std::move(r));
    }
    std::vector<TrapResponseSet> out;
    for (auto& [_, set] : by_reviewer) {
        set.validate();
        out.push_back(std::move(set));
    }
    return out;
}

Json to_json(const SdtResult& r) {
    Json j;
    j["reviewer"] = r.reviewer;
    j["n_trap"] = r.rates.n_trap;
    j["n_clean"] = r.rates.n_clean;
    j["hits"] = r.rates.hits;
    j["false_alarms"] = r.rates.false_alarms;
    j["hit_rate"] = r.rates.hit_rate;
    j["fa_rate"] = r.rates.fa_rate;
    j["hit_rate_corrected"] = r.rates.hit_rate_corrected;
    j["fa_rate_corrected"] = r.rates.fa_rate_corrected;
    j["correction"] = to_string(r.config.correction);
    j["correction_applied"] = r.rates.correction_applied;
    j["d_prime"] = r.d_prime;
    j["criterion_c"] = r.criterion_c;
    j["m_ht"] = r.m_ht;
    j["k"] = r.config.k;
    j["delta"] = r.config.delta;
    return j;
}

}  // namespace vcp::sdt
