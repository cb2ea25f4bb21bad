#include "vcp/explainability/explainability.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>

#include "vcp/error.hpp"

namespace vcp::explainability {

namespace {

bool is_word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

}  // namespace

void ConceptOntology::validate() const {
    if (concepts.empty()) throw ValidationError("ontology '" + unit + "': no concepts");
    std::set<std::string> seen;
    std::vector<double> weights;
    for (const auto& c : concepts) {
        if (c.concept_id.empty()) throw ValidationError("ontology '" + unit + "': empty concept_id");
        if (!seen.insert(c.concept_id).second)
            throw ValidationError("ontology '" + unit + "': duplicate concept_id '" + c.concept_id + "'");
        if (!(c.proportion > 0.0 && c.proportion <= 1.0))
            throw ValidationError("ontology '" + unit + "': concept '" + c.concept_id +
                                  "' proportion must lie in (0, 1]");
        if (c.phrases.empty())
            throw ValidationError("ontology '" + unit + "': concept '" + c.concept_id + "' has no phrases");
        for (const auto& p : c.phrases)
            if (normalize_text(p).find_first_not_of(' ') == std::string::npos)
                throw ValidationError("ontology '" + unit + "': concept '" + c.concept_id + "' has a blank phrase");
        weights.push_back(c.proportion);
    }
    std::sort(weights.begin(), weights.end());
    double sum = 0.0;
    for (double w : weights) sum += w;
    if (std::abs(sum - 1.0) > kProportionTolerance)
        throw ValidationError("ontology '" + unit + "': proportions sum to " + std::to_string(sum) +
                              ", expected 1 within 1e-9");
}

ConceptOntology ontology_from_json(const Json& doc, const std::string& where) {
    if (!doc.is_object()) throw ValidationError(where + ": ontology must be an object");
    reject_unknown_keys(doc, {"unit", "version", "concepts"}, where);
    ConceptOntology o;
    o.unit = require_string(doc, "unit", where);
    o.version = require_string(doc, "version", where);
    const auto& list = require_field(doc, "concepts", where);
    if (!list.is_array()) throw ValidationError(where + ": field 'concepts' must be an array");
    for (std::size_t i = 0; i < list.size(); ++i) {
        const auto here = where + ": concepts[" + std::to_string(i) + "]";
        const auto& c = list[i];
        if (!c.is_object()) throw ValidationError(here + " must be an object");
        reject_unknown_keys(c, {"concept_id", "proportion", "phrases"}, here);
        Concept item;
        item.concept_id = require_string(c, "concept_id", here);
        item.proportion = require_number(c, "proportion", here);
        const auto& phrases = require_field(c, "phrases", here);
        if (!phrases.is_array()) throw ValidationError(here + ": field 'phrases' must be an array");
        for (const auto& p : phrases) {
            if (!p.is_string()) throw ValidationError(here + ": phrases must be strings");
            item.phrases.push_back(p.get<std::string>());
        }
        o.concepts.push_back(std::move(item));
    }
    try {
        o.validate();
    } catch (const ValidationError& e) {
        throw ValidationError(where + ": " + e.what());
    }
    return o;
}

ConceptOntology load_ontology(const std::filesystem::path& path) {
    return ontology_from_json(read_json_file(path), path.string());
}

Json to_json(const ConceptOntology& ontology) {
    Json j;
    j["unit"] = ontology.unit;
    j["version"] = ontology.version;
    j["concepts"] = Json::array();
    for (const auto& c : ontology.concepts)
        j["concepts"].push_back({{"concept_id", c.concept_id}, {"proportion", c.proportion}, {"phrases", c.phrases}});
    return j;
}

std::string normalize_text(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    for (char c : text) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            pending_space = true;
            continue;
        }
        if (pending_space && !out.empty()) out.push_back(' ');
        pending_space = false;
        out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    return out;
}

bool contains_phrase(const std::string& text, const std::string& phrase) {
    const auto hay = normalize_text(text);
    const auto needle = normalize_text(phrase);
    if (needle.empty()) return false;
    for (auto pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1)) {
        const bool left_ok = pos == 0 || !is_word_char(hay[pos - 1]) || !is_word_char(needle.front());
        const auto end = pos + needle.size();
        const bool right_ok = end == hay.size() || !is_word_char(hay[end]) || !is_word_char(needle.back());
        if (left_ok && right_ok) return true;
    }
    return false;
}

std::set<std::string> match_concepts(const std::string& transcript, const ConceptOntology& ontology) {
    std::set<std::string> matched;
    for (const auto& c : ontology.concepts)
        for (const auto& p : c.phrases)
            if (contains_phrase(transcript, p)) {
                matched.insert(c.concept_id);
                break;
            }
    return matched;
}

ExplanationScore e_gap_from_coverage(double coverage, double h_c, double epsilon) {
    if (!(epsilon > 0.0)) throw DomainError("e_gap: epsilon must be > 0");
    if (!(h_c >= 0.0)) throw DomainError("e_gap: h_c must be >= 0");
    if (!(coverage >= 0.0 && coverage <= 1.0 + kProportionTolerance))
        throw DomainError("e_gap: coverage must lie in [0, 1]");
    ExplanationScore s;
    s.coverage = std::min(coverage, 1.0);
    s.h_c = h_c;
    s.epsilon = epsilon;
    s.h_e = s.coverage * h_c;
    if (h_c == 0.0) {
        s.degenerate = true;
        s.e_gap = 0.0;
        return s;
    }
    // 1 - h_e / (h_c + eps), rearranged so full coverage does not lose the
    // eps / (h_c + eps) residue to cancellation.
    s.e_gap = std::clamp(((1.0 - s.coverage) * h_c + epsilon) / (h_c + epsilon), 0.0, 1.0);
    return s;
}

ExplanationScore e_gap(const std::string& transcript, const ConceptOntology& ontology, double h_c, double epsilon) {
    auto matched = match_concepts(transcript, ontology);
    // Summed in concept_id order so concept ordering in the file cannot change the result.
    std::map<std::string, double> by_id;
    for (const auto& c : ontology.concepts) by_id[c.concept_id] = c.proportion;
    // Normalized by the proportion total (1 within tolerance), so matching every
    // concept gives coverage exactly 1.
    double covered = 0.0, total = 0.0;
    for (const auto& [id, w] : by_id) {
        total += w;
        if (matched.count(id)) covered += w;
    }
    const double coverage = total > 0.0 ? covered / total : 0.0;
    auto s = e_gap_from_coverage(std::min(coverage, 1.0), h_c, epsilon);
    s.matched = std::move(matched);
    return s;
}

Json to_json(const ExplanationScore& score) {
    Json j;
    j["matched"] = score.matched;
    j["coverage"] = score.coverage;
    j["h_e"] = score.h_e;
    j["h_c"] = score.h_c;
    j["e_gap"] = score.e_gap;
    j["epsilon"] = score.epsilon;
    j["degenerate"] = score.degenerate;
    j["h_e_definition"] = kHeDefinition;
    return j;
}

}  // namespace vcp::explainability
