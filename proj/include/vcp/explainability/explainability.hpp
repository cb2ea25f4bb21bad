#pragma once

// Concept-coverage scoring of explanation transcripts and the
// explainability gap against structural CFG entropy.

#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "vcp/json_io.hpp"

namespace vcp::explainability {

inline constexpr const char* kHeDefinition = "h_e = coverage * h_c; coverage = matched concept proportions / all proportions";
inline constexpr double kDefaultEpsilon = 1e-9;
inline constexpr double kProportionTolerance = 1e-9;

struct Concept {
    std::string concept_id;
    double proportion = 0.0;
    std::vector<std::string> phrases;
};

struct ConceptOntology {
    std::string unit;
    std::string version;
    std::vector<Concept> concepts;

    /// Unique ids, proportions in (0,1] summing to 1 within tolerance,
    /// non-empty phrase lists of non-blank phrases. Throws ValidationError.
    void validate() const;
};

ConceptOntology ontology_from_json(const Json& doc, const std::string& where);
ConceptOntology load_ontology(const std::filesystem::path& path);
Json to_json(const ConceptOntology& ontology);

/// Lowercases ASCII and collapses whitespace runs to one space.
std::string normalize_text(const std::string& text);

/// True when `phrase` occurs in `text` with no word character
/// (alphanumeric or '_') directly on either side. Case-insensitive.
bool contains_phrase(const std::string& text, const std::string& phrase);

std::set<std::string> match_concepts(const std::string& transcript, const ConceptOntology& ontology);

struct ExplanationScore {
    std::set<std::string> matched;
    double coverage = 0.0;
    double h_e = 0.0;
    double h_c = 0.0;
    double e_gap = 0.0;
    double epsilon = kDefaultEpsilon;
    bool degenerate = false;  ///< h_c == 0: nothing to explain, e_gap reported as 0
};

/// Throws DomainError when epsilon <= 0 or h_c < 0.
ExplanationScore e_gap(const std::string& transcript, const ConceptOntology& ontology, double h_c,
                       double epsilon = kDefaultEpsilon);

/// Score from a known coverage value.
ExplanationScore e_gap_from_coverage(double coverage, double h_c, double epsilon = kDefaultEpsilon);

Json to_json(const ExplanationScore& score);

}  // namespace vcp::explainability
