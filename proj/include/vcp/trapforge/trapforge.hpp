#pragma once

// Hallucination-trap corpora: labeled single-site defects injected into
// correct VCPLang programs.
//
// Defect kinds and their applicable sites (live code only):
//   inverted-condition  comparison operator inside an `if` condition,
//                       replaced by its logical negation (< becomes >=, ...)
//   off-by-one          ordering comparison in a while/for guard, strictness
//                       toggled (< becomes <=, > becomes >=, and back)
//   unchecked-index     an `if` without else whose condition compares an
//                       identifier that indexes an array in its body; the
//                       guard is removed and the body inlined
//   unsanitized-sink    sanitize(x) passed to a sink call (see kSinkCalls);
//                       the wrapper is dropped
//   dropped-update      an assignment, directly in a loop body, to a
//                       variable read by the loop guard; the statement is
//                       deleted

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "vcp/codemetrics/ast.hpp"
#include "vcp/error.hpp"
#include "vcp/json_io.hpp"
#include "vcp/sdt/sdt.hpp"

namespace vcp::trapforge {

enum class DefectKind { InvertedCondition, OffByOne, UncheckedIndex, UnsanitizedSink, DroppedUpdate };

inline constexpr DefectKind kAllKinds[] = {DefectKind::InvertedCondition, DefectKind::OffByOne,
                                           DefectKind::UncheckedIndex, DefectKind::UnsanitizedSink,
                                           DefectKind::DroppedUpdate};

inline constexpr const char* kSinkCalls[] = {"query", "exec", "execute", "system", "render", "write_db"};

const char* to_string(DefectKind kind);
std::optional<DefectKind> defect_kind_from_string(const std::string& text);

class NotApplicable : public ComputationError {
public:
    explicit NotApplicable(DefectKind kind);
    DefectKind kind() const { return kind_; }

private:
    DefectKind kind_;
};

/// A candidate mutation: replace `span` of the origin text with `replacement`.
struct MutationSite {
    codemetrics::SourceSpan span;
    std::string replacement;
};

std::vector<MutationSite> applicable_sites(const codemetrics::SourceUnit& origin, DefectKind kind);

struct TrapItem {
    std::string item_id;
    std::string origin;
    std::string source;
    sdt::GroundTruth ground_truth = sdt::GroundTruth::Clean;
    std::optional<DefectKind> defect_kind;
    std::optional<MutationSite> mutation_site;  ///< span refers to the origin text
};

/// Mutates one uniformly chosen applicable site. The result always parses.
/// Throws NotApplicable when the origin has no site for `kind`.
TrapItem inject(const codemetrics::SourceUnit& origin, DefectKind kind, std::uint64_t rng_seed);

struct TrapCorpus {
    std::vector<TrapItem> items;  ///< reviewer-facing order
    std::uint64_t seed = 0;
    double trap_fraction = 0.0;
    std::size_t traps_requested = 0;
    std::vector<std::string> shortfall;  ///< origins selected for a trap but with no applicable kind
};

/// Deterministic in (origins, trap_fraction, seed). round(trap_fraction * n)
/// origins are selected for mutation; each gets a kind drawn uniformly over
/// its applicable kinds from the stream (seed, origin index).
TrapCorpus generate_corpus(const std::vector<codemetrics::SourceUnit>& origins, double trap_fraction,
                           std::uint64_t seed);

/// Writes items/<item_id>.vcp, answer_key.jsonl and corpus.json under `dir`.
void write_corpus(const TrapCorpus& corpus, const std::filesystem::path& dir);

/// Loads every *.vcp file in `dir`, sorted by file name.
std::vector<codemetrics::SourceUnit> load_origins(const std::filesystem::path& dir);

Json answer_key_record(const TrapItem& item);
std::vector<std::pair<std::string, sdt::GroundTruth>> read_answer_key(const std::filesystem::path& path);

}  // namespace vcp::trapforge
