#include "vcp/explainability/explainability.hpp"

#include <algorithm>
#include <regex>

#include <gtest/gtest.h>

#include "vcp/error.hpp"
#include "vcp/rng.hpp"

namespace vcp::explainability {
namespace {

ConceptOntology search_ontology() {
    return {"bsearch",
            "v1",
            {{"halving", 0.5, {"halves the range", "divide and conquer"}},
             {"loop", 0.25, {"loop"}},
             {"bounds", 0.25, {"lower bound", "upper bound"}}}};
}

// Regex route: escape the phrase, let any whitespace run match a phrase space,
// and require a non-word character (or text edge) around it.
bool regex_contains(const std::string& text, const std::string& phrase) {
    const auto is_word = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; };
    const auto first = phrase.find_first_not_of(" \t\n");
    if (first == std::string::npos) return false;
    const auto last = phrase.find_last_not_of(" \t\n");
    std::string pattern;
    bool in_space = false;
    for (std::size_t i = first; i <= last; ++i) {
        const char c = phrase[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            in_space = true;
            continue;
        }
        if (in_space) pattern += "\\s+";
        in_space = false;
        if (is_word(c))
            pattern += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        else
            pattern += std::string("\\") + c;
    }
    const std::string re = std::string(is_word(phrase[first]) ? "(^|[^a-z0-9_])" : "") + pattern +
                           (is_word(phrase[last]) ? "($|[^a-z0-9_])" : "");
    std::string lower = text;
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    return std::regex_search(lower, std::regex(re));
}

TEST(MatchConcepts, Examples) {
    const auto o = search_ontology();
    EXPECT_EQ(match_concepts("Binary search halves the range each step", o), std::set<std::string>{"halving"});
    EXPECT_TRUE(match_concepts("", o).empty());
    EXPECT_TRUE(match_concepts("there is a loophole", o).empty());
    EXPECT_EQ(match_concepts("the LOOP stops at the Upper\n  Bound.", o), (std::set<std::string>{"bounds", "loop"}));
    EXPECT_TRUE(match_concepts("loop_counter", o).empty());
    EXPECT_FALSE(contains_phrase("preloop", "loop"));
    EXPECT_TRUE(contains_phrase("(loop)", "loop"));
}

TEST(MatchConcepts, AgreesWithRegexRoute) {
    Rng rng(21);
    const std::vector<std::string> words{"loop", "index", "bound", "a", "b_c", "x1", "(", ")", ".", "-", "LOOP", "Index"};
    for (int trial = 0; trial < 2000; ++trial) {
        std::string text, phrase;
        for (int i = 0, n = static_cast<int>(rng.below(12)); i < n; ++i) {
            text += words[rng.below(words.size())];
            const auto sep = rng.below(4);
            text += sep == 0 ? "" : sep == 1 ? " " : sep == 2 ? "\n\t " : "_";
        }
        for (int i = 0, n = 1 + static_cast<int>(rng.below(2)); i < n; ++i)
            phrase += (i ? " " : "") + words[rng.below(words.size())];
        ASSERT_EQ(contains_phrase(text, phrase), regex_contains(text, phrase)) << "[" << text << "] [" << phrase << "]";
    }
}

TEST(EGap, Examples) {
    auto s = e_gap_from_coverage(1.0, 8.0);
    EXPECT_NEAR(s.e_gap, 1e-9 / (8.0 + 1e-9), 1e-24);
    EXPECT_LE(s.e_gap, 1e-9);
    // Single if/else: the smallest non-zero h_c still clears the full-coverage bound.
    EXPECT_LE(e_gap_from_coverage(1.0, 1.0).e_gap, 1e-9);
    EXPECT_EQ(e_gap_from_coverage(0.0, 8.0).e_gap, 1.0);
    EXPECT_NEAR(e_gap_from_coverage(0.25, 8.0, 1e-9).e_gap, 0.75, 1e-9);
    s = e_gap_from_coverage(0.6, 0.0);
    EXPECT_TRUE(s.degenerate);
    EXPECT_EQ(s.e_gap, 0.0);
    EXPECT_THROW(e_gap_from_coverage(0.5, 1.0, 0.0), DomainError);
    EXPECT_THROW(e_gap_from_coverage(0.5, -1.0), DomainError);
}

TEST(EGap, FromTranscript) {
    const auto s = e_gap("It halves the range inside a loop.", search_ontology(), 4.0);
    EXPECT_EQ(s.matched, (std::set<std::string>{"halving", "loop"}));
    EXPECT_DOUBLE_EQ(s.coverage, 0.75);
    EXPECT_DOUBLE_EQ(s.h_e, 3.0);
    EXPECT_NEAR(s.e_gap, 0.25, 1e-9);
    const auto j = to_json(s);
    EXPECT_EQ(j["h_e_definition"], kHeDefinition);
}

ConceptOntology random_ontology(Rng& rng, const std::vector<std::string>& vocab) {
    ConceptOntology o{"u", "r", {}};
    const int n = 1 + static_cast<int>(rng.below(6));
    std::vector<double> w;
    double total = 0;
    for (int i = 0; i < n; ++i) total += w.emplace_back(0.05 + rng.uniform());
    double assigned = 0;
    for (int i = 0; i < n; ++i) {
        Concept c{"c" + std::to_string(i), i + 1 == n ? 1.0 - assigned : w[i] / total, {}};
        assigned += c.proportion;
        for (int k = 0, m = 1 + static_cast<int>(rng.below(3)); k < m; ++k) c.phrases.push_back(vocab[rng.below(vocab.size())]);
        o.concepts.push_back(std::move(c));
    }
    return o;
}

TEST(EGapProperty, MonotoneAndBounded) {
    Rng rng(500);
    for (int trial = 0; trial < 500; ++trial) {
        const double h_c = rng.uniform() * 10;
        double prev = 2.0;
        for (double cov = 0.0; cov <= 1.0; cov += 0.05) {
            const double g = e_gap_from_coverage(cov, h_c).e_gap;
            ASSERT_GE(g, 0.0);
            ASSERT_LE(g, 1.0);
            ASSERT_LE(g, prev);
            prev = g;
        }
    }
}

TEST(EGapProperty, PermutationAndPhraseAdditions) {
    Rng rng(77);
    const std::vector<std::string> vocab{"loop", "pivot", "base case", "recursion", "index", "swap", "invariant", "bound"};
    for (int trial = 0; trial < 300; ++trial) {
        auto o = random_ontology(rng, vocab);
        ASSERT_NO_THROW(o.validate());
        std::string transcript;
        for (int i = 0, n = static_cast<int>(rng.below(8)); i < n; ++i) transcript += vocab[rng.below(vocab.size())] + " and ";
        const double h_c = 0.5 + rng.uniform() * 6;
        const auto base = e_gap(transcript, o, h_c);

        auto shuffled = o;
        rng.shuffle(std::span<Concept>(shuffled.concepts));
        const auto perm = e_gap(transcript, shuffled, h_c);
        ASSERT_EQ(perm.coverage, base.coverage);
        ASSERT_EQ(perm.e_gap, base.e_gap);
        ASSERT_EQ(perm.matched, base.matched);

        auto richer = o;
        richer.concepts[rng.below(richer.concepts.size())].phrases.push_back(vocab[rng.below(vocab.size())]);
        ASSERT_GE(e_gap(transcript, richer, h_c).coverage, base.coverage);
    }
}

TEST(Ontology, ValidationAndJson) {
    const auto good = search_ontology();
    EXPECT_NO_THROW(good.validate());
    const auto back = ontology_from_json(to_json(good), "mem");
    EXPECT_EQ(back.concepts.size(), 3u);
    EXPECT_EQ(back.concepts[0].phrases[1], "divide and conquer");

    auto bad = good;
    bad.concepts[0].proportion = 0.5 + 2e-9;
    EXPECT_THROW(bad.validate(), ValidationError);
    bad = good;
    bad.concepts[2].concept_id = "loop";
    EXPECT_THROW(bad.validate(), ValidationError);
    bad = good;
    bad.concepts[1].phrases.clear();
    EXPECT_THROW(bad.validate(), ValidationError);
    bad = good;
    bad.concepts[1].phrases = {"   "};
    EXPECT_THROW(bad.validate(), ValidationError);

    auto j = to_json(good);
    j["concepts"][0]["weight"] = 1;
    EXPECT_THROW(ontology_from_json(j, "mem"), ValidationError);
}

}  // namespace
}  // namespace vcp::explainability
