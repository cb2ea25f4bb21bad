#include "vcp/trapforge/trapforge.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "vcp/codemetrics/parser.hpp"
#include "vcp/rng.hpp"

namespace vcp::trapforge {

using codemetrics::BinaryOp;
using codemetrics::Expr;
using codemetrics::SourceUnit;
using codemetrics::Stmt;
using codemetrics::StmtPtr;

const char* to_string(DefectKind kind) {
    switch (kind) {
        case DefectKind::InvertedCondition: return "inverted-condition";
        case DefectKind::OffByOne: return "off-by-one";
        case DefectKind::UncheckedIndex: return "unchecked-index";
        case DefectKind::UnsanitizedSink: return "unsanitized-sink";
        case DefectKind::DroppedUpdate: return "dropped-update";
    }
    return "?";
}

std::optional<DefectKind> defect_kind_from_string(const std::string& text) {
    for (auto k : kAllKinds)
        if (text == to_string(k)) return k;
    return std::nullopt;
}

NotApplicable::NotApplicable(DefectKind kind)
    : ComputationError(std::string("no applicable site for defect kind '") + to_string(kind) + "'"),
      kind_(kind) {}

namespace {

bool is_ordering(BinaryOp op) {
    return op == BinaryOp::Lt || op == BinaryOp::Le || op == BinaryOp::Gt || op == BinaryOp::Ge;
}

const char* negated(BinaryOp op) {
    switch (op) {
        case BinaryOp::Lt: return ">=";
        case BinaryOp::Le: return ">";
        case BinaryOp::Gt: return "<=";
        case BinaryOp::Ge: return "<";
        case BinaryOp::Eq: return "!=";
        case BinaryOp::Ne: return "==";
        default: return nullptr;
    }
}

const char* strictness_toggled(BinaryOp op) {
    switch (op) {
        case BinaryOp::Lt: return "<=";
        case BinaryOp::Le: return "<";
        case BinaryOp::Gt: return ">=";
        case BinaryOp::Ge: return ">";
        default: return nullptr;
    }
}

// Comparisons reachable through operator nodes (not through call arguments
// or index expressions).
void collect_comparisons(const Expr& e, std::vector<const Expr*>& out) {
    if (e.kind == Expr::Kind::Binary) {
        if (codemetrics::is_comparison(e.binary_op)) out.push_back(&e);
        collect_comparisons(*e.args[0], out);
        collect_comparisons(*e.args[1], out);
    } else if (e.kind == Expr::Kind::Unary) {
        collect_comparisons(*e.args[0], out);
    }
}

void collect_identifiers(const Expr& e, std::set<std::string>& out) {
    if (e.kind == Expr::Kind::Identifier) out.insert(e.text);
    for (const auto& a : e.args) collect_identifiers(*a, out);
}

template <typename Fn>
void for_each_expr(const Stmt& s, Fn&& fn);

template <typename Fn>
void for_each_expr(const std::vector<StmtPtr>& list, Fn&& fn) {
    for (const auto& s : list) for_each_expr(*s, fn);
}

template <typename Fn>
void for_each_expr(const Stmt& s, Fn&& fn) {
    switch (s.kind) {
        case Stmt::Kind::Assign: fn(*s.assign.value); break;
        case Stmt::Kind::For:
            fn(*s.init.value);
            fn(*s.expr);
            fn(*s.update.value);
            break;
        default:
            if (s.expr) fn(*s.expr);
            break;
    }
    for_each_expr(s.body, fn);
    for_each_expr(s.orelse, fn);
}

bool contains_return(const std::vector<StmtPtr>& list) {
    for (const auto& s : list) {
        if (s->kind == Stmt::Kind::Return) return true;
        if (contains_return(s->body) || contains_return(s->orelse)) return true;
    }
    return false;
}

bool terminates(const std::vector<StmtPtr>& list);

bool terminates(const Stmt& s) {
    switch (s.kind) {
        case Stmt::Kind::Return: return true;
        case Stmt::Kind::Block: return terminates(s.body);
        case Stmt::Kind::If: return s.has_else && terminates(s.body) && terminates(s.orelse);
        default: return false;
    }
}

bool terminates(const std::vector<StmtPtr>& list) {
    return std::any_of(list.begin(), list.end(), [](const auto& s) { return terminates(*s); });
}

bool indexes_with(const Expr& e, const std::set<std::string>& names) {
    if (e.kind == Expr::Kind::Index && e.args[0]->kind == Expr::Kind::Identifier &&
        names.count(e.args[0]->text))
        return true;
    return std::any_of(e.args.begin(), e.args.end(),
                       [&](const auto& a) { return indexes_with(*a, names); });
}

std::string trim(std::string_view text) {
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = text.find_last_not_of(" \t\r\n");
    return std::string(text.substr(first, last - first + 1));
}

class SiteFinder {
public:
    SiteFinder(const SourceUnit& unit, DefectKind kind) : unit_(unit), kind_(kind) {}

    std::vector<MutationSite> run() {
        live_sequence(unit_.statements);
        return std::move(sites_);
    }

private:
    void add(const codemetrics::SourceSpan& span, std::string replacement) {
        sites_.push_back({span, std::move(replacement)});
    }

    void live_sequence(const std::vector<StmtPtr>& list) {
        for (const auto& s : list) {
            statement(*s, false);
            if (terminates(*s)) return;
        }
    }

    void sink_sites(const Expr& e) {
        if (e.kind == Expr::Kind::Call &&
            std::find(std::begin(kSinkCalls), std::end(kSinkCalls), e.text) != std::end(kSinkCalls)) {
            for (const auto& arg : e.args)
                if (arg->kind == Expr::Kind::Call && arg->text == "sanitize" && arg->args.size() == 1 &&
                    arg->args[0]->kind == Expr::Kind::Identifier)
                    add(arg->span, arg->args[0]->text);
        }
        for (const auto& a : e.args) sink_sites(*a);
    }

    void own_exprs(const Stmt& s) {
        if (kind_ != DefectKind::UnsanitizedSink) return;
        switch (s.kind) {
            case Stmt::Kind::Assign: sink_sites(*s.assign.value); break;
            case Stmt::Kind::For:
                sink_sites(*s.init.value);
                sink_sites(*s.expr);
                sink_sites(*s.update.value);
                break;
            default:
                if (s.expr) sink_sites(*s.expr);
                break;
        }
    }

    void statement(const Stmt& s, bool else_if_child) {
        own_exprs(s);
        switch (s.kind) {
            case Stmt::Kind::Block: live_sequence(s.body); break;
            case Stmt::Kind::If:
                if_statement(s, else_if_child);
                live_sequence(s.body);
                if (s.else_is_if) statement(*s.orelse.front(), true);
                else live_sequence(s.orelse);
                break;
            case Stmt::Kind::While:
            case Stmt::Kind::For:
                loop(s);
                live_sequence(s.body);
                break;
            default: break;
        }
    }

    void if_statement(const Stmt& s, bool else_if_child) {
        std::vector<const Expr*> comparisons;
        collect_comparisons(*s.expr, comparisons);
        if (kind_ == DefectKind::InvertedCondition) {
            for (const Expr* c : comparisons) add(c->op_span, negated(c->binary_op));
        }
        if (kind_ == DefectKind::UncheckedIndex && !s.has_else && !else_if_child &&
            !contains_return(s.body)) {
            std::set<std::string> guarded;
            for (const Expr* c : comparisons) {
                if (!is_ordering(c->binary_op)) continue;
                for (const auto& side : c->args)
                    if (side->kind == Expr::Kind::Identifier) guarded.insert(side->text);
            }
            bool used = false;
            for_each_expr(s.body, [&](const Expr& e) { used = used || indexes_with(e, guarded); });
            if (used) {
                const auto inner = std::string_view(unit_.text)
                                       .substr(s.body_span.begin + 1, s.body_span.length() - 2);
                add(s.span, trim(inner));
            }
        }
    }

    void loop(const Stmt& s) {
        if (kind_ == DefectKind::OffByOne) {
            std::vector<const Expr*> comparisons;
            collect_comparisons(*s.expr, comparisons);
            for (const Expr* c : comparisons)
                if (is_ordering(c->binary_op)) add(c->op_span, strictness_toggled(c->binary_op));
        }
        if (kind_ == DefectKind::DroppedUpdate) {
            std::set<std::string> guard_vars;
            collect_identifiers(*s.expr, guard_vars);
            for (const auto& child : s.body) {
                if (child->kind == Stmt::Kind::Assign && guard_vars.count(child->assign.target))
                    add(child->span, "");
                if (terminates(*child)) break;
            }
        }
    }

    const SourceUnit& unit_;
    DefectKind kind_;
    std::vector<MutationSite> sites_;
};

std::string splice(const std::string& text, const MutationSite& site) {
    return text.substr(0, site.span.begin) + site.replacement + text.substr(site.span.end);
}

}  // namespace

std::vector<MutationSite> applicable_sites(const SourceUnit& origin, DefectKind kind) {
    return SiteFinder(origin, kind).run();
}

TrapItem inject(const SourceUnit& origin, DefectKind kind, std::uint64_t rng_seed) {
    const auto sites = applicable_sites(origin, kind);
    if (sites.empty()) throw NotApplicable(kind);
    Rng rng(rng_seed);
    const auto& site = sites[static_cast<std::size_t>(rng.below(sites.size()))];

    TrapItem item;
    item.origin = origin.name;
    item.source = splice(origin.text, site);
    item.ground_truth = sdt::GroundTruth::Trap;
    item.defect_kind = kind;
    item.mutation_site = site;
    try {
        codemetrics::parse(item.source, origin.name);
    } catch (const codemetrics::ParseError& e) {
        throw ComputationError("mutation of '" + origin.name + "' (" + to_string(kind) +
                               ") produced unparseable source: " + e.what());
    }
    return item;
}

namespace {

constexpr std::uint64_t kSelectionStream = 0;
constexpr std::uint64_t kShuffleStream = 1;
constexpr std::uint64_t kFirstItemStream = 2;

std::string item_id(std::size_t index, std::size_t count) {
    std::size_t width = 3;
    for (std::size_t c = count; c >= 1000; c /= 10) ++width;
    auto digits = std::to_string(index + 1);
    if (digits.size() < width) digits.insert(0, width - digits.size(), '0');
    return "item-" + digits;
}

}  // namespace

TrapCorpus generate_corpus(const std::vector<SourceUnit>& origins, double trap_fraction,
                           std::uint64_t seed) {
    if (origins.empty()) throw ValidationError("generate_corpus: no origins");
    if (!(trap_fraction >= 0.0 && trap_fraction <= 1.0))
        throw ValidationError("generate_corpus: trap fraction must lie in [0, 1]");

    TrapCorpus corpus;
    corpus.seed = seed;
    corpus.trap_fraction = trap_fraction;
    const std::size_t n = origins.size();
    corpus.traps_requested = static_cast<std::size_t>(std::llround(trap_fraction * static_cast<double>(n)));

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    Rng(seed, kSelectionStream).shuffle(std::span<std::size_t>(order));
    std::vector<bool> selected(n, false);
    for (std::size_t i = 0; i < corpus.traps_requested; ++i) selected[order[i]] = true;

    std::vector<TrapItem> items;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& origin = origins[i];
        TrapItem clean;
        clean.origin = origin.name;
        clean.source = origin.text;
        if (!selected[i]) {
            items.push_back(std::move(clean));
            continue;
        }
        Rng rng(seed, kFirstItemStream + i);
        std::vector<DefectKind> kinds;
        for (auto k : kAllKinds)
            if (!applicable_sites(origin, k).empty()) kinds.push_back(k);
        if (kinds.empty()) {
            corpus.shortfall.push_back(origin.name);
            items.push_back(std::move(clean));
            continue;
        }
        const auto kind = kinds[static_cast<std::size_t>(rng.below(kinds.size()))];
        items.push_back(inject(origin, kind, rng()));
    }

    Rng(seed, kShuffleStream).shuffle(std::span<TrapItem>(items));
    for (std::size_t i = 0; i < items.size(); ++i) items[i].item_id = item_id(i, items.size());
    corpus.items = std::move(items);
    return corpus;
}

Json answer_key_record(const TrapItem& item) {
    Json j;
    j["item_id"] = item.item_id;
    j["origin"] = item.origin;
    j["ground_truth"] = sdt::to_string(item.ground_truth);
    j["defect_kind"] = item.defect_kind ? Json(to_string(*item.defect_kind)) : Json(nullptr);
    if (item.mutation_site) {
        const auto& s = *item.mutation_site;
        j["mutation_site"] = {{"begin", s.span.begin},   {"end", s.span.end},
                              {"line", s.span.line},     {"column", s.span.column},
                              {"replacement", s.replacement}};
    } else {
        j["mutation_site"] = nullptr;
    }
    return j;
}

void write_corpus(const TrapCorpus& corpus, const std::filesystem::path& dir) {
    std::vector<Json> key;
    for (const auto& item : corpus.items) {
        write_text_file(dir / "items" / (item.item_id + ".vcp"), item.source);
        key.push_back(answer_key_record(item));
    }
    write_text_file(dir / "answer_key.jsonl", to_json_lines(key));

    std::size_t traps = 0;
    for (const auto& item : corpus.items) traps += item.ground_truth == sdt::GroundTruth::Trap;
    Json summary;
    summary["seed"] = corpus.seed;
    summary["trap_fraction"] = corpus.trap_fraction;
    summary["items"] = corpus.items.size();
    summary["traps_requested"] = corpus.traps_requested;
    summary["traps"] = traps;
    summary["shortfall"] = corpus.shortfall;
    write_text_file(dir / "corpus.json", summary.dump(2) + "\n");
}

std::vector<SourceUnit> load_origins(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir))
        throw ValidationError(dir.string() + ": not a directory");
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".vcp") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    std::vector<SourceUnit> out;
    for (const auto& f : files) {
        try {
            out.push_back(codemetrics::parse(read_text_file(f), f.stem().string()));
        } catch (const codemetrics::ParseError& e) {
            throw ValidationError(f.string() + ": " + e.what());
        }
    }
    if (out.empty()) throw ValidationError(dir.string() + ": no .vcp files");
    return out;
}

std::vector<std::pair<std::string, sdt::GroundTruth>> read_answer_key(const std::filesystem::path& path) {
    std::vector<std::pair<std::string, sdt::GroundTruth>> out;
    for (const auto& rec : read_json_lines(path)) {
        const auto id = require_string(rec.value, "item_id", rec.where);
        const auto text = require_string(rec.value, "ground_truth", rec.where);
        const auto g = sdt::ground_truth_from_string(text);
        if (!g) throw ValidationError(rec.where + ": field 'ground_truth' must be 'trap' or 'clean'");
        out.emplace_back(id, *g);
    }
    return out;
}

}  // namespace vcp::trapforge
