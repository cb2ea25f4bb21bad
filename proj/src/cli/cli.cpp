#include "vcp/cli/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "vcp/codemetrics/cfg.hpp"
#include "vcp/codemetrics/cfg_io.hpp"
#include "vcp/codemetrics/metrics.hpp"
#include "vcp/codemetrics/parser.hpp"
#include "vcp/composite/composite.hpp"
#include "vcp/error.hpp"
#include "vcp/explainability/explainability.hpp"
#include "vcp/retention/retention.hpp"
#include "vcp/sdt/sdt.hpp"
#include "vcp/stats/stats.hpp"
#include "vcp/trapforge/trapforge.hpp"

namespace vcp::cli {

namespace fs = std::filesystem;

// ---------------------------------------------------------------- config

void RunConfig::validate() const {
    const auto require = [](bool ok, const std::string& what) {
        if (!ok) throw ValidationError("config: " + what);
    };
    require(std::isfinite(k) && k > 0.0, "k must be > 0");
    require(std::isfinite(delta), "delta must be finite");
    require(sdt::correction_from_string(correction).has_value(), "correction must be 'half-count' or 'none'");
    require(std::isfinite(idle_gap) && idle_gap > 0.0, "idle_gap must be > 0");
    require(retention::velocity_unit_from_string(velocity_unit).has_value(),
            "velocity_unit must be 'halstead-bits' or 'loc'");
    require(std::isfinite(epsilon) && epsilon > 0.0, "epsilon must be > 0");
    composite::UtilityWeights{w1, w2, w3, gamma}.validate();
    require(m_ht_cutoff > 0.0 && m_ht_cutoff < 1.0, "m_ht_cutoff must lie in (0, 1)");
    require(e_gap_threshold >= 0.0 && e_gap_threshold <= 1.0, "e_gap_threshold must lie in [0, 1]");
    require(std::isfinite(m_csr_threshold) && m_csr_threshold >= 0.0, "m_csr_threshold must be >= 0");
}

void apply_config(RunConfig& c, const Json& doc, const std::string& where) {
    if (!doc.is_object()) throw ValidationError(where + ": config must be a JSON object");
    reject_unknown_keys(doc,
                        {"k", "delta", "correction", "idle_gap", "velocity_unit", "allow_uncalibrated", "calibration",
                         "epsilon", "w1", "w2", "w3", "gamma", "m_csr_threshold", "e_gap_threshold", "m_ht_cutoff",
                         "seed"},
                        where);
    const auto num = [&](const char* key, double& target) {
        if (doc.contains(key)) target = require_number(doc, key, where);
    };
    num("k", c.k);
    num("delta", c.delta);
    num("idle_gap", c.idle_gap);
    num("epsilon", c.epsilon);
    num("w1", c.w1);
    num("w2", c.w2);
    num("w3", c.w3);
    num("gamma", c.gamma);
    num("m_csr_threshold", c.m_csr_threshold);
    num("e_gap_threshold", c.e_gap_threshold);
    num("m_ht_cutoff", c.m_ht_cutoff);
    if (doc.contains("correction")) c.correction = require_string(doc, "correction", where);
    if (doc.contains("velocity_unit")) c.velocity_unit = require_string(doc, "velocity_unit", where);
    if (doc.contains("allow_uncalibrated")) c.allow_uncalibrated = require_bool(doc, "allow_uncalibrated", where);
    if (doc.contains("calibration")) c.calibration = require_string(doc, "calibration", where);
    if (doc.contains("seed")) {
        const auto s = require_integer(doc, "seed", where);
        if (s < 0) throw ValidationError(where + ": field 'seed' must be >= 0");
        c.seed = static_cast<std::uint64_t>(s);
    }
}

Json to_json(const RunConfig& c) {
    Json j;
    j["k"] = c.k;
    j["delta"] = c.delta;
    j["correction"] = c.correction;
    j["idle_gap"] = c.idle_gap;
    j["velocity_unit"] = c.velocity_unit;
    j["allow_uncalibrated"] = c.allow_uncalibrated;
    j["calibration"] = c.calibration ? Json(fs::path(*c.calibration).filename().string()) : Json(nullptr);
    j["epsilon"] = c.epsilon;
    j["w1"] = c.w1;
    j["w2"] = c.w2;
    j["w3"] = c.w3;
    j["gamma"] = c.gamma;
    j["m_csr_threshold"] = c.m_csr_threshold;
    j["e_gap_threshold"] = c.e_gap_threshold;
    j["m_ht_cutoff"] = c.m_ht_cutoff;
    j["seed"] = c.seed;
    return j;
}

namespace {

// ---------------------------------------------------------------- output

struct Context {
    RunConfig config;
    std::optional<fs::path> out_dir;
    std::ostream& out;
};

std::string fmt(double v, int precision = 6) {
    std::ostringstream s;
    s << std::setprecision(precision) << v;
    return s.str();
}

std::string table(const std::vector<std::string>& headers, const std::vector<std::vector<std::string>>& rows) {
    std::vector<std::size_t> width(headers.size());
    for (std::size_t c = 0; c < headers.size(); ++c) width[c] = headers[c].size();
    for (const auto& r : rows)
        for (std::size_t c = 0; c < r.size() && c < width.size(); ++c) width[c] = std::max(width[c], r[c].size());
    std::ostringstream s;
    const auto line = [&](const std::vector<std::string>& cells) {
        std::ostringstream row;
        for (std::size_t c = 0; c < cells.size(); ++c)
            row << (c ? "  " : "") << std::left << std::setw(static_cast<int>(width[c])) << cells[c];
        auto text = row.str();
        text.erase(text.find_last_not_of(' ') + 1);
        s << text << '\n';
    };
    line(headers);
    std::vector<std::string> rule;
    for (auto w : width) rule.emplace_back(w, '-');
    line(rule);
    for (const auto& r : rows) line(r);
    return s.str();
}

/// Echoed path parameters keep only the file name so reports do not depend
/// on the machine's directory layout.
Json path_echo(const std::optional<std::string>& p) {
    return p ? Json(fs::path(*p).filename().string()) : Json(nullptr);
}

void emit(Context& ctx, const std::string& name, const Json& parameters, const std::vector<Json>& records,
          const std::string& summary) {
    Json header;
    header["command"] = name;
    header["config"] = to_json(ctx.config);
    header["parameters"] = parameters;
    std::vector<Json> lines{header};
    lines.insert(lines.end(), records.begin(), records.end());
    if (ctx.out_dir) {
        write_text_file(*ctx.out_dir / (name + ".jsonl"), to_json_lines(lines));
        write_text_file(*ctx.out_dir / (name + "_summary.txt"), summary);
        ctx.out << summary;
    } else {
        ctx.out << to_json_lines(lines);
    }
}

void write_series(Context& ctx, const std::string& file, const std::string& content) {
    if (ctx.out_dir) write_text_file(*ctx.out_dir / file, content);
}

/// Report records without the leading {command, config, parameters} header.
std::vector<Record> read_report(const fs::path& path) {
    auto records = read_json_lines(path);
    if (!records.empty() && records.front().value.contains("command")) records.erase(records.begin());
    return records;
}

codemetrics::SourceUnit parse_source_file(const fs::path& path) {
    try {
        return codemetrics::parse(read_text_file(path), path.stem().string());
    } catch (const codemetrics::ParseError& e) {
        throw ValidationError(path.string() + ":" + std::to_string(e.line()) + ":" + std::to_string(e.column()) +
                              ": " + e.what());
    }
}

// ---------------------------------------------------------------- roster

struct RosterEntry {
    std::string student;
    std::optional<std::string> condition;
    std::optional<double> t_dev;
    std::optional<fs::path> build, refactor, transcript, ontology;
    std::string where;
};

std::vector<RosterEntry> read_roster(const fs::path& path) {
    std::vector<RosterEntry> entries;
    const auto base = path.parent_path();
    for (const auto& rec : read_json_lines(path)) {
        reject_unknown_keys(rec.value, {"student", "condition", "t_dev", "build", "refactor", "transcript", "ontology"},
                            rec.where);
        RosterEntry e;
        e.where = rec.where;
        e.student = require_string(rec.value, "student", rec.where);
        if (rec.value.contains("condition")) e.condition = require_string(rec.value, "condition", rec.where);
        if (rec.value.contains("t_dev")) e.t_dev = require_number(rec.value, "t_dev", rec.where);
        const auto file = [&](const char* key, std::optional<fs::path>& target) {
            if (rec.value.contains(key)) target = base / require_string(rec.value, key, rec.where);
        };
        file("build", e.build);
        file("refactor", e.refactor);
        file("transcript", e.transcript);
        file("ontology", e.ontology);
        entries.push_back(std::move(e));
    }
    return entries;
}

const fs::path& need(const std::optional<fs::path>& p, const RosterEntry& e, const char* key) {
    if (!p) throw ValidationError(e.where + ": field '" + key + "' is required for this subcommand");
    return *p;
}

// ---------------------------------------------------------------- metrics

struct MetricsArgs {
    std::vector<std::string> files;
};

void cmd_metrics(Context& ctx, const MetricsArgs& a) {
    std::vector<Json> records;
    std::vector<std::vector<std::string>> rows;
    for (const auto& f : a.files) {
        const fs::path p(f);
        Json r;
        if (p.extension() == ".json") {
            const auto cfg = codemetrics::cfg_from_json(read_json_file(p), p.string());
            const auto m = codemetrics::metrics(cfg);
            r["unit"] = cfg.name.empty() ? p.stem().string() : cfg.name;
            r["input"] = "cfg";
            r["cc"] = m.cc;
            r["h_c"] = m.h_c;
            rows.push_back({r["unit"].get<std::string>(), std::to_string(m.cc), "-", fmt(m.h_c)});
        } else {
            const auto unit = parse_source_file(p);
            const auto m = codemetrics::metrics(unit);
            r["unit"] = unit.name;
            r["input"] = "source";
            r["cc"] = m.cc;
            r["decision_points"] = codemetrics::decision_points(unit);
            r["n1"] = m.halstead.n1;
            r["n2"] = m.halstead.n2;
            r["N1"] = m.halstead.N1;
            r["N2"] = m.halstead.N2;
            r["volume_v"] = m.halstead.volume_v;
            r["h_c"] = m.h_c;
            rows.push_back({unit.name, std::to_string(m.cc), fmt(m.halstead.volume_v), fmt(m.h_c)});
        }
        r["entropy_definition"] = codemetrics::kEntropyDefinition;
        r["entropy_loop_policy"] = codemetrics::kEntropyLoopPolicy;
        r["classifier_table_version"] = codemetrics::kClassifierTableVersion;
        records.push_back(std::move(r));
    }
    Json params;
    params["files"] = Json::array();
    for (const auto& f : a.files) params["files"].push_back(fs::path(f).filename().string());
    emit(ctx, "metrics", params, records, table({"unit", "cc", "volume_v", "h_c"}, rows));
}

// ---------------------------------------------------------------- sdt

struct SdtArgs {
    std::string responses;
    std::optional<std::string> answer_key;
};

sdt::SdtConfig sdt_config(const RunConfig& c) {
    return {c.k, c.delta, *sdt::correction_from_string(c.correction)};
}

void cmd_sdt(Context& ctx, const SdtArgs& a) {
    const auto records = read_json_lines(a.responses);
    std::optional<std::vector<std::pair<std::string, sdt::GroundTruth>>> key;
    if (a.answer_key) key = trapforge::read_answer_key(*a.answer_key);
    const auto sets = sdt::response_sets_from_records(records, key ? &*key : nullptr);
    std::vector<Json> out;
    std::vector<std::vector<std::string>> rows;
    for (const auto& set : sets) {
        const auto r = sdt::score(set, sdt_config(ctx.config));
        out.push_back(sdt::to_json(r));
        rows.push_back({r.reviewer, fmt(r.rates.hit_rate), fmt(r.rates.fa_rate), fmt(r.d_prime), fmt(r.m_ht),
                        r.rates.correction_applied ? "yes" : "no"});
    }
    emit(ctx, "sdt", {{"responses", path_echo(a.responses)}, {"answer_key", path_echo(a.answer_key)}}, out,
         table({"reviewer", "hit_rate", "fa_rate", "d_prime", "m_ht", "corrected"}, rows));
}

// ---------------------------------------------------------------- traps

struct TrapsArgs {
    std::string origins;
    double fraction = 0.5;
};

void cmd_traps_generate(Context& ctx, const TrapsArgs& a) {
    if (!ctx.out_dir) throw ValidationError("traps generate: --out DIR is required");
    if (!(a.fraction >= 0.0 && a.fraction <= 1.0)) throw ValidationError("traps generate: --fraction must lie in [0, 1]");
    const auto origins = trapforge::load_origins(a.origins);
    if (origins.empty()) throw ValidationError("traps generate: no .vcp files in " + a.origins);
    const auto corpus = trapforge::generate_corpus(origins, a.fraction, ctx.config.seed);
    trapforge::write_corpus(corpus, *ctx.out_dir);
    std::vector<Json> records;
    std::vector<std::vector<std::string>> rows;
    for (const auto& item : corpus.items) {
        records.push_back(trapforge::answer_key_record(item));
        rows.push_back({item.item_id, item.origin, sdt::to_string(item.ground_truth),
                        item.defect_kind ? trapforge::to_string(*item.defect_kind) : "-"});
    }
    auto summary = table({"item_id", "origin", "ground_truth", "defect_kind"}, rows);
    if (!corpus.shortfall.empty()) {
        summary += "shortfall (no applicable defect):";
        for (const auto& s : corpus.shortfall) summary += " " + s;
        summary += "\n";
    }
    emit(ctx, "traps",
         {{"origins", fs::path(a.origins).filename().string()},
          {"fraction", a.fraction},
          {"traps_requested", corpus.traps_requested},
          {"shortfall", corpus.shortfall}},
         records, summary);
}

// ---------------------------------------------------------------- retention

retention::VelocityOptions velocity_options(const RunConfig& c) {
    return {*retention::velocity_unit_from_string(c.velocity_unit), c.idle_gap};
}

retention::OmegaCalibration load_calibration(const RunConfig& c) {
    if (!c.calibration) return retention::OmegaCalibration::uncalibrated();
    return retention::calibration_from_json(read_json_file(*c.calibration), *c.calibration);
}

struct RetentionArgs {
    std::optional<std::string> build, refactor, roster;
    bool fit_decay = false;
};

void cmd_retention(Context& ctx, const RetentionArgs& a) {
    std::vector<RosterEntry> entries;
    if (a.roster) {
        entries = read_roster(*a.roster);
    } else if (a.build && a.refactor) {
        entries.push_back({"", std::nullopt, std::nullopt, fs::path(*a.build), fs::path(*a.refactor), {}, {}, "args"});
    } else {
        throw ValidationError("retention: give --roster FILE or both --build LOG and --refactor LOG");
    }
    const auto cal = load_calibration(ctx.config);
    const retention::ScoringOptions options{velocity_options(ctx.config), ctx.config.allow_uncalibrated};

    std::vector<Json> records;
    std::vector<std::vector<std::string>> rows;
    std::vector<retention::DecayObservation> decay;
    for (const auto& e : entries) {
        const auto build = retention::load_session_log(need(e.build, e, "build"));
        const auto refactor = retention::load_session_log(need(e.refactor, e, "refactor"));
        if (!e.student.empty() && build.student != e.student)
            throw ValidationError(e.where + ": roster student '" + e.student + "' but build log names '" +
                                  build.student + "'");
        const auto r = retention::m_csr(build, refactor, cal, options);
        auto j = retention::to_json(r);
        if (e.condition) j["condition"] = *e.condition;
        j["baseline_source"] = cal.baseline_source;
        j["velocity_unit"] = ctx.config.velocity_unit;
        records.push_back(std::move(j));
        rows.push_back({r.student, fmt(r.v_build), fmt(r.v_rec), fmt(r.omega), fmt(r.m_csr), fmt(r.delta_t),
                        r.degenerate_omega ? "degenerate-omega" : ""});
        decay.push_back({r.delta_t, r.m_csr});
    }
    Json params{{"roster", path_echo(a.roster)},
                {"build", path_echo(a.build)},
                {"refactor", path_echo(a.refactor)},
                {"baseline_source", cal.baseline_source},
                {"calibrated", cal.calibrated},
                {"alpha", cal.alpha},
                {"beta", cal.beta}};
    emit(ctx, "retention", params, records,
         table({"student", "v_build", "v_rec", "omega", "m_csr", "delta_t_h", "flags"}, rows));

    if (a.fit_decay) {
        const auto fit = retention::fit_decay(decay);
        Json j{{"s0", fit.s0},
               {"lambda", fit.lambda},
               {"rms_residual", fit.rms_residual},
               {"used", fit.used},
               {"excluded_zero", fit.excluded_zero}};
        std::sort(decay.begin(), decay.end(), [](const auto& x, const auto& y) { return x.t < y.t; });
        std::string tsv = "t_hours\ts_observed\ts_fitted\n";
        for (const auto& o : decay)
            tsv += fmt(o.t, 17) + "\t" + fmt(o.s, 17) + "\t" + fmt(fit.s0 * std::exp(-fit.lambda * o.t), 17) + "\n";
        write_series(ctx, "decay_curve.tsv", tsv);
        emit(ctx, "decay", params, {j},
             table({"s0", "lambda", "rms_residual", "used", "excluded_zero"},
                   {{fmt(fit.s0), fmt(fit.lambda), fmt(fit.rms_residual), std::to_string(fit.used),
                     std::to_string(fit.excluded_zero)}}));
    }
}

// ---------------------------------------------------------------- calibrate

struct CalibrateArgs {
    std::string pairs;
    std::optional<std::string> baseline_source;
    bool allow_min_norm = false;
};

void cmd_calibrate(Context& ctx, const CalibrateArgs& a) {
    const auto entries = read_roster(a.pairs);
    const auto vopts = velocity_options(ctx.config);
    std::vector<retention::CalibrationRow> rows;
    for (const auto& e : entries) {
        retention::SessionPair pair{retention::load_session_log(need(e.build, e, "build")),
                                    retention::load_session_log(need(e.refactor, e, "refactor"))};
        rows.push_back(retention::calibration_row(pair, vopts));
    }
    const auto source = a.baseline_source.value_or(fs::path(a.pairs).stem().string());
    const auto cal = retention::calibrate_omega(rows, source, {a.allow_min_norm});

    Json rec = retention::to_json(cal);
    double mean = 0.0;
    Json row_json = Json::array();
    std::vector<std::vector<std::string>> table_rows;
    for (const auto& r : rows) {
        const double m = r.velocity_ratio * (cal.alpha * r.ln_cc + cal.beta * r.volume_v);
        mean += m;
        row_json.push_back({{"label", r.label},
                            {"velocity_ratio", r.velocity_ratio},
                            {"ln_cc", r.ln_cc},
                            {"volume_v", r.volume_v},
                            {"m_csr", m}});
        table_rows.push_back({r.label, fmt(r.velocity_ratio), fmt(r.ln_cc), fmt(r.volume_v), fmt(m)});
    }
    mean /= static_cast<double>(rows.size());
    rec["mean_expert_m_csr"] = mean;
    rec["rows"] = row_json;
    if (ctx.out_dir) write_text_file(*ctx.out_dir / "calibration.json", retention::to_json(cal).dump(2) + "\n");
    auto summary = table({"label", "v_ratio", "ln_cc", "volume_v", "m_csr"}, table_rows);
    summary += "alpha " + fmt(cal.alpha) + "  beta " + fmt(cal.beta) + "  mean expert m_csr " + fmt(mean) +
               (cal.underdetermined ? "  (minimum-norm, underdetermined)" : "") + "\n";
    emit(ctx, "calibrate",
         {{"pairs", path_echo(a.pairs)}, {"baseline_source", source}, {"allow_min_norm", a.allow_min_norm}}, {rec},
         summary);
}

// ---------------------------------------------------------------- egap

struct EgapArgs {
    std::optional<std::string> transcript, ontology, code, roster, validate_ontology;
};

void cmd_egap(Context& ctx, const EgapArgs& a) {
    if (a.validate_ontology) {
        const auto o = explainability::load_ontology(*a.validate_ontology);
        std::vector<std::vector<std::string>> rows;
        for (const auto& c : o.concepts) rows.push_back({c.concept_id, fmt(c.proportion), std::to_string(c.phrases.size())});
        emit(ctx, "ontology", {{"ontology", path_echo(a.validate_ontology)}},
             {{{"unit", o.unit}, {"version", o.version}, {"concepts", o.concepts.size()}, {"valid", true}}},
             table({"concept_id", "proportion", "phrases"}, rows));
        return;
    }
    struct Job {
        std::string student;
        fs::path transcript, ontology;
        std::function<double()> h_c;
    };
    std::vector<Job> jobs;
    if (a.roster) {
        for (const auto& e : read_roster(*a.roster)) {
            const auto build = need(e.build, e, "build");
            jobs.push_back({e.student, need(e.transcript, e, "transcript"), need(e.ontology, e, "ontology"),
                            [build] { return codemetrics::metrics(retention::load_session_log(build).final_unit).h_c; }});
        }
    } else if (a.transcript && a.ontology && a.code) {
        const fs::path code(*a.code);
        jobs.push_back({fs::path(*a.transcript).stem().string(), *a.transcript, *a.ontology,
                        [code] { return codemetrics::metrics(parse_source_file(code)).h_c; }});
    } else {
        throw ValidationError("egap: give --roster FILE, --validate-ontology FILE, or --transcript, --ontology and --code");
    }
    std::vector<Json> records;
    std::vector<std::vector<std::string>> rows;
    for (const auto& job : jobs) {
        const auto ontology = explainability::load_ontology(job.ontology);
        const auto s = explainability::e_gap(read_text_file(job.transcript), ontology, job.h_c(), ctx.config.epsilon);
        Json j{{"student", job.student}, {"ontology_unit", ontology.unit}, {"ontology_version", ontology.version}};
        j.update(explainability::to_json(s));
        records.push_back(std::move(j));
        rows.push_back({job.student, fmt(s.coverage), fmt(s.h_c), fmt(s.h_e), fmt(s.e_gap), s.degenerate ? "degenerate" : ""});
    }
    emit(ctx, "egap",
         {{"roster", path_echo(a.roster)},
          {"transcript", path_echo(a.transcript)},
          {"ontology", path_echo(a.ontology)},
          {"code", path_echo(a.code)}},
         records, table({"student", "coverage", "h_c", "h_e", "e_gap", "flags"}, rows));
}

// ---------------------------------------------------------------- score

struct ScoreArgs {
    std::optional<std::string> roster, sdt_report, retention_report, egap_report, records;
    std::optional<std::string> weights;
    bool no_gamma = false;
};

std::map<std::string, Json> index_report(const std::string& path, const char* key) {
    std::map<std::string, Json> out;
    for (const auto& rec : read_report(path)) {
        const auto id = require_string(rec.value, key, rec.where);
        if (!out.emplace(id, rec.value).second) throw ValidationError(rec.where + ": duplicate record for '" + id + "'");
    }
    return out;
}

const Json& lookup(const std::map<std::string, Json>& index, const std::string& student, const std::string& report) {
    auto it = index.find(student);
    if (it == index.end()) throw ValidationError("score: no " + report + " record for student '" + student + "'");
    return it->second;
}

void cmd_score(Context& ctx, const ScoreArgs& a) {
    auto& c = ctx.config;
    if (a.weights && *a.weights != "default") {
        std::vector<double> w;
        std::stringstream ss(*a.weights);
        for (std::string part; std::getline(ss, part, ',');) {
            try {
                std::size_t used = 0;
                w.push_back(std::stod(part, &used));
                if (used != part.size()) throw std::invalid_argument(part);
            } catch (const std::exception&) {
                throw ValidationError("score: --weights must be 'default' or three comma-separated numbers");
            }
        }
        if (w.size() != 3) throw ValidationError("score: --weights must be 'default' or three comma-separated numbers");
        c.w1 = w[0];
        c.w2 = w[1];
        c.w3 = w[2];
    } else if (a.weights) {
        c.w1 = c.w2 = c.w3 = 1.0 / 3.0;
    }
    if (a.no_gamma) c.gamma = 0.0;
    c.validate();
    const composite::UtilityWeights weights{c.w1, c.w2, c.w3, c.gamma};
    const composite::ZoneThresholds thresholds{c.m_csr_threshold, c.e_gap_threshold, c.m_ht_cutoff};

    std::vector<composite::StudentRecord> students;
    std::map<std::string, std::vector<std::string>> flags;
    if (a.records) {
        for (const auto& rec : read_json_lines(*a.records))
            students.push_back(composite::student_record_from_json(rec.value, rec.where));
    } else {
        if (!a.roster || !a.sdt_report || !a.retention_report || !a.egap_report)
            throw ValidationError("score: give --records FILE, or --roster with --sdt, --retention and --egap reports");
        const auto sdt_index = index_report(*a.sdt_report, "reviewer");
        const auto ret_index = index_report(*a.retention_report, "student");
        const auto egap_index = index_report(*a.egap_report, "student");
        for (const auto& e : read_roster(*a.roster)) {
            if (!e.t_dev) throw ValidationError(e.where + ": field 't_dev' is required for score");
            const auto& s = lookup(sdt_index, e.student, "sdt");
            const auto& r = lookup(ret_index, e.student, "retention");
            const auto& g = lookup(egap_index, e.student, "egap");
            composite::StudentRecord rec{e.student, e.condition, r.at("m_csr").get<double>(),
                                         s.at("m_ht").get<double>(), g.at("e_gap").get<double>(), *e.t_dev};
            try {
                rec.validate();
            } catch (const ValidationError& err) {
                throw ValidationError(e.where + ": " + err.what());
            }
            auto& f = flags[e.student];
            if (s.value("correction_applied", false)) f.push_back("sdt_rate_corrected");
            if (r.value("degenerate_omega", false)) f.push_back("degenerate_omega");
            if (g.value("degenerate", false)) f.push_back("degenerate_e_gap");
            students.push_back(std::move(rec));
        }
    }

    std::vector<Json> records;
    std::vector<std::vector<std::string>> rows;
    for (const auto& s : students) {
        const double u = composite::utility(s, weights);
        const auto zone = composite::classify_zone(s, thresholds);
        auto f = flags[s.student];
        if (zone.foundational_review) f.insert(f.begin(), "foundational_review");
        Json j = composite::to_json(s);
        j["utility"] = u;
        j["zone"] = composite::to_string(zone.zone);
        j["control_metric"] = zone.control_metric;
        j["foundational_review"] = zone.foundational_review;
        j["flags"] = f;
        records.push_back(std::move(j));
        std::string flag_text;
        for (const auto& x : f) flag_text += (flag_text.empty() ? "" : ",") + x;
        rows.push_back({s.student, s.condition.value_or("-"), fmt(s.m_csr), fmt(s.m_ht), fmt(s.e_gap), fmt(u),
                        composite::to_string(zone.zone), flag_text});
    }
    Json params{{"roster", path_echo(a.roster)},
                {"sdt", path_echo(a.sdt_report)},
                {"retention", path_echo(a.retention_report)},
                {"egap", path_echo(a.egap_report)},
                {"records", path_echo(a.records)},
                {"weights", composite::to_json(weights)},
                {"zone_thresholds", composite::to_json(thresholds)}};
    emit(ctx, "score", params, records,
         table({"student", "condition", "m_csr", "m_ht", "e_gap", "utility", "zone", "flags"}, rows));

    const auto summary = composite::cohort_summary(students, weights);
    std::vector<Json> cohort;
    std::vector<std::vector<std::string>> crows;
    std::map<std::string, composite::StudentRecord> means;
    for (const auto& s : summary) {
        cohort.push_back(composite::to_json(s));
        crows.push_back({s.condition, std::to_string(s.m_csr.n), fmt(s.m_csr.mean), fmt(s.m_csr.sd), fmt(s.m_ht.mean),
                         fmt(s.m_ht.sd), fmt(s.e_gap.mean), fmt(s.e_gap.sd), fmt(s.utility.mean), fmt(s.utility.sd)});
        means[s.condition] = {s.condition, s.condition, s.m_csr.mean, s.m_ht.mean, s.e_gap.mean, 0.0};
    }
    auto text = table({"condition", "n", "m_csr", "sd", "m_ht", "sd", "e_gap", "sd", "utility", "sd"}, crows);
    if (weights.gamma > 0.0 && means.count("vibe") && means.count("trad")) {
        const double dt = composite::break_even(means["vibe"], means["trad"], weights);
        cohort.push_back({{"break_even_hours", dt}, {"between", {"vibe", "trad"}}, {"basis", "condition means"}});
        text += "break-even time saving (vibe vs trad, condition means): " + fmt(dt) + " h\n";
    }
    emit(ctx, "cohort", params, cohort, text);
}

// ---------------------------------------------------------------- power

struct PowerArgs {
    double d = 0.5, alpha = 0.05, power = 0.8;
    std::string design = "two_sample";
    std::size_t replicates = 20000;
    std::string estimator = "conditional";
    std::optional<double> attrition;
    bool cohort_rounding = false;
    std::optional<std::size_t> stated_target;
};

void cmd_power(Context& ctx, const PowerArgs& a) {
    stats::PowerSpec spec;
    spec.effect_size_d = a.d;
    spec.alpha = a.alpha;
    spec.target_power = a.power;
    const auto design = stats::design_from_string(a.design);
    if (!design) throw ValidationError("power: --design must be 'two_sample' or 'paired'");
    spec.design = *design;
    spec.replicates = a.replicates;
    const auto estimator = stats::power_estimator_from_string(a.estimator);
    if (!estimator) throw ValidationError("power: --estimator must be 'conditional' or 'crude'");
    spec.estimator = *estimator;
    spec.seed = ctx.config.seed;
    const auto result = stats::required_n(spec);

    Json rec = stats::to_json(result);
    std::string text = "required n per " + std::string(spec.design == stats::Design::TwoSample ? "group" : "pair set") +
                       ": " + std::to_string(result.n) + " (power " + fmt(result.power_at_n) + ")\n" +
                       "normal approximation: " + fmt(result.normal_approx_n) + " -> " +
                       std::to_string(result.normal_approx_n_ceil) + "\n";
    if (a.attrition) {
        const auto att = stats::attrition_target(result.n, *a.attrition, a.cohort_rounding, a.stated_target);
        rec["attrition"] = stats::to_json(att);
        text += "recruitment target at " + fmt(*a.attrition) + " attrition: " + std::to_string(att.target) +
                " (raw " + std::to_string(att.raw_target) + ")";
        if (att.stated_exceeds_formula)
            text += "; stated target " + std::to_string(*att.stated_target) + " exceeds the formula";
        text += "\n";
    }
    auto points = result.evaluated;
    std::sort(points.begin(), points.end(), [](const auto& x, const auto& y) { return x.n < y.n; });
    std::string tsv = "n\tpower\n";
    for (const auto& p : points) tsv += std::to_string(p.n) + "\t" + fmt(p.power, 17) + "\n";
    write_series(ctx, "power_curve.tsv", tsv);
    Json params = stats::to_json(spec);
    params["attrition"] = a.attrition ? Json(*a.attrition) : Json(nullptr);
    params["cohort_rounding"] = a.cohort_rounding;
    params["stated_target"] = a.stated_target ? Json(*a.stated_target) : Json(nullptr);
    emit(ctx, "power", params, {rec}, text);
}

// ---------------------------------------------------------------- simulate / fit

struct SimulateArgs {
    stats::CohortParams params;
    std::size_t n_per_condition = 40;
    std::size_t occasions = 4;
};

void cmd_simulate(Context& ctx, const SimulateArgs& a) {
    const auto data = stats::simulate_cohort(a.params, a.n_per_condition, a.occasions, ctx.config.seed);
    const auto lines = stats::to_json_lines(data);
    if (!ctx.out_dir) {
        ctx.out << lines;
        return;
    }
    write_text_file(*ctx.out_dir / "cohort.jsonl", lines);
    Json params = stats::to_json(a.params);
    params["n_per_condition"] = a.n_per_condition;
    params["occasions"] = a.occasions;
    emit(ctx, "simulate", params, {{{"dataset", "cohort.jsonl"}, {"n_observations", data.observations.size()}}},
         "simulated " + std::to_string(data.observations.size()) + " observations into cohort.jsonl\n");
}

struct FitArgs {
    std::string data;
    std::optional<double> pin_theta;
};

void cmd_fit(Context& ctx, const FitArgs& a) {
    const auto data = stats::read_cohort(a.data);
    stats::MixedFitOptions opts;
    opts.pinned_theta = a.pin_theta;
    const auto fit = stats::fit_mixed(data, opts);
    const auto text = table({"term", "estimate", "se"}, {{"beta0 (intercept)", fmt(fit.beta0), fmt(fit.se_beta0)},
                                                        {"beta1 (condition)", fmt(fit.beta1), fmt(fit.se_beta1)},
                                                        {"beta2 (time)", fmt(fit.beta2), fmt(fit.se_beta2)}}) +
                      "95% CI beta1: [" + fmt(fit.ci95_beta1_low) + ", " + fmt(fit.ci95_beta1_high) + "]\n" +
                      "sigma_u " + fmt(fit.sigma_u) + "  sigma_e " + fmt(fit.sigma_e) + "  REML log-lik " +
                      fmt(fit.reml_loglik) + "\n";
    emit(ctx, "fit", {{"data", path_echo(a.data)}, {"pin_theta", a.pin_theta ? Json(*a.pin_theta) : Json(nullptr)}},
         {stats::to_json(fit)}, text);
}

// ---------------------------------------------------------------- spearman / kappa

struct SpearmanArgs {
    std::string data;
    std::size_t permutations = 0;
};

void cmd_spearman(Context& ctx, const SpearmanArgs& a) {
    std::vector<double> x, y;
    for (const auto& rec : read_json_lines(a.data)) {
        reject_unknown_keys(rec.value, {"x", "y"}, rec.where);
        x.push_back(require_number(rec.value, "x", rec.where));
        y.push_back(require_number(rec.value, "y", rec.where));
    }
    const auto r = stats::spearman(x, y, a.permutations, ctx.config.seed);
    std::string text = "n " + std::to_string(r.n) + "  rho " + fmt(r.rho) + "  p (t approximation) " + fmt(r.p_t);
    if (r.p_permutation) text += "  p (" + std::to_string(r.permutations) + " permutations) " + fmt(*r.p_permutation);
    emit(ctx, "spearman", {{"data", path_echo(a.data)}, {"permutations", a.permutations}}, {stats::to_json(r)},
         text + "\n");
}

struct KappaArgs {
    std::string data;
};

void cmd_kappa(Context& ctx, const KappaArgs& a) {
    std::vector<std::string> ra, rb;
    for (const auto& rec : read_json_lines(a.data)) {
        reject_unknown_keys(rec.value, {"a", "b"}, rec.where);
        ra.push_back(require_string(rec.value, "a", rec.where));
        rb.push_back(require_string(rec.value, "b", rec.where));
    }
    const auto k = stats::cohens_kappa(ra, rb);
    emit(ctx, "kappa", {{"data", path_echo(a.data)}}, {stats::to_json(k)},
         "n " + std::to_string(k.n) + "  kappa " + fmt(k.kappa) + "  p_o " + fmt(k.p_observed) + "  p_e " +
             fmt(k.p_expected) + "\n");
}

}  // namespace

// ---------------------------------------------------------------- dispatch

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Vibe-check metrics toolkit", "vcp"};
    app.require_subcommand(1);
    app.fallthrough();

    std::optional<std::string> config_path, out_dir;
    std::optional<std::uint64_t> seed;
    app.add_option("--config", config_path, "JSON config file (falls back to $VCP_CONFIG)");
    app.add_option("--seed", seed, "Random seed");
    app.add_option("--out", out_dir, "Output directory for reports");

    // Flag overrides shared by several subcommands.
    std::optional<double> k, delta, idle_gap, epsilon, gamma, m_ht_cutoff;
    std::optional<std::string> correction, velocity_unit, calibration;
    bool allow_uncalibrated = false;

    MetricsArgs metrics_args;
    auto* metrics = app.add_subcommand("metrics", "Cyclomatic complexity, Halstead volume and CFG entropy");
    metrics->add_option("files", metrics_args.files, "VCPLang sources or CFG JSON files")->required();

    SdtArgs sdt_args;
    auto* sdt = app.add_subcommand("sdt", "Hit and false-alarm rates, d' and M_HT per reviewer");
    sdt->add_option("--responses", sdt_args.responses, "Trap-response JSONL")->required();
    sdt->add_option("--answer-key", sdt_args.answer_key, "answer_key.jsonl supplying ground truth");
    sdt->add_option("--k", k, "Sigmoid steepness");
    sdt->add_option("--delta", delta, "Competency threshold on d'");
    sdt->add_option("--correction", correction, "half-count | none");

    TrapsArgs traps_args;
    auto* traps = app.add_subcommand("traps", "Trap corpus tools");
    traps->require_subcommand(1);
    auto* generate = traps->add_subcommand("generate", "Inject labeled defects into origin programs");
    generate->add_option("--origins", traps_args.origins, "Directory of origin .vcp files")->required();
    generate->add_option("--fraction", traps_args.fraction, "Fraction of items that carry a defect");

    RetentionArgs retention_args;
    auto* retention = app.add_subcommand("retention", "Velocities, Omega and M_CSR");
    retention->add_option("--build", retention_args.build, "ai_build session log");
    retention->add_option("--refactor", retention_args.refactor, "cold_refactor session log");
    retention->add_option("--roster", retention_args.roster, "Roster JSONL with build/refactor paths");
    retention->add_option("--calibration", calibration, "calibration.json from the calibrate subcommand");
    retention->add_flag("--allow-uncalibrated", allow_uncalibrated, "Score with the uncalibrated Omega");
    retention->add_option("--idle-gap", idle_gap, "Idle gap in seconds");
    retention->add_option("--velocity-unit", velocity_unit, "halstead-bits | loc");
    retention->add_flag("--fit-decay", retention_args.fit_decay, "Fit S(t) = S0 exp(-lambda t) over the cohort");

    CalibrateArgs calibrate_args;
    auto* calibrate = app.add_subcommand("calibrate", "Fit Omega's alpha and beta on expert pairs");
    calibrate->add_option("--pairs", calibrate_args.pairs, "Roster JSONL of expert build/refactor logs")->required();
    calibrate->add_option("--baseline-source", calibrate_args.baseline_source, "Calibration identifier");
    calibrate->add_flag("--allow-min-norm", calibrate_args.allow_min_norm, "Accept a rank-1 design");
    calibrate->add_option("--idle-gap", idle_gap, "Idle gap in seconds");
    calibrate->add_option("--velocity-unit", velocity_unit, "halstead-bits | loc");

    EgapArgs egap_args;
    auto* egap = app.add_subcommand("egap", "Concept coverage and explainability gap");
    egap->add_option("--transcript", egap_args.transcript, "Explanation transcript (text)");
    egap->add_option("--ontology", egap_args.ontology, "Concept ontology JSON");
    egap->add_option("--code", egap_args.code, "VCPLang source the transcript explains");
    egap->add_option("--roster", egap_args.roster, "Roster JSONL with transcript/ontology/build paths");
    egap->add_option("--validate-ontology", egap_args.validate_ontology, "Only validate an ontology file");
    egap->add_option("--epsilon", epsilon, "Regularizer");

    ScoreArgs score_args;
    auto* score = app.add_subcommand("score", "Utility, zones and cohort summary");
    score->add_option("--roster", score_args.roster, "Roster JSONL (student, condition, t_dev)");
    score->add_option("--sdt", score_args.sdt_report, "sdt.jsonl report");
    score->add_option("--retention", score_args.retention_report, "retention.jsonl report");
    score->add_option("--egap", score_args.egap_report, "egap.jsonl report");
    score->add_option("--records", score_args.records, "StudentRecord JSONL instead of reports");
    score->add_option("--weights", score_args.weights, "'default' or w1,w2,w3");
    score->add_option("--gamma", gamma, "Utility per development hour");
    score->add_flag("--no-gamma", score_args.no_gamma, "Set gamma to 0");
    score->add_option("--m-ht-cutoff", m_ht_cutoff, "M_HT cutoff for the professional zone");

    PowerArgs power_args;
    auto* power = app.add_subcommand("power", "Monte-Carlo sample size for a two-sided t test");
    power->add_option("--d", power_args.d, "Cohen's d");
    power->add_option("--alpha", power_args.alpha, "Significance level");
    power->add_option("--power", power_args.power, "Target power");
    power->add_option("--design", power_args.design, "two_sample | paired");
    power->add_option("--replicates", power_args.replicates, "Replicates per candidate n");
    power->add_option("--estimator", power_args.estimator, "conditional | crude");
    power->add_option("--attrition", power_args.attrition, "Expected attrition rate");
    power->add_flag("--cohort-rounding", power_args.cohort_rounding, "Round the target up to a multiple of 10");
    power->add_option("--stated-target", power_args.stated_target, "Recruitment target to compare with the formula");

    SimulateArgs simulate_args;
    auto* simulate = app.add_subcommand("simulate", "Simulate a random-intercept cohort");
    simulate->add_option("--beta0", simulate_args.params.beta0);
    simulate->add_option("--beta1", simulate_args.params.beta1);
    simulate->add_option("--beta2", simulate_args.params.beta2);
    simulate->add_option("--sigma-u", simulate_args.params.sigma_u);
    simulate->add_option("--sigma-e", simulate_args.params.sigma_e);
    simulate->add_option("--n-per-condition", simulate_args.n_per_condition);
    simulate->add_option("--occasions", simulate_args.occasions);

    FitArgs fit_args;
    auto* fit = app.add_subcommand("fit", "REML random-intercept model");
    fit->add_option("--data", fit_args.data, "Cohort JSONL")->required();
    fit->add_option("--pin-theta", fit_args.pin_theta, "Fix sigma_u^2 / sigma_e^2");

    SpearmanArgs spearman_args;
    auto* spearman = app.add_subcommand("spearman", "Spearman rank correlation");
    spearman->add_option("--data", spearman_args.data, "JSONL of {x, y}")->required();
    spearman->add_option("--permutations", spearman_args.permutations, "Permutation count (0 = none)");

    KappaArgs kappa_args;
    auto* kappa = app.add_subcommand("kappa", "Cohen's kappa");
    kappa->add_option("--data", kappa_args.data, "JSONL of {a, b}")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        std::ostringstream o, er;
        const int code = app.exit(e, o, er);
        out << o.str();
        err << er.str();
        return code == 0 ? 0 : 1;
    }

    try {
        Context ctx{RunConfig{}, std::nullopt, out};
        if (!config_path) {
            if (const char* env = std::getenv("VCP_CONFIG"); env && *env) config_path = env;
        }
        if (config_path) {
            apply_config(ctx.config, read_json_file(*config_path), *config_path);
            if (ctx.config.calibration && fs::path(*ctx.config.calibration).is_relative())
                ctx.config.calibration = (fs::path(*config_path).parent_path() / *ctx.config.calibration).string();
        }
        auto& c = ctx.config;
        if (seed) c.seed = *seed;
        if (k) c.k = *k;
        if (delta) c.delta = *delta;
        if (correction) c.correction = *correction;
        if (idle_gap) c.idle_gap = *idle_gap;
        if (velocity_unit) c.velocity_unit = *velocity_unit;
        if (calibration) c.calibration = *calibration;
        if (allow_uncalibrated) c.allow_uncalibrated = true;
        if (epsilon) c.epsilon = *epsilon;
        if (gamma) c.gamma = *gamma;
        if (m_ht_cutoff) c.m_ht_cutoff = *m_ht_cutoff;
        c.validate();
        if (out_dir) {
            ctx.out_dir = fs::path(*out_dir);
            fs::create_directories(*ctx.out_dir);
        }

        if (*metrics) cmd_metrics(ctx, metrics_args);
        else if (*sdt) cmd_sdt(ctx, sdt_args);
        else if (*generate) cmd_traps_generate(ctx, traps_args);
        else if (*retention) cmd_retention(ctx, retention_args);
        else if (*calibrate) cmd_calibrate(ctx, calibrate_args);
        else if (*egap) cmd_egap(ctx, egap_args);
        else if (*score) cmd_score(ctx, score_args);
        else if (*power) cmd_power(ctx, power_args);
        else if (*simulate) cmd_simulate(ctx, simulate_args);
        else if (*fit) cmd_fit(ctx, fit_args);
        else if (*spearman) cmd_spearman(ctx, spearman_args);
        else if (*kappa) cmd_kappa(ctx, kappa_args);
        return 0;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const ComputationError& e) {
        err << "computation error: " << e.what() << '\n';
        return 2;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace vcp::cli
