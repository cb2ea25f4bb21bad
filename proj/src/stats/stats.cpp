#include "vcp/stats/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>

#include <Eigen/Dense>
#include <boost/math/distributions/students_t.hpp>

#include "vcp/error.hpp"
#include "vcp/rng.hpp"
#include "vcp/sdt/normal.hpp"

namespace vcp::stats {

namespace {

double two_sided_t_p(double t, double df) {
    if (std::isinf(t)) return 0.0;
    const boost::math::students_t dist(df);
    return 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
}

// Finite doubles only; JSON has no infinity.
Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

}  // namespace

// ---------------------------------------------------------------- Spearman

std::vector<double> average_ranks(const std::vector<double>& values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(values.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
        const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
        i = j + 1;
    }
    return ranks;
}

namespace {

struct CenteredRanks {
    std::vector<double> a, b;
    double denom = 0.0;
};

CenteredRanks centered_ranks(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size())
        throw ValidationError("spearman: x and y differ in length (" + std::to_string(x.size()) + " vs " +
                              std::to_string(y.size()) + ")");
    if (x.size() < 4) throw ValidationError("spearman: need at least 4 pairs");
    for (std::size_t i = 0; i < x.size(); ++i)
        if (!std::isfinite(x[i]) || !std::isfinite(y[i]))
            throw ValidationError("spearman: non-finite value at position " + std::to_string(i + 1));
    CenteredRanks c{average_ranks(x), average_ranks(y), 0.0};
    const double mean = 0.5 * static_cast<double>(x.size() + 1);
    double saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        c.a[i] -= mean;
        c.b[i] -= mean;
        saa += c.a[i] * c.a[i];
        sbb += c.b[i] * c.b[i];
    }
    if (saa == 0.0 || sbb == 0.0) throw ComputationError("spearman: correlation undefined for a constant input");
    c.denom = std::sqrt(saa * sbb);
    return c;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace

SpearmanResult spearman(const std::vector<double>& x, const std::vector<double>& y) {
    const auto c = centered_ranks(x, y);
    SpearmanResult r;
    r.n = x.size();
    r.rho = std::clamp(dot(c.a, c.b) / c.denom, -1.0, 1.0);
    const double df = static_cast<double>(r.n) - 2.0;
    if (std::abs(r.rho) == 1.0) {
        r.t_statistic = std::copysign(std::numeric_limits<double>::infinity(), r.rho);
        r.p_t = 0.0;
    } else {
        r.t_statistic = r.rho * std::sqrt(df / (1.0 - r.rho * r.rho));
        r.p_t = two_sided_t_p(r.t_statistic, df);
    }
    return r;
}

SpearmanResult spearman(const std::vector<double>& x, const std::vector<double>& y, std::size_t permutations,
                        std::uint64_t seed) {
    auto r = spearman(x, y);
    if (permutations == 0) return r;
    auto c = centered_ranks(x, y);
    const double observed = std::abs(dot(c.a, c.b)) * (1.0 - 1e-12);
    Rng rng(seed);
    std::size_t extreme = 0;
    for (std::size_t p = 0; p < permutations; ++p) {
        rng.shuffle(std::span<double>(c.b));
        if (std::abs(dot(c.a, c.b)) >= observed) ++extreme;
    }
    r.p_permutation = static_cast<double>(extreme + 1) / static_cast<double>(permutations + 1);
    r.permutations = permutations;
    r.seed = seed;
    return r;
}

Json to_json(const SpearmanResult& r) {
    Json j;
    j["n"] = r.n;
    j["rho"] = r.rho;
    j["t_statistic"] = number_or_null(r.t_statistic);
    j["p_t"] = r.p_t;
    j["p_permutation"] = r.p_permutation ? Json(*r.p_permutation) : Json(nullptr);
    j["permutations"] = r.permutations;
    j["seed"] = r.seed;
    return j;
}

// ---------------------------------------------------------------- kappa

KappaResult cohens_kappa(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    if (a.size() != b.size())
        throw ValidationError("cohens_kappa: rating lists differ in length (" + std::to_string(a.size()) + " vs " +
                              std::to_string(b.size()) + ")");
    if (a.empty()) throw ValidationError("cohens_kappa: no ratings");
    std::map<std::string, std::pair<std::size_t, std::size_t>> margins;
    std::size_t agree = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ++margins[a[i]].first;
        ++margins[b[i]].second;
        agree += a[i] == b[i];
    }
    KappaResult r;
    r.n = a.size();
    const double n = static_cast<double>(r.n);
    r.p_observed = static_cast<double>(agree) / n;
    for (const auto& [cat, counts] : margins) {
        r.categories.push_back(cat);
        r.p_expected += (static_cast<double>(counts.first) / n) * (static_cast<double>(counts.second) / n);
    }
    if (r.p_expected >= 1.0)
        throw ComputationError("cohens_kappa: chance agreement is 1 (both raters used the single category '" +
                               r.categories.front() + "')");
    r.kappa = (r.p_observed - r.p_expected) / (1.0 - r.p_expected);
    return r;
}

Json to_json(const KappaResult& r) {
    return {{"kappa", r.kappa},
            {"p_observed", r.p_observed},
            {"p_expected", r.p_expected},
            {"n", r.n},
            {"categories", r.categories}};
}

// ---------------------------------------------------------------- power

const char* to_string(Design d) { return d == Design::TwoSample ? "two_sample" : "paired"; }
const char* to_string(PowerEstimator e) { return e == PowerEstimator::Conditional ? "conditional" : "crude"; }

std::optional<Design> design_from_string(const std::string& text) {
    if (text == "two_sample") return Design::TwoSample;
    if (text == "paired") return Design::Paired;
    return std::nullopt;
}

std::optional<PowerEstimator> power_estimator_from_string(const std::string& text) {
    if (text == "conditional") return PowerEstimator::Conditional;
    if (text == "crude") return PowerEstimator::Crude;
    return std::nullopt;
}

void PowerSpec::validate() const {
    if (!(effect_size_d > 0.0) || !std::isfinite(effect_size_d)) throw ValidationError("power: d must be > 0");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("power: alpha must lie in (0, 1)");
    if (!(target_power > 0.0 && target_power < 1.0)) throw ValidationError("power: target power must lie in (0, 1)");
    if (replicates == 0) throw ValidationError("power: replicates must be >= 1");
}

namespace {

double degrees_of_freedom(const PowerSpec& spec, std::size_t n) {
    return spec.design == Design::TwoSample ? 2.0 * static_cast<double>(n) - 2.0 : static_cast<double>(n) - 1.0;
}

}  // namespace

double critical_t(const PowerSpec& spec, std::size_t n) {
    const boost::math::students_t dist(degrees_of_freedom(spec, n));
    return boost::math::quantile(boost::math::complement(dist, spec.alpha / 2.0));
}

double monte_carlo_power(const PowerSpec& spec, std::size_t n) {
    spec.validate();
    if (n < 2) throw ValidationError("power: n must be >= 2");
    const double df = degrees_of_freedom(spec, n);
    const double c = critical_t(spec, n);
    const double nd = static_cast<double>(n);
    Rng rng(spec.seed, n);
    double total = 0.0;

    if (spec.estimator == PowerEstimator::Conditional) {
        // Mean difference over its standard error is N(ncp, 1) given sigma = 1.
        const double ncp = spec.design == Design::TwoSample ? spec.effect_size_d * std::sqrt(nd / 2.0)
                                                            : spec.effect_size_d * std::sqrt(nd);
        for (std::size_t r = 0; r < spec.replicates; ++r) {
            const double s = std::sqrt(rng.chi_square(df) / df);
            total += sdt::normal_cdf(-c * s + ncp) + sdt::normal_cdf(-c * s - ncp);
        }
        return total / static_cast<double>(spec.replicates);
    }

    for (std::size_t r = 0; r < spec.replicates; ++r) {
        double t = 0.0;
        if (spec.design == Design::Paired) {
            double sum = 0.0, sq = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double d = rng.normal(spec.effect_size_d, 1.0);
                sum += d;
                sq += d * d;
            }
            const double mean = sum / nd;
            const double var = (sq - nd * mean * mean) / (nd - 1.0);
            t = mean / std::sqrt(var / nd);
        } else {
            double s1 = 0.0, q1 = 0.0, s2 = 0.0, q2 = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double a = rng.normal(spec.effect_size_d, 1.0);
                const double b = rng.normal();
                s1 += a;
                q1 += a * a;
                s2 += b;
                q2 += b * b;
            }
            const double m1 = s1 / nd, m2 = s2 / nd;
            const double pooled = ((q1 - nd * m1 * m1) + (q2 - nd * m2 * m2)) / df;
            t = (m1 - m2) / std::sqrt(pooled * 2.0 / nd);
        }
        if (std::abs(t) > c) total += 1.0;
    }
    return total / static_cast<double>(spec.replicates);
}

double normal_approx_n(const PowerSpec& spec) {
    spec.validate();
    const double z = sdt::inverse_normal_cdf(1.0 - spec.alpha / 2.0) + sdt::inverse_normal_cdf(spec.target_power);
    const double base = z * z / (spec.effect_size_d * spec.effect_size_d);
    return spec.design == Design::TwoSample ? 2.0 * base : base;
}

PowerResult required_n(const PowerSpec& spec) {
    spec.validate();
    PowerResult result;
    std::map<std::size_t, double> cache;
    const auto power = [&](std::size_t n) {
        auto it = cache.find(n);
        if (it != cache.end()) return it->second;
        const double p = monte_carlo_power(spec, n);
        cache.emplace(n, p);
        result.evaluated.push_back({n, p});
        return p;
    };

    std::size_t lo = 1, hi = 2;
    while (power(hi) < spec.target_power) {
        if (hi == kMaxSampleSize)
            throw ComputationError("required_n: target power " + std::to_string(spec.target_power) +
                                   " not reached within n <= " + std::to_string(kMaxSampleSize));
        lo = hi;
        hi = std::min(hi * 2, kMaxSampleSize);
    }
    while (hi - lo > 1) {
        const std::size_t mid = lo + (hi - lo) / 2;
        if (power(mid) >= spec.target_power)
            hi = mid;
        else
            lo = mid;
    }
    result.n = hi;
    result.power_at_n = cache.at(hi);
    result.normal_approx_n = normal_approx_n(spec);
    result.normal_approx_n_ceil = static_cast<std::size_t>(std::ceil(result.normal_approx_n - 1e-12));
    return result;
}

Json to_json(const PowerSpec& spec) {
    return {{"effect_size_d", spec.effect_size_d},
            {"alpha", spec.alpha},
            {"target_power", spec.target_power},
            {"design", to_string(spec.design)},
            {"replicates", spec.replicates},
            {"seed", spec.seed},
            {"estimator", to_string(spec.estimator)}};
}

Json to_json(const PowerResult& r) {
    Json j;
    j["n"] = r.n;
    j["power_at_n"] = r.power_at_n;
    j["normal_approx_n"] = r.normal_approx_n;
    j["normal_approx_n_ceil"] = r.normal_approx_n_ceil;
    j["evaluated"] = Json::array();
    for (const auto& p : r.evaluated) j["evaluated"].push_back({{"n", p.n}, {"power", p.power}});
    return j;
}

AttritionResult attrition_target(std::size_t n_required, double attrition_rate, bool cohort_rounding,
                                 std::optional<std::size_t> stated_target) {
    if (!(attrition_rate >= 0.0 && attrition_rate < 1.0))
        throw ValidationError("attrition_target: rate must lie in [0, 1)");
    AttritionResult r;
    r.n_required = n_required;
    r.attrition_rate = attrition_rate;
    r.cohort_rounding = cohort_rounding;
    const double exact = static_cast<double>(n_required) / (1.0 - attrition_rate);
    // Absorb representation error such as 64 / 0.8 = 80.00000000000001.
    r.raw_target = static_cast<std::size_t>(std::ceil(exact * (1.0 - 1e-12)));
    r.target = cohort_rounding ? (r.raw_target + 9) / 10 * 10 : r.raw_target;
    r.stated_target = stated_target;
    r.stated_exceeds_formula = stated_target && *stated_target > r.target;
    return r;
}

Json to_json(const AttritionResult& r) {
    Json j;
    j["n_required"] = r.n_required;
    j["attrition_rate"] = r.attrition_rate;
    j["raw_target"] = r.raw_target;
    j["target"] = r.target;
    j["cohort_rounding"] = r.cohort_rounding;
    j["stated_target"] = r.stated_target ? Json(*r.stated_target) : Json(nullptr);
    j["stated_exceeds_formula"] = r.stated_exceeds_formula;
    return j;
}

// ---------------------------------------------------------------- cohort

void CohortDataset::validate() const {
    std::set<std::pair<std::string, int>> seen;
    std::map<std::string, int> condition_of;
    for (const auto& o : observations) {
        if (o.condition != 0 && o.condition != 1)
            throw ValidationError("cohort: student '" + o.student + "' has an invalid condition");
        if (!seen.insert({o.student, o.occasion}).second)
            throw ValidationError("cohort: duplicate observation for student '" + o.student + "' occasion " +
                                  std::to_string(o.occasion));
        const auto [it, inserted] = condition_of.emplace(o.student, o.condition);
        if (!inserted && it->second != o.condition)
            throw ValidationError("cohort: student '" + o.student + "' changes condition");
        if (!std::isfinite(o.y) || !std::isfinite(o.time))
            throw ValidationError("cohort: non-finite value for student '" + o.student + "'");
    }
}

CohortDataset simulate_cohort(const CohortParams& params, std::size_t n_per_condition, std::size_t occasions,
                              std::uint64_t seed) {
    if (!(params.sigma_u >= 0.0) || !(params.sigma_e >= 0.0))
        throw ValidationError("simulate_cohort: standard deviations must be >= 0");
    if (n_per_condition == 0 || occasions == 0)
        throw ValidationError("simulate_cohort: counts must be >= 1");
    const std::size_t students = 2 * n_per_condition;
    const std::size_t width = std::max<std::size_t>(4, std::to_string(students).size());
    CohortDataset data;
    data.truth = params;
    data.observations.reserve(students * occasions);
    for (std::size_t j = 0; j < students; ++j) {
        auto id = std::to_string(j + 1);
        id = "s" + std::string(width - id.size(), '0') + id;
        const int condition = j >= n_per_condition ? 1 : 0;
        Rng rng(seed, j);
        const double u = params.sigma_u * rng.normal();
        for (std::size_t i = 0; i < occasions; ++i) {
            const double time = static_cast<double>(i);
            const double y = params.beta0 + params.beta1 * condition + params.beta2 * time + u +
                             params.sigma_e * rng.normal();
            data.observations.push_back({id, static_cast<int>(i), condition, time, y});
        }
    }
    return data;
}

Json to_json(const Observation& o) {
    return {{"student", o.student},
            {"occasion", o.occasion},
            {"condition", o.condition == 1 ? "vibe" : "trad"},
            {"time", o.time},
            {"y", o.y}};
}

Json to_json(const CohortParams& p) {
    return {{"beta0", p.beta0}, {"beta1", p.beta1}, {"beta2", p.beta2}, {"sigma_u", p.sigma_u}, {"sigma_e", p.sigma_e}};
}

std::string to_json_lines(const CohortDataset& data) {
    std::vector<Json> rows;
    rows.reserve(data.observations.size());
    for (const auto& o : data.observations) rows.push_back(to_json(o));
    return vcp::to_json_lines(rows);
}

CohortDataset read_cohort(const std::filesystem::path& path) {
    CohortDataset data;
    for (const auto& rec : read_json_lines(path)) {
        reject_unknown_keys(rec.value, {"student", "occasion", "condition", "time", "y"}, rec.where);
        Observation o;
        o.student = require_string(rec.value, "student", rec.where);
        o.occasion = static_cast<int>(require_integer(rec.value, "occasion", rec.where));
        const auto cond = require_string(rec.value, "condition", rec.where);
        if (cond != "vibe" && cond != "trad")
            throw ValidationError(rec.where + ": field 'condition' must be 'vibe' or 'trad', got '" + cond + "'");
        o.condition = cond == "vibe" ? 1 : 0;
        o.time = require_number(rec.value, "time", rec.where);
        o.y = require_number(rec.value, "y", rec.where);
        data.observations.push_back(std::move(o));
    }
    try {
        data.validate();
    } catch (const ValidationError& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
    return data;
}

// ---------------------------------------------------------------- mixed model

namespace {

using Eigen::Matrix3d;
using Eigen::Vector3d;

struct Group {
    std::vector<Vector3d> x;
    std::vector<double> y;
};

struct Design3 {
    std::vector<Group> groups;
    std::size_t n = 0;
};

Design3 build_design(const CohortDataset& data) {
    std::map<std::string, Group> by_student;
    for (const auto& o : data.observations) {
        auto& g = by_student[o.student];
        g.x.emplace_back(1.0, static_cast<double>(o.condition), o.time);
        g.y.push_back(o.y);
    }
    Design3 d;
    for (auto& [_, g] : by_student) {
        d.n += g.y.size();
        d.groups.push_back(std::move(g));
    }
    return d;
}

struct GlsSolution {
    Vector3d beta;
    Matrix3d xtx;  ///< X' H^-1 X
    double rss = 0.0;  ///< r' H^-1 r
    double log_det_h = 0.0;
    double deviance = 0.0;
    double sigma2 = 0.0;
};

GlsSolution gls(const Design3& d, double theta) {
    GlsSolution s;
    s.xtx.setZero();
    Vector3d xty = Vector3d::Zero();
    for (const auto& g : d.groups) {
        const double m = static_cast<double>(g.y.size());
        const double w = theta / (1.0 + theta * m);
        Vector3d xs = Vector3d::Zero();
        double ys = 0.0;
        for (std::size_t i = 0; i < g.y.size(); ++i) {
            s.xtx += g.x[i] * g.x[i].transpose();
            xty += g.x[i] * g.y[i];
            xs += g.x[i];
            ys += g.y[i];
        }
        s.xtx -= w * xs * xs.transpose();
        xty -= w * xs * ys;
        s.log_det_h += std::log1p(theta * m);
    }
    const Eigen::LDLT<Matrix3d> ldlt(s.xtx);
    s.beta = ldlt.solve(xty);
    // Residual form avoids the cancellation in y'H^-1y - b'X'H^-1y.
    for (const auto& g : d.groups) {
        const double m = static_cast<double>(g.y.size());
        const double w = theta / (1.0 + theta * m);
        double rr = 0.0, rs = 0.0;
        for (std::size_t i = 0; i < g.y.size(); ++i) {
            const double r = g.y[i] - g.x[i].dot(s.beta);
            rr += r * r;
            rs += r;
        }
        s.rss += rr - w * rs * rs;
    }
    const double dof = static_cast<double>(d.n) - 3.0;
    s.sigma2 = std::max(s.rss / dof, std::numeric_limits<double>::min());
    s.deviance = dof * std::log(s.sigma2) + s.log_det_h + std::log(s.xtx.determinant()) +
                 dof * (1.0 + std::log(2.0 * M_PI));
    return s;
}

void check_design(const CohortDataset& data, const Design3& d) {
    std::map<int, std::set<std::string>> students_by_condition;
    std::set<int> occasions;
    for (const auto& o : data.observations) {
        students_by_condition[o.condition].insert(o.student);
        occasions.insert(o.occasion);
    }
    if (students_by_condition[0].size() < 2 || students_by_condition[1].size() < 2)
        throw ValidationError("fit_mixed: need at least 2 students in each condition");
    if (occasions.size() < 2) throw ValidationError("fit_mixed: need at least 2 occasions");

    Eigen::MatrixXd x(static_cast<Eigen::Index>(d.n), 3);
    Eigen::Index row = 0;
    for (const auto& g : d.groups)
        for (const auto& xi : g.x) x.row(row++) = xi.transpose();
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
    qr.setThreshold(1e-10);
    if (qr.rank() < 3)
        throw ComputationError("fit_mixed: singular fixed-effect design (condition or time is confounded with "
                               "the intercept)");
}

double golden_section(const Design3& d, double lo, double hi, double tol) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a), e = a + inv_phi * (b - a);
    double fc = gls(d, c).deviance, fe = gls(d, e).deviance;
    while (b - a > tol * (1.0 + std::abs(c))) {
        if (fc <= fe) {
            b = e;
            e = c;
            fe = fc;
            c = b - inv_phi * (b - a);
            fc = gls(d, c).deviance;
        } else {
            a = c;
            c = e;
            fc = fe;
            e = a + inv_phi * (b - a);
            fe = gls(d, e).deviance;
        }
    }
    return 0.5 * (a + b);
}

}  // namespace

double reml_deviance(const CohortDataset& data, double theta) {
    if (!(theta >= 0.0)) throw DomainError("reml_deviance: theta must be >= 0");
    const auto d = build_design(data);
    check_design(data, d);
    return gls(d, theta).deviance;
}

MixedModelFit fit_mixed(const CohortDataset& data, const MixedFitOptions& options) {
    data.validate();
    const auto d = build_design(data);
    check_design(data, d);

    double theta = 0.0;
    if (options.pinned_theta) {
        if (!(*options.pinned_theta >= 0.0)) throw ValidationError("fit_mixed: pinned theta must be >= 0");
        theta = *options.pinned_theta;
    } else {
        // Coarse scan on a log grid, then golden-section inside the best cell.
        std::vector<double> grid{0.0};
        for (int k = -24; k <= 24; ++k) grid.push_back(std::pow(10.0, k / 4.0));
        std::size_t best = 0;
        double best_f = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double f = gls(d, grid[i]).deviance;
            if (f < best_f) {
                best_f = f;
                best = i;
            }
        }
        const double lo = grid[best == 0 ? 0 : best - 1];
        const double hi = grid[std::min(best + 1, grid.size() - 1)];
        const double refined = golden_section(d, lo, hi, options.tolerance);
        theta = gls(d, refined).deviance <= best_f ? refined : grid[best];
        if (gls(d, 0.0).deviance <= gls(d, theta).deviance) theta = 0.0;
    }

    const auto s = gls(d, theta);
    const Matrix3d cov = s.sigma2 * s.xtx.inverse();
    MixedModelFit fit;
    fit.beta0 = s.beta(0);
    fit.beta1 = s.beta(1);
    fit.beta2 = s.beta(2);
    fit.se_beta0 = std::sqrt(cov(0, 0));
    fit.se_beta1 = std::sqrt(cov(1, 1));
    fit.se_beta2 = std::sqrt(cov(2, 2));
    fit.theta = theta;
    fit.sigma_e = std::sqrt(s.sigma2);
    fit.sigma_u = std::sqrt(theta * s.sigma2);
    const double z = sdt::inverse_normal_cdf(0.975);
    fit.ci95_beta1_low = fit.beta1 - z * fit.se_beta1;
    fit.ci95_beta1_high = fit.beta1 + z * fit.se_beta1;
    fit.reml_loglik = -0.5 * s.deviance;
    fit.n_observations = d.n;
    fit.n_students = d.groups.size();
    fit.theta_pinned = options.pinned_theta.has_value();
    return fit;
}

Json to_json(const MixedModelFit& fit) {
    Json j;
    j["method"] = "REML";
    j["beta0"] = fit.beta0;
    j["beta1"] = fit.beta1;
    j["beta2"] = fit.beta2;
    j["se_beta0"] = fit.se_beta0;
    j["se_beta1"] = fit.se_beta1;
    j["se_beta2"] = fit.se_beta2;
    j["ci95_beta1"] = {fit.ci95_beta1_low, fit.ci95_beta1_high};
    j["sigma_u"] = fit.sigma_u;
    j["sigma_e"] = fit.sigma_e;
    j["theta"] = fit.theta;
    j["theta_pinned"] = fit.theta_pinned;
    j["reml_loglik"] = fit.reml_loglik;
    j["n_observations"] = fit.n_observations;
    j["n_students"] = fit.n_students;
    return j;
}

}  // namespace vcp::stats
