#pragma once

// Rank correlation, rater agreement, power analysis, cohort simulation and
// the random-intercept mixed model.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "vcp/json_io.hpp"

namespace vcp::stats {

// ---------------------------------------------------------------- Spearman

/// 1-based ranks; tied values share the average of their positions.
std::vector<double> average_ranks(const std::vector<double>& values);

struct SpearmanResult {
    std::size_t n = 0;
    double rho = 0.0;
    double t_statistic = 0.0;
    double p_t = 0.0;  ///< two-sided, Student t on n - 2 df
    std::optional<double> p_permutation;
    std::size_t permutations = 0;
    std::uint64_t seed = 0;
};

/// Throws ValidationError for mismatched lengths or n < 4, ComputationError
/// when either input is constant.
SpearmanResult spearman(const std::vector<double>& x, const std::vector<double>& y);

/// As above plus a seeded permutation p-value, (count + 1) / (permutations + 1).
SpearmanResult spearman(const std::vector<double>& x, const std::vector<double>& y, std::size_t permutations,
                        std::uint64_t seed);

Json to_json(const SpearmanResult& r);

// ---------------------------------------------------------------- kappa

struct KappaResult {
    double kappa = 0.0;
    double p_observed = 0.0;
    double p_expected = 0.0;
    std::size_t n = 0;
    std::vector<std::string> categories;
};

/// Throws ValidationError for mismatched or empty inputs and ComputationError
/// when chance agreement is 1.
KappaResult cohens_kappa(const std::vector<std::string>& a, const std::vector<std::string>& b);

Json to_json(const KappaResult& r);

// ---------------------------------------------------------------- power

enum class Design { TwoSample, Paired };
enum class PowerEstimator { Conditional, Crude };

const char* to_string(Design d);
const char* to_string(PowerEstimator e);
std::optional<Design> design_from_string(const std::string& text);
std::optional<PowerEstimator> power_estimator_from_string(const std::string& text);

struct PowerSpec {
    double effect_size_d = 0.5;
    double alpha = 0.05;
    double target_power = 0.8;
    Design design = Design::TwoSample;
    std::size_t replicates = 20000;
    std::uint64_t seed = 1;
    PowerEstimator estimator = PowerEstimator::Conditional;

    void validate() const;
};

inline constexpr std::size_t kMaxSampleSize = 1000000;

/// Monte-Carlo power of the two-sided t test at per-group (or pair) size n.
/// Each n draws from its own stream derived from spec.seed.
///
/// Conditional: the sample variance is simulated from its chi-square law and
/// the rejection probability given that variance is integrated exactly over
/// the normal mean. Crude: whole samples are simulated and rejections counted.
double monte_carlo_power(const PowerSpec& spec, std::size_t n);

/// Critical |t| for the design at size n.
double critical_t(const PowerSpec& spec, std::size_t n);

/// Normal-approximation size, unrounded.
double normal_approx_n(const PowerSpec& spec);

struct PowerPoint {
    std::size_t n = 0;
    double power = 0.0;
};

struct PowerResult {
    std::size_t n = 0;
    double power_at_n = 0.0;
    double normal_approx_n = 0.0;
    std::size_t normal_approx_n_ceil = 0;
    std::vector<PowerPoint> evaluated;  ///< every candidate tried, in search order
};

/// Smallest n reaching target power: doubling bracket then bisection.
/// Throws ComputationError when even kMaxSampleSize falls short.
PowerResult required_n(const PowerSpec& spec);

Json to_json(const PowerSpec& spec);
Json to_json(const PowerResult& r);

struct AttritionResult {
    std::size_t n_required = 0;
    double attrition_rate = 0.0;
    std::size_t raw_target = 0;          ///< ceil(n / (1 - rate))
    std::size_t target = 0;              ///< raw, or rounded up to a multiple of 10
    bool cohort_rounding = false;
    std::optional<std::size_t> stated_target;
    bool stated_exceeds_formula = false;  ///< stated target larger than the formula target
};

/// Throws ValidationError unless 0 <= rate < 1.
AttritionResult attrition_target(std::size_t n_required, double attrition_rate, bool cohort_rounding = false,
                                 std::optional<std::size_t> stated_target = std::nullopt);

Json to_json(const AttritionResult& r);

// ---------------------------------------------------------------- cohort

struct CohortParams {
    double beta0 = 0.0;
    double beta1 = 0.4;
    double beta2 = 0.0;
    double sigma_u = 0.5;
    double sigma_e = 0.5;
};

struct Observation {
    std::string student;
    int occasion = 0;
    int condition = 0;  ///< 1 = vibe, 0 = trad
    double time = 0.0;
    double y = 0.0;
};

struct CohortDataset {
    std::vector<Observation> observations;
    std::optional<CohortParams> truth;

    /// Unique (student, occasion); condition constant within student.
    void validate() const;
};

/// Students "s0001".. with the first n_per_condition in trad and the rest in
/// vibe; each student draws u then its occasions from its own stream.
CohortDataset simulate_cohort(const CohortParams& params, std::size_t n_per_condition, std::size_t occasions,
                              std::uint64_t seed);

Json to_json(const Observation& o);
Json to_json(const CohortParams& p);
std::string to_json_lines(const CohortDataset& data);
CohortDataset read_cohort(const std::filesystem::path& path);

// ---------------------------------------------------------------- mixed model

struct MixedFitOptions {
    std::optional<double> pinned_theta;  ///< fix sigma_u^2 / sigma_e^2 instead of estimating it
    double tolerance = 1e-8;
};

struct MixedModelFit {
    double beta0 = 0.0, beta1 = 0.0, beta2 = 0.0;
    double se_beta0 = 0.0, se_beta1 = 0.0, se_beta2 = 0.0;
    double sigma_u = 0.0, sigma_e = 0.0;
    double theta = 0.0;
    double ci95_beta1_low = 0.0, ci95_beta1_high = 0.0;
    double reml_loglik = 0.0;
    std::size_t n_observations = 0;
    std::size_t n_students = 0;
    bool theta_pinned = false;
};

/// Random-intercept model y = b0 + b1 condition + b2 time + u_student + e, by REML.
/// Throws ValidationError with fewer than 2 students per condition or 2
/// occasions, ComputationError for a singular fixed-effect design.
MixedModelFit fit_mixed(const CohortDataset& data, const MixedFitOptions& options = {});

/// -2 * REML log-likelihood at theta with sigma_e^2 profiled out.
double reml_deviance(const CohortDataset& data, double theta);

Json to_json(const MixedModelFit& fit);

}  // namespace vcp::stats
