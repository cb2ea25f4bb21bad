#pragma once

// Command-line front end. `run` parses arguments, resolves configuration
// (flags > config file > defaults), dispatches to a subcommand and maps
// errors to exit codes: 0 success, 1 validation error, 2 computation error.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "vcp/json_io.hpp"

namespace vcp::cli {

struct RunConfig {
    // sdt
    double k = 1.5;
    double delta = 1.0;
    std::string correction = "half-count";
    // retention
    double idle_gap = 120.0;
    std::string velocity_unit = "halstead-bits";
    bool allow_uncalibrated = false;
    std::optional<std::string> calibration;
    // explainability
    double epsilon = 1e-9;
    // composite
    double w1 = 1.0 / 3.0;
    double w2 = 1.0 / 3.0;
    double w3 = 1.0 / 3.0;
    double gamma = 0.0;
    double m_csr_threshold = 0.8;
    double e_gap_threshold = 0.3;
    double m_ht_cutoff = 0.5;
    // randomness
    std::uint64_t seed = 1;

    /// Range checks on every constant. Throws ValidationError.
    void validate() const;
};

/// Overlays keys from a config document; unknown keys are a ValidationError.
void apply_config(RunConfig& config, const Json& doc, const std::string& where);

Json to_json(const RunConfig& config);

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace vcp::cli
