#pragma once

// Independent reference computations used only by tests.

#include <cmath>
#include <functional>
#include <vector>

#include "vcp/codemetrics/cfg.hpp"

namespace vcp::testing {

/// Counts every joint resolution of the CFG's decision sites by explicit
/// enumeration (one out-edge chosen per branch node).
inline std::size_t enumerate_site_resolutions(const codemetrics::ControlFlowGraph& cfg) {
    std::vector<std::vector<int>> choices;
    for (const auto& n : cfg.nodes) {
        std::vector<int> outs;
        for (const auto& e : cfg.edges)
            if (e.from == n.id) outs.push_back(e.to);
        if (outs.size() >= 2) choices.push_back(outs);
    }
    std::size_t count = 0;
    std::vector<int> picked;
    std::function<void(std::size_t)> walk = [&](std::size_t site) {
        if (site == choices.size()) {
            ++count;
            return;
        }
        for (int target : choices[site]) {
            picked.push_back(target);
            walk(site + 1);
            picked.pop_back();
        }
    };
    walk(0);
    return count;
}

/// Standard normal CDF via erfc.
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

/// Normal quantile by bisection on normal_cdf.
inline double bisect_normal_quantile(double p) {
    double lo = -40.0, hi = 40.0;
    for (int i = 0; i < 400 && hi - lo > 1e-15; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (normal_cdf(mid) < p) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace vcp::testing
