#pragma once

// Randomized property battery over the lemma-level inequalities, with seeded
// per-property generators and a deterministic JSON report.

#include "steinmix/matrix_json.hpp"
#include "steinmix/random_states.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace steinmix {

struct PropertyReport {
    std::string id;
    int trials = 0;
    int failures = 0;
    /// Largest signed violation seen (quantity minus its bound); negative means slack.
    double worst_margin = 0.0;
    double tolerance = 0.0;
    std::uint64_t seed = 0;
};

struct Property {
    std::string description;
    /// A trial fails when its violation exceeds this.
    double tolerance;
    int default_trials;
    /// One randomized instance; returns the signed violation.
    std::function<double(Rng&)> trial;
};

using PropertyRegistry = std::map<std::string, Property>;

/// lemma34, lemma45, pinching_ineq, dpi_pinching, np_duality, oracle_equiv,
/// minimax_gap, step_monotone.
const PropertyRegistry& default_registry();

struct VerifyOptions {
    /// Property whose tolerance is corrupted to −1, so any realistic instance fails.
    std::optional<std::string> inject_fault;
};

/// Throws ValidationError for an unknown id or nonpositive trial count.
PropertyReport run_property(const PropertyRegistry& registry, const std::string& id, int trials, std::uint64_t seed,
                            const VerifyOptions& options = {});
PropertyReport run_property(const std::string& id, int trials, std::uint64_t seed, const VerifyOptions& options = {});

/// Every registered property at its default trial count. Throws ValidationError
/// on an empty registry.
std::vector<PropertyReport> run_all(const PropertyRegistry& registry, std::uint64_t seed,
                                    const VerifyOptions& options = {});
std::vector<PropertyReport> run_all(std::uint64_t seed, const VerifyOptions& options = {});

bool all_passed(const std::vector<PropertyReport>& reports);
Json to_json(const PropertyReport& report);
Json report_json(const std::vector<PropertyReport>& reports, std::uint64_t seed);

inline constexpr std::uint64_t kDefaultVerifySeed = 20240531;

}  // namespace steinmix
