#pragma once

// Mixed sources ρ_n = Σ_i p_i ρ̄_i^{⊗n}: construction, the worst-component
// exponent, and the ε-dependent step exponent with its jump demonstration.

#include "steinmix/composite.hpp"
#include "steinmix/matrix_json.hpp"
#include "steinmix/operator_core.hpp"

#include <optional>
#include <string>
#include <vector>

namespace steinmix {

struct MixedComponent {
    double p;
    DensityMatrix state;
};

struct MixedSourceSpec {
    std::vector<MixedComponent> components;

    /// Weights positive and summing to 1 within 1e-12; states share one dim.
    void validate() const;
    Index dim() const { return components.front().state.dim(); }
    bool all_diagonal() const;
    /// Set when |J| ≥ e^{n/10}, i.e. the component count is not small next to n.
    std::optional<std::string> size_warning(int n) const;
};

Json to_json(const MixedSourceSpec& spec);
MixedSourceSpec mixed_source_from_json(const Json& j);

/// Σ_i p_i ρ̄_i^{⊗n}.
DensityMatrix mixed_state(const MixedSourceSpec& spec, int n, Index max_dim = kDefaultMaxDim);

struct ComponentSeries {
    std::vector<RegularizedPoint> points;
    /// Support-deficient against every element of S.
    bool infinite = false;
};

struct WorstComponentResult {
    double value;
    int argmin_index;
    std::vector<ComponentSeries> series;
};

/// min_i of the level-n_max regularized divergence estimate of each component.
WorstComponentResult worst_component_exponent(const MixedSourceSpec& spec, const AlternativeSet& s, int n_max,
                                              Index max_dim = kDefaultMaxDim);

/// Step function R ↦ Σ_{d_i ≤ R} p_i, stored as merged (d, cumulative weight) pairs.
struct StepFunctionExponent {
    struct Threshold {
        double d;
        double cumulative_weight;
    };
    std::vector<Threshold> thresholds;

    /// sup{R : Σ_{d_i ≤ R} p_i ≤ ε}; ε ∈ [0, 1).
    double evaluate(double epsilon) const;
};

/// Builds the step function from d_i = D(ρ̄_i‖σ). Equal d_i are merged.
StepFunctionExponent step_function(const MixedSourceSpec& spec, const DensityMatrix& sigma);
/// Step function from explicit (d_i, p_i) pairs.
StepFunctionExponent step_function(const std::vector<double>& d, const std::vector<double>& p);

double step_exponent(const MixedSourceSpec& spec, const DensityMatrix& sigma, double epsilon);

struct JumpRow {
    double epsilon;
    int n;
    double measured_exponent;
    double predicted_exponent;
};

struct JumpDemoOptions {
    Index max_dim = kDefaultMaxDim;
    /// Use the type-class oracle whenever every state is diagonal.
    bool prefer_classical = true;
};

/// Finite-n −(1/n) log β_ε for the two-component mixture next to the step-exponent
/// prediction, over an ε grid. Requires D(ρ̄₁‖σ) < D(ρ̄₂‖σ).
std::vector<JumpRow> jump_demo(const MixedSourceSpec& spec, const DensityMatrix& sigma,
                               const std::vector<double>& epsilon_grid, int n, const JumpDemoOptions& options = {});

/// −(1/n) log β_ε(ρ_n‖σ^{⊗n}) for a mixed source; classical route for diagonal inputs.
double mixed_exponent(const MixedSourceSpec& spec, const DensityMatrix& sigma, double epsilon, int n,
                      const JumpDemoOptions& options = {});

}  // namespace steinmix
