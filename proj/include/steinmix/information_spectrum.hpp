#pragma once

// Finite-n spectral inf-divergence machinery: the rate-indexed spectral test
// {ρ_n − e^{na}σ_n ≥ 0}, rate sweeps, ε-constrained rate estimates, the
// combined direct-part test for mixed sources and the pinching comparison.

#include "steinmix/mixed_source.hpp"
#include "steinmix/operator_core.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace steinmix {

struct SpectralTestResult {
    /// Only materialized when requested.
    std::optional<TestOperator> test;
    double alpha = 0.0;
    double beta = 0.0;
    /// log β, computed in the log domain on the diagonal path.
    double log_beta = 0.0;
    /// β ≤ e^{−na}(1 + 1e-9).
    bool beta_bound_holds = true;
};

/// T = {ρ_n − e^{na}σ_n ≥ 0}, α = Tr[(I−T)ρ_n], β = Tr[Tσ_n].
/// Diagonal inputs compare log ρ_ii − log σ_ii ≥ na exactly; other inputs use the
/// rescaled difference e^{−na}ρ_n − σ_n (na ≥ 0) or ρ_n − e^{na}σ_n (na < 0).
SpectralTestResult spectral_test(const DensityMatrix& rho_n, const DensityMatrix& sigma_n, double a, int n,
                                 bool build_test = true);

struct RateSweep {
    std::vector<double> rates;
    std::vector<double> type1;
    /// (1/n) log β at each rate.
    std::vector<double> type2_log;
    int n = 1;
};

RateSweep rate_sweep(const DensityMatrix& rho_n, const DensityMatrix& sigma_n, int n, const std::vector<double>& rates);

/// 101 points on [0, 2D], or [0, 1] when D is 0 or infinite.
std::vector<double> default_rate_grid(double divergence, int points = 101);

struct UnderlineDPoint {
    double estimate;
    /// False when no grid rate meets α ≤ ε; the estimate is then the grid minimum.
    bool feasible;
};

/// Largest a on the grid with α(a) ≤ ε, refined by bisection to 1e-4 between
/// the bracketing grid points.
UnderlineDPoint underline_d_estimate(const DensityMatrix& rho_n, const DensityMatrix& sigma_n, double epsilon, int n,
                                     const std::vector<double>& rate_grid);

using StateProvider = std::function<DensityMatrix(int)>;

struct UnderlineDEstimate {
    double epsilon;
    std::vector<int> n_values;
    std::vector<double> estimates;
    std::vector<bool> feasible;
};

UnderlineDEstimate underline_d_series(const StateProvider& rho, const StateProvider& sigma, double epsilon,
                                      const std::vector<int>& n_values, const std::vector<double>& rate_grid);

struct DirectPartOptions {
    bool build_test = false;
    Index max_dim = kDefaultMaxDim;
};

struct DirectPartResult {
    std::optional<TestOperator> test;
    /// Tr[(I−T_n) ρ̄_i^{⊗n}].
    std::vector<double> per_component_alpha;
    double beta = 0.0;
    double log_beta = 0.0;
    /// −(1/n) log β ≥ a + δ − (1/n) log|J| − 1e-12.
    bool beta_bound_holds = true;
    /// Tr[T_{i,n} ρ̄_i^{⊗n}] for the per-component spectral tests.
    std::vector<double> component_accept;
    /// (√(e^{−nδ} q_i) + √(1 − q_i))² with q_i = Tr[Q_n ρ̄_i^{⊗n}], Q_n = I − T_n.
    std::vector<double> projected_bound;
    /// component_accept[i] ≤ projected_bound[i] + 1e-9 for every i.
    bool projected_bound_holds = true;
};

/// T_{i,n} = {ρ̄_i^{⊗n} − e^{n(a+2δ)}σ_n ≥ 0}, A_n = Σ_i T_{i,n}, T_n = {A_n ≥ e^{−nδ}I}.
DirectPartResult direct_part_test(const MixedSourceSpec& spec, const DensityMatrix& sigma_n, double a, double delta,
                                  int n, const DirectPartOptions& options = {});
/// Same with σ_n = σ̄^{⊗n}; diagonal inputs never materialize dense n-copy matrices.
DirectPartResult direct_part_test_iid(const MixedSourceSpec& spec, const DensityMatrix& sigma, double a, double delta,
                                      int n, const DirectPartOptions& options = {});

struct ConverseFootprint {
    /// α_i of {ρ̄_i^{⊗n} − e^{n(a−δ)}σ_n ≥ 0}.
    std::vector<double> deficient_alpha;
    /// α_i(T_n) + e^{−nδ} with T_n the spectral test of the mixture at rate a.
    std::vector<double> allowance;
    bool holds = true;
};

ConverseFootprint converse_footprint(const MixedSourceSpec& spec, const DensityMatrix& sigma_n, double a, double delta,
                                     int n);

struct PinchingComparison {
    double d_orig;
    double d_pinched;
    int d_n;
    /// (2/n) log(1/η) at η = 1e-3; recorded only.
    double slack;
    /// d_pinched ≥ d_orig − (1/n) log d_n − slack; recorded only.
    bool bound_holds;
};

PinchingComparison pinching_reduction_compare(const DensityMatrix& rho_n, const DensityMatrix& sigma_n, double epsilon,
                                              int n, const std::vector<double>& rate_grid);

}  // namespace steinmix
