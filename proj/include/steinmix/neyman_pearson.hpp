#pragma once

// Optimal type-II error for a single alternative, relative entropy, and the
// Lagrangian dual certificate of the Neyman–Pearson problem.

#include "steinmix/operator_core.hpp"

namespace steinmix {

/// Strong duality tolerance on beta − dual_value.
inline constexpr double kDualityGapTol = 1e-7;

struct NPOptions {
    /// Skip the dual maximization (used inside dense grid searches).
    bool compute_dual = true;
    /// Skip materializing the optimal test operator.
    bool build_test = true;
    int max_iterations = 200;
};

struct NPResult {
    double beta = 0.0;
    /// +∞ when the optimum is a pure kernel test of σ.
    double threshold_t = 0.0;
    double gamma = 0.0;
    TestOperator test = TestOperator::zero(1);
    double alpha_achieved = 0.0;
    double dual_value = 0.0;
    double dual_mu = 0.0;
    int iterations = 0;
    /// ε − α when the bisection budget ran out; 0 otherwise.
    double residual = 0.0;
};

/// D(ρ‖σ) in nats; +∞ when supp ρ ⊄ supp σ.
double relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma);

struct TypeErrors {
    double alpha;
    double beta;
};

/// α = Tr[(I−T)ρ], β = Tr[Tσ], both clipped to [0, 1].
TypeErrors type_errors(const TestOperator& t, const DensityMatrix& rho, const DensityMatrix& sigma);

/// min Tr[Tσ] over 0 ≤ T ≤ I with Tr[(I−T)ρ] ≤ ε, attained by T = P_>(t) + γ Π_0(t)
/// where P_>(t), Π_0(t) are the positive and kernel projections of ρ − tσ.
NPResult optimal_beta(const DensityMatrix& rho, const DensityMatrix& sigma, double epsilon,
                      const NPOptions& options = {});

/// h(μ) = μ(1−ε) − Tr[(μρ − σ)_+]; every μ ≥ 0 gives a lower bound on β_ε.
double np_dual_objective(const DensityMatrix& rho, const DensityMatrix& sigma, double epsilon, double mu);

struct PinchedBeta {
    double beta_orig;
    double beta_pinched;
};

/// β_ε(ρ‖σ) next to β_ε(E_σ(ρ)‖σ).
PinchedBeta beta_under_cptp_pinching(const DensityMatrix& rho, const DensityMatrix& sigma, double epsilon);

/// (√(c·q) + √(1−q))² with q = Tr[Πρ] and c = λ_max(ΠTΠ) on the range of Π:
/// an upper bound on Tr[Tρ].
double projected_test_bound(const TestOperator& t, const TestOperator& projection, const DensityMatrix& rho);

/// (√Tr[Π₂ρ] + √Tr[Π₁(I−Π₂)ρ(I−Π₂)])²: an upper bound on Tr[Π₁ρ].
double two_projection_bound(const TestOperator& p1, const TestOperator& p2, const DensityMatrix& rho);

}  // namespace steinmix
