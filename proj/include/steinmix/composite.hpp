#pragma once

// Composite alternatives given as convex hulls of finitely many states:
// minimax optimal type-II error, tensor-word hulls and minimized relative entropy.

#include "steinmix/matrix_json.hpp"
#include "steinmix/operator_core.hpp"

#include <string>
#include <vector>

namespace steinmix {

inline constexpr double kMinimaxGapTol = 1e-6;
inline constexpr Index kMaxWordCount = 4096;

/// S = conv(generators). hull_level is the blocklength the generators were built for.
struct AlternativeSet {
    std::vector<DensityMatrix> generators;
    std::string label;
    int hull_level = 1;

    /// Throws ValidationError / DimensionError on an empty or ragged set.
    void validate() const;
    Index dim() const { return generators.front().dim(); }
    /// True when the barycenter of the generators is full rank.
    bool contains_full_rank() const;
    /// Σ_j λ_j σ_j.
    DensityMatrix mixture(const std::vector<double>& weights) const;
};

Json to_json(const AlternativeSet& s);
AlternativeSet alternative_set_from_json(const Json& j);

/// Value and optimal strategies of a finite zero-sum game where the row player
/// maximizes x^T A y over mixed strategies of both players.
struct MatrixGameSolution {
    double value;
    std::vector<double> row_strategy;
    std::vector<double> column_strategy;
};

/// payoff[r][c]; solved exactly by the simplex method (Bland's rule).
MatrixGameSolution solve_matrix_game(const std::vector<std::vector<double>>& payoff);

struct MinimaxOptions {
    double gap_tol = 1e-7;
    int max_iterations = 5000;
};

struct MinimaxResult {
    /// β_ε(ρ‖σ_λ) at the worst mixture found: a certified lower bound.
    double beta = 0.0;
    std::vector<double> worst_mixture;
    /// Mixture of the collected optimal tests; feasible at level ε.
    TestOperator test = TestOperator::zero(1);
    /// max_j Tr[T σ_j] at the returned test: a certified upper bound.
    double primal_upper = 0.0;
    double gap = 0.0;
    bool converged = false;
    int iterations = 0;
    int hull_level = 1;
};

/// β_ε(ρ‖S) = max_λ β_ε(ρ‖Σ_j λ_j σ_j) = min_T max_j Tr[T σ_j].
/// Column generation: the master problem is the matrix game between simplex
/// weights and the optimal tests collected so far.
MinimaxResult composite_beta(const DensityMatrix& rho, const AlternativeSet& s, double epsilon,
                             const MinimaxOptions& options = {});

/// All n-fold tensor words over the generators.
AlternativeSet build_tensor_generators(const AlternativeSet& base, int n, Index max_dim = kDefaultMaxDim);

struct HullDivergence {
    /// Nats; +∞ when every mixture misses part of the support of ρ.
    double value;
    std::vector<double> weights;
};

/// min_λ D(ρ‖Σ_j λ_j σ_j) by cyclic line searches toward each vertex.
HullDivergence min_relative_entropy_over_hull(const DensityMatrix& rho, const AlternativeSet& s);

struct RegularizedPoint {
    int n;
    double value_per_n;
    std::vector<double> weights;
};

/// (1/n) min over the level-n word hull of D(ρ^{⊗n}‖·), for n = 1..n_max.
std::vector<RegularizedPoint> regularized_divergence_estimate(const DensityMatrix& rho, const AlternativeSet& base,
                                                              int n_max, Index max_dim = kDefaultMaxDim);

}  // namespace steinmix
