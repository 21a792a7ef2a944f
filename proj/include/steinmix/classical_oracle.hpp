#pragma once

// Exact classical hypothesis testing over type classes, in log-domain
// arithmetic. Serves as the independent oracle for commuting fixtures.

#include "steinmix/matrix_json.hpp"
#include "steinmix/operator_core.hpp"

#include <cstddef>
#include <vector>

namespace steinmix {

/// Largest number of type classes an enumeration may produce.
inline constexpr std::size_t kMaxTypeClasses = 5'000'000;

/// One IID component of a classical source: weight and per-symbol law, both as logs.
struct ClassicalComponent {
    double log_w = 0.0;
    std::vector<double> log_p;
};

/// Mixture of IID sources over a shared finite alphabet at blocklength n.
struct ClassicalSource {
    int alphabet = 0;
    std::vector<ClassicalComponent> components;
    int n = 1;

    /// Single IID source from linear probabilities.
    static ClassicalSource iid(const std::vector<double>& probs, int n);
    /// Mixture from linear weights and per-component probabilities.
    static ClassicalSource mixture(const std::vector<double>& weights, const std::vector<std::vector<double>>& probs,
                                   int n);
    ClassicalSource at_blocklength(int new_n) const;

    /// Checks shapes, weights and per-symbol normalization; throws ValidationError.
    void validate() const;
};

Json to_json(const ClassicalSource& s);
ClassicalSource classical_source_from_json(const Json& j);

/// Per-class data for a source, in the canonical enumeration order of count vectors.
struct TypeClassTable {
    std::size_t class_count = 0;
    std::vector<double> log_multiplicity;
    /// component_log_prob[i][c]: log probability of class c under component i, normalized.
    std::vector<std::vector<double>> component_log_prob;
    /// log Σ_i w_i P_i(class).
    std::vector<double> mixture_log_prob;
    /// Largest |log-sum-exp| over components before renormalization.
    double normalization_error = 0.0;
};

/// C(n + k − 1, k − 1), saturating at cap + 1.
std::size_t type_class_count(int n, int alphabet, std::size_t cap = kMaxTypeClasses);

/// Enumerates type classes. Throws OverflowError above kMaxTypeClasses and
/// NumericError if normalization drifts beyond 1e-9.
TypeClassTable build_type_classes(const ClassicalSource& s);

struct ClassicalNPResult {
    /// Natural log of the optimal β; −∞ when β = 0.
    double beta_log = 0.0;
    /// Log-likelihood ratio of the boundary class.
    double threshold = 0.0;
    /// Acceptance probability of the boundary class.
    double gamma = 0.0;
};

/// Exact Neyman–Pearson optimum between the mixture laws of P and Q.
ClassicalNPResult classical_optimal_beta(const ClassicalSource& p, const ClassicalSource& q, double epsilon);

struct SpectrumRow {
    double rate;
    double cdf;
};

/// F_n(R) = Pr_P[(1/n) log(P/Q) ≤ R] at every attained rate, ascending.
struct SpectrumTable {
    std::vector<SpectrumRow> rows;
    int n = 1;
};

SpectrumTable spectrum(const ClassicalSource& p_mixture, const ClassicalSource& q);

/// sup{a : Pr[(1/n) log(P/Q) < a] ≤ ε}: the smallest attained rate whose CDF exceeds ε.
double spectrum_inf_rate(const SpectrumTable& table, double epsilon);

/// F_n evaluated at R (right-continuous step function).
double spectrum_cdf(const SpectrumTable& table, double rate);

struct ExponentialMixtureRow {
    int n;
    double log_component_count;  // nR
    double component_exponent;   // per-component log-ratio rate
    double mixture_exponent;     // mixture log-ratio rate
    double gap;
    double remainder_mass;  // 1 − e^{−n(d−R)}
    double component_proxy;
    double mixture_proxy;
};

/// Point-mass components against a reference with mass e^{−nd} per point,
/// mixed uniformly over e^{nR} points. Evaluated on one representative point.
std::vector<ExponentialMixtureRow> exponential_mixture_counterexample(double d, double r, const std::vector<int>& n_list);

struct QuantizedPair {
    ClassicalSource p;
    ClassicalSource q;
};

/// Joint eigenbasis distributions of a commuting pair at n = 1. Throws ValidationError
/// when ‖[ρ,σ]‖_max > 1e-9.
QuantizedPair quantize_commuting(const DensityMatrix& rho, const DensityMatrix& sigma);

/// Σ p log(p/q) over symbols, +∞ on support violation.
double classical_relative_entropy(const std::vector<double>& p, const std::vector<double>& q);

/// log Σ exp(x_i), robust to −∞ entries.
double log_sum_exp(const std::vector<double>& x);

}  // namespace steinmix
