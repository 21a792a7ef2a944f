#include "steinmix/verification.hpp"

#include "steinmix/classical_oracle.hpp"
#include "steinmix/composite.hpp"
#include "steinmix/errors.hpp"
#include "steinmix/mixed_source.hpp"
#include "steinmix/neyman_pearson.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace steinmix {

namespace {

std::vector<double> diagonal_of(const DensityMatrix& rho) {
    std::vector<double> out(static_cast<std::size_t>(rho.dim()));
    for (Index i = 0; i < rho.dim(); ++i) out[static_cast<std::size_t>(i)] = rho.matrix()(i, i).real();
    return out;
}

// σ with a degenerate spectrum a third of the time (tensor square of a qubit).
std::pair<DensityMatrix, DensityMatrix> random_pinching_pair(Rng& rng) {
    if (uniform01(rng) < 1.0 / 3.0) {
        const auto s = random_density(2, rng);
        return {random_density(4, rng), tensor_power(s, 2)};
    }
    const Index d = random_small_dim(rng);
    return {random_density(d, rng), random_density(d, rng)};
}

double lemma34_trial(Rng& rng) {
    const Index d = random_small_dim(rng);
    const auto t = random_test_operator(d, rng);
    const Index rank = 1 + static_cast<Index>(uniform01(rng) * static_cast<double>(d));
    const auto p = random_projection(d, std::min(rank, d), rng);
    const auto rho = random_density(d, rng);
    return trace_product(t.matrix(), rho.matrix()) - projected_test_bound(t, p, rho);
}

double lemma45_trial(Rng& rng) {
    const Index d = random_small_dim(rng);
    auto rank = [&] { return std::min<Index>(d, 1 + static_cast<Index>(uniform01(rng) * static_cast<double>(d))); };
    const auto p1 = random_projection(d, rank(), rng);
    const auto p2 = random_projection(d, rank(), rng);
    const auto rho = random_density(d, rng);
    return trace_product(p1.matrix(), rho.matrix()) - two_projection_bound(p1, p2, rho);
}

// ρ ≤ d_n E_σ(ρ): the violation is −λ_min(d_n E_σ(ρ) − ρ).
double pinching_ineq_trial(Rng& rng) {
    const auto [rho, sigma] = random_pinching_pair(rng);
    const auto pinched = pinch(rho, sigma);
    const HermitianOperator gap = pinched.state.op() * static_cast<double>(pinched.distinct_count) - rho.op();
    return -eigenvalues(gap).minCoeff();
}

double dpi_pinching_trial(Rng& rng) {
    const auto [rho, sigma] = random_pinching_pair(rng);
    const auto r = beta_under_cptp_pinching(rho, sigma, uniform01(rng));
    return r.beta_orig - r.beta_pinched;
}

double np_duality_trial(Rng& rng) {
    const Index d = random_small_dim(rng);
    const auto rho = random_density(d, rng);
    const auto sigma = random_density(d, rng);
    NPOptions np;
    np.build_test = false;
    const auto r = optimal_beta(rho, sigma, uniform01(rng), np);
    return std::abs(r.beta - r.dual_value);
}

double oracle_equiv_trial(Rng& rng) {
    const Index d = uniform01(rng) < 0.7 ? 2 : 3;
    const int n = 1 + static_cast<int>(uniform01(rng) * 3);
    const auto rho = random_diagonal_density(d, rng);
    const auto sigma = random_diagonal_density(d, rng);
    const double eps = uniform01(rng);
    NPOptions np;
    np.compute_dual = false;
    np.build_test = false;
    const double quantum = optimal_beta(tensor_power(rho, n), tensor_power(sigma, n), eps, np).beta;
    const auto c = classical_optimal_beta(ClassicalSource::iid(diagonal_of(rho), n),
                                          ClassicalSource::iid(diagonal_of(sigma), n), eps);
    return std::abs(quantum - std::exp(c.beta_log));
}

double minimax_gap_trial(Rng& rng) {
    const auto rho = random_density(2, rng);
    const AlternativeSet s{{random_density(2, rng), random_density(2, rng)}, "random", 1};
    return composite_beta(rho, s, uniform01(rng)).gap;
}

// Nondecreasing in ε and equal to min d_i at ε = 0.
double step_monotone_trial(Rng& rng) {
    const int k = 1 + static_cast<int>(uniform01(rng) * 6);
    std::vector<double> d;
    std::vector<double> p;
    double total = 0.0;
    for (int i = 0; i < k; ++i) {
        d.push_back(uniform01(rng) < 0.3 ? std::floor(uniform01(rng) * 3) / 3 : uniform01(rng));
        p.push_back(0.01 + uniform01(rng));
        total += p.back();
    }
    for (auto& w : p) w /= total;
    const auto f = step_function(d, p);
    double violation = std::abs(f.evaluate(0.0) - *std::min_element(d.begin(), d.end()));
    double prev = f.evaluate(0.0);
    for (int e = 1; e < 100; ++e) {
        const double v = f.evaluate(e / 100.0);
        violation = std::max(violation, prev - v);
        prev = v;
    }
    return violation;
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

Rng property_rng(std::uint64_t seed, const std::string& id) {
    const std::uint64_t h = fnv1a(id);
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32)};
    return Rng(seq);
}

}  // namespace

const PropertyRegistry& default_registry() {
    static const PropertyRegistry registry{
        {"lemma34", {"Tr[Tρ] ≤ (√(c Tr[Πρ]) + √(1 − Tr[Πρ]))² with ΠTΠ ≤ cΠ", 1e-9, 500, lemma34_trial}},
        {"lemma45", {"Tr[Π₁ρ] ≤ (√Tr[Π₂ρ] + √Tr[Π₁(I−Π₂)ρ(I−Π₂)])²", 1e-9, 500, lemma45_trial}},
        {"pinching_ineq", {"ρ ≤ d_n E_σ(ρ)", 1e-10, 500, pinching_ineq_trial}},
        {"dpi_pinching", {"β_ε(ρ‖σ) ≤ β_ε(E_σ(ρ)‖σ)", 1e-9, 300, dpi_pinching_trial}},
        {"np_duality", {"|β_ε − dual value| ≤ 1e-7", kDualityGapTol, 300, np_duality_trial}},
        {"oracle_equiv", {"quantum β_ε equals the type-class β_ε on commuting pairs", 1e-9, 200, oracle_equiv_trial}},
        {"minimax_gap", {"composite β_ε primal-dual gap ≤ 1e-6 on qubit hulls", kMinimaxGapTol, 60, minimax_gap_trial}},
        {"step_monotone", {"step exponent nondecreasing in ε, min d_i at ε = 0", 1e-12, 1000, step_monotone_trial}},
    };
    return registry;
}

PropertyReport run_property(const PropertyRegistry& registry, const std::string& id, int trials, std::uint64_t seed,
                            const VerifyOptions& options) {
    const auto it = registry.find(id);
    if (it == registry.end()) throw ValidationError("verify: unknown property '" + id + "'");
    if (trials < 1) throw ValidationError("verify: trial count must be positive");
    const Property& prop = it->second;
    PropertyReport report;
    report.id = id;
    report.trials = trials;
    report.seed = seed;
    report.tolerance = (options.inject_fault && *options.inject_fault == id) ? -1.0 : prop.tolerance;
    report.worst_margin = -std::numeric_limits<double>::infinity();
    Rng rng = property_rng(seed, id);
    for (int k = 0; k < trials; ++k) {
        const double v = prop.trial(rng);
        report.worst_margin = std::max(report.worst_margin, v);
        if (!(v <= report.tolerance)) ++report.failures;
    }
    return report;
}

PropertyReport run_property(const std::string& id, int trials, std::uint64_t seed, const VerifyOptions& options) {
    return run_property(default_registry(), id, trials, seed, options);
}

std::vector<PropertyReport> run_all(const PropertyRegistry& registry, std::uint64_t seed, const VerifyOptions& options) {
    if (registry.empty()) throw ValidationError("verify: property registry is empty");
    if (options.inject_fault && !registry.contains(*options.inject_fault))
        throw ValidationError("verify: fault target '" + *options.inject_fault + "' is not registered");
    std::vector<PropertyReport> out;
    for (const auto& [id, prop] : registry) out.push_back(run_property(registry, id, prop.default_trials, seed, options));
    return out;
}

std::vector<PropertyReport> run_all(std::uint64_t seed, const VerifyOptions& options) {
    return run_all(default_registry(), seed, options);
}

bool all_passed(const std::vector<PropertyReport>& reports) {
    return std::all_of(reports.begin(), reports.end(), [](const PropertyReport& r) { return r.failures == 0; });
}

Json to_json(const PropertyReport& r) {
    return Json{{"id", r.id},
                {"trials", r.trials},
                {"failures", r.failures},
                {"worst_margin", r.worst_margin},
                {"tolerance", r.tolerance},
                {"seed", r.seed}};
}

Json report_json(const std::vector<PropertyReport>& reports, std::uint64_t seed) {
    Json props = Json::array();
    int trials = 0;
    for (const auto& r : reports) {
        props.push_back(to_json(r));
        trials += r.trials;
    }
    return Json{{"seed", seed}, {"total_trials", trials}, {"passed", all_passed(reports)}, {"properties", props}};
}

}  // namespace steinmix
