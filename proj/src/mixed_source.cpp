#include "steinmix/mixed_source.hpp"

#include "steinmix/classical_oracle.hpp"
#include "steinmix/errors.hpp"
#include "steinmix/neyman_pearson.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace steinmix {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> diagonal_of(const DensityMatrix& rho) {
    std::vector<double> out(static_cast<std::size_t>(rho.dim()));
    for (Index i = 0; i < rho.dim(); ++i) out[static_cast<std::size_t>(i)] = rho.matrix()(i, i).real();
    return out;
}

RealVector diagonal_power(const RealVector& base, int n) {
    RealVector acc = base;
    for (int k = 1; k < n; ++k) {
        RealVector next(acc.size() * base.size());
        for (Index i = 0; i < acc.size(); ++i) next.segment(i * base.size(), base.size()) = acc[i] * base;
        acc = std::move(next);
    }
    return acc;
}

}  // namespace

void MixedSourceSpec::validate() const {
    if (components.empty()) throw ValidationError("mixed source: no components");
    const Index d = components.front().state.dim();
    double total = 0.0;
    for (const auto& c : components) {
        if (!(c.p > 0.0) || !std::isfinite(c.p)) throw ValidationError("mixed source: every weight must be positive");
        if (c.state.dim() != d) throw DimensionError("mixed source: component states differ in dimension");
        total += c.p;
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw ValidationError("mixed source: weights sum to " + std::to_string(total) + ", not 1");
}

bool MixedSourceSpec::all_diagonal() const {
    return std::all_of(components.begin(), components.end(), [](const MixedComponent& c) { return c.state.op().is_diagonal(); });
}

std::optional<std::string> MixedSourceSpec::size_warning(int n) const {
    const double count = static_cast<double>(components.size());
    if (count >= std::exp(n / 10.0))
        return "mixed source: " + std::to_string(components.size()) + " components is not small next to e^(n/10) at n = " +
               std::to_string(n);
    return std::nullopt;
}

Json to_json(const MixedSourceSpec& spec) {
    Json comps = Json::array();
    for (const auto& c : spec.components) comps.push_back(Json{{"p", c.p}, {"state", to_json(c.state)}});
    return Json{{"components", std::move(comps)}};
}

MixedSourceSpec mixed_source_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("components") || !j["components"].is_array())
        throw ValidationError("mixed source JSON: expected {\"components\": [...]}");
    MixedSourceSpec spec;
    for (const auto& c : j["components"]) {
        if (!c.is_object() || !c.contains("p") || !c["p"].is_number() || !c.contains("state"))
            throw ValidationError("mixed source JSON: each component needs numeric \"p\" and \"state\"");
        spec.components.push_back({c["p"].get<double>(), density_from_json(c["state"])});
    }
    spec.validate();
    return spec;
}

DensityMatrix mixed_state(const MixedSourceSpec& spec, int n, Index max_dim) {
    spec.validate();
    if (n < 1) throw ValidationError("mixed_state: n must be positive");
    const Index total = checked_power(spec.dim(), n, max_dim);
    if (total > max_dim)
        throw OverflowError("mixed_state: dimension " + std::to_string(spec.dim()) + "^" + std::to_string(n) +
                            " exceeds max_dim " + std::to_string(max_dim));
    if (spec.all_diagonal()) {
        RealVector acc = RealVector::Zero(total);
        for (const auto& c : spec.components) acc += c.p * diagonal_power(c.state.matrix().diagonal().real(), n);
        const std::vector<double> probs(acc.data(), acc.data() + acc.size());
        return DensityMatrix::diagonal(probs);
    }
    ComplexMatrix acc = ComplexMatrix::Zero(total, total);
    for (const auto& c : spec.components) acc += c.p * tensor_power(c.state, n, max_dim).matrix();
    return DensityMatrix::assume_valid(HermitianOperator(std::move(acc)));
}

WorstComponentResult worst_component_exponent(const MixedSourceSpec& spec, const AlternativeSet& s, int n_max,
                                              Index max_dim) {
    spec.validate();
    WorstComponentResult out{kInf, -1, {}};
    for (std::size_t i = 0; i < spec.components.size(); ++i) {
        ComponentSeries cs;
        cs.points = regularized_divergence_estimate(spec.components[i].state, s, n_max, max_dim);
        const double last = cs.points.back().value_per_n;
        cs.infinite = std::isinf(last);
        if (!cs.infinite && last < out.value) {
            out.value = last;
            out.argmin_index = static_cast<int>(i);
        }
        out.series.push_back(std::move(cs));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Step exponent

double StepFunctionExponent::evaluate(double epsilon) const {
    if (!(epsilon >= 0.0 && epsilon < 1.0)) throw ValidationError("step exponent: epsilon must lie in [0, 1)");
    if (thresholds.empty()) throw ValidationError("step exponent: empty step function");
    // Weight sums within 1e-12 of ε count as ≤ ε.
    for (const auto& t : thresholds) {
        if (t.cumulative_weight > epsilon + 1e-12) return t.d;
    }
    return thresholds.back().d;
}

StepFunctionExponent step_function(const std::vector<double>& d, const std::vector<double>& p) {
    if (d.size() != p.size() || d.empty()) throw ValidationError("step function: need matching nonempty d and p");
    std::vector<std::size_t> order(d.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });

    std::vector<StepFunctionExponent::Threshold> merged;
    std::vector<double> mass;
    for (std::size_t i : order) {
        if (std::isnan(d[i])) throw ValidationError("step function: NaN divergence");
        if (!merged.empty() && (merged.back().d == d[i] || std::abs(merged.back().d - d[i]) <= 1e-12)) {
            mass.back() += p[i];
        } else {
            merged.push_back({d[i], 0.0});
            mass.push_back(p[i]);
        }
    }
    // Kahan-compensated cumulative weights.
    double total = 0.0;
    double comp = 0.0;
    for (std::size_t k = 0; k < merged.size(); ++k) {
        const double y = mass[k] - comp;
        const double t = total + y;
        comp = (t - total) - y;
        total = t;
        merged[k].cumulative_weight = total;
    }
    for (auto& m : merged) m.cumulative_weight /= total;
    merged.back().cumulative_weight = 1.0;
    return {std::move(merged)};
}

StepFunctionExponent step_function(const MixedSourceSpec& spec, const DensityMatrix& sigma) {
    spec.validate();
    std::vector<double> d;
    std::vector<double> p;
    for (const auto& c : spec.components) {
        d.push_back(relative_entropy(c.state, sigma));
        p.push_back(c.p);
    }
    return step_function(d, p);
}

double step_exponent(const MixedSourceSpec& spec, const DensityMatrix& sigma, double epsilon) {
    return step_function(spec, sigma).evaluate(epsilon);
}

// ---------------------------------------------------------------------------
// Measured exponents

double mixed_exponent(const MixedSourceSpec& spec, const DensityMatrix& sigma, double epsilon, int n,
                      const JumpDemoOptions& options) {
    spec.validate();
    if (sigma.dim() != spec.dim()) throw DimensionError("mixed_exponent: σ dimension mismatch");
    if (options.prefer_classical && spec.all_diagonal() && sigma.op().is_diagonal()) {
        std::vector<double> w;
        std::vector<std::vector<double>> laws;
        for (const auto& c : spec.components) {
            w.push_back(c.p);
            laws.push_back(diagonal_of(c.state));
        }
        const auto p = ClassicalSource::mixture(w, laws, n);
        const auto q = ClassicalSource::iid(diagonal_of(sigma), n);
        return -classical_optimal_beta(p, q, epsilon).beta_log / n;
    }
    const Index total = checked_power(spec.dim(), n, options.max_dim);
    if (total > options.max_dim)
        throw OverflowError("mixed_exponent: non-diagonal inputs need dimension " + std::to_string(spec.dim()) + "^" +
                            std::to_string(n) + " above max_dim " + std::to_string(options.max_dim));
    NPOptions np;
    np.compute_dual = false;
    np.build_test = false;
    const double beta = optimal_beta(mixed_state(spec, n, options.max_dim), tensor_power(sigma, n, options.max_dim),
                                     epsilon, np)
                            .beta;
    return beta > 0.0 ? -std::log(beta) / n : kInf;
}

std::vector<JumpRow> jump_demo(const MixedSourceSpec& spec, const DensityMatrix& sigma,
                               const std::vector<double>& epsilon_grid, int n, const JumpDemoOptions& options) {
    spec.validate();
    if (spec.components.size() != 2) throw ValidationError("jump_demo: needs exactly two components");
    const double d1 = relative_entropy(spec.components[0].state, sigma);
    const double d2 = relative_entropy(spec.components[1].state, sigma);
    if (!(d1 < d2))
        throw ValidationError("jump_demo: requires D(ρ̄₁‖σ) < D(ρ̄₂‖σ), got " + std::to_string(d1) + " and " +
                              std::to_string(d2));
    if (epsilon_grid.empty()) throw ValidationError("jump_demo: empty epsilon grid");
    const StepFunctionExponent step = step_function(spec, sigma);
    std::vector<JumpRow> rows;
    for (double eps : epsilon_grid) {
        rows.push_back({eps, n, mixed_exponent(spec, sigma, eps, n, options), step.evaluate(eps)});
    }
    return rows;
}

}  // namespace steinmix
