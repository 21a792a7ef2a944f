#include "steinmix/classical_oracle.hpp"

#include "steinmix/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace steinmix {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double safe_log(double x) { return x > 0.0 ? std::log(x) : -kInf; }

double log_add(double a, double b) {
    if (a == -kInf) return b;
    if (b == -kInf) return a;
    const double m = std::max(a, b);
    return m + std::log1p(std::exp(std::min(a, b) - m));
}

// Visits every count vector of length k summing to n, in lexicographic order
// of (c_0, c_1, ...) descending from (n, 0, ..., 0).
template <class F>
void for_each_composition(int n, int k, F&& visit) {
    std::vector<int> c(static_cast<std::size_t>(k), 0);
    auto rec = [&](auto&& self, int pos, int remaining) -> void {
        if (pos == k - 1) {
            c[static_cast<std::size_t>(pos)] = remaining;
            visit(c);
            return;
        }
        for (int v = remaining; v >= 0; --v) {
            c[static_cast<std::size_t>(pos)] = v;
            self(self, pos + 1, remaining - v);
        }
    };
    rec(rec, 0, n);
}

void check_log_vector(const std::vector<double>& v, const char* what) {
    for (double x : v) {
        if (std::isnan(x) || x == kInf) throw ValidationError(std::string("classical source: invalid ") + what);
    }
}

}  // namespace

double log_sum_exp(const std::vector<double>& x) {
    double m = -kInf;
    for (double v : x) m = std::max(m, v);
    if (m == -kInf) return -kInf;
    double s = 0.0;
    for (double v : x) s += std::exp(v - m);
    return m + std::log(s);
}

// ---------------------------------------------------------------------------
// ClassicalSource

ClassicalSource ClassicalSource::iid(const std::vector<double>& probs, int n) {
    return mixture({1.0}, {probs}, n);
}

ClassicalSource ClassicalSource::mixture(const std::vector<double>& weights,
                                         const std::vector<std::vector<double>>& probs, int n) {
    if (weights.size() != probs.size()) throw ValidationError("classical source: weight/component count mismatch");
    if (probs.empty()) throw ValidationError("classical source: no components");
    ClassicalSource s;
    s.alphabet = static_cast<int>(probs.front().size());
    s.n = n;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        ClassicalComponent c;
        c.log_w = safe_log(weights[i]);
        for (double p : probs[i]) {
            if (p < 0.0) throw ValidationError("classical source: negative probability");
            c.log_p.push_back(safe_log(p));
        }
        s.components.push_back(std::move(c));
    }
    s.validate();
    return s;
}

ClassicalSource ClassicalSource::at_blocklength(int new_n) const {
    ClassicalSource s = *this;
    s.n = new_n;
    s.validate();
    return s;
}

void ClassicalSource::validate() const {
    if (alphabet < 1) throw ValidationError("classical source: alphabet must be positive");
    if (n < 1) throw ValidationError("classical source: blocklength must be positive");
    if (components.empty()) throw ValidationError("classical source: no components");
    std::vector<double> lw;
    for (const auto& c : components) {
        if (static_cast<int>(c.log_p.size()) != alphabet)
            throw ValidationError("classical source: component law does not match the alphabet size");
        check_log_vector(c.log_p, "log probability");
        if (std::abs(log_sum_exp(c.log_p)) > 1e-9)
            throw ValidationError("classical source: per-symbol law does not sum to 1");
        if (std::isnan(c.log_w) || c.log_w == kInf) throw ValidationError("classical source: invalid weight");
        lw.push_back(c.log_w);
    }
    if (std::abs(log_sum_exp(lw)) > 1e-9) throw ValidationError("classical source: weights do not sum to 1");
}

Json to_json(const ClassicalSource& s) {
    Json comps = Json::array();
    for (const auto& c : s.components) {
        Json lp = Json::array();
        for (double x : c.log_p) lp.push_back(extended_real_to_json(x));
        comps.push_back(Json{{"log_w", extended_real_to_json(c.log_w)}, {"log_p", std::move(lp)}});
    }
    return Json{{"alphabet", s.alphabet}, {"components", std::move(comps)}, {"n", s.n}};
}

ClassicalSource classical_source_from_json(const Json& j) {
    try {
        ClassicalSource s;
        s.alphabet = j.at("alphabet").get<int>();
        s.n = j.at("n").get<int>();
        for (const auto& c : j.at("components")) {
            ClassicalComponent comp;
            comp.log_w = extended_real_from_json(c.at("log_w"));
            for (const auto& x : c.at("log_p")) comp.log_p.push_back(extended_real_from_json(x));
            s.components.push_back(std::move(comp));
        }
        s.validate();
        return s;
    } catch (const Json::exception& e) {
        throw ValidationError(std::string("classical source JSON: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// Type classes

std::size_t type_class_count(int n, int alphabet, std::size_t cap) {
    // C(n + k − 1, k − 1) built incrementally; each partial product is an integer.
    const int k = alphabet;
    long double acc = 1.0L;
    for (int j = 1; j < k; ++j) {
        acc = acc * static_cast<long double>(n + j) / static_cast<long double>(j);
        if (acc > static_cast<long double>(cap)) return cap + 1;
    }
    return static_cast<std::size_t>(std::llround(static_cast<double>(acc)));
}

TypeClassTable build_type_classes(const ClassicalSource& s) {
    s.validate();
    const std::size_t count = type_class_count(s.n, s.alphabet);
    if (count > kMaxTypeClasses)
        throw OverflowError("type-class table: more than " + std::to_string(kMaxTypeClasses) +
                            " classes for alphabet " + std::to_string(s.alphabet) + " at n = " + std::to_string(s.n));

    const std::size_t m = s.components.size();
    TypeClassTable t;
    t.class_count = count;
    t.log_multiplicity.reserve(count);
    t.component_log_prob.assign(m, {});
    for (auto& v : t.component_log_prob) v.reserve(count);

    const double log_n_fact = std::lgamma(static_cast<double>(s.n) + 1.0);
    for_each_composition(s.n, s.alphabet, [&](const std::vector<int>& c) {
        double lm = log_n_fact;
        for (int cj : c) lm -= std::lgamma(static_cast<double>(cj) + 1.0);
        t.log_multiplicity.push_back(lm);
        for (std::size_t i = 0; i < m; ++i) {
            double lp = lm;
            const auto& law = s.components[i].log_p;
            for (std::size_t j = 0; j < c.size(); ++j) {
                if (c[j] == 0) continue;  // 0 · log 0 contributes nothing
                lp += static_cast<double>(c[j]) * law[j];
            }
            t.component_log_prob[i].push_back(lp);
        }
    });

    for (auto& v : t.component_log_prob) {
        const double z = log_sum_exp(v);
        t.normalization_error = std::max(t.normalization_error, std::abs(z));
        for (double& x : v) x -= z;
    }
    if (t.normalization_error > 1e-9)
        throw NumericError("type-class table: normalization error " + std::to_string(t.normalization_error));

    t.mixture_log_prob.resize(count);
    std::vector<double> terms(m);
    for (std::size_t c = 0; c < count; ++c) {
        for (std::size_t i = 0; i < m; ++i) terms[i] = s.components[i].log_w + t.component_log_prob[i][c];
        t.mixture_log_prob[c] = log_sum_exp(terms);
    }
    return t;
}

// ---------------------------------------------------------------------------
// Neyman–Pearson over classes

namespace {

void require_compatible(const ClassicalSource& p, const ClassicalSource& q, const char* where) {
    if (p.alphabet != q.alphabet) throw ValidationError(std::string(where) + ": mismatched alphabets");
    if (p.n != q.n) throw ValidationError(std::string(where) + ": mismatched blocklengths");
}

double log_ratio(double lp, double lq) {
    if (lp == -kInf) return -kInf;
    if (lq == -kInf) return kInf;
    return lp - lq;
}

}  // namespace

ClassicalNPResult classical_optimal_beta(const ClassicalSource& p, const ClassicalSource& q, double epsilon) {
    require_compatible(p, q, "classical_optimal_beta");
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw ValidationError("classical_optimal_beta: epsilon must lie in [0, 1]");
    const TypeClassTable tp = build_type_classes(p);
    const TypeClassTable tq = build_type_classes(q);
    const auto& lp = tp.mixture_log_prob;
    const auto& lq = tq.mixture_log_prob;
    const std::size_t count = tp.class_count;

    std::vector<double> llr(count);
    for (std::size_t c = 0; c < count; ++c) llr[c] = log_ratio(lp[c], lq[c]);
    std::vector<std::size_t> order(count);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return llr[a] < llr[b]; });

    ClassicalNPResult out;
    if (epsilon >= 1.0) {
        out.beta_log = -kInf;
        out.threshold = kInf;
        out.gamma = 0.0;
        return out;
    }

    // Reject from the low-ratio end while the rejected P-mass stays within ε.
    const double log_eps = safe_log(epsilon);
    double log_rejected = -kInf;
    std::size_t k = 0;
    double gamma = 1.0;
    for (; k < count; ++k) {
        const std::size_t c = order[k];
        if (lp[c] == -kInf) continue;
        const double next = log_add(log_rejected, lp[c]);
        if (next <= log_eps) {
            log_rejected = next;
            continue;
        }
        const double room = std::max(0.0, epsilon - std::exp(log_rejected));
        const double reject_fraction = std::clamp(std::exp(safe_log(room) - lp[c]), 0.0, 1.0);
        gamma = 1.0 - reject_fraction;
        break;
    }

    if (k == count) {
        out.beta_log = -kInf;
        out.threshold = kInf;
        out.gamma = 0.0;
        return out;
    }
    std::vector<double> accepted;
    accepted.reserve(count - k);
    accepted.push_back(safe_log(gamma) + lq[order[k]]);
    for (std::size_t j = k + 1; j < count; ++j) accepted.push_back(lq[order[j]]);
    out.beta_log = std::min(0.0, log_sum_exp(accepted));
    out.threshold = llr[order[k]];
    out.gamma = gamma;
    return out;
}

// ---------------------------------------------------------------------------
// Likelihood-ratio spectrum

SpectrumTable spectrum(const ClassicalSource& p_mixture, const ClassicalSource& q) {
    require_compatible(p_mixture, q, "spectrum");
    const TypeClassTable tp = build_type_classes(p_mixture);
    const TypeClassTable tq = build_type_classes(q);
    const double n = static_cast<double>(p_mixture.n);

    struct Atom {
        double rate;
        double mass;
    };
    std::vector<Atom> atoms;
    atoms.reserve(tp.class_count);
    for (std::size_t c = 0; c < tp.class_count; ++c) {
        const double lp = tp.mixture_log_prob[c];
        if (lp == -kInf) continue;
        atoms.push_back({log_ratio(lp, tq.mixture_log_prob[c]) / n, std::exp(lp)});
    }
    std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.rate < b.rate; });

    SpectrumTable table;
    table.n = p_mixture.n;
    double cum = 0.0;
    double comp = 0.0;  // Kahan compensation
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        const double y = atoms[i].mass - comp;
        const double t = cum + y;
        comp = (t - cum) - y;
        cum = t;
        const bool merge = !table.rows.empty() && (atoms[i].rate == table.rows.back().rate ||
                                                   std::abs(atoms[i].rate - table.rows.back().rate) <=
                                                       1e-12 * std::max(1.0, std::abs(atoms[i].rate)));
        if (merge)
            table.rows.back().cdf = cum;
        else
            table.rows.push_back({atoms[i].rate, cum});
    }
    if (!table.rows.empty()) {
        const double total = cum;
        for (auto& r : table.rows) r.cdf = std::min(1.0, r.cdf / total);
        table.rows.back().cdf = 1.0;
    }
    return table;
}

double spectrum_inf_rate(const SpectrumTable& table, double epsilon) {
    for (const auto& r : table.rows) {
        if (r.cdf > epsilon) return r.rate;
    }
    return kInf;
}

double spectrum_cdf(const SpectrumTable& table, double rate) {
    double f = 0.0;
    for (const auto& r : table.rows) {
        if (r.rate > rate) break;
        f = r.cdf;
    }
    return f;
}

// ---------------------------------------------------------------------------
// Exponentially large mixture

std::vector<ExponentialMixtureRow> exponential_mixture_counterexample(double d, double r,
                                                                      const std::vector<int>& n_list) {
    if (!(r > 0.0 && d > r)) throw ValidationError("exponential mixture: requires d > R > 0");
    std::vector<ExponentialMixtureRow> rows;
    for (int n : n_list) {
        if (n < 1) throw ValidationError("exponential mixture: blocklengths must be positive");
        const double nn = static_cast<double>(n);
        // Log masses on a representative point i ∈ J_n.
        const double log_sigma = -nn * d;
        const double log_component = 0.0;
        const double log_mixture = -nn * r;
        ExponentialMixtureRow row{};
        row.n = n;
        row.log_component_count = nn * r;
        row.component_exponent = (log_component - log_sigma) / nn;
        row.mixture_exponent = (log_mixture - log_sigma) / nn;
        row.gap = row.component_exponent - row.mixture_exponent;
        row.remainder_mass = -std::expm1(-nn * (d - r));
        // Under either null the log-ratio rate is a single atom carrying all the mass.
        row.component_proxy = spectrum_inf_rate({{{row.component_exponent, 1.0}}, n}, 0.0);
        row.mixture_proxy = spectrum_inf_rate({{{row.mixture_exponent, 1.0}}, n}, 0.0);
        rows.push_back(row);
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Bridge from commuting quantum pairs

QuantizedPair quantize_commuting(const DensityMatrix& rho, const DensityMatrix& sigma) {
    if (rho.dim() != sigma.dim()) throw DimensionError("quantize_commuting: dimension mismatch");
    const double comm = commutator_norm(rho.matrix(), sigma.matrix());
    if (comm > 1e-9)
        throw ValidationError("quantize_commuting: inputs do not commute (‖[ρ,σ]‖ = " + std::to_string(comm) +
                              "); pinch ρ with respect to σ first");
    const Index d = rho.dim();
    std::vector<double> p(static_cast<std::size_t>(d));
    std::vector<double> q(static_cast<std::size_t>(d));
    if (rho.op().is_diagonal() && sigma.op().is_diagonal()) {
        for (Index i = 0; i < d; ++i) {
            p[static_cast<std::size_t>(i)] = rho.matrix()(i, i).real();
            q[static_cast<std::size_t>(i)] = sigma.matrix()(i, i).real();
        }
    } else {
        // Diagonalize ρ inside each eigenspace of σ to get a joint eigenbasis.
        const EigenSystem es = eig(sigma.op());
        const ComplexMatrix v = es.eigenvectors();
        const ComplexMatrix rho_b = v.adjoint() * rho.matrix() * v;
        ComplexMatrix w = ComplexMatrix::Zero(d, d);
        for (const auto& cl : es.clusters()) {
            const Index len = cl.end - cl.begin;
            const ComplexMatrix block = rho_b.block(cl.begin, cl.begin, len, len);
            w.block(cl.begin, cl.begin, len, len) = eig(HermitianOperator(block)).eigenvectors();
        }
        const ComplexMatrix u = v * w;
        const ComplexMatrix pr = u.adjoint() * rho.matrix() * u;
        const ComplexMatrix qs = u.adjoint() * sigma.matrix() * u;
        for (Index i = 0; i < d; ++i) {
            p[static_cast<std::size_t>(i)] = std::max(0.0, pr(i, i).real());
            q[static_cast<std::size_t>(i)] = std::max(0.0, qs(i, i).real());
        }
    }
    auto normalize = [](std::vector<double>& x) {
        const double s = std::accumulate(x.begin(), x.end(), 0.0);
        for (double& v : x) v /= s;
    };
    normalize(p);
    normalize(q);
    return {ClassicalSource::iid(p, 1), ClassicalSource::iid(q, 1)};
}

double classical_relative_entropy(const std::vector<double>& p, const std::vector<double>& q) {
    if (p.size() != q.size()) throw DimensionError("classical_relative_entropy: length mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] <= 0.0) continue;
        if (q[i] <= 0.0) return kInf;
        acc += p[i] * std::log(p[i] / q[i]);
    }
    return acc;
}

}  // namespace steinmix
