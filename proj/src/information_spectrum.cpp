#include "steinmix/information_spectrum.hpp"

#include "steinmix/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace steinmix {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_same_dim(const DensityMatrix& a, const DensityMatrix& b, const char* where) {
    if (a.dim() != b.dim()) throw DimensionError(std::string(where) + ": dimension mismatch");
}

void require_n(int n, const char* where) {
    if (n < 1) throw ValidationError(std::string(where) + ": n must be positive");
}

RealVector diag_of(const DensityMatrix& rho) { return rho.matrix().diagonal().real(); }

RealVector diagonal_power(const RealVector& base, int n) {
    RealVector acc = base;
    for (int k = 1; k < n; ++k) {
        RealVector next(acc.size() * base.size());
        for (Index i = 0; i < acc.size(); ++i) next.segment(i * base.size(), base.size()) = acc[i] * base;
        acc = std::move(next);
    }
    return acc;
}

double log_sum_exp_where(const RealVector& s, const RealVector& w) {
    double m = -kInf;
    for (Index i = 0; i < s.size(); ++i) {
        if (w[i] > 0.0 && s[i] > 0.0) m = std::max(m, std::log(w[i] * s[i]));
    }
    if (m == -kInf) return -kInf;
    double acc = 0.0;
    for (Index i = 0; i < s.size(); ++i) {
        if (w[i] > 0.0 && s[i] > 0.0) acc += std::exp(std::log(w[i] * s[i]) - m);
    }
    return m + std::log(acc);
}

// Indicator of {ρ − e^{na}σ ≥ 0} for diagonal inputs, compared in the log domain.
RealVector diagonal_indicator(const RealVector& r, const RealVector& s, double na) {
    RealVector w(r.size());
    for (Index i = 0; i < r.size(); ++i) {
        if (s[i] <= 0.0)
            w[i] = 1.0;
        else if (r[i] <= 0.0)
            w[i] = 0.0;
        else
            w[i] = (std::log(r[i]) - std::log(s[i]) >= na) ? 1.0 : 0.0;
    }
    return w;
}

// ρ − e^{na}σ rescaled so no factor e^{|na|} is ever formed.
HermitianOperator scaled_difference(const DensityMatrix& rho, const DensityMatrix& sigma, double na) {
    return na >= 0.0 ? rho.op() * std::exp(-na) - sigma.op() : rho.op() - sigma.op() * std::exp(na);
}

TestOperator dense_spectral_projection(const DensityMatrix& rho, const DensityMatrix& sigma, double na) {
    return positive_part_projection(scaled_difference(rho, sigma, na));
}

bool diagonal_pair(const DensityMatrix& rho, const DensityMatrix& sigma) {
    return rho.op().is_diagonal() && sigma.op().is_diagonal();
}

double clip01(double x) { return std::clamp(x, 0.0, 1.0); }

}  // namespace

SpectralTestResult spectral_test(const DensityMatrix& rho_n, const DensityMatrix& sigma_n, double a, int n,
                                 bool build_test) {
    require_same_dim(rho_n, sigma_n, "spectral_test");
    require_n(n, "spectral_test");
    const double na = static_cast<double>(n) * a;
    SpectralTestResult out;
    if (diagonal_pair(rho_n, sigma_n)) {
        const RealVector r = diag_of(rho_n);
        const RealVector s = diag_of(sigma_n);
        const RealVector w = diagonal_indicator(r, s, na);
        out.alpha = clip01((RealVector::Ones(w.size()) - w).dot(r));
        out.beta = clip01(w.dot(s));
        out.log_beta = std::min(0.0, log_sum_exp_where(s, w));
        if (build_test) {
            const std::vector<double> entries(w.data(), w.data() + w.size());
            out.test = TestOperator::assume_valid(HermitianOperator::diagonal(entries));
        }
    } else {
        const EigenSystem es = eig(scaled_difference(rho_n, sigma_n, na));
        const double tol = es.projection_tolerance();
        const RealVector& lambda = es.eigenvalues();
        const RealVector r = es.diagonal_in_basis(rho_n.matrix());
        const RealVector s = es.diagonal_in_basis(sigma_n.matrix());
        double alpha = 0.0;
        double beta = 0.0;
        for (Index k = 0; k < lambda.size(); ++k) {
            if (lambda[k] >= -tol)
                beta += s[k];
            else
                alpha += r[k];
        }
        out.alpha = clip01(alpha);
        out.beta = clip01(beta);
        out.log_beta = out.beta > 0.0 ? std::log(out.beta) : -kInf;
        if (build_test) out.test = positive_part_projection(es);
    }
    out.beta_bound_holds = out.log_beta <= -na + std::log1p(1e-9);
    return out;
}

RateSweep rate_sweep(const DensityMatrix& rho_n, const DensityMatrix& sigma_n, int n, const std::vector<double>& rates) {
    require_n(n, "rate_sweep");
    if (!std::is_sorted(rates.begin(), rates.end())) throw ValidationError("rate_sweep: rates must be ascending");
    RateSweep out;
    out.n = n;
    out.rates = rates;
    for (double a : rates) {
        const auto r = spectral_test(rho_n, sigma_n, a, n, false);
        out.type1.push_back(r.alpha);
        out.type2_log.push_back(r.log_beta / n);
    }
    return out;
}

std::vector<double> default_rate_grid(double divergence, int points) {
    if (points < 2) throw ValidationError("default_rate_grid: need at least two points");
    const double top = (divergence > 0.0 && std::isfinite(divergence)) ? 2.0 * divergence : 1.0;
    std::vector<double> grid(static_cast<std::size_t>(points));
    for (int k = 0; k < points; ++k) grid[static_cast<std::size_t>(k)] = top * k / (points - 1);
    return grid;
}

UnderlineDPoint underline_d_estimate(const DensityMatrix& rho_n, const DensityMatrix& sigma_n, double epsilon, int n,
                                     const std::vector<double>& rate_grid) {
    require_same_dim(rho_n, sigma_n, "underline_d_estimate");
    require_n(n, "underline_d_estimate");
    if (rate_grid.empty()) throw ValidationError("underline_d_estimate: empty rate grid");
    if (!std::is_sorted(rate_grid.begin(), rate_grid.end()))
        throw ValidationError("underline_d_estimate: rate grid must be ascending");

    std::function<double(double)> alpha;
    RealVector r;
    RealVector llr;
    if (diagonal_pair(rho_n, sigma_n)) {
        r = diag_of(rho_n);
        const RealVector s = diag_of(sigma_n);
        llr.resize(r.size());
        for (Index i = 0; i < r.size(); ++i) {
            if (s[i] <= 0.0)
                llr[i] = kInf;
            else if (r[i] <= 0.0)
                llr[i] = -kInf;
            else
                llr[i] = std::log(r[i]) - std::log(s[i]);
        }
        alpha = [&, n](double a) {
            const double na = n * a;
            double acc = 0.0;
            for (Index i = 0; i < r.size(); ++i) {
                if (llr[i] < na) acc += r[i];
            }
            return acc;
        };
    } else {
        alpha = [&, n](double a) { return spectral_test(rho_n, sigma_n, a, n, false).alpha; };
    }
    auto feasible = [&](double a) { return alpha(a) <= epsilon; };

    const std::size_t last = rate_grid.size() - 1;
    if (!feasible(rate_grid.front())) return {rate_grid.front(), false};
    if (feasible(rate_grid[last])) return {rate_grid[last], true};
    std::size_t lo = 0;
    std::size_t hi = last;
    while (hi - lo > 1) {
        const std::size_t mid = lo + (hi - lo) / 2;
        if (feasible(rate_grid[mid]))
            lo = mid;
        else
            hi = mid;
    }
    double a_lo = rate_grid[lo];
    double a_hi = rate_grid[hi];
    while (a_hi - a_lo > 1e-4) {
        const double mid = 0.5 * (a_lo + a_hi);
        if (feasible(mid))
            a_lo = mid;
        else
            a_hi = mid;
    }
    return {a_lo, true};
}

UnderlineDEstimate underline_d_series(const StateProvider& rho, const StateProvider& sigma, double epsilon,
                                      const std::vector<int>& n_values, const std::vector<double>& rate_grid) {
    UnderlineDEstimate out{epsilon, n_values, {}, {}};
    for (int n : n_values) {
        const auto p = underline_d_estimate(rho(n), sigma(n), epsilon, n, rate_grid);
        out.estimates.push_back(p.estimate);
        out.feasible.push_back(p.feasible);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Combined test for mixed sources

namespace {

double projected_bound_value(double delta, int n, double q) {
    q = clip01(q);
    const double s = std::sqrt(std::exp(-n * delta) * q) + std::sqrt(1.0 - q);
    return s * s;
}

void check_direct_args(const MixedSourceSpec& spec, double delta, int n) {
    spec.validate();
    require_n(n, "direct_part_test");
    if (!(delta > 0.0)) throw ValidationError("direct_part_test: delta must be positive");
}

void finish_direct(DirectPartResult& out, const MixedSourceSpec& spec, double a, double delta, int n) {
    const double j = static_cast<double>(spec.components.size());
    out.beta_bound_holds = -out.log_beta / n >= a + delta - std::log(j) / n - 1e-12;
    out.projected_bound_holds = true;
    for (std::size_t i = 0; i < spec.components.size(); ++i) {
        out.projected_bound.push_back(projected_bound_value(delta, n, out.per_component_alpha[i]));
        if (out.component_accept[i] > out.projected_bound[i] + 1e-9) out.projected_bound_holds = false;
    }
}

DirectPartResult direct_part_diagonal(const MixedSourceSpec& spec, const RealVector& s, double a, double delta, int n,
                                      const DirectPartOptions& options) {
    const double na2 = n * (a + 2.0 * delta);
    RealVector count = RealVector::Zero(s.size());
    std::vector<RealVector> states;
    DirectPartResult out;
    for (const auto& c : spec.components) {
        RealVector r = diagonal_power(diag_of(c.state), n);
        const RealVector w = diagonal_indicator(r, s, na2);
        out.component_accept.push_back(clip01(w.dot(r)));
        count += w;
        states.push_back(std::move(r));
    }
    // A_n has integer eigenvalues and e^{−nδ} < 1, so T_n = {A_n ≥ 1}.
    const double threshold = std::exp(-n * delta);
    RealVector tn(s.size());
    for (Index i = 0; i < s.size(); ++i) tn[i] = count[i] >= threshold ? 1.0 : 0.0;
    for (const auto& r : states) out.per_component_alpha.push_back(clip01((RealVector::Ones(tn.size()) - tn).dot(r)));
    out.beta = clip01(tn.dot(s));
    out.log_beta = std::min(0.0, log_sum_exp_where(s, tn));
    if (options.build_test) {
        const std::vector<double> entries(tn.data(), tn.data() + tn.size());
        out.test = TestOperator::assume_valid(HermitianOperator::diagonal(entries));
    }
    finish_direct(out, spec, a, delta, n);
    return out;
}

}  // namespace

DirectPartResult direct_part_test(const MixedSourceSpec& spec, const DensityMatrix& sigma_n, double a, double delta,
                                  int n, const DirectPartOptions& options) {
    check_direct_args(spec, delta, n);
    const Index total = checked_power(spec.dim(), n, options.max_dim);
    if (total > options.max_dim || total != sigma_n.dim())
        throw OverflowError("direct_part_test: σ_n has dimension " + std::to_string(sigma_n.dim()) + " but " +
                            std::to_string(spec.dim()) + "^" + std::to_string(n) + " is required (cap " +
                            std::to_string(options.max_dim) + ")");
    if (spec.all_diagonal() && sigma_n.op().is_diagonal())
        return direct_part_diagonal(spec, diag_of(sigma_n), a, delta, n, options);

    const double na2 = n * (a + 2.0 * delta);
    ComplexMatrix acc = ComplexMatrix::Zero(total, total);
    std::vector<DensityMatrix> states;
    DirectPartResult out;
    for (const auto& c : spec.components) {
        DensityMatrix r = tensor_power(c.state, n, options.max_dim);
        const TestOperator ti = dense_spectral_projection(r, sigma_n, na2);
        out.component_accept.push_back(clip01(trace_product(ti.matrix(), r.matrix())));
        acc += ti.matrix();
        states.push_back(std::move(r));
    }
    acc -= std::exp(-n * delta) * ComplexMatrix::Identity(total, total);
    TestOperator tn = positive_part_projection(HermitianOperator(std::move(acc)));
    for (const auto& r : states) out.per_component_alpha.push_back(clip01(1.0 - trace_product(tn.matrix(), r.matrix())));
    out.beta = clip01(trace_product(tn.matrix(), sigma_n.matrix()));
    out.log_beta = out.beta > 0.0 ? std::log(out.beta) : -kInf;
    if (options.build_test) out.test = std::move(tn);
    finish_direct(out, spec, a, delta, n);
    return out;
}

DirectPartResult direct_part_test_iid(const MixedSourceSpec& spec, const DensityMatrix& sigma, double a, double delta,
                                      int n, const DirectPartOptions& options) {
    check_direct_args(spec, delta, n);
    if (sigma.dim() != spec.dim()) throw DimensionError("direct_part_test: σ dimension mismatch");
    const Index total = checked_power(spec.dim(), n, options.max_dim);
    if (total > options.max_dim)
        throw OverflowError("direct_part_test: dimension " + std::to_string(spec.dim()) + "^" + std::to_string(n) +
                            " exceeds max_dim " + std::to_string(options.max_dim));
    if (spec.all_diagonal() && sigma.op().is_diagonal())
        return direct_part_diagonal(spec, diagonal_power(diag_of(sigma), n), a, delta, n, options);
    return direct_part_test(spec, tensor_power(sigma, n, options.max_dim), a, delta, n, options);
}

ConverseFootprint converse_footprint(const MixedSourceSpec& spec, const DensityMatrix& sigma_n, double a, double delta,
                                     int n) {
    spec.validate();
    require_n(n, "converse_footprint");
    if (!(delta > 0.0)) throw ValidationError("converse_footprint: delta must be positive");
    const DensityMatrix rho_n = mixed_state(spec, n, std::max<Index>(kDefaultMaxDim, sigma_n.dim()));
    require_same_dim(rho_n, sigma_n, "converse_footprint");
    const TestOperator tn = *spectral_test(rho_n, sigma_n, a, n, true).test;
    ConverseFootprint out;
    for (const auto& c : spec.components) {
        const DensityMatrix r = tensor_power(c.state, n, std::max<Index>(kDefaultMaxDim, sigma_n.dim()));
        const double deficient = spectral_test(r, sigma_n, a - delta, n, false).alpha;
        const double allowance = clip01(1.0 - trace_product(tn.matrix(), r.matrix())) + std::exp(-n * delta);
        out.deficient_alpha.push_back(deficient);
        out.allowance.push_back(allowance);
        if (deficient > allowance + 1e-9) out.holds = false;
    }
    return out;
}

PinchingComparison pinching_reduction_compare(const DensityMatrix& rho_n, const DensityMatrix& sigma_n, double epsilon,
                                              int n, const std::vector<double>& rate_grid) {
    require_same_dim(rho_n, sigma_n, "pinching_reduction_compare");
    const auto pinched = pinch(rho_n, sigma_n);
    PinchingComparison out{};
    out.d_orig = underline_d_estimate(rho_n, sigma_n, epsilon, n, rate_grid).estimate;
    out.d_pinched = underline_d_estimate(pinched.state, sigma_n, epsilon, n, rate_grid).estimate;
    out.d_n = pinched.distinct_count;
    out.slack = (2.0 / n) * std::log(1.0 / 1e-3);
    out.bound_holds = out.d_pinched >= out.d_orig - std::log(static_cast<double>(out.d_n)) / n - out.slack;
    return out;
}

}  // namespace steinmix
