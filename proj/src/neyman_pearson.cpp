#include "steinmix/neyman_pearson.hpp"

#include "steinmix/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace steinmix {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_same_dim(const DensityMatrix& a, const DensityMatrix& b, const char* where) {
    if (a.dim() != b.dim())
        throw DimensionError(std::string(where) + ": dimension mismatch (" + std::to_string(a.dim()) + " vs " +
                             std::to_string(b.dim()) + ")");
}

void require_epsilon(double epsilon, const char* where) {
    if (!(epsilon >= 0.0 && epsilon <= 1.0))
        throw ValidationError(std::string(where) + ": epsilon must lie in [0, 1], got " + std::to_string(epsilon));
}

double clip01(double x) { return std::clamp(x, 0.0, 1.0); }

// One evaluation of the threshold family at t: eigen-split of ρ − tσ.
struct ThresholdPoint {
    EigenSystem es;
    RealVector rho_diag;
    double tol = 0.0;
    double f = 0.0;  // α(P_>(t))
    double g = 0.0;  // α(P_≥(t))
};

ThresholdPoint evaluate(const DensityMatrix& rho, const DensityMatrix& sigma, double t) {
    ThresholdPoint p{eig(rho.op() - sigma.op() * t), {}, 0.0, 0.0, 0.0};
    p.rho_diag = p.es.diagonal_in_basis(rho.matrix());
    p.tol = p.es.projection_tolerance();
    const RealVector& lambda = p.es.eigenvalues();
    double f = 0.0;
    double g = 0.0;
    for (Index k = 0; k < lambda.size(); ++k) {
        if (lambda[k] <= p.tol) f += p.rho_diag[k];
        if (lambda[k] < -p.tol) g += p.rho_diag[k];
    }
    p.f = clip01(f);
    p.g = clip01(g);
    return p;
}

void finish(NPResult& out, const ThresholdPoint& p, const DensityMatrix& sigma, double epsilon, double t,
            const NPOptions& options) {
    const double band = p.f - p.g;
    out.gamma = band > 1e-15 ? std::clamp((p.f - epsilon) / band, 0.0, 1.0) : 0.0;
    const RealVector& lambda = p.es.eigenvalues();
    RealVector w(lambda.size());
    for (Index k = 0; k < lambda.size(); ++k) {
        if (lambda[k] > p.tol)
            w[k] = 1.0;
        else if (lambda[k] >= -p.tol)
            w[k] = out.gamma;
        else
            w[k] = 0.0;
    }
    const RealVector sigma_diag = p.es.diagonal_in_basis(sigma.matrix());
    out.beta = clip01(w.dot(sigma_diag));
    out.alpha_achieved = clip01(p.f - out.gamma * band);
    out.threshold_t = t;
    if (options.build_test) out.test = TestOperator::assume_valid(HermitianOperator(p.es.synthesize(w)));
}

double max_dual(const DensityMatrix& rho, const DensityMatrix& sigma, double epsilon, double t_star, double& mu_out) {
    auto h = [&](double mu) { return np_dual_objective(rho, sigma, epsilon, mu); };
    double best = h(0.0);
    mu_out = 0.0;
    auto consider = [&](double mu) {
        const double v = h(mu);
        if (v > best) {
            best = v;
            mu_out = mu;
        }
    };
    if (std::isinf(t_star)) return best;
    if (t_star <= 0.0) {
        // At ε = 0 the supremum is the μ → ∞ limit Tr[Π_ρ σ]; evaluating h at huge μ
        // would cancel catastrophically.
        if (epsilon == 0.0) {
            mu_out = kInf;
            return clip01(trace_product(support_projection(rho).matrix(), sigma.matrix()));
        }
        for (int k = 0; k <= 8; ++k) consider(std::pow(10.0, k));
        return best;
    }
    const double mu0 = 1.0 / t_star;
    consider(mu0);
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = 0.0;
    double b = 2.0 * mu0;
    double c = b - phi * (b - a);
    double d = a + phi * (b - a);
    double hc = h(c);
    double hd = h(d);
    for (int it = 0; it < 80 && b - a > 1e-14 * mu0; ++it) {
        if (hc >= hd) {
            b = d;
            d = c;
            hd = hc;
            c = b - phi * (b - a);
            hc = h(c);
        } else {
            a = c;
            c = d;
            hc = hd;
            d = a + phi * (b - a);
            hd = h(d);
        }
    }
    consider(c);
    consider(d);
    return best;
}

}  // namespace

double relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma) {
    require_same_dim(rho, sigma, "relative_entropy");
    const EigenSystem es_sigma = eig(sigma.op());
    const RealVector rho_diag = es_sigma.diagonal_in_basis(rho.matrix());
    const RealVector& ls = es_sigma.eigenvalues();
    const double floor_s = es_sigma.noise_floor();
    double kernel_mass = 0.0;
    double cross = 0.0;
    for (Index k = 0; k < ls.size(); ++k) {
        if (ls[k] > floor_s)
            cross += rho_diag[k] * std::log(ls[k]);
        else
            kernel_mass += rho_diag[k];
    }
    if (kernel_mass > 1e-9) return kInf;

    const EigenSystem es_rho = eig(rho.op());
    const RealVector& lr = es_rho.eigenvalues();
    const double floor_r = es_rho.noise_floor();
    double self = 0.0;
    for (Index k = 0; k < lr.size(); ++k) {
        if (lr[k] > floor_r) self += lr[k] * std::log(lr[k]);
    }
    return std::max(0.0, self - cross);
}

TypeErrors type_errors(const TestOperator& t, const DensityMatrix& rho, const DensityMatrix& sigma) {
    require_same_dim(rho, sigma, "type_errors");
    if (t.dim() != rho.dim()) throw DimensionError("type_errors: test dimension mismatch");
    return {clip01(1.0 - trace_product(t.matrix(), rho.matrix())), clip01(trace_product(t.matrix(), sigma.matrix()))};
}

double np_dual_objective(const DensityMatrix& rho, const DensityMatrix& sigma, double epsilon, double mu) {
    return mu * (1.0 - epsilon) - positive_part_trace(rho.op() * mu - sigma.op());
}

NPResult optimal_beta(const DensityMatrix& rho, const DensityMatrix& sigma, double epsilon, const NPOptions& options) {
    require_same_dim(rho, sigma, "optimal_beta");
    require_epsilon(epsilon, "optimal_beta");
    const Index d = rho.dim();
    NPResult out;
    out.test = TestOperator::zero(d);

    if (epsilon == 1.0) {
        out.beta = 0.0;
        out.alpha_achieved = 1.0;
        out.threshold_t = kInf;
        return out;
    }

    const EigenSystem es_sigma = eig(sigma.op());
    const RealVector& ls = es_sigma.eigenvalues();
    const double floor_s = es_sigma.noise_floor();

    // A test supported on ker σ costs nothing; use it when it is feasible.
    {
        RealVector kernel_w = RealVector::Zero(d);
        for (Index k = 0; k < d; ++k) {
            if (ls[k] <= floor_s) kernel_w[k] = 1.0;
        }
        if (kernel_w.sum() > 0.0) {
            const double q = kernel_w.dot(es_sigma.diagonal_in_basis(rho.matrix()));
            if (q >= 1.0 - epsilon) {
                out.beta = 0.0;
                out.alpha_achieved = clip01(1.0 - q);
                out.threshold_t = kInf;
                out.gamma = 1.0;
                if (options.build_test)
                    out.test = TestOperator::assume_valid(HermitianOperator(es_sigma.synthesize(kernel_w)));
                return out;
            }
        }
    }

    auto accept = [&](const ThresholdPoint& p) { return p.g <= epsilon + 1e-12 && p.f >= epsilon - 1e-10; };

    ThresholdPoint at_zero = evaluate(rho, sigma, 0.0);
    double t_star = 0.0;
    if (accept(at_zero)) {
        finish(out, at_zero, sigma, epsilon, 0.0, options);
    } else {
        double min_nz = kInf;
        for (Index k = 0; k < d; ++k) {
            if (ls[k] > floor_s) min_nz = std::min(min_nz, ls[k]);
        }
        const double rho_max = eigenvalues(rho.op()).maxCoeff();
        double hi = rho_max / min_nz + 1.0;
        ThresholdPoint at_hi = evaluate(rho, sigma, hi);
        for (int k = 0; k < 200 && at_hi.g <= epsilon + 1e-12 && !accept(at_hi); ++k) {
            hi *= 2.0;
            at_hi = evaluate(rho, sigma, hi);
        }
        if (accept(at_hi)) {
            t_star = hi;
            finish(out, at_hi, sigma, epsilon, hi, options);
        } else {
            double lo = 0.0;
            ThresholdPoint at_lo = std::move(at_zero);
            bool done = false;
            int it = 0;
            for (; it < options.max_iterations; ++it) {
                const double mid = (lo > 0.0 && hi / lo > 4.0) ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
                if (!(mid > lo && mid < hi)) break;
                ThresholdPoint p = evaluate(rho, sigma, mid);
                if (accept(p)) {
                    t_star = mid;
                    finish(out, p, sigma, epsilon, mid, options);
                    done = true;
                    break;
                }
                if (p.g > epsilon + 1e-12) {
                    hi = mid;
                } else {
                    lo = mid;
                    at_lo = std::move(p);
                }
            }
            out.iterations = it + (done ? 1 : 0);
            if (!done) {
                // Budget exhausted: the strict test at lo is feasible and optimal up to the residual.
                t_star = lo;
                at_lo.g = at_lo.f;
                finish(out, at_lo, sigma, epsilon, lo, options);
                out.residual = epsilon - out.alpha_achieved;
            }
        }
    }

    if (options.compute_dual) out.dual_value = max_dual(rho, sigma, epsilon, t_star, out.dual_mu);
    return out;
}

PinchedBeta beta_under_cptp_pinching(const DensityMatrix& rho, const DensityMatrix& sigma, double epsilon) {
    require_same_dim(rho, sigma, "beta_under_cptp_pinching");
    NPOptions opts;
    opts.compute_dual = false;
    opts.build_test = false;
    const double orig = optimal_beta(rho, sigma, epsilon, opts).beta;
    const double pinched = optimal_beta(pinch(rho, sigma).state, sigma, epsilon, opts).beta;
    return {orig, pinched};
}

double projected_test_bound(const TestOperator& t, const TestOperator& projection, const DensityMatrix& rho) {
    if (t.dim() != rho.dim() || projection.dim() != rho.dim())
        throw DimensionError("projected_test_bound: dimension mismatch");
    const ComplexMatrix& p = projection.matrix();
    const double c = std::max(0.0, eigenvalues(HermitianOperator(p * t.matrix() * p)).maxCoeff());
    const double q = clip01(trace_product(p, rho.matrix()));
    const double s = std::sqrt(c * q) + std::sqrt(1.0 - q);
    return s * s;
}

double two_projection_bound(const TestOperator& p1, const TestOperator& p2, const DensityMatrix& rho) {
    if (p1.dim() != rho.dim() || p2.dim() != rho.dim())
        throw DimensionError("two_projection_bound: dimension mismatch");
    const Index d = rho.dim();
    const ComplexMatrix comp = ComplexMatrix::Identity(d, d) - p2.matrix();
    const double a = std::max(0.0, trace_product(p2.matrix(), rho.matrix()));
    const double b = std::max(0.0, trace_product(p1.matrix(), comp * rho.matrix() * comp));
    const double s = std::sqrt(a) + std::sqrt(b);
    return s * s;
}

}  // namespace steinmix
