#include "steinmix/composite.hpp"

#include "steinmix/errors.hpp"
#include "steinmix/neyman_pearson.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace steinmix {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> uniform_weights(std::size_t m) { return std::vector<double>(m, 1.0 / static_cast<double>(m)); }

}  // namespace

// ---------------------------------------------------------------------------
// AlternativeSet

void AlternativeSet::validate() const {
    if (generators.empty()) throw ValidationError("alternative set '" + label + "': no generators");
    const Index d = generators.front().dim();
    for (const auto& g : generators) {
        if (g.dim() != d) throw DimensionError("alternative set '" + label + "': generators differ in dimension");
    }
    if (hull_level < 1) throw ValidationError("alternative set '" + label + "': hull level must be positive");
}

bool AlternativeSet::contains_full_rank() const {
    const DensityMatrix bary = mixture(uniform_weights(generators.size()));
    const EigenSystem es = eig(bary.op());
    return es.eigenvalues()(0) > es.noise_floor();
}

DensityMatrix AlternativeSet::mixture(const std::vector<double>& weights) const {
    validate();
    if (weights.size() != generators.size()) throw DimensionError("alternative set: weight count mismatch");
    const Index d = dim();
    ComplexMatrix acc = ComplexMatrix::Zero(d, d);
    for (std::size_t j = 0; j < weights.size(); ++j) {
        if (weights[j] < 0.0) throw ValidationError("alternative set: negative mixture weight");
        if (weights[j] != 0.0) acc += weights[j] * generators[j].matrix();
    }
    return DensityMatrix::assume_valid(HermitianOperator(std::move(acc)));
}

Json to_json(const AlternativeSet& s) {
    Json gens = Json::array();
    for (const auto& g : s.generators) gens.push_back(to_json(g));
    return Json{{"label", s.label}, {"generators", std::move(gens)}, {"hull_level", s.hull_level}};
}

AlternativeSet alternative_set_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("generators") || !j["generators"].is_array())
        throw ValidationError("alternative set JSON: expected {\"label\", \"generators\": [...]}");
    AlternativeSet s;
    s.label = j.value("label", std::string("S"));
    s.hull_level = j.value("hull_level", 1);
    for (const auto& g : j["generators"]) s.generators.push_back(density_from_json(g));
    s.validate();
    return s;
}

// ---------------------------------------------------------------------------
// Matrix games

MatrixGameSolution solve_matrix_game(const std::vector<std::vector<double>>& payoff) {
    const std::size_t rows = payoff.size();
    if (rows == 0 || payoff.front().empty()) throw ValidationError("matrix game: empty payoff");
    const std::size_t cols = payoff.front().size();
    double lo = kInf;
    for (const auto& r : payoff) {
        if (r.size() != cols) throw DimensionError("matrix game: ragged payoff");
        for (double v : r) lo = std::min(lo, v);
    }
    const double shift = 1.0 - lo;  // all shifted entries ≥ 1

    // max 1ᵀx  s.t. (P + shift) x ≤ 1, x ≥ 0. Tableau columns: x (cols), slacks (rows), rhs.
    const std::size_t width = cols + rows + 1;
    std::vector<double> tab((rows + 1) * width, 0.0);
    auto at = [&](std::size_t r, std::size_t c) -> double& { return tab[r * width + c]; };
    std::vector<std::size_t> basis(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) at(r, c) = payoff[r][c] + shift;
        at(r, cols + r) = 1.0;
        at(r, width - 1) = 1.0;
        basis[r] = cols + r;
    }
    for (std::size_t c = 0; c < cols; ++c) at(rows, c) = -1.0;

    constexpr double tol = 1e-12;
    const std::size_t max_pivots = 50 * (rows + cols) + 1000;
    std::size_t pivots = 0;
    for (;; ++pivots) {
        if (pivots > max_pivots) throw NumericError("matrix game: simplex pivot budget exhausted");
        std::size_t enter = width;
        for (std::size_t c = 0; c + 1 < width; ++c) {
            if (at(rows, c) < -tol) {
                enter = c;
                break;
            }
        }
        if (enter == width) break;
        std::size_t leave = rows;
        double best = kInf;
        for (std::size_t r = 0; r < rows; ++r) {
            const double a = at(r, enter);
            if (a <= tol) continue;
            const double ratio = at(r, width - 1) / a;
            if (ratio < best - 1e-15 || (leave != rows && std::abs(ratio - best) <= 1e-15 && basis[r] < basis[leave])) {
                best = ratio;
                leave = r;
            }
        }
        if (leave == rows) throw NumericError("matrix game: unbounded master problem");
        const double piv = at(leave, enter);
        for (std::size_t c = 0; c < width; ++c) at(leave, c) /= piv;
        for (std::size_t r = 0; r <= rows; ++r) {
            if (r == leave) continue;
            const double f = at(r, enter);
            if (f == 0.0) continue;
            for (std::size_t c = 0; c < width; ++c) at(r, c) -= f * at(leave, c);
        }
        basis[leave] = enter;
    }

    const double total = at(rows, width - 1);  // = 1 / (value + shift)
    MatrixGameSolution sol;
    sol.value = 1.0 / total - shift;
    sol.column_strategy.assign(cols, 0.0);
    for (std::size_t r = 0; r < rows; ++r) {
        if (basis[r] < cols) sol.column_strategy[basis[r]] = std::max(0.0, at(r, width - 1));
    }
    sol.row_strategy.resize(rows);
    for (std::size_t r = 0; r < rows; ++r) sol.row_strategy[r] = std::max(0.0, at(rows, cols + r));
    auto normalize = [](std::vector<double>& v) {
        const double s = std::accumulate(v.begin(), v.end(), 0.0);
        for (double& x : v) x /= s;
    };
    normalize(sol.column_strategy);
    normalize(sol.row_strategy);
    return sol;
}

// ---------------------------------------------------------------------------
// Composite minimax

MinimaxResult composite_beta(const DensityMatrix& rho, const AlternativeSet& s, double epsilon,
                             const MinimaxOptions& options) {
    s.validate();
    if (rho.dim() != s.dim()) throw DimensionError("composite_beta: state and alternative set differ in dimension");
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw ValidationError("composite_beta: epsilon must lie in [0, 1]");
    const std::size_t m = s.generators.size();

    struct Cut {
        TestOperator test;
        std::vector<double> values;  // Tr[T σ_j]
    };
    std::vector<Cut> cuts;
    MinimaxResult out;
    out.hull_level = s.hull_level;
    out.beta = -kInf;

    NPOptions np;
    np.compute_dual = false;
    auto add_cut = [&](const std::vector<double>& lambda) {
        const NPResult r = optimal_beta(rho, s.mixture(lambda), epsilon, np);
        Cut c{r.test, std::vector<double>(m)};
        for (std::size_t j = 0; j < m; ++j) c.values[j] = trace_product(r.test.matrix(), s.generators[j].matrix());
        if (r.beta > out.beta) {
            out.beta = r.beta;
            out.worst_mixture = lambda;
        }
        cuts.push_back(std::move(c));
    };

    for (std::size_t j = 0; j < m; ++j) {
        std::vector<double> e(m, 0.0);
        e[j] = 1.0;
        add_cut(e);
    }
    if (m > 1) add_cut(uniform_weights(m));

    MatrixGameSolution game{};
    double upper = kInf;
    int it = 0;
    for (;; ++it) {
        std::vector<std::vector<double>> payoff(m, std::vector<double>(cuts.size()));
        for (std::size_t k = 0; k < cuts.size(); ++k) {
            for (std::size_t j = 0; j < m; ++j) payoff[j][k] = cuts[k].values[j];
        }
        game = solve_matrix_game(payoff);
        upper = game.value;
        if (upper - out.beta <= options.gap_tol || it >= options.max_iterations) break;
        add_cut(game.row_strategy);
    }

    std::vector<TestOperator> tests;
    std::vector<double> weights;
    for (std::size_t k = 0; k < cuts.size(); ++k) {
        if (game.column_strategy[k] > 0.0) {
            tests.push_back(cuts[k].test);
            weights.push_back(game.column_strategy[k]);
        }
    }
    out.test = TestOperator::mixture(tests, weights);
    out.primal_upper = 0.0;
    for (const auto& g : s.generators) out.primal_upper = std::max(out.primal_upper, trace_product(out.test.matrix(), g.matrix()));
    out.gap = out.primal_upper - out.beta;
    out.iterations = it;
    out.converged = out.gap <= kMinimaxGapTol;
    return out;
}

// ---------------------------------------------------------------------------
// Tensor words

AlternativeSet build_tensor_generators(const AlternativeSet& base, int n, Index max_dim) {
    base.validate();
    if (n < 1) throw ValidationError("build_tensor_generators: n must be positive");
    const Index dim = checked_power(base.dim(), n, max_dim);
    if (dim > max_dim)
        throw OverflowError("build_tensor_generators: dimension " + std::to_string(base.dim()) + "^" + std::to_string(n) +
                            " exceeds " + std::to_string(max_dim));
    const Index words = checked_power(static_cast<Index>(base.generators.size()), n, kMaxWordCount);
    if (words > kMaxWordCount)
        throw OverflowError("build_tensor_generators: more than " + std::to_string(kMaxWordCount) + " words at n = " +
                            std::to_string(n));
    std::vector<DensityMatrix> level = base.generators;
    for (int k = 1; k < n; ++k) {
        std::vector<DensityMatrix> next;
        next.reserve(level.size() * base.generators.size());
        for (const auto& w : level) {
            for (const auto& g : base.generators) next.push_back(tensor_product(w, g));
        }
        level = std::move(next);
    }
    AlternativeSet out;
    out.generators = std::move(level);
    out.label = base.label + "^" + std::to_string(n);
    out.hull_level = n * base.hull_level;
    return out;
}

// ---------------------------------------------------------------------------
// Relative entropy over a hull

namespace {

class HullObjective {
public:
    HullObjective(const DensityMatrix& rho, const AlternativeSet& s) : rho_(rho), s_(s) {
        const EigenSystem es = eig(rho.op());
        const RealVector& l = es.eigenvalues();
        for (Index k = 0; k < l.size(); ++k) {
            if (l[k] > es.noise_floor()) self_ += l[k] * std::log(l[k]);
        }
    }

    double operator()(const std::vector<double>& lambda) const {
        const EigenSystem es = eig(s_.mixture(lambda).op());
        const RealVector rd = es.diagonal_in_basis(rho_.matrix());
        const RealVector& l = es.eigenvalues();
        const double floor = es.noise_floor();
        double cross = 0.0;
        double kernel = 0.0;
        for (Index k = 0; k < l.size(); ++k) {
            if (l[k] > floor)
                cross += rd[k] * std::log(l[k]);
            else
                kernel += rd[k];
        }
        if (kernel > 1e-9) return kInf;
        return std::max(0.0, self_ - cross);
    }

private:
    const DensityMatrix& rho_;
    const AlternativeSet& s_;
    double self_ = 0.0;
};

// λ(t) = t e_j + (1 − t) · (λ without coordinate j, renormalized).
std::vector<double> toward_vertex(const std::vector<double>& lambda, std::size_t j, double t) {
    const std::size_t m = lambda.size();
    std::vector<double> out(m, 0.0);
    const double rest = 1.0 - lambda[j];
    for (std::size_t i = 0; i < m; ++i) {
        if (i == j) continue;
        const double share = rest > 1e-15 ? lambda[i] / rest : 1.0 / static_cast<double>(m - 1);
        out[i] = (1.0 - t) * share;
    }
    out[j] = t;
    return out;
}

}  // namespace

HullDivergence min_relative_entropy_over_hull(const DensityMatrix& rho, const AlternativeSet& s) {
    s.validate();
    if (rho.dim() != s.dim()) throw DimensionError("min_relative_entropy_over_hull: dimension mismatch");
    const std::size_t m = s.generators.size();
    const HullObjective f(rho, s);

    std::vector<double> best_lambda = uniform_weights(m);
    double best = f(best_lambda);
    if (std::isinf(best)) return {kInf, best_lambda};
    for (std::size_t j = 0; j < m; ++j) {
        std::vector<double> e(m, 0.0);
        e[j] = 1.0;
        const double v = f(e);
        if (v < best) {
            best = v;
            best_lambda = e;
        }
    }
    if (m == 1) return {best, best_lambda};

    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int pass = 0; pass < 500; ++pass) {
        const double start = best;
        for (std::size_t j = 0; j < m; ++j) {
            auto g = [&](double t) { return f(toward_vertex(best_lambda, j, t)); };
            double a = 0.0;
            double b = 1.0;
            double c = b - phi * (b - a);
            double d = a + phi * (b - a);
            double gc = g(c);
            double gd = g(d);
            while (b - a > 1e-10) {
                if (gc <= gd) {
                    b = d;
                    d = c;
                    gd = gc;
                    c = b - phi * (b - a);
                    gc = g(c);
                } else {
                    a = c;
                    c = d;
                    gc = gd;
                    d = a + phi * (b - a);
                    gd = g(d);
                }
            }
            for (double t : {0.0, c, d, 1.0, best_lambda[j]}) {
                const auto cand = toward_vertex(best_lambda, j, t);
                const double v = f(cand);
                if (v < best) {
                    best = v;
                    best_lambda = cand;
                }
            }
        }
        if (start - best < 1e-9) break;
    }
    return {best, best_lambda};
}

std::vector<RegularizedPoint> regularized_divergence_estimate(const DensityMatrix& rho, const AlternativeSet& base,
                                                              int n_max, Index max_dim) {
    if (n_max < 1) throw ValidationError("regularized_divergence_estimate: n_max must be positive");
    std::vector<RegularizedPoint> out;
    for (int n = 1; n <= n_max; ++n) {
        const AlternativeSet words = build_tensor_generators(base, n, max_dim);
        const DensityMatrix rho_n = tensor_power(rho, n, max_dim);
        const HullDivergence h = min_relative_entropy_over_hull(rho_n, words);
        out.push_back({n, h.value / n, h.weights});
    }
    return out;
}

}  // namespace steinmix
