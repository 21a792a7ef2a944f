#include <doctest.h>

#include "steinmix/classical_oracle.hpp"
#include "steinmix/errors.hpp"
#include "steinmix/mixed_source.hpp"
#include "steinmix/neyman_pearson.hpp"
#include "steinmix/random_states.hpp"

#include <cmath>

using namespace steinmix;

namespace {

DensityMatrix diag2(double a) { return DensityMatrix::diagonal(std::vector{a, 1.0 - a}); }

MixedSourceSpec two(double p, DensityMatrix a, DensityMatrix b) {
    return MixedSourceSpec{{{p, std::move(a)}, {1.0 - p, std::move(b)}}};
}

// sup{R : Σ_{d_i ≤ R} p_i ≤ ε}. The mass is a right-continuous step function, so
// the sup is the least d_k whose mass exceeds ε (or +∞ when none does).
double enumerate_step(const std::vector<double>& d, const std::vector<double>& p, double eps) {
    double best = INFINITY;
    for (double r : d) {
        double mass = 0.0;
        for (std::size_t i = 0; i < d.size(); ++i) {
            if (d[i] <= r) mass += p[i];
        }
        if (mass > eps + 1e-12) best = std::min(best, r);
    }
    return best;
}

}  // namespace

TEST_CASE("mixed source validation and JSON") {
    CHECK_THROWS_AS(MixedSourceSpec{}.validate(), ValidationError);
    CHECK_THROWS_AS(two(0.0, diag2(0.5), diag2(0.2)).validate(), ValidationError);
    CHECK_THROWS_AS((MixedSourceSpec{{{0.5, diag2(0.5)}, {0.6, diag2(0.2)}}}.validate()), ValidationError);
    CHECK_THROWS_AS((MixedSourceSpec{{{0.5, diag2(0.5)}, {0.5, DensityMatrix::maximally_mixed(3)}}}.validate()),
                    DimensionError);

    const auto spec = two(0.3, diag2(0.9), diag2(0.2));
    const auto back = mixed_source_from_json(to_json(spec));
    REQUIRE(back.components.size() == 2);
    CHECK(back.components[0].p == 0.3);
    CHECK(max_abs(back.components[1].state.matrix() - spec.components[1].state.matrix()) == 0.0);
    CHECK_THROWS_AS(mixed_source_from_json(Json{{"components", 3}}), ValidationError);

    CHECK_FALSE(spec.size_warning(100).has_value());
    CHECK(spec.size_warning(5).has_value());
}

TEST_CASE("mixed state construction") {
    Rng rng(3);
    const auto r = random_density(2, rng);
    CHECK(max_abs(mixed_state(MixedSourceSpec{{{1.0, r}}}, 3).matrix() - tensor_power(r, 3).matrix()) <= 1e-14);

    const auto e0 = DensityMatrix::diagonal(std::vector{1.0, 0.0});
    const auto e1 = DensityMatrix::diagonal(std::vector{0.0, 1.0});
    const auto avg = mixed_state(two(0.5, e0, e1), 1);
    CHECK(avg.matrix()(0, 0).real() == 0.5);
    CHECK(avg.matrix()(1, 1).real() == 0.5);

    const auto a = diag2(0.9);
    const auto b = diag2(0.2);
    const auto m = mixed_state(two(0.3, a, b), 2);
    const ComplexMatrix expected = 0.3 * kron(a.matrix(), a.matrix()) + 0.7 * kron(b.matrix(), b.matrix());
    CHECK(max_abs(m.matrix() - expected) <= 1e-15);
    CHECK(std::abs(m.op().trace() - 1.0) <= 1e-9);

    // Dense path agrees with the explicit expansion too.
    const auto q = random_density(2, rng);
    const auto dense = mixed_state(two(0.4, r, q), 2);
    const ComplexMatrix expect2 = 0.4 * kron(r.matrix(), r.matrix()) + 0.6 * kron(q.matrix(), q.matrix());
    CHECK(max_abs(dense.matrix() - expect2) <= 1e-14);

    CHECK_THROWS_AS(mixed_state(two(0.5, a, b), 13), OverflowError);
}

TEST_CASE("step exponent examples") {
    const auto f = step_function({0.2, 0.5}, {0.3, 0.7});
    CHECK(f.evaluate(0.3) == 0.5);
    CHECK(f.evaluate(0.29) == 0.2);
    CHECK(f.evaluate(0.0) == 0.2);
    CHECK(f.evaluate(0.99) == 0.5);
    CHECK_THROWS_AS(f.evaluate(1.0), ValidationError);
    CHECK_THROWS_AS(f.evaluate(-0.1), ValidationError);

    // ε = p gives d₂ for any p.
    for (double p : {0.1, 0.25, 0.6}) CHECK(step_function({0.1, 0.7}, {p, 1.0 - p}).evaluate(p) == 0.7);

    // Infinite divergences only appear once every finite component is excluded.
    const auto g = step_function({0.3, INFINITY}, {0.4, 0.6});
    CHECK(g.evaluate(0.1) == 0.3);
    CHECK(std::isinf(g.evaluate(0.5)));

    const auto spec = two(0.3, diag2(0.9), diag2(0.6));
    const auto sigma = diag2(0.5);
    const double d1 = relative_entropy(spec.components[0].state, sigma);
    const double d2 = relative_entropy(spec.components[1].state, sigma);
    CHECK(step_exponent(spec, sigma, 0.0) == doctest::Approx(std::min(d1, d2)).epsilon(1e-15));
}

TEST_CASE("step exponent against literal enumeration") {
    Rng rng(41);
    for (int trial = 0; trial < 300; ++trial) {
        const int k = 1 + static_cast<int>(uniform01(rng) * 5);
        std::vector<double> d;
        std::vector<double> p;
        double total = 0.0;
        for (int i = 0; i < k; ++i) {
            // Coarse values so ties occur.
            d.push_back(std::floor(uniform01(rng) * 4) / 4);
            p.push_back(0.05 + uniform01(rng));
            total += p.back();
        }
        for (auto& w : p) w /= total;
        const auto f = step_function(d, p);
        double prev = -INFINITY;
        for (int e = 0; e < 20; ++e) {
            const double eps = e / 20.0;
            const double v = f.evaluate(eps);
            CHECK(v == enumerate_step(d, p, eps));
            CHECK(v >= prev);
            prev = v;
        }
        for (std::size_t i = 1; i < f.thresholds.size(); ++i) {
            CHECK(f.thresholds[i].d > f.thresholds[i - 1].d);
            CHECK(f.thresholds[i].cumulative_weight >= f.thresholds[i - 1].cumulative_weight);
        }
        CHECK(f.thresholds.back().cumulative_weight == 1.0);

        // Permutation invariance.
        std::vector<double> rd(d.rbegin(), d.rend());
        std::vector<double> rp(p.rbegin(), p.rend());
        const auto g = step_function(rd, rp);
        for (int e = 0; e < 20; ++e) CHECK(g.evaluate(e / 20.0) == f.evaluate(e / 20.0));
    }
}

TEST_CASE("merging duplicate components") {
    const auto a = diag2(0.8);
    const auto b = diag2(0.3);
    const auto sigma = diag2(0.55);
    const MixedSourceSpec split{{{0.2, a}, {0.3, b}, {0.5, a}}};
    const MixedSourceSpec merged{{{0.7, a}, {0.3, b}}};
    for (double eps : {0.0, 0.2, 0.3, 0.5, 0.69, 0.7, 0.9}) {
        CHECK(std::abs(step_exponent(split, sigma, eps) - step_exponent(merged, sigma, eps)) <= 1e-12);
    }
}

TEST_CASE("worst component exponent") {
    const auto a = diag2(0.9);
    const auto b = diag2(0.65);
    const auto sigma = diag2(0.4);
    const AlternativeSet s{{sigma}, "s", 1};
    const auto w = worst_component_exponent(two(0.5, a, b), s, 2);
    const double d1 = relative_entropy(a, sigma);
    const double d2 = relative_entropy(b, sigma);
    CHECK(w.value == doctest::Approx(std::min(d1, d2)).epsilon(1e-10));
    CHECK(w.argmin_index == (d1 < d2 ? 0 : 1));
    CHECK(w.series.size() == 2);

    const auto zero = worst_component_exponent(two(0.5, a, sigma), s, 2);
    CHECK(zero.value <= 1e-12);

    const auto e0 = DensityMatrix::diagonal(std::vector{1.0, 0.0});
    const auto e1 = DensityMatrix::diagonal(std::vector{0.0, 1.0});
    const auto inf = worst_component_exponent(two(0.5, e0, e1), AlternativeSet{{e1}, "o", 1}, 1);
    CHECK(inf.series[0].infinite);
    CHECK(inf.argmin_index == 1);
}

TEST_CASE("mixed exponent routes agree") {
    const auto spec = two(0.3, diag2(0.85), diag2(0.6));
    const auto sigma = diag2(0.35);
    JumpDemoOptions quantum;
    quantum.prefer_classical = false;
    for (double eps : {0.1, 0.3, 0.6}) {
        for (int n : {1, 4, 7}) {
            CHECK(std::abs(mixed_exponent(spec, sigma, eps, n) - mixed_exponent(spec, sigma, eps, n, quantum)) <= 1e-8);
        }
    }
}

TEST_CASE("jump demo") {
    const auto spec = two(0.3, diag2(0.7), diag2(0.95));
    const auto sigma = diag2(0.4);
    const double d1 = relative_entropy(spec.components[0].state, sigma);
    const double d2 = relative_entropy(spec.components[1].state, sigma);
    REQUIRE(d1 < d2);
    const auto rows = jump_demo(spec, sigma, {0.0, 0.1, 0.3, 0.6}, 400);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].predicted_exponent == d1);
    CHECK(rows[2].predicted_exponent == d2);
    CHECK(rows[3].predicted_exponent == d2);
    for (const auto& r : rows) {
        CHECK(r.n == 400);
        CHECK(std::isfinite(r.measured_exponent));
    }
    // Measured exponents never decrease as the budget grows.
    for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].measured_exponent >= rows[i - 1].measured_exponent - 1e-12);

    CHECK_THROWS_AS(jump_demo(two(0.3, diag2(0.95), diag2(0.7)), sigma, {0.1}, 10), ValidationError);
    CHECK_THROWS_AS(jump_demo(spec, sigma, {}, 10), ValidationError);
}
