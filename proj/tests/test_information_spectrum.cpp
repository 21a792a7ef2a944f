#include <doctest.h>

#include "steinmix/classical_oracle.hpp"
#include "steinmix/errors.hpp"
#include "steinmix/information_spectrum.hpp"
#include "steinmix/neyman_pearson.hpp"
#include "steinmix/random_states.hpp"

#include <cmath>

using namespace steinmix;

namespace {

DensityMatrix diag2(double a) { return DensityMatrix::diagonal(std::vector{a, 1.0 - a}); }

DensityMatrix rotated(double p, double theta) {
    ComplexMatrix u(2, 2);
    u << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
    return DensityMatrix(HermitianOperator(u * diag2(p).matrix() * u.adjoint()));
}

std::vector<double> fine_grid(double top) {
    std::vector<double> g;
    for (int k = 0; k <= 200; ++k) g.push_back(top * k / 200.0);
    return g;
}

}  // namespace

TEST_CASE("spectral test extremes") {
    Rng rng(8);
    const auto rho = random_density(2, rng);
    const auto sigma = random_density(2, rng);
    const auto low = spectral_test(rho, sigma, -50.0, 2);
    CHECK(low.alpha <= 1e-12);
    const auto high = spectral_test(rho, sigma, 50.0, 2);
    CHECK(high.alpha >= 1.0 - 1e-12);
    CHECK(high.beta <= 1e-12);

    const auto r8 = tensor_power(diag2(0.8), 8);
    const auto s8 = tensor_power(diag2(0.4), 8);
    const auto lo = spectral_test(r8, s8, -50.0, 8);
    CHECK(lo.alpha == 0.0);
    CHECK(lo.beta == doctest::Approx(1.0).epsilon(1e-12));
    const auto hi = spectral_test(r8, s8, 50.0, 8);
    CHECK(hi.alpha == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(hi.beta == 0.0);
    CHECK(std::isinf(hi.log_beta));
    CHECK(hi.beta_bound_holds);

    CHECK_THROWS_AS(spectral_test(rho, DensityMatrix::maximally_mixed(3), 0.0, 1), DimensionError);
    CHECK_THROWS_AS(spectral_test(rho, sigma, 0.0, 0), ValidationError);
}

TEST_CASE("diagonal path matches the dense projection") {
    Rng rng(12);
    for (int trial = 0; trial < 20; ++trial) {
        const auto r = random_diagonal_density(4, rng);
        const auto s = random_diagonal_density(4, rng);
        const double a = -1.0 + 2.0 * uniform01(rng);
        const auto fast = spectral_test(r, s, a, 1);
        // Rotating both states by one unitary forces the dense route.
        const auto u = random_unitary(4, rng);
        const auto dense = spectral_test(rotate(r, u), rotate(s, u), a, 1);
        CHECK(fast.alpha == doctest::Approx(dense.alpha).epsilon(1e-10));
        CHECK(fast.beta == doctest::Approx(dense.beta).epsilon(1e-10));
    }
}

TEST_CASE("spectral test beta guarantee and sweeps") {
    Rng rng(21);
    for (int trial = 0; trial < 30; ++trial) {
        const auto rho = random_density(2, rng);
        const auto sigma = random_density(2, rng);
        const int n = 1 + trial % 4;
        const auto rn = tensor_power(rho, n);
        const auto sn = tensor_power(sigma, n);
        const auto sweep = rate_sweep(rn, sn, n, default_rate_grid(relative_entropy(rho, sigma), 41));
        for (std::size_t k = 0; k < sweep.rates.size(); ++k) {
            CHECK(sweep.type1[k] >= 0.0);
            CHECK(sweep.type1[k] <= 1.0);
            CHECK(-sweep.type2_log[k] >= sweep.rates[k] - 1e-12);
            if (k > 0) CHECK(sweep.type1[k] >= sweep.type1[k - 1] - 1e-9);
        }
    }
    // Huge na stays finite in the log domain.
    const auto big = spectral_test(tensor_power(diag2(0.999), 10), tensor_power(diag2(1e-30), 10), 60.0, 10);
    CHECK(big.beta_bound_holds);
    CHECK(big.log_beta <= -600.0);
    CHECK_THROWS_AS(rate_sweep(diag2(0.5), diag2(0.5), 1, {1.0, 0.0}), ValidationError);
}

TEST_CASE("default rate grid") {
    const auto g = default_rate_grid(0.25);
    REQUIRE(g.size() == 101);
    CHECK(g.front() == 0.0);
    CHECK(g.back() == doctest::Approx(0.5));
    CHECK(default_rate_grid(INFINITY).back() == 1.0);
    CHECK(default_rate_grid(0.0).back() == 1.0);
}

TEST_CASE("underline D estimate") {
    // Identical sources.
    const auto rho = tensor_power(rotated(0.8, 0.4), 4);
    const auto eq = underline_d_estimate(rho, rho, 0.3, 4, fine_grid(1.0));
    CHECK(eq.feasible);
    CHECK(eq.estimate <= 1.0 / 200 + 1e-12);

    // Diagonal IID pair against the classical spectrum.
    const std::vector<double> p{0.8, 0.2};
    const std::vector<double> q{0.35, 0.65};
    const int n = 12;
    const auto pn = mixed_state(MixedSourceSpec{{{1.0, DensityMatrix::diagonal(p)}}}, n);
    const auto qn = mixed_state(MixedSourceSpec{{{1.0, DensityMatrix::diagonal(q)}}}, n);
    const double oracle =
        spectrum_inf_rate(spectrum(ClassicalSource::iid(p, n), ClassicalSource::iid(q, n)), 0.5);
    const auto est = underline_d_estimate(pn, qn, 0.5, n, default_rate_grid(classical_relative_entropy(p, q)));
    CHECK(std::abs(est.estimate - oracle) <= 0.05);
    CHECK(est.estimate <= oracle + 1e-12);

    // Tighter ε never yields a larger estimate.
    const auto grid = default_rate_grid(classical_relative_entropy(p, q));
    double prev = -INFINITY;
    for (double eps : {0.01, 0.1, 0.3, 0.5, 0.8}) {
        const double v = underline_d_estimate(pn, qn, eps, n, grid).estimate;
        CHECK(v >= prev - 1e-9);
        prev = v;
    }

    // No feasible grid point.
    const auto none = underline_d_estimate(tensor_power(diag2(0.9), 2), tensor_power(diag2(0.1), 2), 0.0, 2, {3.0, 4.0});
    CHECK_FALSE(none.feasible);
    CHECK(none.estimate == 3.0);
    CHECK_THROWS_AS(underline_d_estimate(rho, rho, 0.3, 4, {}), ValidationError);
}

TEST_CASE("non-commuting underline D series trend") {
    // Lattice effects of order (log-likelihood span)/n dominate at these n, so
    // the pair is kept close.
    const auto rho = rotated(0.6, 0.7);
    const auto sigma = diag2(0.4);
    const auto series = underline_d_series([&](int n) { return tensor_power(rho, n); },
                                           [&](int n) { return tensor_power(sigma, n); }, 0.5, {4, 6, 8, 10},
                                           default_rate_grid(relative_entropy(rho, sigma)));
    REQUIRE(series.estimates.size() == 4);
    for (std::size_t k = 0; k < 4; ++k) CHECK(series.feasible[k]);
    for (std::size_t k = 1; k < 4; ++k) CHECK(series.estimates[k] >= series.estimates[k - 1] - 0.02);
}

TEST_CASE("direct part test") {
    const auto r1 = diag2(0.9);
    const auto r2 = diag2(0.75);
    const auto sigma = diag2(0.35);
    const int n = 10;
    const double delta = 0.05;
    const double a = 0.9 * std::min(relative_entropy(r1, sigma), relative_entropy(r2, sigma));
    const auto sn = tensor_power(sigma, n);

    const MixedSourceSpec pair{{{0.4, r1}, {0.6, r2}}};
    const auto res = direct_part_test(pair, sn, a, delta, n, {true, kDefaultMaxDim});
    CHECK(res.beta_bound_holds);
    CHECK(res.projected_bound_holds);
    REQUIRE(res.per_component_alpha.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) CHECK(res.component_accept[i] <= res.projected_bound[i] + 1e-9);
    CHECK(-std::log(res.beta) / n >= a + delta - std::log(2.0) / n - 1e-12);

    // Dense route agrees with the diagonal route.
    Rng rng(4);
    const auto u = random_unitary(2, rng);
    const MixedSourceSpec rot{{{0.4, rotate(r1, u)}, {0.6, rotate(r2, u)}}};
    const auto dense = direct_part_test_iid(rot, rotate(sigma, u), a, delta, 6);
    const auto diag = direct_part_test_iid(pair, sigma, a, delta, 6);
    CHECK(dense.beta == doctest::Approx(diag.beta).epsilon(1e-9));
    for (std::size_t i = 0; i < 2; ++i)
        CHECK(dense.per_component_alpha[i] == doctest::Approx(diag.per_component_alpha[i]).epsilon(1e-9));
    CHECK(dense.beta_bound_holds);
    CHECK(dense.projected_bound_holds);

    // Single component keeps the range of its own test.
    const MixedSourceSpec single{{{1.0, r1}}};
    const auto one = direct_part_test(single, sn, a, delta, n);
    const auto own = spectral_test(tensor_power(r1, n), sn, a + 2 * delta, n, false);
    CHECK(one.per_component_alpha[0] <= own.alpha + 1e-9);

    // Two identical components give the same test.
    const MixedSourceSpec twin{{{0.5, r1}, {0.5, r1}}};
    const auto tw = direct_part_test(twin, sn, a, delta, n, {true, kDefaultMaxDim});
    const auto on = direct_part_test(single, sn, a, delta, n, {true, kDefaultMaxDim});
    CHECK(max_abs(tw.test->matrix() - on.test->matrix()) == 0.0);

    CHECK_THROWS_AS(direct_part_test_iid(pair, sigma, a, 0.0, n), ValidationError);
    CHECK_THROWS_AS(direct_part_test_iid(pair, sigma, a, delta, 13), OverflowError);
    CHECK_THROWS_AS(direct_part_test(pair, tensor_power(sigma, 3), a, delta, 4), OverflowError);
}

TEST_CASE("direct part test at large diagonal blocklength") {
    const MixedSourceSpec spec{{{0.5, DensityMatrix::diagonal(std::vector{0.7, 0.1, 0.1, 0.1})},
                                {0.5, DensityMatrix::diagonal(std::vector{0.4, 0.4, 0.1, 0.1})}}};
    const auto sigma = DensityMatrix::maximally_mixed(4);
    const auto r = direct_part_test_iid(spec, sigma, 0.1, 0.02, 6);
    CHECK(r.beta_bound_holds);
    CHECK(r.projected_bound_holds);
    CHECK(std::isfinite(r.log_beta));
}

TEST_CASE("converse footprint") {
    Rng rng(30);
    for (int trial = 0; trial < 10; ++trial) {
        const MixedSourceSpec spec{{{0.3, random_diagonal_density(2, rng)}, {0.7, random_diagonal_density(2, rng)}}};
        const auto sigma = random_diagonal_density(2, rng);
        const int n = 4 + trial % 5;
        const auto sn = tensor_power(sigma, n);
        for (double a : {0.05, 0.2, 0.5}) {
            const auto f = converse_footprint(spec, sn, a, 0.1, n);
            CHECK(f.holds);
            REQUIRE(f.allowance.size() == 2);
        }
    }
}

TEST_CASE("pinching reduction comparison") {
    const auto r = tensor_power(diag2(0.8), 6);
    const auto s = tensor_power(diag2(0.3), 6);
    const auto grid = default_rate_grid(relative_entropy(diag2(0.8), diag2(0.3)));
    const auto c = pinching_reduction_compare(r, s, 0.3, 6, grid);
    CHECK(c.d_orig == c.d_pinched);
    CHECK(c.d_n == 7);

    const auto rho = rotated(0.85, 0.6);
    const auto flat = pinching_reduction_compare(tensor_power(rho, 4), DensityMatrix::maximally_mixed(16), 0.3, 4, grid);
    CHECK(flat.d_orig == flat.d_pinched);
    CHECK(flat.d_n == 1);

    const int n = 8;
    const auto sigma = diag2(0.3);
    const auto nc = pinching_reduction_compare(tensor_power(rho, n), tensor_power(sigma, n), 0.3, n,
                                               default_rate_grid(relative_entropy(rho, sigma)));
    CHECK(nc.d_n <= n + 1);
    CHECK(std::abs(nc.d_orig - nc.d_pinched) <= std::log(static_cast<double>(nc.d_n)) / n + 0.1);
    CHECK(nc.slack == doctest::Approx(2.0 / n * std::log(1000.0)));
}
