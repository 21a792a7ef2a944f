// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include "steinmix/classical_oracle.hpp"
#include "steinmix/composite.hpp"
#include "steinmix/information_spectrum.hpp"
#include "steinmix/mixed_source.hpp"
#include "steinmix/neyman_pearson.hpp"
#include "steinmix/random_states.hpp"
#include "steinmix/verification.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <string>

using namespace steinmix;

namespace {

// Pinned tolerances and limits.
constexpr double kSteinTol = 0.02;
constexpr double kSteinSeconds = 5.0;
constexpr double kPlateauTol = 0.03;
constexpr double kPlateauSeparation = 0.2;
constexpr double kPlateauSeconds = 30.0;
constexpr double kExactTol = 1e-12;
constexpr double kDirectAlphaMax = 0.2;
constexpr double kDirectBoundSlack = 1e-9;
constexpr double kDirectSeconds = 10.0;
constexpr int kBatteryMinTrials = 3000;
constexpr double kBatterySeconds = 120.0;
constexpr double kPinchingSlack = 0.1;
constexpr double kMinimaxGap = 1e-6;
constexpr double kMinimaxGridTol = 1e-5;

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

DensityMatrix diag2(double a) { return DensityMatrix::diagonal(std::vector{a, 1.0 - a}); }

Outcome stein_consistency() {
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<double> rho{0.9, 0.1};
    const std::vector<double> sigma{0.5, 0.5};
    const int n = 2000;
    const double d = relative_entropy(DensityMatrix::diagonal(rho), DensityMatrix::diagonal(sigma));
    const auto r = classical_optimal_beta(ClassicalSource::iid(rho, n), ClassicalSource::iid(sigma, n), 0.5);
    const double rate = -r.beta_log / n;
    const double secs = seconds_since(t0);
    const double err = std::abs(rate - d);
    return {err <= kSteinTol && secs < kSteinSeconds,
            fmt("-(1/n)log beta = %.6f, D = %.6f, |diff| = %.6f <= %.2f; %.2f s < %.0f s", rate, d, err, kSteinTol, secs,
                kSteinSeconds)};
}

Outcome step_plateaus() {
    const auto t0 = std::chrono::steady_clock::now();
    const MixedSourceSpec spec{{{0.4, diag2(0.9)}, {0.6, diag2(0.2)}}};
    const auto sigma = diag2(0.5);
    const int n = 2000;
    const double d1 = relative_entropy(spec.components[0].state, sigma);
    const double d2 = relative_entropy(spec.components[1].state, sigma);
    const double low = mixed_exponent(spec, sigma, 0.1, n);
    const double high = mixed_exponent(spec, sigma, 0.7, n);
    const double secs = seconds_since(t0);
    const bool pass = std::abs(low - d1) <= kPlateauTol && std::abs(high - d2) <= kPlateauTol &&
                      std::abs(high - low) >= kPlateauSeparation && secs < kPlateauSeconds;
    std::printf("       info: step-exponent prediction at eps=0.1 is %.6f, at eps=0.7 is %.6f\n",
                step_exponent(spec, sigma, 0.1), step_exponent(spec, sigma, 0.7));
    return {pass, fmt("measured(eps=0.1) = %.6f vs D1 = %.6f; measured(eps=0.7) = %.6f vs D2 = %.6f; "
                      "plateau difference %.6f >= %.1f; %.2f s < %.0f s",
                      low, d1, high, d2, std::abs(high - low), kPlateauSeparation, secs, kPlateauSeconds)};
}

Outcome exponential_mixture() {
    const auto rows = exponential_mixture_counterexample(1.0, 0.5, {10, 100, 1000});
    bool pass = rows.size() == 3;
    std::string detail;
    for (const auto& r : rows) {
        pass = pass && std::abs(r.mixture_exponent - 0.5) <= kExactTol && std::abs(r.component_exponent - 1.0) <= kExactTol;
        detail += fmt("n=%d: mixture %.15g, component %.15g; ", r.n, r.mixture_exponent, r.component_exponent);
    }
    return {pass, detail + fmt("tolerance %.0e", kExactTol)};
}

Outcome direct_part() {
    const auto t0 = std::chrono::steady_clock::now();
    const MixedSourceSpec spec{{{0.5, diag2(0.99)}, {0.5, diag2(0.01)}}};
    const auto sigma = diag2(0.5);
    const int n = 12;
    const double delta = 0.05;
    const double dmin = std::min(relative_entropy(spec.components[0].state, sigma),
                                 relative_entropy(spec.components[1].state, sigma));
    const double a = 0.8 * dmin;
    const auto r = direct_part_test_iid(spec, sigma, a, delta, n);
    const double secs = seconds_since(t0);
    const double rate = -r.log_beta / n;
    const double bound = a + delta - std::log(2.0) / n - kDirectBoundSlack;
    const double worst = std::max(r.per_component_alpha[0], r.per_component_alpha[1]);
    return {worst <= kDirectAlphaMax && rate >= bound && secs < kDirectSeconds,
            fmt("alphas (%.6f, %.6f) <= %.1f; -(1/n)log beta = %.6f >= %.6f; %.2f s < %.0f s", r.per_component_alpha[0],
                r.per_component_alpha[1], kDirectAlphaMax, rate, bound, secs, kDirectSeconds)};
}

Outcome property_battery() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto reports = run_all(kDefaultVerifySeed);
    const double secs = seconds_since(t0);
    int trials = 0;
    int failures = 0;
    std::set<std::string> ids;
    for (const auto& r : reports) {
        trials += r.trials;
        failures += r.failures;
        ids.insert(r.id);
    }
    const std::set<std::string> required{"lemma34",    "lemma45",      "pinching_ineq", "dpi_pinching",
                                         "np_duality", "oracle_equiv", "minimax_gap"};
    bool covered = true;
    for (const auto& id : required) covered = covered && ids.contains(id);
    return {failures == 0 && trials >= kBatteryMinTrials && covered && secs < kBatterySeconds,
            fmt("%d failures over %d trials (>= %d), %zu properties, all required present: %s; %.2f s < %.0f s",
                failures, trials, kBatteryMinTrials, reports.size(), covered ? "yes" : "no", secs, kBatterySeconds)};
}

Outcome pinching_trend(const std::filesystem::path& csv_path) {
    ComplexMatrix u(2, 2);
    const double th = 0.6;
    u << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
    const DensityMatrix rho(HermitianOperator(u * diag2(0.85).matrix() * u.adjoint()));
    const auto sigma = diag2(0.7);
    const auto grid = default_rate_grid(relative_entropy(rho, sigma));
    std::ofstream csv(csv_path);
    csv << "n,d_orig,d_pinched,d_n,allowed,slack_recorded\n";
    bool pass = true;
    std::string detail;
    for (int n : {4, 6, 8}) {
        const auto c = pinching_reduction_compare(tensor_power(rho, n), tensor_power(sigma, n), 0.3, n, grid);
        const double allowed = std::log(n + 1.0) / n + kPinchingSlack;
        const double diff = std::abs(c.d_orig - c.d_pinched);
        pass = pass && diff <= allowed;
        char line[256];
        std::snprintf(line, sizeof line, "%d,%.17g,%.17g,%d,%.17g,%.17g\n", n, c.d_orig, c.d_pinched, c.d_n, allowed,
                      c.slack);
        csv << line;
        detail += fmt("n=%d: |%.4f - %.4f| = %.4f <= %.4f; ", n, c.d_orig, c.d_pinched, diff, allowed);
    }
    return {pass, detail + "csv " + csv_path.string()};
}

Outcome minimax_exchange() {
    Rng rng(2024);
    NPOptions np;
    np.compute_dual = false;
    np.build_test = false;
    double worst_gap = 0.0;
    double worst_diff = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const auto rho = random_density(2, rng);
        const AlternativeSet s{{random_density(2, rng), random_density(2, rng)}, "random", 1};
        const double eps = 0.05 + 0.9 * uniform01(rng);
        const auto r = composite_beta(rho, s, eps);
        double grid = -1.0;
        for (int k = 0; k <= 10000; ++k) {
            const double l = k / 10000.0;
            grid = std::max(grid, optimal_beta(rho, s.mixture({l, 1.0 - l}), eps, np).beta);
        }
        worst_gap = std::max(worst_gap, r.gap);
        worst_diff = std::max(worst_diff, std::abs(r.beta - grid));
    }
    return {worst_gap <= kMinimaxGap && worst_diff <= kMinimaxGridTol,
            fmt("worst gap %.3e <= %.0e; worst |beta - grid| %.3e <= %.0e over 20 instances", worst_gap, kMinimaxGap,
                worst_diff, kMinimaxGridTol)};
}

}  // namespace

int main(int argc, char** argv) {
    const std::filesystem::path out_dir = argc > 1 ? argv[1] : ".";
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"1 stein consistency", stein_consistency},
        {"2 step-function plateaus", step_plateaus},
        {"3 exponential-mixture counterexample", exponential_mixture},
        {"4 direct-part construction", direct_part},
        {"5 property battery", property_battery},
        {"6 pinching reduction trend", [&] { return pinching_trend(out_dir / "acceptance_pinching.csv"); }},
        {"7 minimax exchange", minimax_exchange},
    };
    int failed = 0;
    for (const auto& [name, check] : criteria) {
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.pass) ++failed;
        std::printf("%s criterion %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
