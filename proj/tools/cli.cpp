#include "cli.hpp"

#include "steinmix/classical_oracle.hpp"
#include "steinmix/composite.hpp"
#include "steinmix/errors.hpp"
#include "steinmix/information_spectrum.hpp"
#include "steinmix/matrix_json.hpp"
#include "steinmix/mixed_source.hpp"
#include "steinmix/neyman_pearson.hpp"
#include "steinmix/verification.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <optional>

namespace steinmix::cli {

namespace fs = std::filesystem;

namespace {

constexpr double kCommutingTol = 1e-9;

struct Context {
    fs::path out_dir;
    fs::path config_dir;
    std::uint64_t seed = kDefaultVerifySeed;
    bool timestamp = true;
    std::ostream& out;
    std::ostream& err;
};

// ---------------------------------------------------------------------------
// Config access

const Json& need(const Json& cfg, const std::string& key) {
    if (!cfg.is_object() || !cfg.contains(key)) throw ValidationError("config: missing \"" + key + "\"");
    return cfg.at(key);
}

double need_number(const Json& cfg, const std::string& key) {
    const Json& v = need(cfg, key);
    if (!v.is_number()) throw ValidationError("config: \"" + key + "\" must be a number");
    return v.get<double>();
}

int need_positive_int(const Json& cfg, const std::string& key) {
    const Json& v = need(cfg, key);
    if (!v.is_number_integer() || v.get<long long>() < 1 || v.get<long long>() > 1'000'000'000)
        throw ValidationError("config: \"" + key + "\" must be a positive integer");
    return v.get<int>();
}

Index max_dim_of(const Json& cfg) {
    if (!cfg.contains("max_dim")) return kDefaultMaxDim;
    return need_positive_int(cfg, "max_dim");
}

std::vector<double> number_list(const Json& cfg, const std::string& key) {
    const Json& v = need(cfg, key);
    if (!v.is_array() || v.empty()) throw ValidationError("config: \"" + key + "\" must be a nonempty list of numbers");
    std::vector<double> out;
    for (const auto& x : v) {
        if (!x.is_number()) throw ValidationError("config: \"" + key + "\" must be a nonempty list of numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

std::vector<double> epsilon_list(const Json& cfg, const std::string& key) {
    auto eps = number_list(cfg, key);
    for (double e : eps) {
        if (!(e >= 0.0 && e <= 1.0)) throw ValidationError("config: every entry of \"" + key + "\" must lie in [0, 1]");
    }
    return eps;
}

std::vector<int> int_list(const Json& cfg, const std::string& key) {
    const Json& v = need(cfg, key);
    if (!v.is_array() || v.empty()) throw ValidationError("config: \"" + key + "\" must be a nonempty list of integers");
    std::vector<int> out;
    for (const auto& x : v) {
        if (!x.is_number_integer() || x.get<long long>() < 1 || x.get<long long>() > 1'000'000'000)
            throw ValidationError("config: \"" + key + "\" entries must be positive integers");
        out.push_back(x.get<int>());
    }
    return out;
}

/// Inline matrix JSON, or a path string resolved against the config directory.
Json resolve(const Json& v, const Context& ctx) {
    if (v.is_string()) return read_json_file(ctx.config_dir / v.get<std::string>());
    return v;
}

DensityMatrix state_of(const Json& cfg, const std::string& key, const Context& ctx) {
    try {
        return density_from_json(resolve(need(cfg, key), ctx));
    } catch (const ValidationError& e) {
        throw ValidationError("config: \"" + key + "\": " + e.what());
    }
}

MixedSourceSpec mixed_of(const Json& cfg, const std::string& key, const Context& ctx) {
    Json j = resolve(need(cfg, key), ctx);
    if (j.is_object() && j.contains("components") && j["components"].is_array()) {
        for (auto& c : j["components"]) {
            if (c.is_object() && c.contains("state")) c["state"] = resolve(c["state"], ctx);
        }
    }
    return mixed_source_from_json(j);
}

AlternativeSet alternatives_of(const Json& cfg, const std::string& key, const Context& ctx) {
    Json j = resolve(need(cfg, key), ctx);
    if (j.is_object() && j.contains("generators") && j["generators"].is_array()) {
        for (auto& g : j["generators"]) g = resolve(g, ctx);
    }
    return alternative_set_from_json(j);
}

// ---------------------------------------------------------------------------
// Output

std::string fmt(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_atomic(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw ValidationError("cannot write " + tmp.string());
        f << content;
        if (!f.flush()) throw ValidationError("cannot write " + tmp.string());
    }
    fs::rename(tmp, path);
}

class Csv {
public:
    explicit Csv(std::vector<std::string> header) : header_(std::move(header)) {}

    void row(const std::vector<std::string>& cells) {
        if (cells.size() != header_.size()) throw std::logic_error("csv: row width mismatch");
        rows_.push_back(cells);
    }

    void write(const std::string& name, const Context& ctx) const {
        std::string s;
        if (ctx.timestamp) s += "# generated " + utc_now() + "\n";
        s += join(header_);
        for (const auto& r : rows_) s += join(r);
        const fs::path path = ctx.out_dir / name;
        write_atomic(path, s);
        ctx.out << "wrote " << path.string() << "\n";
    }

private:
    static std::string join(const std::vector<std::string>& cells) {
        std::string s;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) s += ',';
            s += cells[i];
        }
        return s + "\n";
    }

    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

void write_json(const std::string& name, const Json& j, const Context& ctx) {
    const fs::path path = ctx.out_dir / name;
    write_atomic(path, j.dump(2) + "\n");
    ctx.out << "wrote " << path.string() << "\n";
}

Json np_record(double eps, const NPResult& r, bool include_test) {
    Json j{{"epsilon", eps},
           {"beta", r.beta},
           {"threshold_t", extended_real_to_json(r.threshold_t)},
           {"gamma", r.gamma},
           {"alpha_achieved", r.alpha_achieved},
           {"dual_value", r.dual_value},
           {"dual_mu", extended_real_to_json(r.dual_mu)},
           {"iterations", r.iterations},
           {"residual", r.residual}};
    if (include_test) j["test"] = to_json(r.test);
    return j;
}

// ---------------------------------------------------------------------------
// Subcommands

int cmd_np(const Json& cfg, const Context& ctx) {
    const auto rho = state_of(cfg, "rho", ctx);
    const auto sigma = state_of(cfg, "sigma", ctx);
    if (rho.dim() != sigma.dim()) throw DimensionError("np: rho and sigma differ in dimension");
    const auto eps = epsilon_list(cfg, "epsilons");
    const bool include_test = cfg.value("include_test", false);

    Json records = Json::array();
    Csv csv({"epsilon", "beta", "threshold_t", "gamma", "alpha_achieved", "dual_value", "residual"});
    for (double e : eps) {
        const auto r = optimal_beta(rho, sigma, e);
        records.push_back(np_record(e, r, include_test));
        csv.row({fmt(e), fmt(r.beta), fmt(r.threshold_t), fmt(r.gamma), fmt(r.alpha_achieved), fmt(r.dual_value),
                 fmt(r.residual)});
    }
    write_json("np.json", records, ctx);
    csv.write("np.csv", ctx);
    return kExitOk;
}

struct SweepSource {
    std::optional<DensityMatrix> rho;
    std::optional<MixedSourceSpec> mixed;
    DensityMatrix sigma;

    Index dim() const { return sigma.dim(); }

    // Classical route needs a joint eigenbasis: a commuting pair, or a mixed
    // source with every state diagonal.
    bool classical_available() const {
        if (rho) return commutator_norm(rho->matrix(), sigma.matrix()) <= kCommutingTol;
        return mixed->all_diagonal() && sigma.op().is_diagonal();
    }

    double divergence() const {
        if (rho) return relative_entropy(*rho, sigma);
        double worst = 0.0;
        for (const auto& c : mixed->components) worst = std::max(worst, relative_entropy(c.state, sigma));
        return worst;
    }

    DensityMatrix state_n(int n, Index max_dim) const {
        return rho ? tensor_power(*rho, n, max_dim) : mixed_state(*mixed, n, max_dim);
    }

    std::pair<ClassicalSource, ClassicalSource> classical(int n) const {
        if (rho) {
            const auto q = quantize_commuting(*rho, sigma);
            return {q.p.at_blocklength(n), q.q.at_blocklength(n)};
        }
        std::vector<double> w;
        std::vector<std::vector<double>> laws;
        for (const auto& c : mixed->components) {
            w.push_back(c.p);
            const RealVector d = c.state.matrix().diagonal().real();
            laws.emplace_back(d.data(), d.data() + d.size());
        }
        const RealVector s = sigma.matrix().diagonal().real();
        return {ClassicalSource::mixture(w, laws, n), ClassicalSource::iid(std::vector<double>(s.data(), s.data() + s.size()), n)};
    }
};

int largest_feasible_n(Index dim, Index max_dim) {
    int n = 0;
    while (checked_power(dim, n + 1, max_dim) <= max_dim) ++n;
    return n;
}

int cmd_sweep(const Json& cfg, const Context& ctx) {
    const bool has_rho = cfg.is_object() && cfg.contains("rho");
    const bool has_mixed = cfg.is_object() && cfg.contains("mixed");
    if (has_rho == has_mixed) throw ValidationError("config: sweep needs exactly one of \"rho\" and \"mixed\"");
    SweepSource src{has_rho ? std::optional(state_of(cfg, "rho", ctx)) : std::nullopt,
                    has_mixed ? std::optional(mixed_of(cfg, "mixed", ctx)) : std::nullopt, state_of(cfg, "sigma", ctx)};
    const Index input_dim = has_rho ? src.rho->dim() : src.mixed->dim();
    if (input_dim != src.dim()) throw DimensionError("sweep: source and sigma differ in dimension");
    const double eps = need_number(cfg, "epsilon");
    if (!(eps >= 0.0 && eps <= 1.0)) throw ValidationError("config: \"epsilon\" must lie in [0, 1]");
    const auto ns = int_list(cfg, "n_values");
    const Index max_dim = max_dim_of(cfg);
    const auto grid = cfg.contains("rate_grid") ? number_list(cfg, "rate_grid") : default_rate_grid(src.divergence());
    std::optional<std::vector<double>> sweep_rates;
    if (cfg.contains("sweep_rates")) sweep_rates = number_list(cfg, "sweep_rates");

    const bool classical = src.classical_available();
    for (int n : ns) {
        if (checked_power(src.dim(), n, max_dim) > max_dim && !classical)
            throw OverflowError("sweep: non-commuting inputs need dimension " + std::to_string(src.dim()) + "^" +
                                std::to_string(n) + " above max_dim " + std::to_string(max_dim) +
                                "; largest feasible n is " + std::to_string(largest_feasible_n(src.dim(), max_dim)));
    }
    if (src.mixed) {
        for (int n : ns) {
            if (auto w = src.mixed->size_warning(n)) ctx.err << "warning: " << *w << "\n";
        }
    }

    Csv csv({"n", "route", "measured_exponent", "underline_d"});
    Csv rates({"n", "a", "alpha", "log_beta_per_n"});
    for (int n : ns) {
        if (checked_power(src.dim(), n, max_dim) <= max_dim) {
            const auto rn = src.state_n(n, max_dim);
            const auto sn = tensor_power(src.sigma, n, max_dim);
            NPOptions np;
            np.compute_dual = false;
            np.build_test = false;
            const double beta = optimal_beta(rn, sn, eps, np).beta;
            const double measured = beta > 0.0 ? -std::log(beta) / n : INFINITY;
            const auto d = underline_d_estimate(rn, sn, eps, n, grid);
            csv.row({std::to_string(n), "quantum", fmt(measured), d.feasible ? fmt(d.estimate) : "infeasible"});
            if (sweep_rates) {
                const auto s = rate_sweep(rn, sn, n, *sweep_rates);
                for (std::size_t k = 0; k < s.rates.size(); ++k)
                    rates.row({std::to_string(n), fmt(s.rates[k]), fmt(s.type1[k]), fmt(s.type2_log[k])});
            }
        } else {
            const auto [p, q] = src.classical(n);
            const double measured = -classical_optimal_beta(p, q, eps).beta_log / n;
            const double d = eps < 1.0 ? spectrum_inf_rate(spectrum(p, q), eps) : INFINITY;
            csv.row({std::to_string(n), "classical", fmt(measured), fmt(d)});
        }
    }
    csv.write("sweep.csv", ctx);
    if (sweep_rates) rates.write("rate_sweep.csv", ctx);
    return kExitOk;
}

std::vector<JumpRow> mixed_rows(const MixedSourceSpec& spec, const DensityMatrix& sigma, const std::vector<double>& eps,
                                int n, Index max_dim) {
    const auto step = step_function(spec, sigma);
    JumpDemoOptions opts;
    opts.max_dim = max_dim;
    std::vector<JumpRow> rows;
    for (double e : eps) rows.push_back({e, n, mixed_exponent(spec, sigma, e, n, opts), step.evaluate(e)});
    return rows;
}

void write_jump_rows(const std::vector<JumpRow>& rows, const std::string& name, const Context& ctx) {
    Csv csv({"epsilon", "n", "measured_exponent", "predicted_exponent"});
    for (const auto& r : rows) csv.row({fmt(r.epsilon), std::to_string(r.n), fmt(r.measured_exponent), fmt(r.predicted_exponent)});
    csv.write(name, ctx);
}

void check_step_epsilons(const std::vector<double>& eps) {
    for (double e : eps) {
        if (e >= 1.0) throw ValidationError("config: epsilons must lie in [0, 1) for the step exponent");
    }
}

int cmd_mixed(const Json& cfg, const Context& ctx) {
    const auto spec = mixed_of(cfg, "mixed", ctx);
    const auto sigma = state_of(cfg, "sigma", ctx);
    if (spec.dim() != sigma.dim()) throw DimensionError("mixed: source and sigma differ in dimension");
    const auto eps = epsilon_list(cfg, "epsilons");
    check_step_epsilons(eps);
    const int n = need_positive_int(cfg, "n");
    const Index max_dim = max_dim_of(cfg);
    if (!(spec.all_diagonal() && sigma.op().is_diagonal()) && checked_power(spec.dim(), n, max_dim) > max_dim)
        throw OverflowError("mixed: non-diagonal inputs at n = " + std::to_string(n) + " exceed max_dim " +
                            std::to_string(max_dim) + "; largest feasible n is " +
                            std::to_string(largest_feasible_n(spec.dim(), max_dim)));
    if (auto w = spec.size_warning(n)) ctx.err << "warning: " << *w << "\n";

    write_jump_rows(mixed_rows(spec, sigma, eps, n, max_dim), "mixed.csv", ctx);
    Csv steps({"d", "cumulative_weight"});
    for (const auto& t : step_function(spec, sigma).thresholds) steps.row({fmt(t.d), fmt(t.cumulative_weight)});
    steps.write("step_function.csv", ctx);
    return kExitOk;
}

int cmd_counterexamples(const Json& cfg, const Context& ctx) {
    const bool has_exp = cfg.is_object() && cfg.contains("exponential");
    const bool has_two = cfg.is_object() && cfg.contains("two_component");
    if (!has_exp && !has_two)
        throw ValidationError("config: counterexamples needs \"exponential\" and/or \"two_component\"");

    std::optional<std::vector<ExponentialMixtureRow>> exp_rows;
    if (has_exp) {
        const Json& e = cfg["exponential"];
        const double d = need_number(e, "d");
        const double r = need_number(e, "R");
        exp_rows = exponential_mixture_counterexample(d, r, int_list(e, "n_values"));
    }
    std::optional<MixedSourceSpec> spec;
    std::optional<DensityMatrix> sigma;
    std::vector<double> eps;
    int n = 0;
    if (has_two) {
        const Json& t = cfg["two_component"];
        spec = mixed_of(t, "mixed", ctx);
        sigma = state_of(t, "sigma", ctx);
        eps = epsilon_list(t, "epsilons");
        check_step_epsilons(eps);
        n = need_positive_int(t, "n");
        if (!(spec->all_diagonal() && sigma->op().is_diagonal()) && checked_power(spec->dim(), n, kDefaultMaxDim) > kDefaultMaxDim)
            throw OverflowError("counterexamples: non-diagonal inputs at n = " + std::to_string(n) +
                                " exceed max_dim " + std::to_string(kDefaultMaxDim));
    }

    if (exp_rows) {
        Csv csv({"n", "log_component_count", "component_exponent", "mixture_exponent", "gap", "remainder_mass",
                 "component_proxy", "mixture_proxy"});
        for (const auto& r : *exp_rows)
            csv.row({std::to_string(r.n), fmt(r.log_component_count), fmt(r.component_exponent), fmt(r.mixture_exponent),
                     fmt(r.gap), fmt(r.remainder_mass), fmt(r.component_proxy), fmt(r.mixture_proxy)});
        csv.write("exponential_mixture.csv", ctx);
    }
    if (spec) write_jump_rows(jump_demo(*spec, *sigma, eps, n), "two_component.csv", ctx);
    return kExitOk;
}

int cmd_composite(const Json& cfg, const Context& ctx) {
    auto rho = state_of(cfg, "rho", ctx);
    auto set = alternatives_of(cfg, "alternatives", ctx);
    const auto eps = epsilon_list(cfg, "epsilons");
    if (cfg.contains("tensor_level")) {
        const int level = need_positive_int(cfg, "tensor_level");
        const Index max_dim = max_dim_of(cfg);
        set = build_tensor_generators(set, level, max_dim);
        rho = tensor_power(rho, level, max_dim);
    }
    if (rho.dim() != set.dim()) throw DimensionError("composite: rho and the alternatives differ in dimension");
    if (!set.contains_full_rank()) ctx.err << "warning: no generator of \"" << set.label << "\" is full rank\n";

    Csv csv({"epsilon", "beta", "primal_upper", "gap", "converged", "iterations", "hull_level"});
    Json records = Json::array();
    for (double e : eps) {
        const auto r = composite_beta(rho, set, e);
        if (!r.converged) ctx.err << "warning: minimax did not converge at epsilon " << fmt(e) << ", gap " << fmt(r.gap) << "\n";
        csv.row({fmt(e), fmt(r.beta), fmt(r.primal_upper), fmt(r.gap), r.converged ? "1" : "0",
                 std::to_string(r.iterations), std::to_string(r.hull_level)});
        records.push_back(Json{{"epsilon", e},
                               {"beta", r.beta},
                               {"primal_upper", r.primal_upper},
                               {"gap", r.gap},
                               {"converged", r.converged},
                               {"iterations", r.iterations},
                               {"hull_level", r.hull_level},
                               {"worst_mixture", r.worst_mixture}});
    }
    csv.write("composite.csv", ctx);
    write_json("composite.json", records, ctx);
    return kExitOk;
}

int cmd_regularized(const Json& cfg, const Context& ctx) {
    const bool has_rho = cfg.is_object() && cfg.contains("rho");
    const bool has_mixed = cfg.is_object() && cfg.contains("mixed");
    if (has_rho == has_mixed) throw ValidationError("config: regularized needs exactly one of \"rho\" and \"mixed\"");
    const auto set = alternatives_of(cfg, "alternatives", ctx);
    const int n_max = need_positive_int(cfg, "n_max");
    const Index max_dim = max_dim_of(cfg);

    if (has_rho) {
        const auto rho = state_of(cfg, "rho", ctx);
        const auto series = regularized_divergence_estimate(rho, set, n_max, max_dim);
        Csv csv({"n", "value_per_n"});
        for (const auto& p : series) csv.row({std::to_string(p.n), fmt(p.value_per_n)});
        csv.write("regularized.csv", ctx);
        return kExitOk;
    }
    const auto spec = mixed_of(cfg, "mixed", ctx);
    const auto w = worst_component_exponent(spec, set, n_max, max_dim);
    Csv csv({"component", "n", "value_per_n"});
    Json infinite = Json::array();
    for (std::size_t i = 0; i < w.series.size(); ++i) {
        for (const auto& p : w.series[i].points) csv.row({std::to_string(i), std::to_string(p.n), fmt(p.value_per_n)});
        infinite.push_back(w.series[i].infinite);
    }
    csv.write("worst_component.csv", ctx);
    write_json("worst_component.json",
               Json{{"value", extended_real_to_json(w.value)}, {"argmin_index", w.argmin_index}, {"infinite", infinite}}, ctx);
    return kExitOk;
}

int cmd_verify(const std::optional<std::string>& fault, const Context& ctx) {
    VerifyOptions opts;
    opts.inject_fault = fault;
    const auto reports = run_all(ctx.seed, opts);
    for (const auto& r : reports) {
        ctx.out << (r.failures == 0 ? "PASS " : "FAIL ") << r.id << " trials=" << r.trials << " failures=" << r.failures
                << " worst_margin=" << fmt(r.worst_margin) << "\n";
    }
    write_json("verify_report.json", report_json(reports, ctx.seed), ctx);
    return all_passed(reports) ? kExitOk : kExitVerifyFailed;
}

std::uint64_t parse_seed(const std::string& s) {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
        throw ValidationError("--seed: expected a nonnegative integer, got '" + s + "'");
    try {
        return std::stoull(s);
    } catch (const std::out_of_range&) {
        throw ValidationError("--seed: value out of range: '" + s + "'");
    }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Finite-blocklength hypothesis testing for mixed quantum sources", "steinmix"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::string out_dir = ".";
    std::string seed_text;
    bool no_timestamp = false;
    std::optional<std::string> fault;
    app.add_option("--config", config_path, "JSON config file");
    app.add_option("--out-dir", out_dir, "Directory for CSV/JSON outputs");
    app.add_option("--seed", seed_text, "Random seed (verify)");
    app.add_flag("--no-timestamp", no_timestamp, "Omit the timestamp header line from CSV files");

    const std::vector<std::pair<std::string, std::string>> commands{
        {"np", "Optimal Neyman-Pearson type-II error over an epsilon list"},
        {"sweep", "Exponent and spectral-rate estimates over blocklengths"},
        {"mixed", "Mixed-source exponents against the step-exponent prediction"},
        {"counterexamples", "Exponential-mixture and two-component counterexample tables"},
        {"composite", "Minimax type-II error against a convex hull of alternatives"},
        {"regularized", "Per-copy minimized relative entropy over tensor-word hulls"},
        {"verify", "Randomized property battery"},
    };
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        if (name == "verify") sub->add_option("--inject-fault", fault, "Corrupt the tolerance of this property");
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    }

    const std::string cmd = app.get_subcommands().front()->get_name();
    try {
        Context ctx{out_dir, fs::current_path(), kDefaultVerifySeed, !no_timestamp, out, err};
        if (!seed_text.empty()) ctx.seed = parse_seed(seed_text);
        if (cmd == "verify") return cmd_verify(fault, ctx);

        if (config_path.empty()) throw ValidationError(cmd + ": --config is required");
        const Json cfg = read_json_file(config_path);
        if (!cfg.is_object()) throw ValidationError("config: top level must be a JSON object");
        ctx.config_dir = fs::absolute(config_path).parent_path();
        if (cmd == "np") return cmd_np(cfg, ctx);
        if (cmd == "sweep") return cmd_sweep(cfg, ctx);
        if (cmd == "mixed") return cmd_mixed(cfg, ctx);
        if (cmd == "counterexamples") return cmd_counterexamples(cfg, ctx);
        if (cmd == "composite") return cmd_composite(cfg, ctx);
        return cmd_regularized(cfg, ctx);
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const Json::exception& e) {
        err << "error: config: " << e.what() << "\n";
        return kExitConfig;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const NumericError& e) {
        err << "numeric error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        err << "numeric error: " << e.what() << "\n";
        return kExitNumeric;
    }
}

}  // namespace steinmix::cli
