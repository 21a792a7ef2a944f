#include <doctest.h>

#include "cli.hpp"
#include "steinmix/matrix_json.hpp"
#include "steinmix/neyman_pearson.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

using namespace steinmix;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = STEINMIX_FIXTURE_DIR;

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run_cli(std::vector<std::string> args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("steinmix_cli_" + std::to_string(::getpid())) / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

fs::path write_config(const fs::path& dir, const Json& cfg) {
    const fs::path p = dir / "config.json";
    std::ofstream(p) << cfg.dump();
    return p;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(slurp(p));
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

Json diag(std::vector<double> d) {
    Json re = Json::array();
    for (std::size_t i = 0; i < d.size(); ++i) {
        Json row = Json::array();
        for (std::size_t j = 0; j < d.size(); ++j) row.push_back(i == j ? d[i] : 0.0);
        re.push_back(row);
    }
    return Json{{"dim", d.size()}, {"re", re}};
}

Json rotated_qubit(double p, double theta) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    const double a = p * c * c + (1 - p) * s * s;
    const double b = (p - (1 - p)) * c * s;
    return Json{{"dim", 2}, {"re", {{a, b}, {b, 1 - a}}}};
}

}  // namespace

TEST_CASE("np matches the golden file") {
    const auto dir = scratch("golden");
    const auto r = run_cli({"np", "--config", (kFixtures / "np_config.json").string(), "--out-dir", dir.string(),
                            "--no-timestamp"});
    REQUIRE(r.code == 0);
    CHECK(slurp(dir / "np.csv") == slurp(kFixtures / "np_golden.csv"));

    // ε = 0 row is the overlap of σ with the support of ρ.
    const auto rho = density_from_json(read_json_file(kFixtures / "np_rho.json"));
    const auto sigma = density_from_json(read_json_file(kFixtures / "np_sigma.json"));
    const double overlap = trace_product(support_projection(rho).matrix(), sigma.matrix());
    const auto rows = read_csv(dir / "np.csv");
    CHECK(std::stod(rows[1][1]) == doctest::Approx(overlap).epsilon(1e-12));

    const auto json = read_json_file(dir / "np.json");
    REQUIRE(json.size() == 4);
    CHECK(json[0]["dual_mu"] == "inf");
}

TEST_CASE("np on identical states") {
    const auto dir = scratch("identical");
    const Json s = rotated_qubit(0.8, 0.3);
    const auto cfg = write_config(dir, {{"rho", s}, {"sigma", s}, {"epsilons", {0.25}}});
    REQUIRE(run_cli({"np", "--config", cfg.string(), "--out-dir", dir.string()}).code == 0);
    CHECK(read_json_file(dir / "np.json")[0]["beta"].get<double>() == doctest::Approx(0.75).epsilon(1e-9));
}

TEST_CASE("config errors exit with 2") {
    const auto dir = scratch("errors");
    const fs::path bad = dir / "bad.json";
    std::ofstream(bad) << "{ not json";
    CHECK(run_cli({"np", "--config", bad.string(), "--out-dir", dir.string()}).code == 2);
    CHECK(run_cli({"np", "--out-dir", dir.string()}).code == 2);
    CHECK(run_cli({"np", "--config", (dir / "missing.json").string()}).code == 2);
    CHECK(run_cli({"frobnicate"}).code == 2);
    CHECK(run_cli({}).code == 2);
    CHECK(run_cli({"verify", "--seed", "12x"}).code == 2);

    const auto eps = write_config(dir, {{"rho", diag({0.5, 0.5})}, {"sigma", diag({0.5, 0.5})}, {"epsilons", {1.5}}});
    const auto r = run_cli({"np", "--config", eps.string(), "--out-dir", dir.string()});
    CHECK(r.code == 2);
    CHECK(r.err.find("epsilons") != std::string::npos);

    const auto dims = write_config(dir, {{"rho", diag({0.5, 0.5})}, {"sigma", diag({0.2, 0.3, 0.5})}, {"epsilons", {0.1}}});
    CHECK(run_cli({"np", "--config", dims.string(), "--out-dir", dir.string()}).code == 2);
    CHECK_FALSE(fs::exists(dir / "np.csv"));
}

TEST_CASE("sweep routes commuting inputs to the classical oracle") {
    const auto dir = scratch("sweep");
    const auto rho = diag({0.9, 0.1});
    const auto sigma = diag({0.5, 0.5});
    const auto cfg = write_config(dir, {{"rho", rho}, {"sigma", sigma}, {"epsilon", 0.5}, {"n_values", {4, 100, 2000}}});
    REQUIRE(run_cli({"sweep", "--config", cfg.string(), "--out-dir", dir.string()}).code == 0);
    const auto rows = read_csv(dir / "sweep.csv");
    REQUIRE(rows.size() == 4);
    CHECK(rows[1][1] == "quantum");
    CHECK(rows[3][1] == "classical");
    const double d = relative_entropy(density_from_json(rho), density_from_json(sigma));
    CHECK(std::abs(std::stod(rows[3][2]) - d) <= 0.02);

    const auto nc = write_config(dir, {{"rho", rotated_qubit(0.8, 0.4)}, {"sigma", diag({0.7, 0.3})}, {"epsilon", 0.5},
                                       {"n_values", {2, 20}}});
    const auto r = run_cli({"sweep", "--config", nc.string(), "--out-dir", dir.string()});
    CHECK(r.code == 2);
    CHECK(r.err.find("largest feasible n is 12") != std::string::npos);
}

TEST_CASE("mixed and counterexample tables") {
    const auto dir = scratch("mixed");
    const Json spec{{"components", {{{"p", 0.4}, {"state", diag({0.9, 0.1})}}, {{"p", 0.6}, {"state", diag({0.2, 0.8})}}}}};
    const auto cfg =
        write_config(dir, {{"mixed", spec}, {"sigma", diag({0.5, 0.5})}, {"epsilons", {0.0, 0.1, 0.4, 0.7}}, {"n", 300}});
    REQUIRE(run_cli({"mixed", "--config", cfg.string(), "--out-dir", dir.string()}).code == 0);
    const auto rows = read_csv(dir / "mixed.csv");
    REQUIRE(rows.size() == 5);
    const double d1 = relative_entropy(DensityMatrix::diagonal(std::vector{0.9, 0.1}), DensityMatrix::maximally_mixed(2));
    const double d2 = relative_entropy(DensityMatrix::diagonal(std::vector{0.2, 0.8}), DensityMatrix::maximally_mixed(2));
    CHECK(std::stod(rows[1][3]) == doctest::Approx(std::min(d1, d2)).epsilon(1e-12));
    CHECK(std::stod(rows[3][3]) == doctest::Approx(std::min(d1, d2)).epsilon(1e-12));
    CHECK(std::stod(rows[4][3]) == doctest::Approx(std::max(d1, d2)).epsilon(1e-12));
    CHECK(fs::exists(dir / "step_function.csv"));

    const auto ce = write_config(dir, {{"exponential", {{"d", 1.0}, {"R", 0.5}, {"n_values", {10, 100, 1000}}}}});
    REQUIRE(run_cli({"counterexamples", "--config", ce.string(), "--out-dir", dir.string()}).code == 0);
    const auto table = read_csv(dir / "exponential_mixture.csv");
    REQUIRE(table.size() == 4);
    for (std::size_t i = 1; i < table.size(); ++i) CHECK(std::stod(table[i][4]) == 0.5);

    const auto missing = write_config(dir, {{"exponential", {{"d", 1.0}, {"n_values", {10}}}}});
    CHECK(run_cli({"counterexamples", "--config", missing.string(), "--out-dir", dir.string()}).code == 2);
    const auto inverted = write_config(dir, {{"exponential", {{"d", 0.5}, {"R", 0.5}, {"n_values", {10}}}}});
    CHECK(run_cli({"counterexamples", "--config", inverted.string(), "--out-dir", dir.string()}).code == 2);
    const auto empty = write_config(dir, Json::object());
    CHECK(run_cli({"counterexamples", "--config", empty.string(), "--out-dir", dir.string()}).code == 2);
}

TEST_CASE("composite and regularized") {
    const auto dir = scratch("composite");
    const Json set{{"label", "pair"}, {"generators", {diag({0.5, 0.5}), rotated_qubit(0.8, 1.0)}}};
    const auto cfg = write_config(dir, {{"rho", rotated_qubit(0.9, 0.2)}, {"alternatives", set}, {"epsilons", {0.1, 0.3}}});
    REQUIRE(run_cli({"composite", "--config", cfg.string(), "--out-dir", dir.string()}).code == 0);
    const auto rows = read_csv(dir / "composite.csv");
    REQUIRE(rows.size() == 3);
    CHECK(std::stod(rows[1][3]) <= 1e-6);

    const auto reg = write_config(dir, {{"rho", rotated_qubit(0.9, 0.2)}, {"alternatives", set}, {"n_max", 2}});
    REQUIRE(run_cli({"regularized", "--config", reg.string(), "--out-dir", dir.string()}).code == 0);
    CHECK(read_csv(dir / "regularized.csv").size() == 3);
}

TEST_CASE("outputs are deterministic apart from the timestamp") {
    const auto dir = scratch("determinism");
    const auto cfg = write_config(dir, {{"rho", rotated_qubit(0.85, 0.5)}, {"sigma", diag({0.7, 0.3})}, {"epsilon", 0.3},
                                        {"n_values", {2, 4}}, {"sweep_rates", {0.0, 0.1, 0.2}}});
    REQUIRE(run_cli({"sweep", "--config", cfg.string(), "--out-dir", dir.string(), "--no-timestamp"}).code == 0);
    const auto first = slurp(dir / "sweep.csv");
    REQUIRE(run_cli({"sweep", "--config", cfg.string(), "--out-dir", dir.string(), "--no-timestamp"}).code == 0);
    CHECK(slurp(dir / "sweep.csv") == first);
    CHECK(read_csv(dir / "rate_sweep.csv").size() == 7);

    REQUIRE(run_cli({"sweep", "--config", cfg.string(), "--out-dir", dir.string()}).code == 0);
    const auto stamped = slurp(dir / "sweep.csv");
    CHECK(stamped.rfind("# generated ", 0) == 0);
    CHECK(stamped.substr(stamped.find('\n') + 1) == first);
}

TEST_CASE("verify subcommand") {
    const auto dir = scratch("verify");
    const auto ok = run_cli({"verify", "--out-dir", dir.string()});
    CHECK(ok.code == 0);
    CHECK(ok.out.find("PASS lemma34") != std::string::npos);
    const auto first = slurp(dir / "verify_report.json");
    REQUIRE(run_cli({"verify", "--out-dir", dir.string()}).code == 0);
    CHECK(slurp(dir / "verify_report.json") == first);

    const auto bad = run_cli({"verify", "--inject-fault", "pinching_ineq", "--out-dir", dir.string()});
    CHECK(bad.code != 0);
    CHECK(bad.out.find("FAIL pinching_ineq") != std::string::npos);
    CHECK(run_cli({"verify", "--seed", "5", "--out-dir", dir.string()}).code == 0);
}
