#include "doctest.h"
#include "cli.hpp"
#include "config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace qm::cli;

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Result {
    int status;
    std::string out, err;
};

Result run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "qmetro");
    std::ostringstream out, err;
    const int status = run(args, out, err);
    return {status, out.str(), err.str()};
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        std::vector<std::string> cells;
        std::istringstream ls(line);
        for (std::string cell; std::getline(ls, cell, ',');) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

const std::vector<std::string> kSmallMc = {"--grid-points", "200", "--outer-steps", "20", "--mc-samples", "200",
                                           "--mu-max", "3"};

std::vector<std::string> with(std::vector<std::string> a, const std::vector<std::string>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

}  // namespace

TEST_CASE("real numbers with pi factors") {
    CHECK(parse_real("0.5") == 0.5);
    CHECK(parse_real("pi") == doctest::Approx(kPi));
    CHECK(parse_real("-pi/2") == doctest::Approx(-kPi / 2));
    CHECK(parse_real("2*pi") == doctest::Approx(2 * kPi));
    CHECK(parse_real("3pi/4") == doctest::Approx(3 * kPi / 4));
    CHECK(parse_real(" 1e-3 ") == doctest::Approx(1e-3));
    CHECK_THROWS_AS(parse_real("abc"), ConfigError);
    CHECK_THROWS_AS(parse_real(""), ConfigError);
    CHECK_THROWS_AS(parse_real("pi/0"), ConfigError);
    CHECK_THROWS_AS(parse_real("pipi"), ConfigError);
    CHECK(parse_real_list("0, pi/2") == std::vector<double>{0.0, parse_real("pi/2")});
    CHECK(parse_int_list("1,5,10") == std::vector<int>{1, 5, 10});
    CHECK_THROWS_AS(parse_real_list(""), ConfigError);
}

TEST_CASE("key-value files") {
    std::istringstream in("# comment\nprobe = noon\n\nmu_max=10  # trailing\n");
    const auto kv = read_key_values(in);
    CHECK(kv.size() == 2);
    CHECK(kv.at("probe") == "noon");
    CHECK(kv.at("mu_max") == "10");
    std::istringstream dup("a = 1\na = 2\n");
    CHECK_THROWS_AS(read_key_values(dup), ConfigError);
    std::istringstream bad("just words\n");
    CHECK_THROWS_AS(read_key_values(bad), ConfigError);
    CHECK_THROWS_AS(read_key_values_file("/nonexistent/qmetro.cfg"), ConfigError);
}

TEST_CASE("csv formatting") {
    CHECK(format_real(0.104) == "1.04000e-01");
    CHECK(format_real(-2.5) == "-2.50000e+00");
    CsvTable t({"mu", "error"});
    t.set_integer_columns({true});
    t.add_row({1, 0.1});
    t.add_row({20, 1.0 / 3});
    std::ostringstream out;
    t.write(out);
    CHECK(out.str() == "mu,error\n1,1.00000e-01\n20,3.33333e-01\n");
    CHECK(t.rows() == 2);
}

TEST_CASE("mse on the noon probe") {
    const Result r =
        run_cli(with({"mse", "--probe", "noon", "--pom", "counting_even", "--width", "pi/2", "--mean", "0", "--seed", "7"},
                     kSmallMc));
    REQUIRE(r.status == 0);
    const auto rows = parse_csv(r.out);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0] == std::vector<std::string>{"mu", "error", "stderr"});
    CHECK(rows[1][0] == "1");
    CHECK(std::abs(std::stod(rows[1][1]) - 0.104) <= 2e-3 + 3 * std::stod(rows[1][2]));
    CHECK(std::stod(rows[3][1]) < std::stod(rows[1][1]));
}

TEST_CASE("closed-form subcommands") {
    Result r = run_cli({"single-shot", "--probe", "qubit_gamma", "--gamma", "1", "--weights", "0.5,0.5"});
    REQUIRE(r.status == 0);
    auto rows = parse_csv(r.out);
    CHECK(std::stod(rows[1][0]) == doctest::Approx(kPi * kPi / 48 - std::pow(4 - kPi, 2) / (2 * kPi * kPi)).epsilon(1e-5));

    r = run_cli({"network-asym", "--d", "2", "--geometry", "0.853"});
    REQUIRE(r.status == 0);
    rows = parse_csv(r.out);
    CHECK(rows[0] == std::vector<std::string>{"d", "G", "J_opt", "h_opt"});
    CHECK(std::stod(rows[1][2]) == doctest::Approx(0.561).epsilon(1e-3));

    r = run_cli({"imaging-scaling", "--d", "2", "--nbar", "4", "--n-max", "4"});
    REQUIRE(r.status == 0);
    rows = parse_csv(r.out);
    CHECK(rows.size() == 5);
    CHECK(std::stod(rows[4][2]) == doctest::Approx(8.0 / 9).epsilon(1e-5));
}

TEST_CASE("exit codes") {
    CHECK(run_cli({}).status == 2);
    CHECK(run_cli({"no-such-command"}).status == 2);
    CHECK(run_cli(with({"mse", "--probe", "noon"}, kSmallMc)).status == 2);  // seed missing
    CHECK(run_cli(with({"mse", "--probe", "nope", "--seed", "1"}, kSmallMc)).status == 2);
    CHECK(run_cli(with({"mse", "--pom", "nope", "--seed", "1"}, kSmallMc)).status == 2);
    CHECK(run_cli({"mse", "--seed", "1", "--grid-points", "100", "--outer-steps", "7"}).status == 2);
    CHECK(run_cli({"single-shot", "--width", "-1"}).status == 2);

    CHECK(run_cli({"single-shot", "--probe", "ses", "--nbar", "3"}).status == 2);
    const Result leak = run_cli({"single-shot", "--probe", "tsv", "--nbar", "20"});
    CHECK(leak.status == 3);
    CHECK(leak.err.find("[cutoff]") != std::string::npos);
    const Result singular = run_cli({"qcrb", "--probe", "qubit_gamma", "--gamma", "0"});
    CHECK(singular.status == 3);
    CHECK(singular.err.find("[singular_fisher]") != std::string::npos);
}

TEST_CASE("config file fills options and flags win") {
    const auto dir = std::filesystem::temp_directory_path() / "qmetro_cli_test";
    std::filesystem::create_directories(dir);
    const auto cfg = dir / "run.cfg";
    {
        std::ofstream f(cfg);
        f << "probe = qubit_gamma\ngamma = 0\nweights = 0.5,0.5\n";
    }
    const Result from_file = run_cli({"single-shot", "--config", cfg.string()});
    REQUIRE(from_file.status == 0);
    const Result flag = run_cli({"single-shot", "--config", cfg.string(), "--gamma", "1"});
    const Result direct = run_cli({"single-shot", "--probe", "qubit_gamma", "--gamma", "1", "--weights", "0.5,0.5"});
    REQUIRE(flag.status == 0);
    CHECK(flag.out == direct.out);
    CHECK(from_file.out != direct.out);

    {
        std::ofstream f(cfg);
        f << "no_such_key = 1\n";
    }
    CHECK(run_cli({"single-shot", "--config", cfg.string()}).status == 2);
    std::filesystem::remove_all(dir);
}

TEST_CASE("csv and manifest are reproducible across thread counts") {
    const auto dir = std::filesystem::temp_directory_path() / "qmetro_cli_repro";
    std::filesystem::create_directories(dir);
    const std::vector<std::string> base =
        with({"mse", "--probe", "coherent", "--pom", "counting_odd", "--seed", "11"}, kSmallMc);
    const Result one = run_cli(with(base, {"--threads", "1"}));
    const Result three = run_cli(with(base, {"--threads", "3"}));
    REQUIRE(one.status == 0);
    CHECK(one.out == three.out);

    const auto csv = (dir / "curve.csv").string();
    REQUIRE(run_cli(with(base, {"--out", csv})).status == 0);
    std::ifstream f(csv);
    std::stringstream written;
    written << f.rdbuf();
    CHECK(written.str() == one.out);
    std::ifstream m(csv + ".manifest.json");
    std::stringstream manifest;
    manifest << m.rdbuf();
    for (const char* key : {"\"subcommand\"", "\"version\"", "\"config\"", "\"wall_time_s\"", "\"mc_stderr_max\""})
        CHECK(manifest.str().find(key) != std::string::npos);
    std::filesystem::remove_all(dir);
}

TEST_CASE("time-demo reproduces the closed-form estimator") {
    const auto dir = std::filesystem::temp_directory_path() / "qmetro_cli_time";
    std::filesystem::create_directories(dir);
    const auto csv = (dir / "t.csv").string();
    REQUIRE(run_cli({"time-demo", "--seed", "3", "--grid-points", "100", "--outer-steps", "10", "--mc-samples", "20",
                     "--mu-max", "2", "--out", csv})
                .status == 0);
    std::ifstream m(csv + ".manifest.json");
    std::stringstream manifest;
    manifest << m.rdbuf();
    const std::string text = manifest.str();
    const auto pos = text.find("\"estimator_closed_form_deviation\"");
    REQUIRE(pos != std::string::npos);
    const double dev = std::stod(text.substr(text.find(':', pos) + 1));
    CHECK(dev <= 1e-8);
    std::filesystem::remove_all(dir);
}
