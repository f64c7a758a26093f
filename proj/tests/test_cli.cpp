#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "fprw/cli.hpp"

using namespace fprw;
using nlohmann::json;

namespace {

const json kZ5Z6 = json::parse(R"({
  "factors": [{"type": "lattice", "dim": 5}, {"type": "lattice", "dim": 6}],
  "weights": [0.7, 0.3]
})");

const json kPi3 = json::parse(R"({
  "factors": [{"type": "cyclic", "order": 2}, {"type": "cyclic", "order": 2}, {"type": "cyclic", "order": 2}],
  "weights": [1, 1, 1]
})");

ErrorCode config_error_code(const json& j) {
    try {
        parse_config(j);
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("config was accepted");
    return ErrorCode::InvalidSpec;
}

std::set<std::string> keys(const json& j) {
    std::set<std::string> out;
    for (const auto& [k, v] : j.items()) out.insert(k);
    return out;
}

std::set<std::string> required(const json& j) { return j.at("required").get<std::set<std::string>>(); }

std::filesystem::path write_temp(const std::string& name, const std::string& text) {
    const auto p = std::filesystem::temp_directory_path() / name;
    std::ofstream(p) << text;
    return p;
}

int run(std::vector<std::string> args, std::string& out, std::string& err) {
    args.insert(args.begin(), "fprw");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream o, e;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), o, e);
    out = o.str();
    err = e.str();
    return code;
}

}  // namespace

TEST_CASE("config parsing: factor kinds and defaults") {
    const json j = json::parse(R"({
      "factors": [
        {"type": "tree", "q": 3},
        {"type": "lattice", "beta": [0.6, 0.4], "p": [0.7, 0.5]},
        {"type": "finite_group", "table": [[0,1,2],[1,2,0],[2,0,1]], "P": [[0.2,0.5,0.3],[0.3,0.2,0.5],[0.5,0.3,0.2]]},
        {"type": "cyclic", "order": 4},
        {"type": "explicit", "coeffs": [1, 0, 0.5], "radius": 1, "g_at_r": "inf", "gprime_at_r": "inf", "period": 2}
      ],
      "weights": [0.2, 0.2, 0.2, 0.2, 0.2],
      "options": {"order": 64, "seed": 7}
    })");
    const Config c = parse_config(j);
    CHECK(c.product.factors.size() == 5);
    CHECK(std::get<FiniteGroupSpec>(c.product.factors[2]).mu[1] == doctest::Approx(0.5));
    CHECK(std::get<FiniteGroupSpec>(c.product.factors[3]).mu[3] == doctest::Approx(0.5));
    CHECK(std::get<ExplicitSpec>(c.product.factors[4]).g_at_r.is_infinite());
    CHECK(c.options.order == 64);
    CHECK(c.options.seed == 7);
    CHECK(c.options.grid == 512);
    CHECK(c.warnings.empty());
}

TEST_CASE("config parsing: weights are normalised with a warning") {
    const Config c = parse_config(kPi3);
    CHECK(c.warnings.size() == 1);
    CHECK(c.product.weights[0] == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("config parsing: errors") {
    json j = kZ5Z6;
    j["weights"] = {0.0, 0.0};
    CHECK(config_error_code(j) == ErrorCode::ConfigError);
    j = kZ5Z6;
    j["extra"] = 1;
    CHECK(config_error_code(j) == ErrorCode::ConfigError);
    j = kZ5Z6;
    j["factors"][0]["colour"] = "red";
    CHECK(config_error_code(j) == ErrorCode::ConfigError);
    j = kZ5Z6;
    j["factors"][1]["type"] = "sphere";
    CHECK(config_error_code(j) == ErrorCode::ConfigError);
    j = kZ5Z6;
    j["weights"] = {1.0};
    CHECK(config_error_code(j) == ErrorCode::ConfigError);
    j = kZ5Z6;
    j["factors"][0] = json{{"type", "tree"}, {"q", 2}};
    CHECK(config_error_code(j) == ErrorCode::ConfigError);
    j = kZ5Z6;
    j["options"] = json{{"grid", 2}};
    CHECK(config_error_code(j) == ErrorCode::ConfigError);
}

TEST_CASE("number formatting") {
    CHECK(format_number(1.0 / 3.0) == "0.333333333333");
    CHECK(format_number(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(json_number(ExtReal::infinity()) == "inf");
    CHECK(json_number(2.5).get<double>() == 2.5);
}

TEST_CASE("analyze report carries exactly the schema fields") {
    std::ifstream in(std::string(FPRW_SOURCE_DIR) + "/schema/analyze_report.schema.json");
    REQUIRE(in);
    const json schema = json::parse(in);
    const json report = json::parse(cmd_analyze(parse_config(kZ5Z6)).dump());
    CHECK(keys(report) == required(schema));
    CHECK(keys(report.at("law")) == required(schema.at("properties").at("law")));
    for (const auto& f : report.at("factors"))
        CHECK(keys(f) == required(schema.at("properties").at("factors").at("items")));
    CHECK(report.at("law").at("label") == "n^-5/2");
    CHECK(report.at("law").at("factor") == 0);
    CHECK(report.at("factors")[0].at("psi_at_theta").get<double>() == doctest::Approx(0.691).epsilon(0.002));
}

TEST_CASE("analyze: recurrent product and infinite values") {
    const json j = json::parse(R"({"factors": [{"type": "cyclic", "order": 2}, {"type": "cyclic", "order": 2}],
                                   "weights": [0.5, 0.5]})");
    const json r = cmd_analyze(parse_config(j));
    CHECK(r.at("law").at("label") == "n^-1/2");
    CHECK(r.at("degenerate") == true);
    CHECK(r.at("g_at_radius") == "inf");
    CHECK(r.at("alpha_c").is_null());
}

TEST_CASE("series CSV: header, n = 0, period and BFS agreement") {
    const std::string csv = cmd_series(parse_config(kPi3), 14);
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    CHECK(line == "# rho=1.06066017178");
    std::getline(in, line);
    CHECK(line == "# period=2");
    std::getline(in, line);
    CHECK(line == "n,mu_n,mu_n_rho_n");
    const PowerSeries bfs = bfs_convolution(parse_config(kPi3).product, 14);
    for (std::size_t n = 0; n <= 14; ++n) {
        std::getline(in, line);
        std::istringstream row(line);
        std::string a, b;
        std::getline(row, a, ',');
        std::getline(row, b, ',');
        CHECK(std::stoul(a) == n);
        if (n == 0) CHECK(b == "1");
        if (n % 2) CHECK(b == "0");
        CHECK(std::stod(b) == doctest::Approx(bfs[n]).epsilon(1e-11));
    }
}

TEST_CASE("phase command") {
    const json j = json::parse(R"({"factors": [{"type": "lattice", "dim": 3}, {"type": "lattice", "dim": 4}],
                                   "weights": [0.5, 0.5]})");
    const PhaseDiagram pd = cmd_phase(parse_config(j), 17);
    CHECK(pd.case_label == 'E');
    const json pj = phase_to_json(pd);
    CHECK(pj.at("case") == "E");
    CHECK(pj.at("grid").size() == pd.grid.size());
    CHECK(phase_to_csv(pd).find("alpha1,upsilon,law,warning") != std::string::npos);
    try {
        cmd_phase(parse_config(kPi3), 17);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UnsupportedFactorCount);
    }
}

TEST_CASE("simulate command") {
    const Config c = parse_config(kPi3);
    CHECK(cmd_simulate(c, 0, 1000, 1) == "n,empirical,exact,z_score\n");
    const std::string a = cmd_simulate(c, 12, 100000, 3);
    CHECK(a == cmd_simulate(c, 12, 100000, 3));
    std::istringstream in(a);
    std::string line;
    std::getline(in, line);
    int rows = 0;
    while (std::getline(in, line)) {
        ++rows;
        const double z = std::stod(line.substr(line.rfind(',') + 1));
        CHECK(std::abs(z) <= 4.0);
    }
    CHECK(rows == 12);
}

TEST_CASE("command line: exit codes and output file") {
    const auto cfg = write_temp("fprw_test_z5z6.json", kZ5Z6.dump());
    const auto pi3 = write_temp("fprw_test_pi3.json", kPi3.dump());
    json bad = kZ5Z6;
    bad["weights"] = {0.0, 0.0};
    const auto badp = write_temp("fprw_test_bad.json", bad.dump());
    const auto outp = std::filesystem::temp_directory_path() / "fprw_test_out.json";
    std::string out, err;

    CHECK(run({"analyze", "--config", cfg.string()}, out, err) == 0);
    CHECK(json::parse(out).at("law").at("label") == "n^-5/2");
    CHECK(run({"analyze", "--config", badp.string()}, out, err) == 2);
    CHECK(err.find("weights") != std::string::npos);
    CHECK(run({"analyze", "--config", "/nonexistent/fprw.json"}, out, err) == 2);
    CHECK(run({"phase", "--config", pi3.string()}, out, err) == 4);
    CHECK(err.find("two factors") != std::string::npos);
    CHECK(run({"bogus"}, out, err) == 2);
    CHECK(run({"series", "--config", pi3.string(), "--order", "4"}, out, err) == 0);
    CHECK(err.find("normalised") != std::string::npos);
    CHECK(out.find("\n4,0.185185185185,") != std::string::npos);
    CHECK(run({"phase", "--config", cfg.string(), "--grid", "9", "--format", "csv"}, out, err) == 0);
    CHECK(out.rfind("# case=D", 0) == 0);
    CHECK(run({"simulate", "--config", pi3.string(), "--steps", "0"}, out, err) == 0);
    CHECK(out == "n,empirical,exact,z_score\n");
    CHECK(run({"analyze", "--config", cfg.string(), "--out", outp.string()}, out, err) == 0);
    CHECK(out.empty());
    std::ifstream f(outp);
    CHECK(json::parse(f).at("period") == 2);
}
