#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "fprw/mc.hpp"
#include "fprw/phase.hpp"

namespace fprw {

struct RunOptions {
    std::size_t order = 512;
    std::size_t grid = 512;
    double critical_tol = 1e-8;
    double warning_band = 1e-4;
    std::uint64_t seed = 1;
    std::size_t steps = 12;
    std::uint64_t walks = 100000;
};

struct Config {
    FreeProductSpec product;
    RunOptions options;
    std::vector<std::string> warnings;
};

// Throws Error(ConfigError) naming the offending field.
Config parse_config(const nlohmann::json& j);
Config load_config(const std::string& path);
FactorSpec parse_factor(const nlohmann::json& j);

// Doubles rounded to 12 significant digits; infinity becomes "inf".
nlohmann::json json_number(double x);
nlohmann::json json_number(const ExtReal& x);
std::string format_number(double x);

nlohmann::json cmd_analyze(const Config& cfg);
std::string cmd_series(const Config& cfg, std::size_t N);
PhaseDiagram cmd_phase(const Config& cfg, std::size_t grid);
nlohmann::json phase_to_json(const PhaseDiagram& pd);
std::string phase_to_csv(const PhaseDiagram& pd);
std::string cmd_simulate(const Config& cfg, std::size_t steps, std::uint64_t walks, std::uint64_t seed);

// Whole command line; returns the process exit code (2 config, 3 numeric,
// 4 phase on a product that does not have two factors).
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fprw
