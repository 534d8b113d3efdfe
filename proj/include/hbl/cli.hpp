#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace hbl {

enum class OutputFormat { text, json, dot };

struct CommandConfig {
    std::string command;
    std::string data;
    std::string presentation;
    std::string candidates;
    std::string out;
    std::size_t max_lattice = 512;
    double tol = 1e-9;
    std::uint64_t seed = 0;
    OutputFormat format = OutputFormat::text;

    std::optional<std::size_t> map;        // project: 1-based map index
    std::optional<std::size_t> component;  // decompose-flow: 1-based theta index, summary weight otherwise
    std::size_t iterations = 2000;         // gaussian ascent
    std::size_t samples = 200;             // gaussian: random inputs checked against the constant
    std::vector<std::string> grids;        // quadrature: one grid file per map
    std::optional<double> constant;        // quadrature: C, else from --presentation, else 1
    bool trace = false;                    // build: include the recursion log
};

struct RunResult {
    int status;          // 0 valid/feasible, 1 invalid/infeasible, 2 usage or internal error
    std::string output;  // the report
};

const std::vector<std::string>& command_names();

/// Runs one command. Malformed input and internal failures come back as status 2 with the
/// message as output; negative verdicts are status 1 with a full report.
RunResult run(const CommandConfig& config);

}  // namespace hbl
