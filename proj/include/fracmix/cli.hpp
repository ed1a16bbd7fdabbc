#pragma once

// Batch driver: one JSON config, one command, artifacts written to an
// output directory. See README for the config schema.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fracmix/io.hpp"

namespace fracmix {

struct RunConfig {
    std::string command;
    Json operator_spec;  // normalized operator block
    double alpha = 0.5;
    double beta = 2.0;
    double p = 1.0;
    double q = 1.0;
    Json phi = "zero";
    Json psi = "zero";
    Json source = "zero";  // forward: f
    Json initial = "zero"; // forward: V(0)
    std::size_t n_grid = 2049;
    std::size_t n_modes = 64;
    double delta_floor = 1.0e-8;
    double delta_warn = 1.0e-4;
    double t_min = 1.0e-4;
    std::size_t n_t_neg = 16;
    std::size_t n_t_pos = 16;
    std::size_t x_stride = 8;
    std::string eigensolver = "auto";  // auto | fd
    Json catalog;
    Json probe;
    Json manufactured;
    Json mlf_table;
    std::uint64_t seed = 0;
    std::filesystem::path output_dir = "fracmix_out";
    std::filesystem::path base_dir = ".";  // relative CSV paths resolve here
};

/// Parses and validates a config document; unknown keys are InputError.
RunConfig parse_config(const Json& doc, const std::filesystem::path& base_dir);
RunConfig load_config(const std::filesystem::path& path);
/// The effective config with every default filled in.
Json config_to_json(const RunConfig& cfg);

/// Runs the command. Returns 0 on success, 2 on IllPosedMode, 1 on input errors.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Command-line entry point (flags --config, --output, --threads, --seed).
int cli_main(int argc, char** argv);

}  // namespace fracmix
