#pragma once

// Experiment and network files: JSON with // and /* */ comments. Classes
// and stations are numbered from 1 in files and from 0 in memory.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "mcqn/errors.hpp"
#include "mcqn/network.hpp"
#include "mcqn/region.hpp"
#include "mcqn/robbins_monro.hpp"

namespace mcqn {

/// File missing or unreadable.
class IoError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

enum class OutputFormat { csv, json };

OutputFormat parse_output_format(const std::string& text);

struct RegionBlock {
    std::vector<std::vector<double>> rays;  ///< explicit directions; empty when generated
    std::optional<CoordinatePlane> plane;
    std::size_t count = 0;
    bool include_axes = false;
};

struct MonotonicityBlock {
    std::vector<double> theta_grid;
    std::vector<double> t_grid;
    std::size_t replications = 1000;
    double noise_multiplier = 3.0;
};

struct ExperimentConfig {
    std::filesystem::path source;
    std::filesystem::path network_path;  ///< file the network was read from
    NetworkSpec network;
    std::uint64_t seed = 1;
    std::optional<std::vector<double>> ray;
    RMSchedule schedule;
    std::optional<RegionBlock> region;
    std::optional<MonotonicityBlock> monotonicity;
    std::optional<std::filesystem::path> output_path;
    OutputFormat format = OutputFormat::csv;
};

/// Reads and parses a commented JSON file. Throws IoError, or ConfigError
/// with line, column and the offending line on a syntax error.
nlohmann::json load_document(const std::filesystem::path& path);

/// Converts a network object (1-based labels) to a NetworkSpec. Throws
/// ConfigError on missing fields, wrong types or out-of-range labels; the
/// semantic checks are left to `validate`.
NetworkSpec parse_network(const nlohmann::json& doc);

/// Network from a file holding either a bare network object or an
/// experiment with a "network" entry (inline or a relative path).
NetworkSpec load_network(const std::filesystem::path& path);

RMSchedule parse_schedule(const nlohmann::json& doc);

ExperimentConfig parse_experiment(const nlohmann::json& doc, const std::filesystem::path& source);
ExperimentConfig load_experiment(const std::filesystem::path& path);

/// JSON view of a NetworkSpec with 1-based labels; round-trips through parse_network.
nlohmann::json network_json(const NetworkSpec& spec);

}  // namespace mcqn
