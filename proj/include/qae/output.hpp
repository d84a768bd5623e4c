// Plot-ready text outputs: locale-independent CSV with 17 significant
// digits, and atomic file writes.

#pragma once

#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "qae/channels.hpp"
#include "qae/estimation.hpp"
#include "qae/fisher.hpp"
#include "qae/harness.hpp"

namespace qae::output {

// Shortest form of 17 significant digits; empty string for inf/nan (missing).
std::string format_double(double value);

// "# config: {...}" line.
std::string config_comment(const nlohmann::json& config);

std::string fisher_csv(const FisherReport& report);
nlohmann::json fisher_json(const FisherReport& report);

std::string stats_csv(std::span<const StatsTable> tables);

std::string records_csv(std::span<const ExperimentRecord> records);

struct TrajectoryRow {
    std::uint64_t k = 0;
    EffectiveState state;
    double phi_noiseless = 0.0;
    double alpha_tilde = 0.0;
};
std::vector<TrajectoryRow> trajectory_rows(double theta, std::uint64_t max_k, const NoiseChannel& channel);
std::string trajectory_csv(std::span<const TrajectoryRow> rows);
nlohmann::json trajectory_json(std::span<const TrajectoryRow> rows);

// Rows gamma, columns calls, cells the winning label (empty when no schedule fits).
std::string schedule_map_csv(const ScheduleMap& map);

// Writes via a temporary file in the same directory and a rename. Throws
// std::runtime_error when the destination cannot be written.
void write_atomic(const std::string& path, const std::string& content);

}  // namespace qae::output
