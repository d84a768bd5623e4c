// Monte-Carlo trial orchestration, error statistics against cumulative oracle
// calls, scaling fits and the optimal-schedule map over (noise, budget).
//
// Call counts are always shot-weighted: an entry with power k and N shots
// costs N (2k + 1) calls. Divide by N to compare with per-shot axes.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "qae/channels.hpp"
#include "qae/schedules.hpp"
#include "qae/toyproblem.hpp"

namespace qae {

struct ScheduleSpec {
    std::string kind;  // schedule-kind label
    std::size_t entries = 15;
};

struct SweepConfig {
    ToyProblem problem;
    NoiseChannel channel;
    std::vector<ScheduleSpec> schedules;
    std::uint64_t shots_per_entry = 100;
    std::size_t trials = 200;
    std::uint64_t base_seed = 0;
    unsigned jobs = 0;  // 0: hardware concurrency. Never affects results.

    void validate() const;
};

// One checkpoint: statistics of alpha_hat - alpha_true after the first
// entry + 1 schedule entries. Population definitions, so
// rms^2 = std^2 + bias^2.
struct StatsRow {
    std::size_t entry = 0;
    std::uint64_t k = 0;
    std::uint64_t cumulative_calls = 0;
    double rms_error = 0.0;
    double std_error = 0.0;
    double bias = 0.0;
    double crb = 0.0;
    double crb_noise_free = 0.0;
    std::size_t trials_ok = 0;
    std::size_t failures = 0;  // MLE failures, excluded from the statistics
};

struct StatsTable {
    std::string schedule;
    std::vector<StatsRow> rows;
};

// Seed base for one trial of one schedule; record s of that trial uses
// trial_seed(...) + s.
std::uint64_t trial_seed(std::uint64_t base_seed, std::size_t schedule_index, std::size_t trial);

std::vector<StatsTable> run_trials(const SweepConfig& config);

// Least-squares slope of log(column) against log(cumulative_calls) over rows
// [first, last]. Columns: rms_error, std_error, bias (absolute value), crb,
// crb_noise_free.
double fit_scaling_exponent(const StatsTable& stats, const std::string& column, std::size_t first, std::size_t last);

// Least-squares slope of log(y) against log(x); needs >= 4 points, positive
// values and at least two distinct x.
double fit_loglog_slope(std::span<const double> x, std::span<const double> y);

struct MapOptions {
    ChannelKind channel_kind = ChannelKind::depolarizing;
    // Break ties toward the slower-ramping schedule; false prefers the faster.
    bool prefer_slower = true;
    double tie_tolerance = 1e-12;  // relative
    // Monte-Carlo RMS instead of the Cramer-Rao bound.
    bool monte_carlo = false;
    std::size_t trials = 50;
    std::uint64_t base_seed = 0;
    unsigned jobs = 0;
};

struct MapCell {
    std::optional<std::size_t> winner;  // index into candidates; empty if nothing fits
    std::vector<double> error;          // per candidate; +inf where no prefix fits
};

struct ScheduleMap {
    std::vector<double> gammas;
    std::vector<std::uint64_t> calls;
    std::vector<std::string> candidates;
    std::vector<std::vector<MapCell>> cells;  // [gamma][calls]

    std::string winner_label(std::size_t g, std::size_t c) const;
};

std::vector<std::string> default_map_candidates();

// Ordering used for tie-breaks: classical < linear < poly:d (by d) <
// exponential; hybrids rank just above their base.
double ramp_rank(const std::string& kind_label);

ScheduleMap schedule_map(std::span<const double> gamma_grid, std::span<const std::uint64_t> calls_grid,
                         std::span<const std::string> candidates, const ToyProblem& problem, std::uint64_t shots,
                         const MapOptions& options = {});

// Error metric of one schedule at every budget: the CRB of the longest prefix
// whose cumulative calls fit, +inf where none does.
std::vector<double> crb_at_budgets(const Schedule& schedule, double alpha, const NoiseChannel& channel,
                                   std::span<const std::uint64_t> budgets);

void to_json(nlohmann::json& j, const StatsRow& row);
void to_json(nlohmann::json& j, const StatsTable& table);
void to_json(nlohmann::json& j, const ScheduleMap& map);

}  // namespace qae
