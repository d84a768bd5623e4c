#include "qae/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "qae/estimation.hpp"
#include "qae/fisher.hpp"

namespace qae {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

unsigned resolve_jobs(unsigned jobs) {
    if (jobs > 0) return jobs;
    return std::max(1u, std::thread::hardware_concurrency());
}

template <typename Fn>
void parallel_for(std::size_t count, unsigned jobs, Fn&& fn) {
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(resolve_jobs(jobs), count));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                    next = count;
                }
            }
        });
    }
    pool.clear();
    if (error) std::rethrow_exception(error);
}

// Per-trial errors of alpha_hat at every prefix; NaN marks an MLE failure.
std::vector<double> prefix_errors(const Schedule& schedule, const NoiseChannel& channel, double theta_true,
                                  double alpha_true, std::uint64_t seed, bool every_prefix) {
    const auto records = sample_schedule(theta_true, schedule, channel, seed);
    const std::size_t n = records.size();
    std::vector<double> errors(n, std::numeric_limits<double>::quiet_NaN());
    const std::size_t first = every_prefix ? 1 : n;
    for (std::size_t len = first; len <= n; ++len) {
        try {
            const auto fit = mle_estimate(std::span(records).first(len), channel);
            errors[len - 1] = fit.alpha_hat - alpha_true;
        } catch (const MleFailure&) {
        }
    }
    return errors;
}

struct ErrorStats {
    double rms = 0.0;
    double std = 0.0;
    double bias = 0.0;
    std::size_t ok = 0;
    std::size_t failures = 0;
};

// Fixed-order reduction over trial index.
ErrorStats summarize(const std::vector<double>& errors, std::size_t trials, std::size_t stride, std::size_t column) {
    ErrorStats st;
    double sum = 0.0;
    double sum_sq = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
        const double e = errors[t * stride + column];
        if (std::isnan(e)) {
            ++st.failures;
            continue;
        }
        ++st.ok;
        sum += e;
        sum_sq += e * e;
    }
    if (st.ok == 0) {
        st.rms = st.std = st.bias = std::numeric_limits<double>::quiet_NaN();
        return st;
    }
    const double n = static_cast<double>(st.ok);
    st.bias = sum / n;
    st.rms = std::sqrt(sum_sq / n);
    double centered = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
        const double e = errors[t * stride + column];
        if (!std::isnan(e)) centered += (e - st.bias) * (e - st.bias);
    }
    st.std = std::sqrt(centered / n);
    return st;
}

double monte_carlo_rms(const Schedule& schedule, const NoiseChannel& channel, const ToyProblem& problem,
                       std::size_t trials, std::uint64_t seed, unsigned jobs) {
    const double alpha = true_alpha(problem);
    const double theta = theta_from_alpha(alpha);
    const std::size_t n = schedule.size();
    std::vector<double> errors(trials * n);
    parallel_for(trials, jobs, [&](std::size_t t) {
        const auto e = prefix_errors(schedule, channel, theta, alpha, trial_seed(seed, 0, t), false);
        std::copy(e.begin(), e.end(), errors.begin() + static_cast<std::ptrdiff_t>(t * n));
    });
    const auto st = summarize(errors, trials, n, n - 1);
    return st.ok == 0 ? kInf : st.rms;
}

double column_value(const StatsRow& row, const std::string& column) {
    if (column == "rms_error") return row.rms_error;
    if (column == "std_error") return row.std_error;
    if (column == "bias") return std::abs(row.bias);
    if (column == "crb") return row.crb;
    if (column == "crb_noise_free") return row.crb_noise_free;
    throw std::invalid_argument("unknown stats column '" + column + "'");
}

}  // namespace

void SweepConfig::validate() const {
    problem.validate();
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
    if (shots_per_entry < 1) throw std::invalid_argument("shots per entry must be >= 1");
    if (schedules.empty()) throw std::invalid_argument("sweep needs at least one schedule");
    for (const auto& s : schedules) {
        if (s.entries < 1) throw std::invalid_argument("schedule '" + s.kind + "' needs at least one entry");
        (void)ScheduleKind::parse(s.kind);
    }
}

std::uint64_t trial_seed(std::uint64_t base_seed, std::size_t schedule_index, std::size_t trial) {
    return splitmix64(splitmix64(base_seed ^ splitmix64(schedule_index)) + trial);
}

std::vector<StatsTable> run_trials(const SweepConfig& config) {
    config.validate();
    const double alpha = true_alpha(config.problem);
    const double theta = theta_from_alpha(alpha);

    std::vector<StatsTable> tables;
    for (std::size_t si = 0; si < config.schedules.size(); ++si) {
        const auto& spec = config.schedules[si];
        const auto schedule = make_schedule(spec.kind, spec.entries, config.shots_per_entry);
        const std::size_t n = schedule.size();

        std::vector<double> errors(config.trials * n);
        parallel_for(config.trials, config.jobs, [&](std::size_t t) {
            const auto e =
                prefix_errors(schedule, config.channel, theta, alpha, trial_seed(config.base_seed, si, t), true);
            std::copy(e.begin(), e.end(), errors.begin() + static_cast<std::ptrdiff_t>(t * n));
        });

        const auto noisy = fisher_report(alpha, schedule, config.channel);
        const auto clean = fisher_depolarizing(schedule, alpha, 0.0);

        StatsTable table;
        table.schedule = schedule.kind;
        table.rows.reserve(n);
        for (std::size_t s = 0; s < n; ++s) {
            const auto st = summarize(errors, config.trials, n, s);
            table.rows.push_back({s, schedule.entries[s].k, noisy.cumulative_calls[s], st.rms, st.std, st.bias,
                                  noisy.crb[s], clean.crb[s], st.ok, st.failures});
        }
        tables.push_back(std::move(table));
    }
    return tables;
}

double fit_loglog_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("fit needs equally many x and y values");
    if (x.size() < 4) throw std::invalid_argument("fit window needs at least 4 points");
    std::vector<double> lx(x.size());
    std::vector<double> ly(y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0) || !std::isfinite(x[i]) || !std::isfinite(y[i])) {
            throw std::invalid_argument("fit needs positive finite values");
        }
        lx[i] = std::log(x[i]);
        ly[i] = std::log(y[i]);
    }
    const double n = static_cast<double>(lx.size());
    const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
    const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    if (sxx <= 0.0) throw std::invalid_argument("fit window has identical x values");
    return sxy / sxx;
}

double fit_scaling_exponent(const StatsTable& stats, const std::string& column, std::size_t first, std::size_t last) {
    if (last >= stats.rows.size() || first > last) throw std::out_of_range("fit window outside the stats table");
    std::vector<double> x;
    std::vector<double> y;
    for (std::size_t i = first; i <= last; ++i) {
        x.push_back(static_cast<double>(stats.rows[i].cumulative_calls));
        y.push_back(column_value(stats.rows[i], column));
    }
    return fit_loglog_slope(x, y);
}

std::string ScheduleMap::winner_label(std::size_t g, std::size_t c) const {
    const auto& w = cells.at(g).at(c).winner;
    return w ? candidates.at(*w) : std::string{};
}

std::vector<std::string> default_map_candidates() { return {"classical", "linear", "quadratic", "exponential"}; }

double ramp_rank(const std::string& kind_label) {
    const auto kind = ScheduleKind::parse(kind_label);
    switch (kind.family) {
        case ScheduleFamily::classical:
            return 0.0;
        case ScheduleFamily::linear:
            return 1.0;
        case ScheduleFamily::polynomial:
            return static_cast<double>(kind.degree);
        case ScheduleFamily::exponential:
            return 1e6;
        case ScheduleFamily::hybrid:
            return ramp_rank(kind.hybrid_base) + 0.5;
    }
    return 0.0;
}

std::vector<double> crb_at_budgets(const Schedule& schedule, double alpha, const NoiseChannel& channel,
                                   std::span<const std::uint64_t> budgets) {
    const auto report = fisher_report(alpha, schedule, channel);
    std::vector<double> out;
    out.reserve(budgets.size());
    for (auto budget : budgets) {
        auto it = std::upper_bound(report.cumulative_calls.begin(), report.cumulative_calls.end(), budget);
        if (it == report.cumulative_calls.begin()) {
            out.push_back(kInf);
        } else {
            out.push_back(report.crb[static_cast<std::size_t>(it - report.cumulative_calls.begin()) - 1]);
        }
    }
    return out;
}

ScheduleMap schedule_map(std::span<const double> gamma_grid, std::span<const std::uint64_t> calls_grid,
                         std::span<const std::string> candidates, const ToyProblem& problem, std::uint64_t shots,
                         const MapOptions& options) {
    if (gamma_grid.empty() || calls_grid.empty() || candidates.empty()) {
        throw std::invalid_argument("schedule map needs non-empty gamma, calls and candidate lists");
    }
    const double alpha = true_alpha(problem);
    const std::uint64_t max_budget = *std::max_element(calls_grid.begin(), calls_grid.end());

    ScheduleMap map;
    map.gammas.assign(gamma_grid.begin(), gamma_grid.end());
    map.calls.assign(calls_grid.begin(), calls_grid.end());
    map.candidates.assign(candidates.begin(), candidates.end());
    map.cells.assign(gamma_grid.size(), std::vector<MapCell>(calls_grid.size()));

    std::vector<Schedule> schedules;
    std::vector<double> ranks;
    for (const auto& label : candidates) {
        schedules.push_back(make_schedule_for_budget(ScheduleKind::parse(label), max_budget, shots));
        ranks.push_back(ramp_rank(label));
    }

    for (std::size_t g = 0; g < gamma_grid.size(); ++g) {
        const NoiseChannel channel = gamma_grid[g] == 0.0 ? NoiseChannel::ideal()
                                                          : NoiseChannel(options.channel_kind, gamma_grid[g]);
        for (std::size_t c = 0; c < calls_grid.size(); ++c) map.cells[g][c].error.assign(candidates.size(), kInf);

        for (std::size_t i = 0; i < candidates.size(); ++i) {
            if (!options.monte_carlo) {
                const auto errs = crb_at_budgets(schedules[i], alpha, channel, calls_grid);
                for (std::size_t c = 0; c < calls_grid.size(); ++c) map.cells[g][c].error[i] = errs[c];
                continue;
            }
            const auto cumulative = cumulative_calls(schedules[i]);
            for (std::size_t c = 0; c < calls_grid.size(); ++c) {
                auto it = std::upper_bound(cumulative.begin(), cumulative.end(), calls_grid[c]);
                if (it == cumulative.begin()) continue;
                Schedule prefix = schedules[i];
                prefix.entries.resize(static_cast<std::size_t>(it - cumulative.begin()));
                map.cells[g][c].error[i] = monte_carlo_rms(prefix, channel, problem, options.trials,
                                                           splitmix64(options.base_seed + g * 1000003 + c), options.jobs);
            }
        }

        for (std::size_t c = 0; c < calls_grid.size(); ++c) {
            auto& cell = map.cells[g][c];
            for (std::size_t i = 0; i < candidates.size(); ++i) {
                const double e = cell.error[i];
                if (!std::isfinite(e)) continue;
                if (!cell.winner) {
                    cell.winner = i;
                    continue;
                }
                const double best = cell.error[*cell.winner];
                const bool tie = std::abs(e - best) <= options.tie_tolerance * std::max(e, best);
                if (tie) {
                    const bool slower = ranks[i] < ranks[*cell.winner];
                    if (slower == options.prefer_slower && ranks[i] != ranks[*cell.winner]) cell.winner = i;
                } else if (e < best) {
                    cell.winner = i;
                }
            }
        }
    }
    return map;
}

void to_json(nlohmann::json& j, const StatsRow& row) {
    auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
    j = nlohmann::json{{"s", row.entry},
                       {"k_s", row.k},
                       {"calls_cum", row.cumulative_calls},
                       {"rms_error", num(row.rms_error)},
                       {"std_error", num(row.std_error)},
                       {"bias", num(row.bias)},
                       {"crb", num(row.crb)},
                       {"crb_noise_free", num(row.crb_noise_free)},
                       {"trials_ok", row.trials_ok},
                       {"failures", row.failures}};
}

void to_json(nlohmann::json& j, const StatsTable& table) {
    j = nlohmann::json{{"schedule", table.schedule}, {"rows", table.rows}};
}

void to_json(nlohmann::json& j, const ScheduleMap& map) {
    auto winners = nlohmann::json::array();
    auto errors = nlohmann::json::array();
    for (std::size_t g = 0; g < map.gammas.size(); ++g) {
        auto wrow = nlohmann::json::array();
        auto erow = nlohmann::json::array();
        for (std::size_t c = 0; c < map.calls.size(); ++c) {
            const auto label = map.winner_label(g, c);
            wrow.push_back(label.empty() ? nlohmann::json(nullptr) : nlohmann::json(label));
            auto per = nlohmann::json::array();
            for (double e : map.cells[g][c].error) per.push_back(std::isfinite(e) ? nlohmann::json(e) : nlohmann::json(nullptr));
            erow.push_back(std::move(per));
        }
        winners.push_back(std::move(wrow));
        errors.push_back(std::move(erow));
    }
    j = nlohmann::json{{"gammas", map.gammas},   {"calls", map.calls}, {"candidates", map.candidates},
                       {"winners", winners},     {"errors", errors}};
}

}  // namespace qae
