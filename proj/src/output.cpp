#include "qae/output.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unistd.h>

namespace qae::output {

namespace {

nlohmann::json number_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

}  // namespace

std::string format_double(double value) {
    if (!std::isfinite(value)) return {};
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
    if (ec != std::errc{}) throw std::runtime_error("number formatting failed");
    return {buf, ptr};
}

std::string config_comment(const nlohmann::json& config) { return "# config: " + config.dump() + "\n"; }

std::string fisher_csv(const FisherReport& report) {
    std::ostringstream out;
    out << "s,k_s,N_s,fisher_entry,fisher_cum,crb,calls_cum\n";
    for (std::size_t s = 0; s < report.size(); ++s) {
        const auto& e = report.per_entry[s];
        out << s << ',' << e.k << ',' << e.shots << ',' << format_double(e.fisher) << ','
            << format_double(report.cumulative_fisher[s]) << ',' << format_double(report.crb[s]) << ','
            << report.cumulative_calls[s] << '\n';
    }
    return out.str();
}

nlohmann::json fisher_json(const FisherReport& report) {
    auto rows = nlohmann::json::array();
    for (std::size_t s = 0; s < report.size(); ++s) {
        const auto& e = report.per_entry[s];
        rows.push_back({{"s", s},
                        {"k_s", e.k},
                        {"N_s", e.shots},
                        {"fisher_entry", e.fisher},
                        {"fisher_cum", report.cumulative_fisher[s]},
                        {"crb", number_or_null(report.crb[s])},
                        {"calls_cum", report.cumulative_calls[s]}});
    }
    return rows;
}

std::string stats_csv(std::span<const StatsTable> tables) {
    std::ostringstream out;
    out << "schedule,s,k_s,calls_cum,rms_error,std_error,bias,crb,crb_noise_free,trials_ok,failures\n";
    for (const auto& table : tables) {
        for (const auto& r : table.rows) {
            out << table.schedule << ',' << r.entry << ',' << r.k << ',' << r.cumulative_calls << ','
                << format_double(r.rms_error) << ',' << format_double(r.std_error) << ',' << format_double(r.bias)
                << ',' << format_double(r.crb) << ',' << format_double(r.crb_noise_free) << ',' << r.trials_ok << ','
                << r.failures << '\n';
        }
    }
    return out.str();
}

std::string records_csv(std::span<const ExperimentRecord> records) {
    std::ostringstream out;
    out << "k,N,p,seed\n";
    for (const auto& r : records) {
        out << r.k << ',' << r.shots << ',' << format_double(r.fraction()) << ',' << r.seed << '\n';
    }
    return out.str();
}

std::vector<TrajectoryRow> trajectory_rows(double theta, std::uint64_t max_k, const NoiseChannel& channel) {
    const auto states = propagate_trajectory(theta, max_k, channel);
    std::vector<TrajectoryRow> rows;
    rows.reserve(states.size());
    for (std::uint64_t k = 0; k < states.size(); ++k) {
        rows.push_back({k, states[k], (2.0 * static_cast<double>(k) + 1.0) * theta, noisy_amplitude(states[k])});
    }
    return rows;
}

std::string trajectory_csv(std::span<const TrajectoryRow> rows) {
    std::ostringstream out;
    out << "k,phi,p_eff,phi_noiseless,alpha_tilde\n";
    for (const auto& r : rows) {
        out << r.k << ',' << (r.state.degenerate ? std::string{} : format_double(r.state.phi)) << ','
            << format_double(r.state.p_eff) << ',' << format_double(r.phi_noiseless) << ','
            << format_double(r.alpha_tilde) << '\n';
    }
    return out.str();
}

nlohmann::json trajectory_json(std::span<const TrajectoryRow> rows) {
    auto out = nlohmann::json::array();
    for (const auto& r : rows) {
        out.push_back({{"k", r.k},
                       {"phi", r.state.degenerate ? nlohmann::json(nullptr) : nlohmann::json(r.state.phi)},
                       {"p_eff", r.state.p_eff},
                       {"phi_noiseless", r.phi_noiseless},
                       {"alpha_tilde", r.alpha_tilde}});
    }
    return out;
}

std::string schedule_map_csv(const ScheduleMap& map) {
    std::ostringstream out;
    out << "gamma";
    for (auto c : map.calls) out << ',' << c;
    out << '\n';
    for (std::size_t g = 0; g < map.gammas.size(); ++g) {
        out << format_double(map.gammas[g]);
        for (std::size_t c = 0; c < map.calls.size(); ++c) out << ',' << map.winner_label(g, c);
        out << '\n';
    }
    return out.str();
}

void write_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream file(tmp, std::ios::binary | std::ios::trunc);
        if (!file) throw std::runtime_error("cannot write output file '" + path + "'");
        file << content;
        file.flush();
        if (!file) {
            std::error_code ignored;
            fs::remove(tmp, ignored);
            throw std::runtime_error("failed while writing output file '" + path + "'");
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        std::error_code ignored;
        fs::remove(tmp, ignored);
        throw std::runtime_error("cannot move output into place at '" + path + "': " + ec.message());
    }
}

}  // namespace qae::output
