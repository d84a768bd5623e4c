#include "qae/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <stdexcept>

#include "CLI11.hpp"
#include "json.hpp"
#include "qae/estimation.hpp"
#include "qae/fisher.hpp"
#include "qae/harness.hpp"
#include "qae/output.hpp"
#include "qae/toyproblem.hpp"

namespace qae::cli {

namespace {

using nlohmann::json;

class UsageError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Binds one variable to both a command-line flag and a config-file key.
class Binder {
  public:
    explicit Binder(CLI::App* app) : app_(app) {}

    template <typename T>
    CLI::Option* option(const std::string& name, T& field, const std::string& help) {
        setters_[name] = [&field, name](const json& value) {
            try {
                field = value.get<T>();
            } catch (const json::exception&) {
                throw UsageError("config key '" + name + "' has the wrong type");
            }
        };
        getters_[name] = [&field] { return json(field); };
        return app_->add_option("--" + name, field, help)->capture_default_str();
    }

    CLI::Option* flag(const std::string& name, bool& field, const std::string& help) {
        setters_[name] = [&field, name](const json& value) {
            if (!value.is_boolean()) throw UsageError("config key '" + name + "' must be true or false");
            field = value.get<bool>();
        };
        getters_[name] = [&field] { return json(field); };
        return app_->add_flag("--" + name, field, help);
    }

    void apply(const json& config) const {
        for (const auto& [key, value] : config.items()) {
            if (key == "command") continue;
            auto it = setters_.find(key);
            if (it == setters_.end()) {
                throw UsageError("unknown config key '" + key + "' for command '" + app_->get_name() + "'");
            }
            it->second(value);
        }
    }

    json effective() const {
        json out = json::object();
        out["command"] = app_->get_name();
        for (const auto& [key, get] : getters_) out[key] = get();
        return out;
    }

    CLI::App* app() const { return app_; }

  private:
    CLI::App* app_;
    std::map<std::string, std::function<void(const json&)>> setters_;
    std::map<std::string, std::function<json()>> getters_;
};

struct CommonParams {
    std::string out = "-";
    std::string format;
    double bmax = std::numbers::pi / 5.0;
    unsigned m = 3;
};

struct ToyParams : CommonParams {
    ToyParams() { format = "json"; }
};

struct TrajectoryParams : CommonParams {
    TrajectoryParams() { format = "csv"; }
    std::string noise = "damp:0.2";
    double theta = -1.0;  // negative: use the toy problem's theta
    std::uint64_t max_k = 60;
};

struct CrbParams : CommonParams {
    CrbParams() { format = "csv"; }
    std::string schedule = "exponential";
    std::size_t entries = 12;
    std::uint64_t shots = 100;
    std::string noise = "ideal";
    double alpha = -1.0;  // negative: use the toy problem's alpha
    std::string fisher_form = "total";
};

struct SimulateParams : CommonParams {
    SimulateParams() { format = "csv"; }
    std::vector<std::string> schedules{"classical", "linear", "exponential"};
    std::size_t entries = 15;
    std::uint64_t shots = 100;
    std::string noise = "ideal";
    std::size_t trials = 200;
    std::uint64_t seed = 0;
    unsigned jobs = 0;
};

struct MapParams : CommonParams {
    MapParams() { format = "csv"; }
    std::vector<double> gammas{0.0, 0.001, 0.01, 0.05, 0.1, 0.2};
    std::vector<std::uint64_t> calls{100, 1000, 10000, 100000, 1000000};
    std::vector<std::string> candidates = default_map_candidates();
    std::uint64_t shots = 100;
    std::string channel = "depol";
    bool prefer_faster = false;
    bool mc = false;
    std::size_t trials = 50;
    std::uint64_t seed = 0;
    unsigned jobs = 0;
};

void bind_common(Binder& b, CommonParams& p) {
    b.option("out", p.out, "output path, '-' for stdout");
    b.option("format", p.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    b.option("bmax", p.bmax, "toy problem interval bound b_max");
    b.option("m", p.m, "toy problem discretization qubits (2^m bins)");
}

ToyProblem problem_of(const CommonParams& p) {
    ToyProblem problem{p.bmax, p.m};
    try {
        problem.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    return problem;
}

NoiseChannel channel_of(const std::string& text) {
    try {
        return NoiseChannel::parse(text);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
}

ChannelKind channel_kind_of(const std::string& text) {
    if (text == "depol") return ChannelKind::depolarizing;
    if (text == "dephase") return ChannelKind::dephasing;
    if (text == "damp") return ChannelKind::damping;
    throw UsageError("channel must be depol, dephase or damp, got '" + text + "'");
}

void check_schedule_label(const std::string& label) {
    try {
        (void)ScheduleKind::parse(label);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
}

// "kind" or "kind@entries".
ScheduleSpec schedule_spec_of(const std::string& text, std::size_t default_entries) {
    ScheduleSpec spec{text, default_entries};
    if (auto at = text.rfind('@'); at != std::string::npos) {
        spec.kind = text.substr(0, at);
        try {
            std::size_t used = 0;
            const auto n = std::stoull(text.substr(at + 1), &used);
            if (used != text.size() - at - 1) throw std::invalid_argument("trailing characters");
            spec.entries = static_cast<std::size_t>(n);
        } catch (const std::exception&) {
            throw UsageError("bad entry count in schedule '" + text + "'");
        }
    }
    check_schedule_label(spec.kind);
    if (spec.entries < 1) throw UsageError("schedule '" + text + "' needs at least one entry");
    return spec;
}

json header_config(json effective) {
    effective.erase("out");
    effective.erase("jobs");
    return effective;
}

std::string run_toy(const ToyParams& p, const json&) {
    const auto problem = problem_of(p);
    const double alpha = true_alpha(problem);
    const json result{{"b_max", p.bmax},
                      {"m", p.m},
                      {"alpha", alpha},
                      {"theta", theta_from_alpha(alpha)},
                      {"continuum_alpha", continuum_alpha(p.bmax)}};
    if (p.format == "json") return result.dump(2) + "\n";
    return "b_max,m,alpha,theta,continuum_alpha\n" + output::format_double(p.bmax) + "," + std::to_string(p.m) + "," +
           output::format_double(alpha) + "," + output::format_double(theta_from_alpha(alpha)) + "," +
           output::format_double(continuum_alpha(p.bmax)) + "\n";
}

std::string run_trajectory(const TrajectoryParams& p, const json& config) {
    const auto channel = channel_of(p.noise);
    double theta = p.theta;
    if (theta < 0.0) theta = theta_from_alpha(true_alpha(problem_of(p)));
    if (!std::isfinite(theta)) throw UsageError("theta must be finite");
    if (p.max_k > 10'000'000) throw UsageError("max-k is limited to 10^7");
    const auto rows = output::trajectory_rows(theta, p.max_k, channel);
    if (p.format == "json") {
        return json{{"config", config}, {"theta", theta}, {"rows", output::trajectory_json(rows)}}.dump(2) + "\n";
    }
    return output::config_comment(config) + output::trajectory_csv(rows);
}

std::string run_crb(const CrbParams& p, const json& config) {
    const auto channel = channel_of(p.noise);
    check_schedule_label(p.schedule);
    if (p.entries < 1) throw UsageError("entries must be >= 1");
    if (p.shots < 1) throw UsageError("shots must be >= 1");
    double alpha = p.alpha;
    if (alpha < 0.0) alpha = true_alpha(problem_of(p));
    if (!(alpha > 0.0 && alpha < 1.0)) throw UsageError("alpha must lie in (0, 1)");
    if (channel.kind() == ChannelKind::depolarizing && channel.gamma() >= 1.0) {
        throw UsageError("depolarizing gamma must be < 1 for a finite bound");
    }
    const auto schedule = make_schedule(p.schedule, p.entries, p.shots);
    if (p.fisher_form != "total" && p.fisher_form != "angle") throw UsageError("fisher-form must be total or angle");
    const auto form = p.fisher_form == "angle" ? FisherForm::angle_slope_only : FisherForm::total_derivative;
    const auto report = fisher_report(alpha, schedule, channel, form);
    if (p.format == "json") {
        return json{{"config", config}, {"alpha", alpha}, {"theta", theta_from_alpha(alpha)},
                    {"rows", output::fisher_json(report)}}
                   .dump(2) +
               "\n";
    }
    return output::config_comment(config) + output::fisher_csv(report);
}

std::string run_simulate(const SimulateParams& p, const json& config) {
    SweepConfig sweep;
    sweep.problem = problem_of(p);
    sweep.channel = channel_of(p.noise);
    if (p.schedules.empty()) throw UsageError("at least one schedule is required");
    for (const auto& s : p.schedules) sweep.schedules.push_back(schedule_spec_of(s, p.entries));
    if (p.shots < 1) throw UsageError("shots must be >= 1");
    if (p.trials < 1) throw UsageError("trials must be >= 1");
    sweep.shots_per_entry = p.shots;
    sweep.trials = p.trials;
    sweep.base_seed = p.seed;
    sweep.jobs = p.jobs;
    const auto tables = run_trials(sweep);
    if (p.format == "json") return json{{"config", config}, {"tables", tables}}.dump(2) + "\n";
    return output::config_comment(config) + output::stats_csv(tables);
}

std::string run_map(const MapParams& p, const json& config) {
    const auto problem = problem_of(p);
    if (p.gammas.empty() || p.calls.empty() || p.candidates.empty()) {
        throw UsageError("gammas, calls and candidates must be non-empty");
    }
    for (double g : p.gammas) {
        if (!(g >= 0.0 && g < 1.0)) throw UsageError("every gamma must lie in [0, 1)");
    }
    for (const auto& c : p.candidates) check_schedule_label(c);
    if (p.shots < 1) throw UsageError("shots must be >= 1");
    if (p.trials < 1) throw UsageError("trials must be >= 1");
    MapOptions options;
    options.channel_kind = channel_kind_of(p.channel);
    options.prefer_slower = !p.prefer_faster;
    options.monte_carlo = p.mc;
    options.trials = p.trials;
    options.base_seed = p.seed;
    options.jobs = p.jobs;
    const auto map = schedule_map(p.gammas, p.calls, p.candidates, problem, p.shots, options);
    if (p.format == "json") return json{{"config", config}, {"map", map}}.dump(2) + "\n";
    return output::config_comment(config) + output::schedule_map_csv(map);
}

const std::vector<std::string> kCommands{"toy", "trajectory", "crb", "simulate", "schedule-map"};

// Locates --config before CLI11 runs so file values can be installed as
// defaults that flags then override.
std::string find_config_path(const std::vector<std::string>& args) {
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) throw UsageError("--config needs a file path");
            path = args[i + 1];
        } else if (args[i].starts_with("--config=")) {
            path = args[i].substr(9);
        }
    }
    return path;
}

json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read config file '" + path + "'");
    try {
        auto config = json::parse(in);
        if (!config.is_object()) throw UsageError("config file '" + path + "' must hold a JSON object");
        return config;
    } catch (const json::parse_error& e) {
        throw UsageError("config file '" + path + "' is not valid JSON: " + e.what());
    }
}

}  // namespace

int run(const std::vector<std::string>& input_args, std::ostream& out, std::ostream& err) {
    std::vector<std::string> args = input_args;

    CLI::App app{"Maximum-likelihood amplitude estimation under readout noise"};
    app.require_subcommand(1);
    std::string config_path;
    app.add_option("--config", config_path, "JSON file supplying any flag")->configurable(false);
    app.set_help_all_flag("--help-all", "Expand all help");

    ToyParams toy;
    TrajectoryParams traj;
    CrbParams crb_p;
    SimulateParams sim;
    MapParams map_p;
    std::map<std::string, Binder> binders;

    {
        Binder b(app.add_subcommand("toy", "ground-truth amplitude of the E[cos^2 x] toy problem"));
        bind_common(b, toy);
        binders.emplace("toy", std::move(b));
    }
    {
        Binder b(app.add_subcommand("trajectory", "effective-state trajectory (k, phi, p_eff)"));
        bind_common(b, traj);
        b.option("noise", traj.noise, "channel: ideal, depol:<g>, dephase:<g>, damp:<g>");
        b.option("theta", traj.theta, "initial angle; negative uses the toy problem's theta");
        b.option("max-k", traj.max_k, "largest Grover power");
        binders.emplace("trajectory", std::move(b));
    }
    {
        Binder b(app.add_subcommand("crb", "Fisher information and Cramer-Rao bound per schedule entry"));
        bind_common(b, crb_p);
        b.option("schedule", crb_p.schedule, "schedule kind");
        b.option("entries", crb_p.entries, "number of schedule entries");
        b.option("shots", crb_p.shots, "shots per entry");
        b.option("noise", crb_p.noise, "channel: ideal, depol:<g>, dephase:<g>, damp:<g>");
        b.option("alpha", crb_p.alpha, "true amplitude; negative uses the toy problem's alpha");
        b.option("fisher-form", crb_p.fisher_form,
                 "total: exact information; angle: drop the purity slope (damping and dephasing only)")
            ->check(CLI::IsMember({"total", "angle"}));
        binders.emplace("crb", std::move(b));
    }
    {
        Binder b(app.add_subcommand("simulate", "Monte-Carlo MLE error statistics per schedule"));
        bind_common(b, sim);
        b.option("schedules", sim.schedules, "comma list of kind[@entries]")->delimiter(',');
        b.option("entries", sim.entries, "default entries per schedule");
        b.option("shots", sim.shots, "shots per entry");
        b.option("noise", sim.noise, "channel: ideal, depol:<g>, dephase:<g>, damp:<g>");
        b.option("trials", sim.trials, "Monte-Carlo trials");
        b.option("seed", sim.seed, "base seed");
        b.option("jobs", sim.jobs, "worker threads, 0 = all cores")->envname("QAE_JOBS");
        binders.emplace("simulate", std::move(b));
    }
    {
        Binder b(app.add_subcommand("schedule-map", "optimal schedule over (gamma, total calls)"));
        bind_common(b, map_p);
        b.option("gammas", map_p.gammas, "comma list of noise strengths")->delimiter(',');
        b.option("calls", map_p.calls, "comma list of total-call budgets")->delimiter(',');
        b.option("candidates", map_p.candidates, "comma list of schedule kinds")->delimiter(',');
        b.option("shots", map_p.shots, "shots per entry");
        b.option("channel", map_p.channel, "noise family: depol, dephase or damp");
        b.flag("prefer-faster", map_p.prefer_faster, "break ties toward the faster-ramping schedule");
        b.flag("mc", map_p.mc, "rank by Monte-Carlo RMS error instead of the Cramer-Rao bound");
        b.option("trials", map_p.trials, "Monte-Carlo trials per cell (with --mc)");
        b.option("seed", map_p.seed, "base seed (with --mc)");
        b.option("jobs", map_p.jobs, "worker threads, 0 = all cores")->envname("QAE_JOBS");
        binders.emplace("schedule-map", std::move(b));
    }

    try {
        const auto path = find_config_path(args);
        if (!path.empty()) {
            const auto config = load_config(path);
            const bool has_command = std::any_of(args.begin(), args.end(), [](const std::string& a) {
                return std::find(kCommands.begin(), kCommands.end(), a) != kCommands.end();
            });
            std::string command;
            if (config.contains("command")) {
                if (!config["command"].is_string()) throw UsageError("config key 'command' must be a string");
                command = config["command"].get<std::string>();
            }
            if (!has_command) {
                if (command.empty()) throw UsageError("no command given on the command line or in the config");
                args.insert(args.begin(), command);
            } else {
                const auto it = std::find_if(args.begin(), args.end(), [](const std::string& a) {
                    return std::find(kCommands.begin(), kCommands.end(), a) != kCommands.end();
                });
                if (!command.empty() && command != *it) {
                    throw UsageError("config is for command '" + command + "' but '" + *it + "' was requested");
                }
                command = *it;
            }
            auto binder = binders.find(command);
            if (binder == binders.end()) throw UsageError("unknown command '" + command + "' in config");
            binder->second.apply(config);

            // Already applied; left in place it could land after the command name.
            std::vector<std::string> rest;
            for (std::size_t i = 0; i < args.size(); ++i) {
                if (args[i] == "--config") {
                    ++i;
                } else if (!args[i].starts_with("--config=")) {
                    rest.push_back(args[i]);
                }
            }
            args = std::move(rest);
        }

        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e, out, err);
        return kExitOk;
    } catch (const CLI::CallForAllHelp& e) {
        app.exit(e, out, err);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    }

    const auto* sub = app.get_subcommands().front();
    const auto& binder = binders.at(sub->get_name());
    const json effective = binder.effective();
    // Config-file values skip CLI11's validators.
    const auto format = effective.at("format").get<std::string>();
    if (format != "csv" && format != "json") {
        err << "usage error: format must be csv or json, got '" << format << "'\n";
        return kExitUsage;
    }
    err << effective.dump() << "\n";
    const json header = header_config(effective);

    std::string destination = "-";
    std::string content;
    try {
        const auto& name = sub->get_name();
        if (name == "toy") {
            destination = toy.out;
            content = run_toy(toy, header);
        } else if (name == "trajectory") {
            destination = traj.out;
            content = run_trajectory(traj, header);
        } else if (name == "crb") {
            destination = crb_p.out;
            content = run_crb(crb_p, header);
        } else if (name == "simulate") {
            destination = sim.out;
            content = run_simulate(sim, header);
        } else {
            destination = map_p.out;
            content = run_map(map_p, header);
        }
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "runtime error: " << e.what() << "\n";
        return kExitRuntime;
    }

    try {
        if (destination.empty() || destination == "-") {
            out << content;
            out.flush();
        } else {
            output::write_atomic(destination, content);
        }
    } catch (const std::exception& e) {
        err << "output error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitOk;
}

int run(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(args, std::cout, std::cerr);
}

}  // namespace qae::cli
