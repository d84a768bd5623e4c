#include "qae/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace qae {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct OutcomeProbabilities {
    double good = 0.0;
    double bad = 0.0;
};

// good and bad computed separately so 1 - good keeps full precision near 0.
OutcomeProbabilities outcome_probabilities(const EffectiveState& state) {
    const double c = std::cos(state.phi);
    const double s = std::sin(state.phi);
    const double mixed = 0.5 * (1.0 - state.p_eff);
    return {state.p_eff * c * c + mixed, state.p_eff * s * s + mixed};
}

double record_term(const ExperimentRecord& r, const OutcomeProbabilities& prob) {
    const double good = static_cast<double>(r.good);
    const double bad = static_cast<double>(r.shots - r.good);
    double term = 0.0;
    if (r.good > 0) {
        if (prob.good <= 0.0) return kNegInf;
        term += good * std::log(prob.good);
    }
    if (r.shots > r.good) {
        if (prob.bad <= 0.0) return kNegInf;
        term += bad * std::log(prob.bad);
    }
    return term;
}

// Evaluates the log-likelihood at many thetas, reusing the power list.
class LikelihoodEvaluator {
  public:
    LikelihoodEvaluator(std::span<const ExperimentRecord> records, const NoiseChannel& channel)
        : records_(records), channel_(channel) {
        ks_.reserve(records.size());
        for (const auto& r : records) ks_.push_back(r.k);
        closed_form_ = channel.is_noiseless() || channel.kind() == ChannelKind::depolarizing;
        if (closed_form_) {
            survive_.reserve(records.size());
            for (auto k : ks_) {
                survive_.push_back(channel.is_noiseless() ? 1.0
                                                          : std::pow(1.0 - channel.gamma(), static_cast<double>(k)));
            }
        }
    }

    double operator()(double theta) const {
        double total = 0.0;
        if (closed_form_) {
            for (std::size_t i = 0; i < records_.size(); ++i) {
                const double phi = (2.0 * static_cast<double>(ks_[i]) + 1.0) * theta;
                total += record_term(records_[i], outcome_probabilities({phi, survive_[i], false}));
                if (total == kNegInf) return kNegInf;
            }
            return total;
        }
        const auto states = propagate_many(theta, ks_, channel_);
        for (std::size_t i = 0; i < records_.size(); ++i) {
            total += record_term(records_[i], outcome_probabilities(states[i]));
            if (total == kNegInf) return kNegInf;
        }
        return total;
    }

  private:
    std::span<const ExperimentRecord> records_;
    NoiseChannel channel_;
    std::vector<std::uint64_t> ks_;
    std::vector<double> survive_;
    bool closed_form_ = false;
};

struct Point {
    double theta;
    double value;
};

Point golden_section_max(const LikelihoodEvaluator& f, double lo, double hi, double tol) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo;
    double b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c);
    double fd = f(d);
    while (b - a > tol) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    return fc >= fd ? Point{c, fc} : Point{d, fd};
}

}  // namespace

ExperimentRecord ExperimentRecord::from_fraction(std::uint64_t k, std::uint64_t shots, double p, std::uint64_t seed) {
    if (shots == 0) throw std::invalid_argument("record needs at least one shot");
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("good fraction must lie in [0, 1]");
    const double count = p * static_cast<double>(shots);
    const double rounded = std::round(count);
    if (std::abs(count - rounded) > 1e-9) throw std::invalid_argument("p * N must be an integer");
    return {k, shots, static_cast<std::uint64_t>(rounded), seed};
}

ExperimentRecord sample_experiment(double theta_true, std::uint64_t k, std::uint64_t shots, const NoiseChannel& channel,
                                   std::uint64_t seed) {
    if (shots == 0) throw std::invalid_argument("sample_experiment needs at least one shot");
    const double good_prob = std::clamp(noisy_amplitude(propagate(theta_true, k, channel)), 0.0, 1.0);
    std::mt19937_64 rng(seed);
    std::binomial_distribution<std::uint64_t> draw(shots, good_prob);
    return {k, shots, draw(rng), seed};
}

std::vector<ExperimentRecord> sample_schedule(double theta_true, const Schedule& schedule, const NoiseChannel& channel,
                                              std::uint64_t seed_base) {
    std::vector<ExperimentRecord> records;
    records.reserve(schedule.size());
    for (std::size_t s = 0; s < schedule.size(); ++s) {
        const auto& e = schedule.entries[s];
        records.push_back(sample_experiment(theta_true, e.k, e.shots, channel, seed_base + s));
    }
    return records;
}

double log_likelihood(std::span<const ExperimentRecord> records, double theta, const NoiseChannel& channel) {
    if (records.empty()) throw std::invalid_argument("log_likelihood needs at least one record");
    return LikelihoodEvaluator(records, channel)(theta);
}

MleResult mle_estimate(std::span<const ExperimentRecord> records, const NoiseChannel& channel,
                       const MleOptions& options) {
    if (records.empty()) throw std::invalid_argument("mle_estimate needs at least one record");
    const LikelihoodEvaluator f(records, channel);

    std::uint64_t k_max = 0;
    for (const auto& r : records) k_max = std::max(k_max, r.k);
    const double lo = options.boundary_epsilon;
    const double hi = std::numbers::pi / 2.0 - options.boundary_epsilon;
    const double period = std::numbers::pi / (2.0 * static_cast<double>(k_max) + 1.0);
    const auto intervals = static_cast<std::size_t>(std::ceil((hi - lo) / (period / options.points_per_period)));
    const double spacing = (hi - lo) / static_cast<double>(intervals);

    std::vector<double> values(intervals + 1);
    for (std::size_t i = 0; i <= intervals; ++i) {
        values[i] = f(i == intervals ? hi : lo + spacing * static_cast<double>(i));
    }
    const auto theta_at = [&](std::size_t i) { return i == intervals ? hi : lo + spacing * static_cast<double>(i); };

    // Grid local maxima, best first; refine a few to guard against a
    // neighbouring fringe that the grid under-sampled.
    std::vector<std::size_t> peaks;
    for (std::size_t i = 0; i <= intervals; ++i) {
        if (values[i] == kNegInf) continue;
        const bool left_ok = i == 0 || values[i] >= values[i - 1];
        const bool right_ok = i == intervals || values[i] >= values[i + 1];
        if (left_ok && right_ok) peaks.push_back(i);
    }
    if (peaks.empty()) throw MleFailure("likelihood is zero at every grid point");
    std::sort(peaks.begin(), peaks.end(), [&](std::size_t a, std::size_t b) {
        return values[a] != values[b] ? values[a] > values[b] : a < b;
    });
    constexpr std::size_t kRefined = 4;
    if (peaks.size() > kRefined) peaks.resize(kRefined);

    Point best{theta_at(peaks.front()), values[peaks.front()]};
    for (std::size_t i : peaks) {
        const double a = theta_at(i == 0 ? 0 : i - 1);
        const double b = theta_at(i == intervals ? intervals : i + 1);
        const auto refined = golden_section_max(f, a, b, options.bracket_tolerance);
        if (refined.value > best.value) best = refined;
    }

    MleResult result;
    result.theta_hat = best.theta;
    const double c = std::cos(best.theta);
    result.alpha_hat = c * c;
    result.log_likelihood_at_max = best.value;
    result.grid_resolution = spacing;
    return result;
}

void to_json(nlohmann::json& j, const ExperimentRecord& record) {
    j = nlohmann::json{{"k", record.k}, {"N", record.shots}, {"p", record.fraction()}, {"good", record.good},
                       {"seed", record.seed}};
}

void from_json(const nlohmann::json& j, ExperimentRecord& record) {
    const auto k = j.at("k").get<std::uint64_t>();
    const auto shots = j.at("N").get<std::uint64_t>();
    const auto seed = j.value("seed", std::uint64_t{0});
    if (j.contains("good")) {
        record = {k, shots, j.at("good").get<std::uint64_t>(), seed};
        if (shots == 0 || record.good > shots) throw std::invalid_argument("record counts out of range");
    } else {
        record = ExperimentRecord::from_fraction(k, shots, j.at("p").get<double>(), seed);
    }
}

void to_json(nlohmann::json& j, const MleResult& result) {
    j = nlohmann::json{{"theta_hat", result.theta_hat},
                       {"alpha_hat", result.alpha_hat},
                       {"log_likelihood_at_max", result.log_likelihood_at_max},
                       {"grid_resolution", result.grid_resolution}};
}

}  // namespace qae
