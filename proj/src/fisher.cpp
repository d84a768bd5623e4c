#include "qae/fisher.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "qae/toyproblem.hpp"

namespace qae {

namespace {

// Slope step for the effective state, scaled by the oscillation frequency.
double slope_step(std::uint64_t k) { return 1e-3 / (2.0 * static_cast<double>(k) + 1.0); }

struct Slopes {
    double phi = 0.0;
    double p = 0.0;
};

// Five-point central differences of phi and p_eff with respect to theta.
Slopes state_slopes(double theta, std::uint64_t k, const NoiseChannel& channel) {
    const double h = slope_step(k);
    const auto f2 = propagate(theta + 2.0 * h, k, channel);
    const auto f1 = propagate(theta + h, k, channel);
    const auto b1 = propagate(theta - h, k, channel);
    const auto b2 = propagate(theta - 2.0 * h, k, channel);
    return {(-f2.phi + 8.0 * f1.phi - 8.0 * b1.phi + b2.phi) / (12.0 * h),
            (-f2.p_eff + 8.0 * f1.p_eff - 8.0 * b1.p_eff + b2.p_eff) / (12.0 * h)};
}

void require_open_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in the open interval (0, 1)");
}

void require_open_theta(double theta) {
    if (!(theta > 0.0 && theta < std::numbers::pi / 2.0)) {
        throw std::invalid_argument("theta must lie in the open interval (0, pi/2)");
    }
}

double odd_square(std::uint64_t k) {
    const double w = 2.0 * static_cast<double>(k) + 1.0;
    return w * w;
}

// Single-shot information about alpha. d_phi and d_p are the theta-slopes of
// the effective angle and purity; alpha = cos^2 theta contributes the
// 1/sin^2(2 theta) chain-rule factor.
double noisy_information(double theta, const EffectiveState& state, double d_phi, double d_p, FisherForm form) {
    if (state.degenerate || state.p_eff <= 0.0) return 0.0;
    const double p = state.p_eff;
    const double s = std::sin(state.phi);
    const double c = std::cos(state.phi);
    const double s2 = s * s;
    const double c2 = c * c;
    const double good = p * c2 + 0.5 * (1.0 - p);
    const double bad = p * s2 + 0.5 * (1.0 - p);
    const double sin2t = std::sin(2.0 * theta);
    const double chain = 1.0 / (sin2t * sin2t);

    if (form == FisherForm::angle_slope_only) {
        // p == 1 at a polar state: s2 c2 / c2 -> s2, the finite limit.
        const double good_term = good > 0.0 ? p * p * s2 * c2 / good : p * s2;
        const double bad_term = bad > 0.0 ? p * p * s2 * c2 / bad : p * c2;
        return 4.0 * d_phi * d_phi * (good_term + bad_term) * chain;
    }

    // Pure state at a polar angle: limit of (sin 2phi d_phi)^2 / (c2 s2).
    if (good <= 0.0 || bad <= 0.0) return 4.0 * d_phi * d_phi * chain;
    const double d_good = -p * std::sin(2.0 * state.phi) * d_phi + 0.5 * std::cos(2.0 * state.phi) * d_p;
    return d_good * d_good * chain * (1.0 / good + 1.0 / bad);
}

std::vector<std::uint64_t> powers_of(const Schedule& schedule) {
    std::vector<std::uint64_t> ks;
    ks.reserve(schedule.size());
    for (const auto& e : schedule.entries) ks.push_back(e.k);
    return ks;
}

double good_probability(double theta, std::uint64_t k, const NoiseChannel& channel) {
    return noisy_amplitude(propagate(theta, k, channel));
}

// Good-outcome probability minus one half. Differencing this instead of the
// probability keeps relative precision once the signal has decayed towards 1/2.
double good_excess(double theta, std::uint64_t k, const NoiseChannel& channel) {
    const auto state = propagate(theta, k, channel);
    return state.degenerate ? 0.0 : 0.5 * state.p_eff * std::cos(2.0 * state.phi);
}

}  // namespace

double qfi(std::uint64_t k, double alpha) {
    require_open_alpha(alpha);
    return 4.0 * odd_square(k) / (alpha * (1.0 - alpha));
}

double fisher_entry_depolarizing(double alpha, std::uint64_t k, std::uint64_t shots, double gamma) {
    require_open_alpha(alpha);
    if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("depolarizing gamma must lie in [0, 1)");

    const double theta = theta_from_alpha(alpha);
    const double c = std::cos((2.0 * static_cast<double>(k) + 1.0) * theta);
    const double clean = c * c;
    const double survive = std::pow(1.0 - gamma, static_cast<double>(k));
    const double noisy = survive * clean + 0.5 * (1.0 - survive);

    // With no effective noise the ratio below is identically 1, including its
    // 0/0 limit at clean in {0, 1}.
    double ratio = 1.0;
    if (survive != 1.0) {
        const double denom = noisy * (1.0 - noisy);
        if (denom <= 0.0) return 0.0;
        ratio = clean * (1.0 - clean) / denom;
    }
    return survive * survive * ratio * static_cast<double>(shots) * odd_square(k) / (alpha * (1.0 - alpha));
}

double fisher_entry_general(double theta, std::uint64_t k, std::uint64_t shots, const NoiseChannel& channel,
                            FisherForm form) {
    require_open_theta(theta);
    const auto state = propagate(theta, k, channel);
    const auto d = state_slopes(theta, k, channel);
    return static_cast<double>(shots) * noisy_information(theta, state, d.phi, d.p, form);
}

void accumulate(FisherReport& report) {
    const std::size_t n = report.per_entry.size();
    report.cumulative_fisher.assign(n, 0.0);
    report.crb.assign(n, 0.0);
    report.cumulative_calls.assign(n, 0);
    double total = 0.0;
    std::uint64_t calls = 0;
    for (std::size_t s = 0; s < n; ++s) {
        const auto& e = report.per_entry[s];
        total += e.fisher;
        calls += e.shots * (2 * e.k + 1);
        report.cumulative_fisher[s] = total;
        report.crb[s] = crb(total);
        report.cumulative_calls[s] = calls;
    }
}

FisherReport fisher_depolarizing(const Schedule& schedule, double alpha, double gamma) {
    FisherReport report;
    report.per_entry.reserve(schedule.size());
    for (const auto& e : schedule.entries) {
        report.per_entry.push_back({e.k, e.shots, fisher_entry_depolarizing(alpha, e.k, e.shots, gamma)});
    }
    accumulate(report);
    return report;
}

FisherReport fisher_general(double theta, const Schedule& schedule, const NoiseChannel& channel, FisherForm form) {
    require_open_theta(theta);
    const auto ks = powers_of(schedule);
    const auto centre = propagate_many(theta, ks, channel);

    FisherReport report;
    report.per_entry.reserve(schedule.size());
    for (std::size_t s = 0; s < schedule.size(); ++s) {
        const auto& e = schedule.entries[s];
        const auto d = state_slopes(theta, e.k, channel);
        report.per_entry.push_back(
            {e.k, e.shots, static_cast<double>(e.shots) * noisy_information(theta, centre[s], d.phi, d.p, form)});
    }
    accumulate(report);
    return report;
}

FisherReport fisher_report(double alpha, const Schedule& schedule, const NoiseChannel& channel, FisherForm form) {
    if (channel.kind() == ChannelKind::ideal || channel.kind() == ChannelKind::depolarizing) {
        return fisher_depolarizing(schedule, alpha, channel.gamma());
    }
    return fisher_general(theta_from_alpha(alpha), schedule, channel, form);
}

double score_oracle(double theta, std::uint64_t k, std::uint64_t shots, const NoiseChannel& channel) {
    require_open_theta(theta);
    // Five-point central stencil; step shrinks with the oscillation frequency.
    const double h = 1e-3 / (2.0 * static_cast<double>(k) + 1.0);
    const double d_good_d_theta = (-good_excess(theta + 2.0 * h, k, channel) +
                                   8.0 * good_excess(theta + h, k, channel) -
                                   8.0 * good_excess(theta - h, k, channel) +
                                   good_excess(theta - 2.0 * h, k, channel)) /
                                  (12.0 * h);
    const double d_alpha_d_theta = -std::sin(2.0 * theta);
    const double d_good = d_good_d_theta / d_alpha_d_theta;

    const double good = good_probability(theta, k, channel);
    const double outcomes[2][2] = {
        // {probability, d/d alpha of that probability}
        {good, d_good},
        {1.0 - good, -d_good},
    };
    double info = 0.0;
    for (const auto& outcome : outcomes) {
        const double prob = outcome[0];
        if (prob <= 0.0) continue;
        const double score = outcome[1] / prob;
        info += prob * score * score;
    }
    return static_cast<double>(shots) * info;
}

double crb(double fisher_total) {
    if (!(fisher_total >= 0.0)) throw std::invalid_argument("Fisher information must be non-negative");
    if (fisher_total == 0.0) return std::numeric_limits<double>::infinity();
    return 1.0 / std::sqrt(fisher_total);
}

double crb_biased(double fisher_total, double bias, double bias_slope) {
    if (!(fisher_total >= 0.0)) throw std::invalid_argument("Fisher information must be non-negative");
    const double lead = (1.0 + bias_slope) * (1.0 + bias_slope);
    if (fisher_total == 0.0) {
        return lead == 0.0 ? std::abs(bias) : std::numeric_limits<double>::infinity();
    }
    return std::sqrt(lead / fisher_total + bias * bias);
}

}  // namespace qae
