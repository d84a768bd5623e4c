#include <array>
#include <cmath>
#include <initializer_list>
#include <limits>
#include <numbers>
#include <random>

#include "doctest.h"
#include "qae/fisher.hpp"
#include "qae/harness.hpp"
#include "qae/toyproblem.hpp"

using namespace qae;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

double rel(double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

// Good-outcome probability from explicit real Kraus matrices; shares no code
// with the library.
double kraus_good(double theta, int k, ChannelKind kind, double g) {
    double r00 = std::cos(theta) * std::cos(theta), r01 = std::cos(theta) * std::sin(theta),
           r11 = std::sin(theta) * std::sin(theta);
    const double c = std::cos(2 * theta), s = std::sin(2 * theta);
    for (int i = 0; i < k; ++i) {
        const double a00 = c * c * r00 - 2 * c * s * r01 + s * s * r11;
        const double a11 = s * s * r00 + 2 * c * s * r01 + c * c * r11;
        const double a01 = c * s * (r00 - r11) + (c * c - s * s) * r01;
        r00 = a00, r01 = a01, r11 = a11;
        switch (kind) {
            case ChannelKind::ideal: break;
            case ChannelKind::depolarizing:
                r00 = (1 - g) * r00 + g / 2, r11 = (1 - g) * r11 + g / 2, r01 *= (1 - g);
                break;
            case ChannelKind::dephasing: r01 *= (1 - g); break;
            case ChannelKind::damping:
                r00 += g * r11, r11 *= (1 - g), r01 *= std::sqrt(1 - g);
                break;
        }
    }
    return r00;
}

// Bernoulli Fisher information about alpha from the reference probability.
double kraus_fisher(double alpha, int k, ChannelKind kind, double g) {
    const double theta = std::acos(std::sqrt(alpha));
    const double h = 1e-4 / (2 * k + 1);
    const double d = (kraus_good(theta - 2 * h, k, kind, g) - 8 * kraus_good(theta - h, k, kind, g) +
                      8 * kraus_good(theta + h, k, kind, g) - kraus_good(theta + 2 * h, k, kind, g)) /
                     (12 * h) / (-std::sin(2 * theta));
    const double p = kraus_good(theta, k, kind, g);
    return d * d / (p * (1 - p));
}

}  // namespace

TEST_CASE("quantum Fisher information") {
    CHECK(qfi(0, 0.5) == Approx(16.0));
    CHECK(qfi(1, 0.5) == Approx(144.0));
    for (std::uint64_t k = 0; k < 20; ++k) CHECK(qfi(k, 0.3) / qfi(0, 0.3) == Approx((2.0 * k + 1) * (2.0 * k + 1)));
    CHECK_THROWS(qfi(1, 0.0));
    CHECK_THROWS(qfi(1, 1.0));
}

TEST_CASE("depolarizing closed form") {
    CHECK(fisher_entry_depolarizing(0.5, 0, 1, 0.0) == Approx(4.0));
    for (std::uint64_t k = 0; k < 15; ++k) {
        CHECK(fisher_entry_depolarizing(0.37, k, 3, 0.0) ==
              Approx(3.0 * (2.0 * k + 1) * (2.0 * k + 1) / (0.37 * 0.63)).epsilon(1e-12));
    }

    const double value = fisher_entry_depolarizing(0.5, 1, 1, 0.1);
    CHECK(value == Approx(29.16).epsilon(1e-12));
    CHECK(score_oracle(kPi / 4, 1, 1, NoiseChannel::depolarizing(0.1)) == Approx(29.16).epsilon(1e-6));
    CHECK(kraus_fisher(0.5, 1, ChannelKind::depolarizing, 0.1) == Approx(29.16).epsilon(1e-6));

    CHECK_THROWS(fisher_entry_depolarizing(0.5, 1, 1, 1.0));
    CHECK_THROWS(fisher_entry_depolarizing(1.0, 1, 1, 0.1));
}

TEST_CASE("exact aliasing points contribute zero") {
    // alpha = 1/2, k = 0 is polar after (2k+1) theta only for theta = pi/2;
    // use theta = pi/6, k = 1: 3 theta = pi/2, the pure bad state.
    const double alpha = std::pow(std::cos(kPi / 6), 2);
    const double noise_free = fisher_entry_depolarizing(alpha, 1, 1, 0.0);
    CHECK(noise_free == Approx(9.0 / (alpha * (1 - alpha))));
    CHECK(fisher_entry_depolarizing(alpha, 1, 1, 0.2) < 1e-20);
    CHECK(fisher_entry_general(kPi / 6, 1, 1, NoiseChannel::damping(0.2)) < 1e-20);
}

TEST_CASE("every per-entry value matches the enumeration oracle") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> ut(0.05, kPi / 2 - 0.05), ug(0.01, 0.3);
    double worst = 0.0;
    for (auto kind : {ChannelKind::depolarizing, ChannelKind::dephasing, ChannelKind::damping}) {
        for (int rep = 0; rep < 8; ++rep) {
            const double theta = ut(rng);
            const NoiseChannel ch(kind, ug(rng));
            const double alpha = std::pow(std::cos(theta), 2);
            auto report = fisher_report(alpha, make_schedule("linear", 41, 3), ch);
            for (const auto& e : report.per_entry) {
                const double oracle = score_oracle(theta, e.k, e.shots, ch);
                // Below this size the oracle's own finite-difference error dominates.
                if (oracle < 1e-6 * std::pow(2.0 * e.k + 1, 2)) continue;
                worst = std::max(worst, rel(e.fisher, oracle));
            }
        }
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("oracle agrees with an independent Kraus-matrix computation") {
    const double alpha = true_alpha({});
    for (auto kind : {ChannelKind::depolarizing, ChannelKind::dephasing, ChannelKind::damping}) {
        for (int k : {0, 1, 3, 8, 20}) {
            const NoiseChannel ch(kind, 0.12);
            const double lib = fisher_report(alpha, Schedule{"custom", {{std::uint64_t(k), 1}}}, ch).per_entry[0].fisher;
            CHECK(rel(lib, kraus_fisher(alpha, k, kind, 0.12)) < 1e-6);
        }
    }
}

TEST_CASE("general path reduces to the closed forms") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> ut(0.02, kPi / 2 - 0.02), ug(0.0, 0.3);
    double worst = 0.0;
    for (int rep = 0; rep < 30; ++rep) {
        const double theta = ut(rng);
        const double alpha = std::pow(std::cos(theta), 2);
        const double g = ug(rng);
        auto s = make_schedule("linear", 41, 1 + rep % 4);
        auto closed = fisher_depolarizing(s, alpha, g);
        auto general = fisher_general(theta, s, NoiseChannel::depolarizing(g));
        auto ideal = fisher_general(theta, s, NoiseChannel::ideal());
        auto closed_ideal = fisher_depolarizing(s, alpha, 0.0);
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (closed.per_entry[i].fisher > 1e-8) worst = std::max(worst, rel(closed.per_entry[i].fisher, general.per_entry[i].fisher));
            worst = std::max(worst, rel(closed_ideal.per_entry[i].fisher, ideal.per_entry[i].fisher));
        }
    }
    CHECK(worst < 1e-9);
}

TEST_CASE("the two general forms agree exactly when purity is theta-independent") {
    const double theta = 0.41;
    for (std::uint64_t k = 0; k < 30; ++k) {
        const auto ch = NoiseChannel::depolarizing(0.08);
        CHECK(rel(fisher_entry_general(theta, k, 1, ch, FisherForm::total_derivative),
                  fisher_entry_general(theta, k, 1, ch, FisherForm::angle_slope_only)) < 1e-9);
    }
    // Under damping p_eff depends on theta and the angle-only form drops
    // information: it disagrees with the oracle by orders of magnitude at k = 2.
    const double t0 = theta_from_alpha(true_alpha({}));
    const auto damp = NoiseChannel::damping(0.2);
    const double oracle = score_oracle(t0, 2, 1, damp);
    CHECK(rel(fisher_entry_general(t0, 2, 1, damp), oracle) < 1e-6);
    CHECK(fisher_entry_general(t0, 2, 1, damp, FisherForm::angle_slope_only) > 100 * oracle);
}

TEST_CASE("angle-only form vanishes at polar effective states") {
    const auto ch = NoiseChannel::damping(0.2);
    int checked = 0;
    for (std::uint64_t k = 1; k <= 60; k += 3) {
        auto f = [&](double t) { return std::sin(2 * propagate(t, k, ch).phi); };
        double a = 0.05, fa = f(a);
        for (int i = 1; i <= 400 && checked < 200; ++i) {
            const double b = 0.05 + i * (kPi / 2 - 0.1) / 400;
            const double fb = f(b);
            if (fa * fb < 0) {
                double lo = a, hi = b;
                for (int it = 0; it < 80; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    (f(lo) * f(mid) <= 0 ? hi : lo) = mid;
                }
                const double t = 0.5 * (lo + hi);
                const auto state = propagate(t, k, ch);
                if (std::abs(std::sin(2 * state.phi)) < 1e-4 && state.p_eff < 1) {
                    CHECK(fisher_entry_general(t, k, 1, ch, FisherForm::angle_slope_only) < 1e-6 * (2.0 * k + 1) * (2.0 * k + 1));
                    ++checked;
                }
            }
            a = b, fa = fb;
        }
    }
    CHECK(checked > 20);
}

TEST_CASE("per-entry information is non-monotone in k under damping") {
    const double theta = theta_from_alpha(true_alpha({}));
    auto r = fisher_general(theta, make_schedule("linear", 61, 1), NoiseChannel::damping(0.2));
    int descents = 0;
    for (std::size_t i = 1; i < r.size(); ++i) descents += r.per_entry[i].fisher < r.per_entry[i - 1].fisher;
    CHECK(descents > 10);
    CHECK(r.per_entry[2].fisher < 1e-3 * r.per_entry[3].fisher);
}

TEST_CASE("additivity over concatenated schedules") {
    const double alpha = true_alpha({});
    for (auto ch : {NoiseChannel::ideal(), NoiseChannel::depolarizing(0.05), NoiseChannel::dephasing(0.1),
                    NoiseChannel::damping(0.1)}) {
        auto a = make_schedule("linear", 7, 10);
        auto b = make_schedule("exponential", 6, 3);
        Schedule both{"custom", a.entries};
        both.entries.insert(both.entries.end(), b.entries.begin(), b.entries.end());
        const double total = fisher_report(alpha, both, ch).cumulative_fisher.back();
        const double parts = fisher_report(alpha, a, ch).cumulative_fisher.back() +
                             fisher_report(alpha, b, ch).cumulative_fisher.back();
        CHECK(rel(total, parts) < 1e-12);
    }
}

TEST_CASE("depolarizing information eventually decays and the bound saturates") {
    const double alpha = true_alpha({});
    auto r = fisher_depolarizing(make_schedule("linear", 400, 1), alpha, 0.05);
    // Envelope: (1-g)^{2k} (2k+1)^2 falls beyond its peak at k ~ 1/(-ln(1-g)).
    double late_max = 0.0, early_max = 0.0;
    for (const auto& e : r.per_entry) {
        double& slot = e.k < 200 ? early_max : late_max;
        slot = std::max(slot, e.fisher);
    }
    CHECK(late_max < 1e-3 * early_max);
    CHECK(r.crb.back() == Approx(r.crb[250]).epsilon(1e-6));
}

TEST_CASE("bounds") {
    CHECK(crb(4.0) == 0.5);
    CHECK(std::isinf(crb(0.0)));
    CHECK_THROWS(crb(-1.0));
    CHECK(crb_biased(4.0, 0.0, 0.0) == 0.5);
    CHECK(crb_biased(4.0, 0.1, 0.0) == Approx(std::sqrt(0.26)).epsilon(1e-15));
    CHECK(crb_biased(4.0, 0.1, 0.0) == Approx(0.5099).epsilon(1e-4));
    CHECK(crb_biased(9.0, 0.0, -1.0) == 0.0);
    CHECK(crb_biased(9.0, 0.2, -1.0) == Approx(0.2));
}

TEST_CASE("cumulative columns") {
    auto r = fisher_depolarizing(make_schedule("exponential", 6, 100), 0.3, 0.0);
    CHECK(r.cumulative_calls == std::vector<std::uint64_t>{100, 400, 900, 1800, 3500, 6800});
    double sum = 0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        sum += r.per_entry[i].fisher;
        CHECK(r.cumulative_fisher[i] == sum);
        CHECK(r.crb[i] == 1.0 / std::sqrt(sum));
    }
}

TEST_CASE("noise-free scaling exponents") {
    const double alpha = true_alpha({});
    auto slope = [&](const char* kind) {
        auto r = fisher_depolarizing(make_schedule(kind, 15, 100), alpha, 0.0);
        std::vector<double> x, y;
        for (std::size_t i = 7; i < 15; ++i) x.push_back(double(r.cumulative_calls[i])), y.push_back(r.crb[i]);
        return fit_loglog_slope(x, y);
    };
    CHECK(slope("classical") == Approx(-0.5).epsilon(0.02 / 0.5));
    CHECK(std::abs(slope("linear") + 0.75) < 0.05);
    CHECK(std::abs(slope("quadratic") + 5.0 / 6.0) < 0.05);
    CHECK(std::abs(slope("exponential") + 1.0) < 0.05);
}
