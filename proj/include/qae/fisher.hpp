// Fisher information (with respect to alpha = cos^2 theta) and Cramer-Rao
// bounds for Grover schedules, with and without readout noise.

#pragma once

#include <cstdint>
#include <vector>

#include "qae/channels.hpp"
#include "qae/schedules.hpp"

namespace qae {

struct FisherEntry {
    std::uint64_t k = 0;
    std::uint64_t shots = 0;
    double fisher = 0.0;  // N_s times the single-shot information
};

struct FisherReport {
    std::vector<FisherEntry> per_entry;
    std::vector<double> cumulative_fisher;
    std::vector<double> crb;  // +inf where cumulative information is 0
    std::vector<std::uint64_t> cumulative_calls;

    std::size_t size() const { return per_entry.size(); }
};

// How the general-channel information treats the effective state.
//
// total_derivative differentiates the good-outcome probability
// p_eff cos^2(phi) + (1 - p_eff)/2 through both phi and p_eff; it is the
// Fisher information of the measurement. angle_slope_only keeps only the
// dphi/dtheta term,
//
//   4 (dphi/dtheta)^2 p^2 sin^2(phi) cos^2(phi) / sin^2(2 theta)
//     * (1/(p cos^2 phi + (1-p)/2) + 1/(p sin^2 phi + (1-p)/2)),
//
// which vanishes at every polar phi. The two agree whenever p_eff does not
// depend on theta (ideal and depolarizing channels); under damping and
// dephasing the second is only an approximation.
enum class FisherForm { total_derivative, angle_slope_only };

// Quantum Fisher information of Q^k|psi> about alpha: 4 (2k+1)^2 / (alpha (1 - alpha)).
double qfi(std::uint64_t k, double alpha);

// Closed-form per-entry information under depolarizing noise (gamma = 0 is
// the noise-free case). Zero where alpha~_s (1 - alpha~_s) vanishes.
double fisher_entry_depolarizing(double alpha, std::uint64_t k, std::uint64_t shots, double gamma);

// Per-entry information for any channel, from the effective state and its
// five-point central-difference slopes in theta, step 1e-3 / (2k + 1).
double fisher_entry_general(double theta, std::uint64_t k, std::uint64_t shots, const NoiseChannel& channel,
                            FisherForm form = FisherForm::total_derivative);

FisherReport fisher_depolarizing(const Schedule& schedule, double alpha, double gamma);
FisherReport fisher_general(double theta, const Schedule& schedule, const NoiseChannel& channel,
                            FisherForm form = FisherForm::total_derivative);

// Closed form for ideal and depolarizing channels, general form otherwise.
FisherReport fisher_report(double alpha, const Schedule& schedule, const NoiseChannel& channel,
                           FisherForm form = FisherForm::total_derivative);

// Brute-force Fisher information: enumerates both measurement outcomes and
// differentiates ln Prob(outcome) numerically through propagate and
// noisy_amplitude. Independent of both closed forms.
double score_oracle(double theta, std::uint64_t k, std::uint64_t shots, const NoiseChannel& channel);

// 1/sqrt(F); +inf for F == 0.
double crb(double fisher_total);

// sqrt((1 + b')^2 / F + b^2), the RMS-error bound for an estimator with bias
// b and bias slope b'. Note b' = -1 makes the first term vanish whatever F is.
double crb_biased(double fisher_total, double bias, double bias_slope);

// Fills cumulative_fisher, crb and cumulative_calls from per_entry, summing
// in index order.
void accumulate(FisherReport& report);

}  // namespace qae
