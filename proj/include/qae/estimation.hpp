// Measurement sampling, noise-aware likelihood and maximum-likelihood
// estimation of theta (and alpha = cos^2 theta).

#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "qae/channels.hpp"
#include "qae/schedules.hpp"

namespace qae {

struct ExperimentRecord {
    std::uint64_t k = 0;
    std::uint64_t shots = 1;  // N
    std::uint64_t good = 0;   // number of outcome-0 shots
    std::uint64_t seed = 0;

    double fraction() const { return static_cast<double>(good) / static_cast<double>(shots); }

    // Record from an observed fraction; p * N must be an integer within 1e-9.
    static ExperimentRecord from_fraction(std::uint64_t k, std::uint64_t shots, double p, std::uint64_t seed = 0);
};

struct MleResult {
    double theta_hat = 0.0;
    double alpha_hat = 1.0;
    double log_likelihood_at_max = 0.0;
    double grid_resolution = 0.0;  // coarse grid spacing in theta
};

class MleFailure : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Binomial draw of the good-outcome count with probability
// noisy_amplitude(propagate(theta_true, k, channel)). Generator: mt19937_64
// seeded with `seed`.
ExperimentRecord sample_experiment(double theta_true, std::uint64_t k, std::uint64_t shots, const NoiseChannel& channel,
                                   std::uint64_t seed);

// One record per schedule entry; entry s uses seed seed_base + s.
std::vector<ExperimentRecord> sample_schedule(double theta_true, const Schedule& schedule, const NoiseChannel& channel,
                                              std::uint64_t seed_base);

// sum_s [good_s ln a_s + (N_s - good_s) ln(1 - a_s)], a_s the noisy good
// probability at the hypothesis theta. -inf when an observed outcome has
// probability zero.
double log_likelihood(std::span<const ExperimentRecord> records, double theta, const NoiseChannel& channel);

struct MleOptions {
    double boundary_epsilon = 1e-9;
    double points_per_period = 20.0;
    double bracket_tolerance = 1e-8;
};

// Coarse grid over [eps, pi/2 - eps] with at least points_per_period points
// per period pi/(2 k_max + 1), then golden-section refinement around the best
// grid point. Throws MleFailure when every grid likelihood is -inf.
MleResult mle_estimate(std::span<const ExperimentRecord> records, const NoiseChannel& channel,
                       const MleOptions& options = {});

void to_json(nlohmann::json& j, const ExperimentRecord& record);
void from_json(const nlohmann::json& j, ExperimentRecord& record);
void to_json(nlohmann::json& j, const MleResult& result);

}  // namespace qae
