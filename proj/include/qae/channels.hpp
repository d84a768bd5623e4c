// Readout-qubit noise channels and the effective-state dynamics of a noisy
// Grover series.
//
// The readout qubit starts in cos(theta)|0> + sin(theta)|1>. Every Grover
// iteration rotates it by 2*theta in the x-z plane of the Bloch sphere
// (Bloch angle by 4*theta) and is followed by one application of the noise
// channel. After any number of rounds the readout state is written as
//
//     p_eff |psi_eff><psi_eff| + (1 - p_eff) I/2,
//     |psi_eff> = cos(phi)|0> + sin(phi)|1>.
//
// Dephasing strength convention: off-diagonals are scaled by (1 - gamma), so
// gamma is the probability of complete dephasing. The Kraus pair
// diag(1, sqrt(1-g)), diag(0, sqrt(g)) scales them by sqrt(1 - g); the two
// families coincide under g = 1 - (1 - gamma)^2.

#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace qae {

enum class ChannelKind { ideal, depolarizing, dephasing, damping };

class NoiseChannel {
  public:
    NoiseChannel() = default;
    NoiseChannel(ChannelKind kind, double gamma);

    static NoiseChannel ideal() { return {}; }
    static NoiseChannel depolarizing(double gamma) { return {ChannelKind::depolarizing, gamma}; }
    static NoiseChannel dephasing(double gamma) { return {ChannelKind::dephasing, gamma}; }
    static NoiseChannel damping(double gamma) { return {ChannelKind::damping, gamma}; }

    // "ideal", "depol:<g>", "dephase:<g>", "damp:<g>".
    static NoiseChannel parse(std::string_view text);
    std::string to_string() const;

    ChannelKind kind() const { return kind_; }
    double gamma() const { return gamma_; }

    // True when the channel acts as the identity (ideal kind or gamma == 0).
    bool is_noiseless() const { return kind_ == ChannelKind::ideal || gamma_ == 0.0; }

    // Same kind, different strength.
    NoiseChannel with_gamma(double gamma) const;

    friend bool operator==(const NoiseChannel&, const NoiseChannel&) = default;

  private:
    ChannelKind kind_ = ChannelKind::ideal;
    double gamma_ = 0.0;
};

struct EffectiveState {
    double phi = 0.0;    // unwrapped: accumulated angle, not reduced mod pi
    double p_eff = 1.0;
    bool degenerate = false;  // p_eff below 1e-15; phi is meaningless

    bool valid() const;
};

struct BlochVector {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

// 2x2 density matrix, row-major.
class DensityMatrix2 {
  public:
    DensityMatrix2() = default;
    explicit DensityMatrix2(const std::array<std::complex<double>, 4>& entries) : m_(entries) {}

    // |psi><psi| for psi = cos(angle)|0> + sin(angle)|1>.
    static DensityMatrix2 pure(double angle);
    static DensityMatrix2 maximally_mixed();

    std::complex<double> operator()(int row, int col) const { return m_[2 * row + col]; }
    std::complex<double>& operator()(int row, int col) { return m_[2 * row + col]; }

    std::complex<double> trace() const { return m_[0] + m_[3]; }
    double min_eigenvalue() const;
    bool is_hermitian(double tol = 1e-12) const;
    // Hermitian, unit trace, eigenvalues >= -1e-12.
    bool is_valid(double tol = 1e-12) const;

    BlochVector bloch() const;

    DensityMatrix2 conjugated_by(const std::array<std::complex<double>, 4>& unitary) const;

  private:
    std::array<std::complex<double>, 4> m_{};
};

DensityMatrix2 apply_channel(const DensityMatrix2& rho, const NoiseChannel& channel);

// Rotates the surviving pure component by theta (phi -> phi + 2 theta).
EffectiveState grover_rotate(const EffectiveState& state, double theta);

// State after k rounds of (Grover rotation, channel) starting from phi = theta,
// p_eff = 1.
EffectiveState propagate(double theta, std::uint64_t k, const NoiseChannel& channel);

// propagate for every k = 0..max_k, in one sweep.
std::vector<EffectiveState> propagate_trajectory(double theta, std::uint64_t max_k, const NoiseChannel& channel);

// propagate for each requested k (any order, duplicates allowed); one sweep
// up to the largest k for channels without a closed form.
std::vector<EffectiveState> propagate_many(double theta, const std::vector<std::uint64_t>& ks,
                                           const NoiseChannel& channel);

struct OracleState {
    EffectiveState state;  // phi reduced to (-pi/2, pi/2]
    double max_abs_y = 0.0;  // largest |y| Bloch component seen along the way
};

// Brute-force reference for propagate: explicit complex 2x2 matrices,
// rotation by conjugation and apply_channel, decomposed at readout.
OracleState density_oracle(double theta, std::uint64_t k, const NoiseChannel& channel);

// Probability of the good outcome 0: p_eff cos^2(phi) + (1 - p_eff)/2.
double noisy_amplitude(const EffectiveState& state);

}  // namespace qae
