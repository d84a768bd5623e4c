// E[cos^2 x] over [0, b_max) encoded on m discretization qubits, plus the
// CNOT-count arithmetic used to extrapolate ancilla noise to hardware.

#pragma once

#include <cstdint>
#include <numbers>

namespace qae {

struct ToyProblem {
    double b_max = std::numbers::pi / 5.0;
    unsigned m = 3;

    // b_max > 0 and 1 <= m <= 24; throws std::invalid_argument otherwise.
    void validate() const;
};

// Probability of the good outcome on the encoded state:
// 2^-m * sum_{x < 2^m} cos^2(b_max x / 2^m).
double true_alpha(const ToyProblem& problem);

// The integral the discretization approximates: 1/2 + sin(2 b_max) / (4 b_max).
double continuum_alpha(double b_max);

// arccos(sqrt(alpha)), alpha in [0, 1].
double theta_from_alpha(double alpha);

std::uint64_t grover_cnot_count(std::uint64_t n);

// Grover-level error rate from a per-CNOT rate: 1 - (1 - gamma_cnot)^(6n + 4).
double gamma_effective(double gamma_cnot, std::uint64_t n);

}  // namespace qae
