#include "qae/toyproblem.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qae {

void ToyProblem::validate() const {
    if (!(b_max > 0.0) || !std::isfinite(b_max)) throw std::invalid_argument("b_max must be positive");
    if (m < 1 || m > 24) throw std::invalid_argument("m must lie in [1, 24], got " + std::to_string(m));
}

double true_alpha(const ToyProblem& problem) {
    problem.validate();
    const std::uint64_t bins = std::uint64_t{1} << problem.m;
    const double step = problem.b_max / static_cast<double>(bins);

    // Neumaier summation.
    double sum = 0.0;
    double comp = 0.0;
    for (std::uint64_t x = 0; x < bins; ++x) {
        const double c = std::cos(step * static_cast<double>(x));
        const double term = c * c;
        const double t = sum + term;
        comp += std::abs(sum) >= std::abs(term) ? (sum - t) + term : (term - t) + sum;
        sum = t;
    }
    return (sum + comp) / static_cast<double>(bins);
}

double continuum_alpha(double b_max) {
    if (!(b_max > 0.0)) throw std::invalid_argument("b_max must be positive");
    return 0.5 + std::sin(2.0 * b_max) / (4.0 * b_max);
}

double theta_from_alpha(double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in [0, 1]");
    return std::acos(std::sqrt(alpha));
}

std::uint64_t grover_cnot_count(std::uint64_t n) {
    if (n < 1) throw std::invalid_argument("qubit count must be >= 1");
    return 6 * n + 4;
}

double gamma_effective(double gamma_cnot, std::uint64_t n) {
    if (!(gamma_cnot >= 0.0 && gamma_cnot <= 1.0)) throw std::invalid_argument("gamma_cnot must lie in [0, 1]");
    // 1 - (1-g)^c, computed without cancellation for small g.
    return -std::expm1(static_cast<double>(grover_cnot_count(n)) * std::log1p(-gamma_cnot));
}

}  // namespace qae
