#include "qae/channels.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qae {

namespace {

constexpr double kDegenerate = 1e-15;

double wrap_pi(double angle) { return std::remainder(angle, 2.0 * std::numbers::pi); }

// Real-plane state used by the sweep: Bloch length p and unwrapped Bloch
// angle beta = 2 phi, so x = p sin(beta), z = p cos(beta).
struct PlaneState {
    double p = 1.0;
    double beta = 0.0;
    bool degenerate = false;

    EffectiveState effective() const { return {beta / 2.0, p, degenerate}; }
};

// Affine action of each channel on the (x, z) Bloch components.
void channel_step(PlaneState& s, const NoiseChannel& channel) {
    const double g = channel.gamma();
    double x = s.p * std::sin(s.beta);
    double z = s.p * std::cos(s.beta);
    switch (channel.kind()) {
        case ChannelKind::ideal:
            return;
        case ChannelKind::depolarizing:
            s.p *= 1.0 - g;
            s.degenerate = s.p < kDegenerate;
            return;
        case ChannelKind::dephasing:
            x *= 1.0 - g;
            break;
        case ChannelKind::damping:
            x *= std::sqrt(1.0 - g);
            z = g + (1.0 - g) * z;
            break;
    }
    s.p = std::min(std::hypot(x, z), 1.0);
    s.degenerate = s.p < kDegenerate;
    if (!s.degenerate) s.beta += wrap_pi(std::atan2(x, z) - s.beta);
}

void require_theta(double theta) {
    if (!std::isfinite(theta)) throw std::invalid_argument("theta must be finite");
}

}  // namespace

NoiseChannel::NoiseChannel(ChannelKind kind, double gamma) : kind_(kind), gamma_(gamma) {
    if (!(gamma >= 0.0 && gamma <= 1.0)) {
        throw std::invalid_argument("channel strength gamma must lie in [0, 1], got " + std::to_string(gamma));
    }
    if (kind == ChannelKind::ideal && gamma != 0.0) throw std::invalid_argument("ideal channel takes no strength");
}

NoiseChannel NoiseChannel::parse(std::string_view text) {
    if (text == "ideal") return ideal();
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) {
        throw std::invalid_argument("channel must be ideal, depol:<g>, dephase:<g> or damp:<g>, got '" + std::string(text) +
                                    "'");
    }
    const auto name = text.substr(0, colon);
    const auto value = text.substr(colon + 1);
    double gamma = 0.0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), gamma);
    if (ec != std::errc{} || ptr != value.data() + value.size() || value.empty()) {
        throw std::invalid_argument("bad channel strength '" + std::string(value) + "'");
    }
    if (name == "depol") return depolarizing(gamma);
    if (name == "dephase") return dephasing(gamma);
    if (name == "damp") return damping(gamma);
    throw std::invalid_argument("unknown channel kind '" + std::string(name) + "'");
}

std::string NoiseChannel::to_string() const {
    const char* name = nullptr;
    switch (kind_) {
        case ChannelKind::ideal:
            return "ideal";
        case ChannelKind::depolarizing:
            name = "depol";
            break;
        case ChannelKind::dephasing:
            name = "dephase";
            break;
        case ChannelKind::damping:
            name = "damp";
            break;
    }
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, gamma_);
    return std::string(name) + ":" + std::string(buf, ptr);
}

NoiseChannel NoiseChannel::with_gamma(double gamma) const {
    if (kind_ == ChannelKind::ideal) return ideal();
    return {kind_, gamma};
}

bool EffectiveState::valid() const {
    if (!(p_eff >= 0.0 && p_eff <= 1.0) || !std::isfinite(phi)) return false;
    // p_eff in [0,1] already implies a valid density matrix; checked explicitly anyway.
    const double z = p_eff * std::cos(2.0 * phi);
    const double x = p_eff * std::sin(2.0 * phi);
    return std::hypot(x, z) <= 1.0 + 1e-12;
}

DensityMatrix2 DensityMatrix2::pure(double angle) {
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    return DensityMatrix2({c * c, c * s, c * s, s * s});
}

DensityMatrix2 DensityMatrix2::maximally_mixed() { return DensityMatrix2({0.5, 0.0, 0.0, 0.5}); }

double DensityMatrix2::min_eigenvalue() const {
    const double a = m_[0].real();
    const double d = m_[3].real();
    const double off = std::abs(m_[1]);
    return 0.5 * (a + d) - std::sqrt(0.25 * (a - d) * (a - d) + off * off);
}

bool DensityMatrix2::is_hermitian(double tol) const {
    return std::abs(m_[0].imag()) <= tol && std::abs(m_[3].imag()) <= tol && std::abs(m_[1] - std::conj(m_[2])) <= tol;
}

bool DensityMatrix2::is_valid(double tol) const {
    return is_hermitian(tol) && std::abs(trace() - 1.0) <= tol && min_eigenvalue() >= -tol;
}

BlochVector DensityMatrix2::bloch() const {
    // rho = (I + x X + y Y + z Z) / 2, so rho_01 = (x - i y) / 2.
    return {2.0 * m_[1].real(), -2.0 * m_[1].imag(), (m_[0] - m_[3]).real()};
}

DensityMatrix2 DensityMatrix2::conjugated_by(const std::array<std::complex<double>, 4>& u) const {
    std::array<std::complex<double>, 4> tmp{};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int l = 0; l < 2; ++l) tmp[2 * i + j] += u[2 * i + l] * m_[2 * l + j];
    std::array<std::complex<double>, 4> out{};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int l = 0; l < 2; ++l) out[2 * i + j] += tmp[2 * i + l] * std::conj(u[2 * j + l]);
    return DensityMatrix2(out);
}

DensityMatrix2 apply_channel(const DensityMatrix2& rho, const NoiseChannel& channel) {
    const double g = channel.gamma();
    switch (channel.kind()) {
        case ChannelKind::ideal:
            return rho;
        case ChannelKind::depolarizing: {
            DensityMatrix2 out;
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) out(i, j) = (1.0 - g) * rho(i, j) + (i == j ? 0.5 * g : 0.0);
            return out;
        }
        case ChannelKind::dephasing: {
            DensityMatrix2 out = rho;
            out(0, 1) *= 1.0 - g;
            out(1, 0) *= 1.0 - g;
            return out;
        }
        case ChannelKind::damping: {
            const std::array<std::complex<double>, 4> e0{1.0, 0.0, 0.0, std::sqrt(1.0 - g)};
            const std::array<std::complex<double>, 4> e1{0.0, std::sqrt(g), 0.0, 0.0};
            const auto a = rho.conjugated_by(e0);
            const auto b = rho.conjugated_by(e1);
            DensityMatrix2 out;
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) out(i, j) = a(i, j) + b(i, j);
            return out;
        }
    }
    return rho;
}

EffectiveState grover_rotate(const EffectiveState& state, double theta) {
    EffectiveState out = state;
    out.phi += 2.0 * theta;
    return out;
}

EffectiveState propagate(double theta, std::uint64_t k, const NoiseChannel& channel) {
    return propagate_many(theta, {k}, channel).front();
}

std::vector<EffectiveState> propagate_trajectory(double theta, std::uint64_t max_k, const NoiseChannel& channel) {
    std::vector<std::uint64_t> ks(max_k + 1);
    for (std::uint64_t k = 0; k <= max_k; ++k) ks[k] = k;
    return propagate_many(theta, ks, channel);
}

std::vector<EffectiveState> propagate_many(double theta, const std::vector<std::uint64_t>& ks,
                                           const NoiseChannel& channel) {
    require_theta(theta);
    std::vector<EffectiveState> out(ks.size());
    if (ks.empty()) return out;

    if (channel.is_noiseless() || channel.kind() == ChannelKind::depolarizing) {
        // The maximally mixed part is invariant under rotation, so k noisy rounds
        // equal k clean rounds followed by one channel of strength 1 - (1-g)^k.
        const double survive = 1.0 - channel.gamma();
        for (std::size_t i = 0; i < ks.size(); ++i) {
            const double k = static_cast<double>(ks[i]);
            const double p = channel.gamma() == 0.0 ? 1.0 : std::pow(survive, k);
            out[i] = {(2.0 * k + 1.0) * theta, p, p < kDegenerate};
        }
        return out;
    }

    std::vector<std::size_t> order(ks.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ks[a] < ks[b]; });

    PlaneState s{1.0, 2.0 * theta, false};
    std::uint64_t done = 0;
    for (std::size_t idx : order) {
        for (; done < ks[idx]; ++done) {
            s.beta += 4.0 * theta;
            channel_step(s, channel);
        }
        out[idx] = s.effective();
    }
    return out;
}

OracleState density_oracle(double theta, std::uint64_t k, const NoiseChannel& channel) {
    require_theta(theta);
    const double c = std::cos(2.0 * theta);
    const double s = std::sin(2.0 * theta);
    const std::array<std::complex<double>, 4> rotation{c, -s, s, c};

    OracleState result;
    auto rho = DensityMatrix2::pure(theta);
    for (std::uint64_t i = 0; i < k; ++i) {
        rho = apply_channel(rho.conjugated_by(rotation), channel);
        result.max_abs_y = std::max(result.max_abs_y, std::abs(rho.bloch().y));
    }

    const auto r = rho.bloch();
    const double p = std::sqrt(r.x * r.x + r.y * r.y + r.z * r.z);
    if (p < kDegenerate) {
        result.state = {0.0, p, true};
    } else {
        result.state = {0.5 * std::atan2(r.x, r.z), std::min(p, 1.0), false};
    }
    return result;
}

double noisy_amplitude(const EffectiveState& state) {
    const double c = std::cos(state.phi);
    return state.p_eff * c * c + 0.5 * (1.0 - state.p_eff);
}

}  // namespace qae
