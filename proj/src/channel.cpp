#include "bpnum/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace bpnum {

double ebn0_to_sigma(double ebn0_db, double rate)
{
    if (!(rate > 0.0 && rate < 1.0))
        throw std::invalid_argument("ebn0_to_sigma: rate must lie in (0, 1)");
    if (!std::isfinite(ebn0_db))
        throw std::invalid_argument("ebn0_to_sigma: Eb/N0 must be finite");
    return 1.0 / std::sqrt(2.0 * rate * std::pow(10.0, ebn0_db / 10.0));
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream, std::uint64_t substream)
{
    auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v); };
    auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
    std::seed_seq seq{lo(seed), hi(seed), lo(stream), hi(stream), lo(substream), hi(substream)};
    engine_.seed(seq);
}

double RngStream::gaussian()
{
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u, v, s;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double scale = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * scale;
    has_spare_ = true;
    return u * scale;
}

void transmit(std::span<const std::uint8_t> bits, double sigma, RngStream& rng, std::span<double> out)
{
    if (!(sigma >= 0.0) || !std::isfinite(sigma))
        throw std::invalid_argument("transmit: sigma must be finite and non-negative");
    if (out.size() != bits.size())
        throw std::invalid_argument("transmit: output size differs from codeword length");
    for (std::size_t i = 0; i < bits.size(); ++i) {
        const double t = (bits[i] & 1u) ? -1.0 : 1.0;
        const double noise = rng.gaussian();
        out[i] = sigma == 0.0 ? t : t + sigma * noise;
    }
}

std::vector<double> transmit(std::span<const std::uint8_t> bits, double sigma, RngStream& rng)
{
    std::vector<double> r(bits.size());
    transmit(bits, sigma, rng, r);
    return r;
}

double llr_from_channel(double r, double sigma)
{
    if (!(sigma > 0.0))
        throw std::invalid_argument("llr_from_channel: sigma must be positive");
    return 2.0 * r / (sigma * sigma);
}

} // namespace bpnum
