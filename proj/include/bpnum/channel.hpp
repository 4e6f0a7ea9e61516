#pragma once

// Binary antipodal signaling over AWGN: bit 0 -> +1, bit 1 -> -1.

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace bpnum {

/// sigma = 1 / sqrt(2 R 10^(ebn0_db / 10)). Throws std::invalid_argument
/// unless 0 < rate < 1.
double ebn0_to_sigma(double ebn0_db, double rate);

struct ChannelParams {
    double sigma;
    double ebn0_db;
    double rate;

    static ChannelParams from_ebn0(double ebn0_db, double rate)
    {
        return {ebn0_to_sigma(ebn0_db, rate), ebn0_db, rate};
    }
};

/// Deterministic random stream keyed by up to three integers, typically
/// (master seed, sweep point, frame). The key is expanded with
/// std::seed_seq into a std::mt19937_64; both are fully specified by the
/// standard, so a key yields the same numbers on every conforming platform.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0, std::uint64_t substream = 0);

    std::uint64_t next() { return engine_(); }
    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1p-53; }
    /// Standard normal deviate (Marsaglia polar method).
    double gaussian();

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// r_i = t_i + sigma n_i with t_i = 1 - 2 bits_i. sigma = 0 gives r = t.
void transmit(std::span<const std::uint8_t> bits, double sigma, RngStream& rng, std::span<double> out);
std::vector<double> transmit(std::span<const std::uint8_t> bits, double sigma, RngStream& rng);

/// 2 r / sigma^2. Throws std::invalid_argument unless sigma > 0.
double llr_from_channel(double r, double sigma);

} // namespace bpnum
