#pragma once

// Frame-error-rate sweeps, the check-node RMS-error experiment, and a
// brute-force MAP decoder for small codes.

#include "bpnum/decoder.hpp"
#include "bpnum/graph.hpp"
#include "bpnum/kernels.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace bpnum {

struct StopRule {
    std::uint64_t min_frame_errors = 100;
    std::uint64_t max_frames = 10'000'000;
};

struct FerPoint {
    double ebn0_db = 0.0;
    std::uint64_t frames = 0;
    std::uint64_t frame_errors = 0;
    std::uint64_t bit_errors = 0;
    double avg_iterations = 0.0;
    double fer = 0.0;
    double ber = 0.0;
    double ci95_halfwidth = 0.0; // normal approximation; rough at low counts
    std::uint64_t undetected_errors = 0;
    std::uint64_t nan_frames = 0;
};

struct SweepConfig {
    DecoderConfig decoder;
    std::vector<double> ebn0_db;
    StopRule stop;
    std::uint64_t master_seed = 1;
    unsigned workers = 1;
    std::optional<double> rate; // defaults to the graph's design rate
};

/// Simulates all-zero codewords at each Eb/N0. Frame f of point k draws its
/// noise from RngStream(master_seed, k, f) and the count stops at exactly the
/// frame that reaches min_frame_errors, so results do not depend on the
/// number of workers. Throws std::invalid_argument on a bad configuration.
std::vector<FerPoint> run_sweep(const TannerGraph& g, const SweepConfig& config,
                                const std::function<void(const FerPoint&)>& on_point = {});

struct CnNoisePoint {
    double m_lambda;
    std::string kernel;
    double rms_error;
    std::uint64_t samples;
};

/// For each mean m in m_grid, draws `degree` i.i.d. N(m, 2m) inputs per
/// sample and compares the kernel's reduction of all inputs with the
/// binary128 pairwise-exact reduction. All kernels see the same draws.
/// Requires m > 0, degree >= 2 and samples >= 10^4.
std::vector<CnNoisePoint> cn_noise_experiment(std::span<const KernelKind> kernels,
                                              std::span<const double> m_grid, int degree,
                                              std::uint64_t samples, std::uint64_t seed);

struct MapResult {
    std::vector<double> llr;
    std::vector<std::uint8_t> bits;
    std::uint64_t codewords = 0;
};

/// Symbol-wise MAP by enumerating every codeword of the null space of H:
/// llr_i = ln sum_{c_i = 0} exp(<lambda, s(c)>/2) - ln sum_{c_i = 1} (...),
/// with s(c)_k = 1 - 2 c_k. Throws std::length_error when the code dimension
/// exceeds max_dimension.
MapResult map_oracle(const TannerGraph& g, std::span<const double> channel_llrs,
                     int max_dimension = 20);

/// Dimension n - rank(H) over GF(2).
std::size_t code_dimension(const TannerGraph& g);

} // namespace bpnum
