#include "bpnum/montecarlo.hpp"

#include "bpnum/channel.hpp"
#include "quad_reference.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace bpnum {

namespace {

struct FrameOutcome {
    bool frame_error = false;
    bool undetected = false;
    bool nan = false;
    std::uint32_t bit_errors = 0;
    std::uint32_t iterations = 0;
};

class FrameSimulator {
public:
    FrameSimulator(const TannerGraph& g, const DecoderConfig& config)
        : decoder_(g, config), zeros_(g.n_vars(), 0), received_(g.n_vars()),
          llrs_(g.n_vars())
    {
    }

    FrameOutcome run(std::uint64_t seed, std::uint64_t point, std::uint64_t frame, double sigma)
    {
        RngStream rng(seed, point, frame);
        transmit(zeros_, sigma, rng, received_);
        for (std::size_t i = 0; i < llrs_.size(); ++i)
            llrs_[i] = llr_from_channel(received_[i], sigma);
        const DecodeResult r = decoder_.decode(llrs_);

        FrameOutcome out;
        for (auto b : r.hard_bits)
            out.bit_errors += b;
        out.nan = r.nan_detected;
        out.frame_error = out.bit_errors > 0 || r.nan_detected;
        out.undetected = out.frame_error && r.converged;
        out.iterations = static_cast<std::uint32_t>(r.iterations_used);
        return out;
    }

private:
    Decoder decoder_;
    std::vector<std::uint8_t> zeros_;
    std::vector<double> received_;
    std::vector<double> llrs_;
};

} // namespace

std::vector<FerPoint> run_sweep(const TannerGraph& g, const SweepConfig& config,
                                const std::function<void(const FerPoint&)>& on_point)
{
    if (config.stop.min_frame_errors < 1)
        throw std::invalid_argument("run_sweep: min_frame_errors must be at least 1");
    if (config.stop.max_frames < 1)
        throw std::invalid_argument("run_sweep: max_frames must be at least 1");
    if (config.workers < 1)
        throw std::invalid_argument("run_sweep: need at least one worker");
    config.decoder.validate();
    const double rate = config.rate.value_or(g.design_rate());

    std::vector<FrameSimulator> sims;
    sims.reserve(config.workers);
    for (unsigned w = 0; w < config.workers; ++w)
        sims.emplace_back(g, config.decoder);

    std::vector<FerPoint> points;
    for (std::size_t k = 0; k < config.ebn0_db.size(); ++k) {
        const double ebn0 = config.ebn0_db[k];
        const double sigma = ebn0_to_sigma(ebn0, rate);

        FerPoint p;
        p.ebn0_db = ebn0;
        std::uint64_t iterations = 0;
        bool done = false;
        std::uint64_t next_frame = 0;
        std::vector<FrameOutcome> batch;

        while (!done) {
            const std::uint64_t remaining = config.stop.max_frames - next_frame;
            const std::uint64_t size =
                std::min<std::uint64_t>(remaining, std::max<std::uint64_t>(64, 16 * config.workers));
            batch.assign(size, {});
            std::atomic<std::uint64_t> cursor{0};
            auto work = [&](FrameSimulator& sim) {
                for (std::uint64_t i; (i = cursor.fetch_add(1)) < size;)
                    batch[i] = sim.run(config.master_seed, k, next_frame + i, sigma);
            };
            if (config.workers == 1) {
                work(sims[0]);
            } else {
                std::vector<std::jthread> threads;
                for (unsigned w = 0; w < config.workers; ++w)
                    threads.emplace_back(work, std::ref(sims[w]));
            }

            for (const FrameOutcome& o : batch) {
                ++p.frames;
                iterations += o.iterations;
                p.bit_errors += o.bit_errors;
                p.frame_errors += o.frame_error;
                p.undetected_errors += o.undetected;
                p.nan_frames += o.nan;
                if (p.frame_errors >= config.stop.min_frame_errors) {
                    done = true;
                    break;
                }
            }
            next_frame += size;
            if (next_frame >= config.stop.max_frames)
                done = true;
        }

        p.fer = static_cast<double>(p.frame_errors) / static_cast<double>(p.frames);
        p.ber = static_cast<double>(p.bit_errors) /
                (static_cast<double>(p.frames) * static_cast<double>(g.n_vars()));
        p.avg_iterations = static_cast<double>(iterations) / static_cast<double>(p.frames);
        p.ci95_halfwidth = 1.96 * std::sqrt(p.fer * (1.0 - p.fer) / static_cast<double>(p.frames));
        points.push_back(p);
        if (on_point)
            on_point(p);
    }
    return points;
}

std::vector<CnNoisePoint> cn_noise_experiment(std::span<const KernelKind> kernels,
                                              std::span<const double> m_grid, int degree,
                                              std::uint64_t samples, std::uint64_t seed)
{
    if (degree < 2)
        throw std::invalid_argument("cn_noise_experiment: degree must be at least 2");
    if (samples < 10'000)
        throw std::invalid_argument("cn_noise_experiment: need at least 10^4 samples");
    for (const auto& k : kernels)
        if (k.tag == KernelTag::Hybrid)
            throw std::invalid_argument("cn_noise_experiment: hybrid kernels are not supported");
    for (double m : m_grid)
        if (!(m > 0.0) || !std::isfinite(m))
            throw std::invalid_argument("cn_noise_experiment: mean LLR must be positive");

    std::vector<CnNoisePoint> out;
    std::vector<double> inputs(static_cast<std::size_t>(degree));
    std::vector<double> sum_sq(kernels.size());
    for (std::size_t gi = 0; gi < m_grid.size(); ++gi) {
        const double m = m_grid[gi];
        const double sd = std::sqrt(2.0 * m);
        std::fill(sum_sq.begin(), sum_sq.end(), 0.0);
        for (std::uint64_t s = 0; s < samples; ++s) {
            RngStream rng(seed, gi, s);
            for (double& x : inputs)
                x = m + sd * rng.gaussian();
            const auto ref = detail::cn_reduce_q(inputs);
            for (std::size_t k = 0; k < kernels.size(); ++k) {
                const double v = cn_reduce(kernels[k], inputs).value;
                const double err = static_cast<double>(static_cast<detail::quad>(v) - ref);
                sum_sq[k] += err * err;
            }
        }
        for (std::size_t k = 0; k < kernels.size(); ++k)
            out.push_back({m, to_string(kernels[k]),
                           std::sqrt(sum_sq[k] / static_cast<double>(samples)), samples});
    }
    return out;
}

} // namespace bpnum
