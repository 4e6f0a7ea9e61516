#include "bpnum/decoder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace bpnum {

namespace {

constexpr std::size_t kMaxOverflowEvents = 1000;

KernelKind initial_kernel(const KernelKind& k)
{
    if (k.tag == KernelTag::Hybrid)
        return simple_kernel(k.precise);
    return k;
}

void record(DecodeResult& result, int iteration, Stage stage, KernelFlag flags, std::size_t count)
{
    if (!any(flags) || result.overflow_flags.size() >= kMaxOverflowEvents)
        return;
    result.overflow_flags.push_back({iteration, stage, flags, count});
}

std::vector<std::uint8_t> decisions_of(const TannerGraph& g, const MessageState& state)
{
    std::vector<double> post(g.n_vars());
    posterior_llrs(g, state, post);
    std::vector<std::uint8_t> bits(g.n_vars());
    for (std::size_t i = 0; i < bits.size(); ++i)
        bits[i] = post[i] < 0.0 ? 1 : 0;
    return bits;
}

} // namespace

void DecoderConfig::validate() const
{
    if (max_iters < 1)
        throw std::invalid_argument("decoder: max_iters must be at least 1");
    if (clip && !(*clip > 0.0 && std::isfinite(*clip)))
        throw std::invalid_argument("decoder: clip must be positive and finite");
    if (!(hybrid_switch_threshold > 0.0))
        throw std::invalid_argument("decoder: hybrid switch threshold must be positive");
    if (!(rescale_trigger > 0.0 && rescale_trigger < std::numeric_limits<double>::max()))
        throw std::invalid_argument("decoder: rescale trigger must lie below the largest double");
    int exp = 0;
    if (!(rescale_factor > 0.0 && rescale_factor < 1.0) || std::frexp(rescale_factor, &exp) != 0.5)
        throw std::invalid_argument("decoder: rescale factor must be a power of two below 1");
    if (!(kernel.alpha > 0.0 && kernel.alpha <= 1.0) || !(kernel.beta >= 0.0))
        throw std::invalid_argument("decoder: kernel parameters out of range");
    if (kernel.tag == KernelTag::Hybrid &&
        (kernel.precise == KernelTag::Hybrid || kernel.fallback == KernelTag::Hybrid))
        throw std::invalid_argument("decoder: hybrid stages cannot be hybrid");
}

double DecoderConfig::effective_switch_threshold() const
{
    return kernel.switch_threshold.value_or(hybrid_switch_threshold);
}

double max_abs_message(const MessageState& state)
{
    double m = 0.0;
    for (const auto* v : {&state.v2c, &state.c2v, &state.channel})
        for (double x : *v) {
            if (std::isnan(x))
                return std::numeric_limits<double>::quiet_NaN();
            m = std::max(m, std::fabs(x));
        }
    return m;
}

bool maybe_hybrid_switch(MessageState& state, const DecoderConfig& config)
{
    if (config.kernel.tag != KernelTag::Hybrid || state.hybrid_switched)
        return false;
    if (!(max_abs_message(state) >= config.effective_switch_threshold()))
        return false;
    state.active = simple_kernel(config.kernel.fallback);
    state.hybrid_switched = true;
    return true;
}

void posterior_llrs(const TannerGraph& g, const MessageState& state, std::span<double> out)
{
    for (std::size_t i = 0; i < g.n_vars(); ++i) {
        double sum = state.channel[i];
        for (auto e : g.var_edges(i))
            sum += state.c2v[e];
        out[i] = sum;
    }
}

RescaleReport rescale_all(const TannerGraph& g, MessageState& state, const DecoderConfig& config)
{
    if (!is_positively_homogeneous(state.active))
        throw std::logic_error("rescale_all: the active kernel is not positively homogeneous");
    if (config.clip)
        throw std::logic_error("rescale_all: rescaling is not defined with clipping");

    RescaleReport report;
    double m = max_abs_message(state);
    if (!(m > config.rescale_trigger) || !std::isfinite(m))
        return report;

    const auto before = decisions_of(g, state);
    while (m > config.rescale_trigger && std::isfinite(m)) {
        for (auto* v : {&state.v2c, &state.c2v, &state.channel})
            for (double& x : *v)
                x *= config.rescale_factor;
        ++report.events;
        m *= config.rescale_factor;
    }
    const auto after = decisions_of(g, state);
    for (std::size_t i = 0; i < before.size(); ++i)
        report.decision_mismatches += before[i] != after[i];
    return report;
}

// ---------------------------------------------------------------------------

Decoder::Decoder(const TannerGraph& g, DecoderConfig config) : g_(g), config_(std::move(config))
{
    config_.validate();
    state_.v2c.resize(g.n_edges());
    state_.c2v.resize(g.n_edges());
    state_.channel.resize(g.n_vars());
    scratch_.reserve(g.max_check_degree());
    cn_in_.resize(g.max_check_degree());
    cn_out_.resize(g.max_check_degree());
}

KernelFlag Decoder::check_half_iteration(std::size_t& flagged)
{
    KernelFlag flags = KernelFlag::none;
    const auto clip = config_.clip;
    for (std::size_t j = 0; j < g_.n_checks(); ++j) {
        auto ids = g_.check_edges(j);
        const std::size_t d = ids.size();
        for (std::size_t k = 0; k < d; ++k)
            cn_in_[k] = state_.v2c[ids[k]];
        std::span<const double> in(cn_in_.data(), d);
        std::span<double> out(cn_out_.data(), d);
        KernelFlag f = cn_extrinsic(state_.active, in, out, scratch_);
        if (any(f)) {
            flags |= f;
            ++flagged;
        }
        for (std::size_t k = 0; k < d; ++k) {
            double v = out[k];
            if (clip)
                v = std::clamp(v, -*clip, *clip);
            state_.c2v[ids[k]] = v;
        }
    }
    return flags;
}

KernelFlag Decoder::variable_half_iteration(std::size_t& flagged, DecodeResult& result)
{
    KernelFlag flags = KernelFlag::none;
    const auto clip = config_.clip;
    for (std::size_t i = 0; i < g_.n_vars(); ++i) {
        auto ids = g_.var_edges(i);
        const double ch = state_.channel[i];
        double total = ch;
        for (auto e : ids)
            total += state_.c2v[e];
        result.posterior[i] = total;
        result.hard_bits[i] = total < 0.0 ? 1 : 0;
        // Extrinsic sums are formed directly rather than as total minus own
        // message, which would be wrong once any message is infinite.
        for (auto e : ids) {
            double v = ch;
            for (auto f : ids)
                if (f != e)
                    v += state_.c2v[f];
            if (!std::isfinite(v)) {
                flags |= KernelFlag::overflow;
                ++flagged;
            }
            if (clip)
                v = std::clamp(v, -*clip, *clip);
            state_.v2c[e] = v;
        }
    }
    return flags;
}

DecodeResult Decoder::decode(std::span<const double> channel_llrs)
{
    if (channel_llrs.size() != g_.n_vars())
        throw std::invalid_argument("decode: expected " + std::to_string(g_.n_vars()) +
                                    " channel LLRs, got " + std::to_string(channel_llrs.size()));
    for (double x : channel_llrs)
        if (std::isnan(x))
            throw std::invalid_argument("decode: channel LLR is NaN");

    DecodeResult result;
    result.hard_bits.assign(g_.n_vars(), 0);
    result.posterior.assign(g_.n_vars(), 0.0);

    std::copy(channel_llrs.begin(), channel_llrs.end(), state_.channel.begin());
    state_.iteration = 0;
    state_.active = initial_kernel(config_.kernel);
    state_.hybrid_switched = false;
    std::fill(state_.c2v.begin(), state_.c2v.end(), 0.0);
    for (std::size_t e = 0; e < g_.n_edges(); ++e) {
        double v = state_.channel[g_.edge(e).var];
        if (config_.clip)
            v = std::clamp(v, -*config_.clip, *config_.clip);
        state_.v2c[e] = v;
    }
    result.max_abs_llr_seen = max_abs_message(state_);
    if (maybe_hybrid_switch(state_, config_))
        result.switch_iteration = 0;

    const bool may_rescale = !config_.clip;
    for (int l = 1; l <= config_.max_iters; ++l) {
        state_.iteration = l;
        result.iterations_used = l;

        std::size_t flagged = 0;
        record(result, l, Stage::CheckNode, check_half_iteration(flagged), flagged);
        flagged = 0;
        record(result, l, Stage::VariableNode, variable_half_iteration(flagged, result), flagged);

        double m = max_abs_message(state_);
        for (double p : result.posterior)
            m = std::isnan(p) ? p : std::max(m, std::fabs(p));
        if (std::isnan(m)) {
            result.nan_detected = true;
            result.converged = false;
            break;
        }
        result.max_abs_llr_seen = std::max(result.max_abs_llr_seen, m);
        if (config_.track_extremes)
            result.max_abs_per_iteration.push_back(m);

        result.converged = syndrome_ok(g_, result.hard_bits);
        if (result.converged && config_.early_termination)
            break;

        if (maybe_hybrid_switch(state_, config_))
            result.switch_iteration = l;
        if (may_rescale && is_positively_homogeneous(state_.active)) {
            auto report = rescale_all(g_, state_, config_);
            result.rescale_events += report.events;
            result.rescale_decision_mismatches += report.decision_mismatches;
        }
    }
    result.hybrid_switched = state_.hybrid_switched;
    return result;
}

DecodeResult decode(const TannerGraph& g, std::span<const double> channel_llrs,
                    const DecoderConfig& config)
{
    Decoder decoder(g, config);
    return decoder.decode(channel_llrs);
}

} // namespace bpnum
