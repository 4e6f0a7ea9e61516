#pragma once

// Flooding-schedule belief propagation: every check node, then every
// variable node, then a hard decision and syndrome test, once per iteration.
// Messages are LLRs stored per edge id.

#include "bpnum/graph.hpp"
#include "bpnum/kernels.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace bpnum {

struct DecoderConfig {
    KernelKind kernel;
    int max_iters = 200;
    std::optional<double> clip; // saturating mode: |message| <= clip
    double hybrid_switch_threshold = 0x1p56; // 2^(p+3) for binary64
    double rescale_trigger = 1e305;
    double rescale_factor = 0x1p-512;
    bool track_extremes = false; // keep the per-iteration max |LLR| history
    bool early_termination = true;

    /// Throws std::invalid_argument when a field is out of range.
    void validate() const;
    /// The kernel's own threshold if it carries one, else hybrid_switch_threshold.
    double effective_switch_threshold() const;
};

enum class Stage : std::uint8_t { CheckNode, VariableNode };

struct OverflowEvent {
    int iteration;
    Stage stage;
    KernelFlag flags;
    std::size_t count; // messages flagged in this half-iteration
};

struct MessageState {
    std::vector<double> v2c;
    std::vector<double> c2v;
    std::vector<double> channel;
    int iteration = 0;
    KernelKind active;            // the single-stage kernel currently in use
    bool hybrid_switched = false;
};

struct DecodeResult {
    bool converged = false;
    int iterations_used = 0;
    std::vector<std::uint8_t> hard_bits;
    std::vector<double> posterior;
    double max_abs_llr_seen = 0.0;
    int rescale_events = 0;
    bool hybrid_switched = false;
    int switch_iteration = 0;
    bool nan_detected = false;
    std::size_t rescale_decision_mismatches = 0;
    std::vector<OverflowEvent> overflow_flags; // capped at 1000 entries
    std::vector<double> max_abs_per_iteration; // only with track_extremes
};

/// Largest |value| over v2c, c2v and channel; NaN if any is NaN.
double max_abs_message(const MessageState& state);

/// For a hybrid configuration whose precise stage is still active: once any
/// |message| reaches the switch threshold, makes the fallback the active
/// kernel for the rest of the decode. Returns whether it switched now.
bool maybe_hybrid_switch(MessageState& state, const DecoderConfig& config);

struct RescaleReport {
    int events = 0;
    std::size_t decision_mismatches = 0; // hard decisions changed by the scaling
};

/// While the largest |message| exceeds the trigger, multiplies every v2c,
/// c2v and channel LLR by the rescale factor. Throws std::logic_error when
/// the active kernel is not positively homogeneous or clipping is enabled.
RescaleReport rescale_all(const TannerGraph& g, MessageState& state, const DecoderConfig& config);

/// channel + sum of incoming c2v per variable, in edge order.
void posterior_llrs(const TannerGraph& g, const MessageState& state, std::span<double> out);

class Decoder {
public:
    Decoder(const TannerGraph& g, DecoderConfig config);

    /// Throws std::invalid_argument when channel_llrs.size() != n_vars.
    DecodeResult decode(std::span<const double> channel_llrs);

    const MessageState& state() const noexcept { return state_; }
    const DecoderConfig& config() const noexcept { return config_; }

private:
    KernelFlag check_half_iteration(std::size_t& flagged);
    KernelFlag variable_half_iteration(std::size_t& flagged, DecodeResult& result);

    const TannerGraph& g_;
    DecoderConfig config_;
    MessageState state_;
    CnScratch scratch_;
    std::vector<double> cn_in_;
    std::vector<double> cn_out_;
};

DecodeResult decode(const TannerGraph& g, std::span<const double> channel_llrs,
                    const DecoderConfig& config);

} // namespace bpnum
