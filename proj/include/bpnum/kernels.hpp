#pragma once

// Check-node and variable-node update rules over message values.
//
// Every check-node formulation computes the same function,
//   2 atanh( prod tanh(lambda_k / 2) ),
// in a different numeric domain (LLR, likelihood ratio, likelihood
// difference, offset likelihood difference, Gallager's Phi domain), so each
// has a different usable LLR range in binary64. All functions here are pure.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace bpnum {

enum class KernelFlag : unsigned {
    none = 0,
    zero_input = 1u << 0,    // a zero-magnitude input made Phi infinite
    phi_underflow = 1u << 1, // the Phi-domain sum rounded to zero
    overflow = 1u << 2,      // non-finite result from finite inputs
    range_guard = 1u << 3,   // an input was clamped into the domain's range
};

constexpr KernelFlag operator|(KernelFlag a, KernelFlag b)
{
    return static_cast<KernelFlag>(static_cast<unsigned>(a) | static_cast<unsigned>(b));
}
constexpr KernelFlag& operator|=(KernelFlag& a, KernelFlag b) { return a = a | b; }
constexpr bool any(KernelFlag f) { return f != KernelFlag::none; }
constexpr bool has(KernelFlag set, KernelFlag f)
{
    return (static_cast<unsigned>(set) & static_cast<unsigned>(f)) != 0;
}

struct Flagged {
    double value;
    KernelFlag flags = KernelFlag::none;
};

// ---------------------------------------------------------------------------
// Kernel selection.

enum class KernelTag {
    Tanh,
    PairwiseExact,
    PairwiseRichter,
    MinSum,
    MinSumNormalized,
    MinSumOffset,
    Git,
    Lr,
    Ld,
    Old,
    Hybrid,
};

enum class GitPhi { Naive, Amended };

struct KernelKind {
    KernelTag tag = KernelTag::PairwiseExact;
    double alpha = 0.8;                 // MinSumNormalized scale, (0, 1]
    double beta = 0.15;                 // MinSumOffset offset, >= 0
    GitPhi git_phi = GitPhi::Amended;   // Git
    KernelTag precise = KernelTag::PairwiseRichter; // Hybrid, before the switch
    KernelTag fallback = KernelTag::MinSum;         // Hybrid, after the switch
    std::optional<double> switch_threshold;         // Hybrid; else the decoder default

    friend bool operator==(const KernelKind&, const KernelKind&) = default;
};

/// Parses TANH, PAIRWISE_EXACT, PAIRWISE_RICHTER, MSA, MSA_NORMALIZED[(a)],
/// MSA_OFFSET[(b)], GIT (naive Phi), GIT2 or GIT(amended), GIT(naive), LR,
/// LD, OLD, HYBRID[(precise,fallback[,threshold])]. Throws
/// std::invalid_argument on anything else or out-of-range parameters.
KernelKind parse_kernel(std::string_view text);
std::string to_string(const KernelKind& k);

/// Single-stage kind for tag with default parameters; rejects Hybrid.
KernelKind simple_kernel(KernelTag tag);

/// Whether cn(c * x) == c * cn(x) for every c > 0, i.e. the kernel is a
/// min-sum form. Only such kernels may have their messages rescaled.
bool is_positively_homogeneous(const KernelKind& k);

// ---------------------------------------------------------------------------
// LLR-domain check-node rules.

/// 2 atanh(prod tanh(x/2)). With clip, inputs are first clamped to
/// [-clip, clip]. Returns +-inf once the product rounds to +-1.
double cn_tanh(std::span<const double> inputs, std::optional<double> clip = std::nullopt);

/// sign(a) sign(b) min(|a|,|b|) + ln(1 + e^-|a+b|) - ln(1 + e^-|a-b|).
/// Total on all non-NaN inputs, including infinities.
double cn_pairwise_exact(double a, double b) noexcept;

/// Two-piece linear approximation of ln(1 + e^-|x|).
double richter_correction(double x) noexcept;

/// cn_pairwise_exact with both correction terms replaced by richter_correction.
double cn_pairwise_richter(double a, double b) noexcept;

double cn_pairwise_min_sum(double a, double b) noexcept;

/// All extrinsic outputs of a pairwise reduction: out[k] combines every
/// input except in[k]. backward is scratch of at least in.size() elements.
template <class Pairwise>
void cn_forward_backward(std::span<const double> in, std::span<double> out,
                         std::span<double> backward, Pairwise&& op)
{
    const std::size_t d = in.size();
    if (d < 2)
        throw std::invalid_argument("cn_forward_backward: need at least two inputs");
    if (out.size() < d || backward.size() < d)
        throw std::invalid_argument("cn_forward_backward: buffers too small");
    backward[d - 1] = in[d - 1];
    for (std::size_t k = d - 1; k-- > 1;)
        backward[k] = op(in[k], backward[k + 1]);
    out[0] = backward[1];
    double forward = in[0];
    for (std::size_t k = 1; k + 1 < d; ++k) {
        out[k] = op(forward, backward[k + 1]);
        forward = op(forward, in[k]);
    }
    out[d - 1] = forward;
}

template <class Pairwise>
std::vector<double> cn_forward_backward(std::span<const double> in, Pairwise&& op)
{
    std::vector<double> out(in.size());
    std::vector<double> backward(in.size());
    cn_forward_backward(in, std::span<double>(out), std::span<double>(backward), op);
    return out;
}

enum class MinSumVariant { Plain, Normalized, Offset };

struct MinSumParams {
    MinSumVariant variant = MinSumVariant::Plain;
    double alpha = 0.8;
    double beta = 0.15;
};

/// min |x| * prod sign(x); Normalized scales the magnitude by alpha, Offset
/// maps it to max(m - beta, 0).
double cn_min_sum(std::span<const double> inputs, MinSumParams params = {});

/// sign-product * Phi(sum Phi(|x_k|)). A zero input returns exact 0 flagged
/// zero_input; a Phi sum that rounds to 0 returns exact 0 flagged phi_underflow.
Flagged cn_git(std::span<const double> inputs, GitPhi phi_form);

// ---------------------------------------------------------------------------
// Likelihood-ratio domain, L = e^lambda.

/// Largest admissible LR input to cn_lr: sqrt(2^emax (2 - 2^(1-p))) in binary64.
double lr_guard_bound();

/// (1 + a b) / (a + b). Throws std::domain_error for non-positive inputs and
/// std::range_error when an input reaches lr_guard_bound().
double cn_lr(double a, double b);

enum class VnLrMode { Product, LogSum };

/// Product: channel * prod(incoming), flagged overflow when it leaves the
/// finite range. LogSum: exp(ln channel + sum ln incoming) with the exponent
/// clamped so the result stays inside the cn_lr guard (flagged range_guard).
Flagged vn_lr(double channel, std::span<const double> incoming, VnLrMode mode);

// ---------------------------------------------------------------------------
// Likelihood-difference domain, delta = tanh(lambda / 2).

/// prod delta_k. Inputs must lie in [-1, 1].
double cn_ld(std::span<const double> inputs);

/// (a + b) / (1 + a b). Throws std::domain_error when a = -b = +-1.
double vn_ld_pair(double a, double b);

// ---------------------------------------------------------------------------
// Offset likelihood difference, f = 1 - |delta|.

/// 2 e^-|x| / (1 + e^-|x|)
double old_from_llr(double x) noexcept;

/// ln((2 - f) / f), or ln 2 - ln f once f < 2^-53.
double old_to_llr(double f) noexcept;

/// f + g - f g, exactly 1 when either operand is 1 (a zero LLR).
inline double old_combine(double f, double g) noexcept
{
    return f == 1.0 || g == 1.0 ? 1.0 : f + g - f * g;
}

/// Offset-LD check node over all inputs, with the sign carried separately.
/// Infinite output (every g underflowed) is flagged overflow.
Flagged cn_old(std::span<const double> inputs);

// ---------------------------------------------------------------------------
// Variable node and decision.

/// channel + sum of incoming, skipping index `exclude` when given.
Flagged vn_llr(double channel, std::span<const double> incoming,
               std::optional<std::size_t> exclude = std::nullopt);

/// 0 when channel + sum(incoming) >= 0 (ties go to 0), else 1.
std::uint8_t decision(double channel, std::span<const double> incoming);

// ---------------------------------------------------------------------------

/// Reusable buffers for cn_extrinsic.
struct CnScratch {
    std::vector<double> a;
    std::vector<double> b;
    void reserve(std::size_t degree)
    {
        a.resize(degree);
        b.resize(degree);
    }
};

/// The check-node function of every input at once (no exclusion), in the
/// kernel's own domain. Pairwise kernels fold left to right; LR inputs are
/// clamped into the guard like cn_extrinsic does.
Flagged cn_reduce(const KernelKind& kind, std::span<const double> inputs);

/// Every extrinsic output of one check node (out[k] excludes in[k]) under a
/// single-stage kernel. A degree-1 check emits +inf (its bit must be 0).
/// Throws std::invalid_argument for Hybrid; resolve the active stage first.
KernelFlag cn_extrinsic(const KernelKind& kind, std::span<const double> in, std::span<double> out,
                        CnScratch& scratch);

} // namespace bpnum
