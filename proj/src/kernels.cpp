#include "bpnum/kernels.hpp"

#include "bpnum/fp_analysis.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>

namespace bpnum {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLn2 = std::numbers::ln2;

std::string format_param(double v)
{
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

double parse_param(std::string_view text, std::string_view kernel)
{
    double v = 0.0;
    auto first = text.data();
    auto last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last)
        throw std::invalid_argument("kernel " + std::string(kernel) + ": bad parameter '" +
                                    std::string(text) + "'");
    return v;
}

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t'))
        s.remove_suffix(1);
    return s;
}

struct TagName {
    KernelTag tag;
    std::string_view name;
};

constexpr TagName kTagNames[] = {
    {KernelTag::Tanh, "TANH"},
    {KernelTag::PairwiseExact, "PAIRWISE_EXACT"},
    {KernelTag::PairwiseRichter, "PAIRWISE_RICHTER"},
    {KernelTag::MinSum, "MSA"},
    {KernelTag::MinSumNormalized, "MSA_NORMALIZED"},
    {KernelTag::MinSumOffset, "MSA_OFFSET"},
    {KernelTag::Git, "GIT"},
    {KernelTag::Lr, "LR"},
    {KernelTag::Ld, "LD"},
    {KernelTag::Old, "OLD"},
    {KernelTag::Hybrid, "HYBRID"},
};

std::string_view tag_name(KernelTag tag)
{
    for (const auto& t : kTagNames)
        if (t.tag == tag)
            return t.name;
    return "?";
}

KernelTag parse_simple_tag(std::string_view name)
{
    if (name == "GIT2")
        return KernelTag::Git;
    for (const auto& t : kTagNames)
        if (t.name == name && t.tag != KernelTag::Hybrid)
            return t.tag;
    throw std::invalid_argument("unknown kernel '" + std::string(name) + "'");
}

void validate(const KernelKind& k)
{
    if (!(k.alpha > 0.0 && k.alpha <= 1.0))
        throw std::invalid_argument("kernel: normalization alpha must lie in (0, 1]");
    if (!(k.beta >= 0.0) || !std::isfinite(k.beta))
        throw std::invalid_argument("kernel: offset beta must be non-negative");
    if (k.switch_threshold && !(*k.switch_threshold > 0.0))
        throw std::invalid_argument("kernel: hybrid switch threshold must be positive");
    if (k.precise == KernelTag::Hybrid || k.fallback == KernelTag::Hybrid)
        throw std::invalid_argument("kernel: hybrid stages cannot be hybrid");
}

// Phi with its limits at 0 and infinity made explicit.
double phi_extended(double x, GitPhi form)
{
    if (x == 0.0)
        return kInf;
    if (std::isinf(x))
        return 0.0;
    return form == GitPhi::Naive ? phi_naive(x) : phi(x);
}

double lr_pair_unchecked(double a, double b)
{
    return (1.0 + a * b) / (a + b);
}

double ld_to_llr(double delta)
{
    return std::log1p(delta) - std::log1p(-delta);
}

} // namespace

// ---------------------------------------------------------------------------

KernelKind parse_kernel(std::string_view text)
{
    text = trim(text);
    std::string_view name = text;
    std::vector<std::string_view> args;
    if (auto open = text.find('('); open != std::string_view::npos) {
        if (text.back() != ')')
            throw std::invalid_argument("kernel '" + std::string(text) + "': missing ')'");
        name = trim(text.substr(0, open));
        std::string_view inner = text.substr(open + 1, text.size() - open - 2);
        while (true) {
            auto comma = inner.find(',');
            args.push_back(trim(inner.substr(0, comma)));
            if (comma == std::string_view::npos)
                break;
            inner.remove_prefix(comma + 1);
        }
    }

    KernelKind k;
    auto expect_args = [&](std::size_t lo, std::size_t hi) {
        if (args.size() < lo || args.size() > hi)
            throw std::invalid_argument("kernel '" + std::string(text) +
                                        "': wrong number of parameters");
    };

    if (name == "HYBRID") {
        k.tag = KernelTag::Hybrid;
        if (!args.empty()) {
            expect_args(2, 3);
            k.precise = parse_simple_tag(args[0]);
            k.fallback = parse_simple_tag(args[1]);
            if (args.size() == 3)
                k.switch_threshold = parse_param(args[2], name);
        }
    } else if (name == "GIT" || name == "GIT2") {
        k.tag = KernelTag::Git;
        k.git_phi = name == "GIT2" ? GitPhi::Amended : GitPhi::Naive;
        if (!args.empty()) {
            expect_args(1, 1);
            if (name == "GIT2")
                throw std::invalid_argument("kernel GIT2 takes no parameters");
            if (args[0] == "naive")
                k.git_phi = GitPhi::Naive;
            else if (args[0] == "amended")
                k.git_phi = GitPhi::Amended;
            else
                throw std::invalid_argument("kernel GIT: phi form must be naive or amended");
        }
    } else {
        k.tag = parse_simple_tag(name);
        if (k.tag == KernelTag::MinSumNormalized) {
            expect_args(0, 1);
            if (!args.empty())
                k.alpha = parse_param(args[0], name);
        } else if (k.tag == KernelTag::MinSumOffset) {
            expect_args(0, 1);
            if (!args.empty())
                k.beta = parse_param(args[0], name);
        } else {
            expect_args(0, 0);
        }
    }
    validate(k);
    return k;
}

std::string to_string(const KernelKind& k)
{
    switch (k.tag) {
    case KernelTag::MinSumNormalized:
        return "MSA_NORMALIZED(" + format_param(k.alpha) + ")";
    case KernelTag::MinSumOffset:
        return "MSA_OFFSET(" + format_param(k.beta) + ")";
    case KernelTag::Git:
        return k.git_phi == GitPhi::Naive ? "GIT" : "GIT2";
    case KernelTag::Hybrid: {
        std::string s = "HYBRID(" + std::string(tag_name(k.precise)) + "," +
                        std::string(tag_name(k.fallback));
        if (k.switch_threshold)
            s += "," + format_param(*k.switch_threshold);
        return s + ")";
    }
    default:
        return std::string(tag_name(k.tag));
    }
}

KernelKind simple_kernel(KernelTag tag)
{
    if (tag == KernelTag::Hybrid)
        throw std::invalid_argument("simple_kernel: Hybrid is not a single stage");
    KernelKind k;
    k.tag = tag;
    return k;
}

bool is_positively_homogeneous(const KernelKind& k)
{
    return k.tag == KernelTag::MinSum || k.tag == KernelTag::MinSumNormalized;
}

// ---------------------------------------------------------------------------

double cn_tanh(std::span<const double> inputs, std::optional<double> clip)
{
    if (inputs.empty())
        throw std::invalid_argument("cn_tanh: no inputs");
    auto clamp = [&](double x) { return clip ? std::clamp(x, -*clip, *clip) : x; };
    if (inputs.size() == 1)
        return clamp(inputs[0]);
    double prod = 1.0;
    for (double x : inputs)
        prod *= std::tanh(clamp(x) / 2.0);
    return 2.0 * std::atanh(prod);
}

double cn_pairwise_exact(double a, double b) noexcept
{
    const double ma = std::fabs(a);
    const double mb = std::fabs(b);
    const bool negative = (a < 0.0) != (b < 0.0);
    const double lo = std::min(ma, mb);
    // |a+b| and |a-b| in terms of magnitudes; equal magnitudes give an exact
    // zero difference even when both are infinite.
    const double diff = ma == mb ? 0.0 : std::fabs(ma - mb);
    const double sum = ma + mb;
    const double loss = std::log1p(std::exp(-diff)) - std::log1p(std::exp(-sum));
    const double mag = std::max(lo - loss, 0.0);
    return negative ? -mag : mag;
}

double richter_correction(double x) noexcept
{
    const double m = std::fabs(x);
    return m < 2.5 ? 0.6 - 0.24 * m : 0.0;
}

double cn_pairwise_richter(double a, double b) noexcept
{
    const double ma = std::fabs(a);
    const double mb = std::fabs(b);
    const bool negative = (a < 0.0) != (b < 0.0);
    const double lo = std::min(ma, mb);
    const double diff = ma == mb ? 0.0 : std::fabs(ma - mb);
    const double mag =
        std::max(lo + richter_correction(ma + mb) - richter_correction(diff), 0.0);
    return negative ? -mag : mag;
}

double cn_pairwise_min_sum(double a, double b) noexcept
{
    const double lo = std::min(std::fabs(a), std::fabs(b));
    return ((a < 0.0) != (b < 0.0)) ? -lo : lo;
}

double cn_min_sum(std::span<const double> inputs, MinSumParams params)
{
    if (inputs.empty())
        throw std::invalid_argument("cn_min_sum: no inputs");
    double lo = kInf;
    bool negative = false;
    for (double x : inputs) {
        lo = std::min(lo, std::fabs(x));
        negative ^= x < 0.0;
    }
    switch (params.variant) {
    case MinSumVariant::Plain:
        break;
    case MinSumVariant::Normalized:
        if (!(params.alpha > 0.0 && params.alpha <= 1.0))
            throw std::invalid_argument("cn_min_sum: alpha must lie in (0, 1]");
        lo *= params.alpha;
        break;
    case MinSumVariant::Offset:
        if (!(params.beta >= 0.0))
            throw std::invalid_argument("cn_min_sum: beta must be non-negative");
        lo = std::max(lo - params.beta, 0.0);
        break;
    }
    return negative ? -lo : lo;
}

Flagged cn_git(std::span<const double> inputs, GitPhi phi_form)
{
    if (inputs.empty())
        throw std::invalid_argument("cn_git: no inputs");
    bool negative = false;
    double sum = 0.0;
    for (double x : inputs) {
        if (x == 0.0)
            return {0.0, KernelFlag::zero_input};
        negative ^= x < 0.0;
        sum += phi_extended(std::fabs(x), phi_form);
    }
    if (sum == 0.0)
        return {0.0, KernelFlag::phi_underflow};
    double mag = phi_extended(sum, phi_form);
    return {negative ? -mag : mag};
}

// ---------------------------------------------------------------------------

double lr_guard_bound()
{
    static const double bound = std::sqrt(std::numeric_limits<double>::max());
    return bound;
}

double cn_lr(double a, double b)
{
    if (!(a > 0.0) || !(b > 0.0))
        throw std::domain_error("cn_lr: likelihood ratios must be positive");
    // The guard is symmetric in LLR terms: L and 1/L are limited alike.
    const double hi = lr_guard_bound();
    const double lo = 1.0 / hi;
    if (!(a < hi) || !(a > lo))
        throw std::range_error("cn_lr: first input outside the multiplicative-overflow guard");
    if (!(b < hi) || !(b > lo))
        throw std::range_error("cn_lr: second input outside the multiplicative-overflow guard");
    return lr_pair_unchecked(a, b);
}

Flagged vn_lr(double channel, std::span<const double> incoming, VnLrMode mode)
{
    if (!(channel > 0.0))
        throw std::domain_error("vn_lr: likelihood ratios must be positive");
    for (double L : incoming)
        if (!(L > 0.0))
            throw std::domain_error("vn_lr: likelihood ratios must be positive");

    if (mode == VnLrMode::Product) {
        double v = channel;
        for (double L : incoming)
            v *= L;
        bool out_of_range = !std::isfinite(v) || v == 0.0;
        return {v, out_of_range ? KernelFlag::overflow : KernelFlag::none};
    }

    double s = std::log(channel);
    for (double L : incoming)
        s += std::log(L);
    const double hi = std::nextafter(lr_guard_bound(), 0.0);
    const double lo = std::nextafter(1.0 / lr_guard_bound(), kInf);
    const double s_max = std::log(hi);
    KernelFlag flags = KernelFlag::none;
    if (s > s_max || s < -s_max) {
        s = std::clamp(s, -s_max, s_max);
        flags = KernelFlag::range_guard;
    }
    return {std::clamp(std::exp(s), lo, hi), flags};
}

// ---------------------------------------------------------------------------

double cn_ld(std::span<const double> inputs)
{
    if (inputs.empty())
        throw std::invalid_argument("cn_ld: no inputs");
    double prod = 1.0;
    for (double d : inputs) {
        if (!(d >= -1.0 && d <= 1.0))
            throw std::domain_error("cn_ld: likelihood differences must lie in [-1, 1]");
        prod *= d;
    }
    return prod;
}

double vn_ld_pair(double a, double b)
{
    if (!(a >= -1.0 && a <= 1.0) || !(b >= -1.0 && b <= 1.0))
        throw std::domain_error("vn_ld_pair: likelihood differences must lie in [-1, 1]");
    const double den = 1.0 + a * b;
    if (den == 0.0)
        throw std::domain_error("vn_ld_pair: indeterminate combination of certain opposite messages");
    return (a + b) / den;
}

// ---------------------------------------------------------------------------

double old_from_llr(double x) noexcept
{
    const double e = std::exp(-std::fabs(x));
    return 2.0 * e / (1.0 + e);
}

double old_to_llr(double f) noexcept
{
    constexpr double tiny = 0x1p-53;
    if (f < tiny)
        return kLn2 - std::log(f);
    return std::log((2.0 - f) / f);
}

Flagged cn_old(std::span<const double> inputs)
{
    if (inputs.empty())
        throw std::invalid_argument("cn_old: no inputs");
    double f = 0.0;
    bool negative = false;
    for (double x : inputs) {
        f = old_combine(f, old_from_llr(x));
        negative ^= x < 0.0;
    }
    const double mag = old_to_llr(f);
    return {negative ? -mag : mag, std::isinf(mag) ? KernelFlag::overflow : KernelFlag::none};
}

// ---------------------------------------------------------------------------

Flagged vn_llr(double channel, std::span<const double> incoming, std::optional<std::size_t> exclude)
{
    if (exclude && *exclude >= incoming.size())
        throw std::invalid_argument("vn_llr: exclude index out of range");
    double sum = channel;
    for (std::size_t k = 0; k < incoming.size(); ++k)
        if (!exclude || k != *exclude)
            sum += incoming[k];
    return {sum, std::isfinite(sum) ? KernelFlag::none : KernelFlag::overflow};
}

std::uint8_t decision(double channel, std::span<const double> incoming)
{
    double sum = channel;
    for (double x : incoming)
        sum += x;
    return sum < 0.0 ? 1 : 0;
}

// ---------------------------------------------------------------------------

Flagged cn_reduce(const KernelKind& kind, std::span<const double> inputs)
{
    if (inputs.empty())
        throw std::invalid_argument("cn_reduce: no inputs");
    auto fold = [&](auto op) {
        double acc = inputs[0];
        for (std::size_t k = 1; k < inputs.size(); ++k)
            acc = op(acc, inputs[k]);
        return acc;
    };
    switch (kind.tag) {
    case KernelTag::Tanh: {
        double v = cn_tanh(inputs);
        return {v, std::isinf(v) ? KernelFlag::overflow : KernelFlag::none};
    }
    case KernelTag::PairwiseExact:
        return {fold(cn_pairwise_exact)};
    case KernelTag::PairwiseRichter:
        return {fold(cn_pairwise_richter)};
    case KernelTag::MinSum:
        return {cn_min_sum(inputs)};
    case KernelTag::MinSumNormalized:
        return {cn_min_sum(inputs, {MinSumVariant::Normalized, kind.alpha, kind.beta})};
    case KernelTag::MinSumOffset:
        return {cn_min_sum(inputs, {MinSumVariant::Offset, kind.alpha, kind.beta})};
    case KernelTag::Git:
        return cn_git(inputs, kind.git_phi);
    case KernelTag::Lr: {
        const double hi = std::nextafter(lr_guard_bound(), 0.0);
        const double lo = std::nextafter(1.0 / lr_guard_bound(), kInf);
        KernelFlag flags = KernelFlag::none;
        auto to_lr = [&](double x) {
            double L = std::exp(x);
            if (L > hi || L < lo) {
                flags |= KernelFlag::range_guard;
                L = std::clamp(L, lo, hi);
            }
            return L;
        };
        double acc = to_lr(inputs[0]);
        for (std::size_t k = 1; k < inputs.size(); ++k)
            acc = lr_pair_unchecked(acc, to_lr(inputs[k]));
        return {std::log(acc), flags};
    }
    case KernelTag::Ld: {
        double prod = 1.0;
        for (double x : inputs)
            prod *= std::tanh(x / 2.0);
        double v = ld_to_llr(prod);
        return {v, std::isinf(v) ? KernelFlag::overflow : KernelFlag::none};
    }
    case KernelTag::Old:
        return cn_old(inputs);
    case KernelTag::Hybrid:
        break;
    }
    throw std::invalid_argument("cn_reduce: resolve the active hybrid stage first");
}

KernelFlag cn_extrinsic(const KernelKind& kind, std::span<const double> in, std::span<double> out,
                        CnScratch& scratch)
{
    const std::size_t d = in.size();
    if (d == 0)
        throw std::invalid_argument("cn_extrinsic: check node without edges");
    if (out.size() < d)
        throw std::invalid_argument("cn_extrinsic: output buffer too small");
    if (d == 1) {
        out[0] = kInf;
        return KernelFlag::none;
    }
    if (scratch.a.size() < d)
        scratch.reserve(d);
    std::span<double> a(scratch.a.data(), d);
    std::span<double> b(scratch.b.data(), d);
    std::span<const double> ca(scratch.a.data(), d);
    KernelFlag flags = KernelFlag::none;

    bool negative_total = false;
    for (double x : in)
        negative_total ^= x < 0.0;
    auto sign_for = [&](std::size_t k, double mag) {
        return (negative_total != (in[k] < 0.0)) ? -mag : mag;
    };
    auto multiply = [](double x, double y) { return x * y; };

    switch (kind.tag) {
    case KernelTag::Tanh:
    case KernelTag::Ld: {
        for (std::size_t k = 0; k < d; ++k)
            a[k] = std::tanh(in[k] / 2.0);
        cn_forward_backward(ca, out, b, multiply);
        for (std::size_t k = 0; k < d; ++k) {
            out[k] = kind.tag == KernelTag::Tanh ? 2.0 * std::atanh(out[k]) : ld_to_llr(out[k]);
            if (std::isinf(out[k]))
                flags |= KernelFlag::overflow;
        }
        break;
    }
    case KernelTag::PairwiseExact:
        cn_forward_backward(in, out, b, cn_pairwise_exact);
        break;
    case KernelTag::PairwiseRichter:
        cn_forward_backward(in, out, b, cn_pairwise_richter);
        break;
    case KernelTag::MinSum:
    case KernelTag::MinSumNormalized:
    case KernelTag::MinSumOffset: {
        double min1 = kInf;
        double min2 = kInf;
        std::size_t argmin = 0;
        for (std::size_t k = 0; k < d; ++k) {
            double m = std::fabs(in[k]);
            if (m < min1) {
                min2 = min1;
                min1 = m;
                argmin = k;
            } else if (m < min2) {
                min2 = m;
            }
        }
        for (std::size_t k = 0; k < d; ++k) {
            double m = k == argmin ? min2 : min1;
            if (kind.tag == KernelTag::MinSumNormalized)
                m *= kind.alpha;
            else if (kind.tag == KernelTag::MinSumOffset)
                m = std::max(m - kind.beta, 0.0);
            out[k] = sign_for(k, m);
        }
        break;
    }
    case KernelTag::Git: {
        for (std::size_t k = 0; k < d; ++k)
            a[k] = phi_extended(std::fabs(in[k]), kind.git_phi);
        cn_forward_backward(ca, out, b, std::plus<double>{});
        for (std::size_t k = 0; k < d; ++k) {
            double s = out[k];
            if (std::isinf(s))
                flags |= KernelFlag::zero_input;
            if (s == 0.0) {
                flags |= KernelFlag::phi_underflow;
                out[k] = 0.0;
                continue;
            }
            out[k] = sign_for(k, phi_extended(s, kind.git_phi));
        }
        break;
    }
    case KernelTag::Lr: {
        const double hi = std::nextafter(lr_guard_bound(), 0.0);
        const double lo = std::nextafter(1.0 / lr_guard_bound(), kInf);
        for (std::size_t k = 0; k < d; ++k) {
            double L = std::exp(in[k]);
            if (L > hi || L < lo) {
                L = std::clamp(L, lo, hi);
                flags |= KernelFlag::range_guard;
            }
            a[k] = L;
        }
        cn_forward_backward(ca, out, b, lr_pair_unchecked);
        for (std::size_t k = 0; k < d; ++k)
            out[k] = std::log(out[k]);
        break;
    }
    case KernelTag::Old: {
        for (std::size_t k = 0; k < d; ++k)
            a[k] = old_from_llr(in[k]);
        cn_forward_backward(ca, out, b, old_combine);
        for (std::size_t k = 0; k < d; ++k) {
            double mag = old_to_llr(out[k]);
            if (std::isinf(mag))
                flags |= KernelFlag::overflow;
            out[k] = sign_for(k, mag);
        }
        break;
    }
    case KernelTag::Hybrid:
        throw std::invalid_argument("cn_extrinsic: resolve the active hybrid stage first");
    }
    return flags;
}

} // namespace bpnum
