#include "bpnum/fp_analysis.hpp"

#include "quad_reference.hpp"

#include <algorithm>
#include <array>
#include <numbers>
#include <quadmath.h>
#include <stdexcept>

namespace bpnum {

namespace {

constexpr double kLn2 = std::numbers::ln2;

void require_positive(double x, const char* what)
{
    if (!(x > 0.0))
        throw std::domain_error(std::string(what) + ": x must be positive");
}

} // namespace

// ---------------------------------------------------------------------------

FpFormat::FpFormat(int p, int emax, std::string name)
    : p_(p), emax_(emax), name_(std::move(name))
{
    if (p < 2)
        throw std::invalid_argument("FpFormat: precision must be at least 2");
    if (emax < 1)
        throw std::invalid_argument("FpFormat: emax must be at least 1");
}

WideValue FpFormat::max_value() const
{
    // The significand is carried in a long double (64 bits); wider formats
    // round to 2^(emax+1), a relative difference of 2^-p.
    if (p_ <= std::numeric_limits<long double>::digits)
        return WideValue::scaled(2.0L - std::ldexp(1.0L, 1 - p_), emax_);
    return WideValue::scaled(2.0L, emax_);
}

WideValue FpFormat::min_normal() const
{
    return WideValue::pow2(emin());
}

WideValue FpFormat::min_subnormal() const
{
    return WideValue::pow2(static_cast<long>(emin()) + 1 - p_);
}

const FpFormat& binary32()
{
    static const FpFormat f{24, 127, "binary32"};
    return f;
}

const FpFormat& binary64()
{
    static const FpFormat f{53, 1023, "binary64"};
    return f;
}

const FpFormat& binary128()
{
    static const FpFormat f{113, 16383, "binary128"};
    return f;
}

const FpFormat& format_by_name(std::string_view name)
{
    if (name == "binary32" || name == "single" || name == "SP")
        return binary32();
    if (name == "binary64" || name == "double" || name == "DP")
        return binary64();
    if (name == "binary128" || name == "quad" || name == "QP")
        return binary128();
    throw std::invalid_argument("unknown floating-point format '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------

double phi_naive(double x)
{
    require_positive(x, "phi_naive");
    double t = std::tanh(x / 2.0);
    if (t >= 1.0)
        return 0.0;
    return -std::log(t);
}

double phi_series(double x, int terms)
{
    require_positive(x, "phi_series");
    if (terms < 1 || terms > 3)
        throw std::invalid_argument("phi_series: terms must be 1, 2 or 3");
    double sum = 0.0;
    for (int k = terms - 1; k >= 0; --k) {
        double odd = 2.0 * k + 1.0;
        sum += std::exp(-odd * x) / odd;
    }
    return 2.0 * sum;
}

double phi(double x, double crossover)
{
    require_positive(x, "phi");
    if (x < crossover)
        return phi_naive(x);
    return std::exp(-x + kLn2);
}

std::string_view to_string(PhiVariant v)
{
    switch (v) {
    case PhiVariant::Phi0:
        return "PHI0";
    case PhiVariant::Phi1:
        return "PHI1";
    case PhiVariant::Phi2:
        return "PHI2";
    }
    return "?";
}

PhiVariant parse_phi_variant(std::string_view name)
{
    for (auto v : {PhiVariant::Phi0, PhiVariant::Phi1, PhiVariant::Phi2})
        if (name == to_string(v))
            return v;
    throw std::invalid_argument("unknown phi variant '" + std::string(name) + "'");
}

namespace {

double evaluate_variant(PhiVariant v, double x)
{
    switch (v) {
    case PhiVariant::Phi0:
        return phi_naive(x);
    case PhiVariant::Phi1:
        return phi_series(x, 1);
    case PhiVariant::Phi2:
        return phi_series(x, 2);
    }
    throw std::invalid_argument("bad phi variant");
}

} // namespace

double phi_relative_error(PhiVariant v, double x)
{
    require_positive(x, "phi_relative_error");
    if (!std::isfinite(x))
        throw std::domain_error("phi_relative_error: x must be finite");
    detail::quad ref = detail::phi_q(x);
    if (ref == 0)
        throw std::domain_error("phi_relative_error: reference underflows at this x");
    detail::quad approx = evaluate_variant(v, x);
    return static_cast<double>(fabsq(approx - ref) / ref);
}

std::vector<AccuracyPoint> accuracy_sweep(PhiVariant variant, std::span<const double> grid,
                                          const FpFormat& fmt)
{
    std::vector<AccuracyPoint> out;
    out.reserve(grid.size());
    for (double x : grid) {
        double eps = phi_relative_error(variant, x);
        const double p = static_cast<double>(fmt.p());
        double bits = eps == 0.0 ? p : std::min(p, -std::log2(eps));
        out.push_back({x, bits, variant});
    }
    return out;
}

std::vector<double> lower_envelope(std::span<const AccuracyPoint> curve, double window)
{
    if (!(window >= 0.0))
        throw std::invalid_argument("lower_envelope: window must be non-negative");
    const double half = window / 2.0;
    std::vector<double> env(curve.size());
    std::size_t lo = 0;
    std::size_t hi = 0;
    for (std::size_t i = 0; i < curve.size(); ++i) {
        double x = curve[i].x;
        while (curve[lo].x < x - half)
            ++lo;
        hi = std::max(hi, i);
        while (hi + 1 < curve.size() && curve[hi + 1].x <= x + half)
            ++hi;
        double m = curve[lo].bits;
        for (std::size_t j = lo + 1; j <= hi; ++j)
            m = std::min(m, curve[j].bits);
        env[i] = m;
    }
    return env;
}

std::optional<Crossover> find_crossover(std::span<const AccuracyPoint> phi0,
                                        std::span<const AccuracyPoint> series, double window)
{
    if (phi0.size() != series.size())
        throw std::invalid_argument("find_crossover: curves must share one grid");
    for (std::size_t i = 0; i < phi0.size(); ++i)
        if (phi0[i].x != series[i].x)
            throw std::invalid_argument("find_crossover: curves must share one grid");

    auto env = lower_envelope(phi0, window);
    for (std::size_t k = 1; k < series.size(); ++k) {
        double before = series[k - 1].bits - env[k - 1];
        double after = series[k].bits - env[k];
        if (before < 0.0 && after >= 0.0) {
            double t = -before / (after - before);
            double x = series[k - 1].x + t * (series[k].x - series[k - 1].x);
            double bits = series[k - 1].bits + t * (series[k].bits - series[k - 1].bits);
            return Crossover{series[k].variant, x, bits};
        }
    }
    return std::nullopt;
}

std::vector<double> log_grid(double lo, double hi, int per_decade)
{
    if (!(lo > 0.0) || !(hi >= lo) || !std::isfinite(hi))
        throw std::invalid_argument("log_grid: need 0 < lo <= hi < inf");
    if (per_decade < 1)
        throw std::invalid_argument("log_grid: per_decade must be positive");
    std::vector<double> grid;
    const double limit = hi * (1.0 + 1e-12);
    for (long k = 0;; ++k) {
        double x = lo * std::pow(10.0, static_cast<double>(k) / per_decade);
        if (x > limit)
            break;
        grid.push_back(x);
    }
    return grid;
}

// ---------------------------------------------------------------------------

double tanh_saturation_threshold(const FpFormat& fmt)
{
    return (fmt.p() + 2) * kLn2;
}

std::string_view to_string(Technique t)
{
    switch (t) {
    case Technique::Tanh:
        return "TANH";
    case Technique::Pairwise:
        return "PAIRWISE";
    case Technique::MinSum:
        return "MSA";
    case Technique::Git:
        return "GIT";
    case Technique::Git2:
        return "GIT2";
    case Technique::Lr:
        return "LR";
    case Technique::Ld:
        return "LD";
    case Technique::Old:
        return "OLD";
    }
    return "?";
}

Technique parse_technique(std::string_view name)
{
    for (auto t : kAllTechniques)
        if (name == to_string(t))
            return t;
    throw std::invalid_argument("unknown technique '" + std::string(name) + "'");
}

WideValue llr_limit(Technique t, const FpFormat& fmt)
{
    const double p = fmt.p();
    const double emax = fmt.emax();
    switch (t) {
    case Technique::Tanh:
    case Technique::Git:
        return WideValue::of((p + 2.0) * kLn2);
    case Technique::Pairwise:
    case Technique::MinSum:
        return WideValue::pow2(fmt.emax() + 1L);
    case Technique::Git2:
    case Technique::Old:
        return WideValue::of((emax + p) * kLn2);
    case Technique::Lr:
        return WideValue::of((emax + 1.0) * kLn2 / 2.0);
    case Technique::Ld:
        return WideValue::of((p + 1.0) * kLn2);
    }
    throw std::invalid_argument("llr_limit: unknown technique");
}

// ---------------------------------------------------------------------------

std::string_view to_string(Domain d)
{
    switch (d) {
    case Domain::Llr:
        return "LLR";
    case Domain::Lr:
        return "LR";
    case Domain::Ld:
        return "LD";
    case Domain::Git2:
        return "GIT2";
    case Domain::Old:
        return "OLD";
    }
    return "?";
}

Domain parse_domain(std::string_view name)
{
    for (auto d : kAllDomains)
        if (name == to_string(d))
            return d;
    throw std::invalid_argument("unknown domain '" + std::string(name) + "'");
}

Technique limiting_technique(Domain d)
{
    switch (d) {
    case Domain::Llr:
        return Technique::Pairwise;
    case Domain::Lr:
        return Technique::Lr;
    case Domain::Ld:
        return Technique::Ld;
    case Domain::Git2:
        return Technique::Git2;
    case Domain::Old:
        return Technique::Old;
    }
    throw std::invalid_argument("bad domain");
}

double ulp(double x)
{
    return std::nextafter(x, INFINITY) - x;
}

namespace {

// ln(2 cosh^2(lambda / 2)) = lambda + 2 ln(1 + e^-lambda) - ln 2
double log_two_cosh_sq_half(double lambda)
{
    return lambda + 2.0 * std::log1p(std::exp(-lambda)) - kLn2;
}

// ln sinh(lambda)
double log_sinh(double lambda)
{
    if (lambda < 20.0)
        return std::log(std::sinh(lambda));
    return lambda - kLn2 + std::log1p(-std::exp(-2.0 * lambda));
}

double resolution_step(Domain d, double lambda)
{
    switch (d) {
    case Domain::Llr:
        return ulp(lambda);
    case Domain::Lr: {
        double L = std::exp(lambda);
        return ulp(L) / L;
    }
    case Domain::Ld: {
        double delta = std::tanh(lambda / 2.0);
        return std::exp(log_two_cosh_sq_half(lambda) + std::log(ulp(delta)));
    }
    case Domain::Git2: {
        double v = phi(lambda);
        return std::exp(log_sinh(lambda) + std::log(ulp(v)));
    }
    case Domain::Old: {
        double e = std::exp(-lambda);
        double f = 2.0 * e / (1.0 + e);
        return std::exp(log_two_cosh_sq_half(lambda) + std::log(ulp(f)));
    }
    }
    throw std::invalid_argument("bad domain");
}

} // namespace

std::vector<ResolutionPoint> resolution_profile(Domain d, std::span<const double> lambda_grid)
{
    const long double limit = llr_limit(limiting_technique(d), binary64()).value();
    std::vector<ResolutionPoint> out;
    out.reserve(lambda_grid.size());
    for (double lambda : lambda_grid) {
        if (!(lambda > 0.0))
            throw std::domain_error("resolution_profile: lambda must be positive");
        if (static_cast<long double>(lambda) > limit)
            throw std::range_error("resolution_profile: lambda " + std::to_string(lambda) +
                                   " exceeds the " + std::string(to_string(d)) +
                                   " domain limit");
        out.push_back({lambda, resolution_step(d, lambda), d});
    }
    return out;
}

} // namespace bpnum
