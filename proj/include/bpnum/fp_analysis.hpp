#pragma once

#include "bpnum/wide_value.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bpnum {

/// IEEE 754 binary format: precision p (significand digits including the
/// hidden bit) and exponent range [emin, emax] with emin = 1 - emax.
class FpFormat {
public:
    /// Throws std::invalid_argument unless p >= 2 and emax >= 1.
    FpFormat(int p, int emax, std::string name);

    int p() const noexcept { return p_; }
    int emax() const noexcept { return emax_; }
    int emin() const noexcept { return 1 - emax_; }
    const std::string& name() const noexcept { return name_; }

    /// (2 - 2^(1-p)) * 2^emax
    WideValue max_value() const;
    /// 2^emin
    WideValue min_normal() const;
    /// 2^(emin + 1 - p)
    WideValue min_subnormal() const;

    friend bool operator==(const FpFormat&, const FpFormat&) = default;

private:
    int p_;
    int emax_;
    std::string name_;
};

const FpFormat& binary32();
const FpFormat& binary64();
const FpFormat& binary128();

/// Accepts "binary32"/"single"/"SP", "binary64"/"double"/"DP",
/// "binary128"/"quad"/"QP". Throws std::invalid_argument otherwise.
const FpFormat& format_by_name(std::string_view name);

// ---------------------------------------------------------------------------
// The involution Phi(x) = -ln tanh(x/2) and its computational variants.

inline constexpr double kPhiCrossover = 12.4;

/// Direct -ln(tanh(x/2)). Returns 0 once tanh(x/2) rounds to 1.
double phi_naive(double x);

/// First `terms` terms of 2[e^-x + e^-3x/3 + e^-5x/5 + ...], terms in {1,2,3}.
double phi_series(double x, int terms);

/// phi_naive below the crossover, 2e^-x (as e^(-x + ln 2)) at or above it.
double phi(double x, double crossover = kPhiCrossover);

/// Phi(x) evaluated in binary128 and rounded to double.
double phi_reference(double x);

enum class PhiVariant { Phi0, Phi1, Phi2 };

std::string_view to_string(PhiVariant v);
PhiVariant parse_phi_variant(std::string_view name);

/// Relative error |Phi_i(x) - Phi(x)| / Phi(x) against the binary128 reference.
double phi_relative_error(PhiVariant v, double x);

struct AccuracyPoint {
    double x;
    double bits; // -log2(relative error), capped at the format precision
    PhiVariant variant;
};

/// Throws std::domain_error for non-positive x or x beyond the reference range.
std::vector<AccuracyPoint> accuracy_sweep(PhiVariant variant, std::span<const double> grid,
                                          const FpFormat& fmt = binary64());

/// Windowed minimum of the accuracy curve: for each point, the minimum bits
/// over all points with |x' - x| <= window / 2.
std::vector<double> lower_envelope(std::span<const AccuracyPoint> curve, double window = 0.25);

struct Crossover {
    PhiVariant variant;
    double x;
    double bits;
};

/// First x (ascending) at which the series curve reaches the lower envelope of
/// the Phi0 curve; linear interpolation between the bracketing grid points.
/// Both curves must share the same grid.
std::optional<Crossover> find_crossover(std::span<const AccuracyPoint> phi0,
                                        std::span<const AccuracyPoint> series,
                                        double window = 0.25);

/// Log-spaced grid lo * 10^(k / per_decade), k = 0.. while <= hi.
std::vector<double> log_grid(double lo, double hi, int per_decade = 512);

// ---------------------------------------------------------------------------
// Range limits.

/// (p + 2) ln 2: smallest LLR for which tanh(LLR / 2) rounds to 1.
double tanh_saturation_threshold(const FpFormat& fmt);

/// Smallest T value lambda with tanh(lambda / 2) == 1 in T, by bisection.
template <class T>
T empirical_tanh_saturation()
{
    T lo = T(1);
    T hi = T(4) * std::numeric_limits<T>::digits;
    while (true) {
        T mid = lo + (hi - lo) / T(2);
        if (mid == lo || mid == hi)
            break;
        if (std::tanh(mid / T(2)) == T(1))
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

enum class Technique { Tanh, Pairwise, MinSum, Git, Git2, Lr, Ld, Old };

inline constexpr Technique kAllTechniques[] = {
    Technique::Tanh, Technique::Pairwise, Technique::MinSum, Technique::Git,
    Technique::Git2, Technique::Lr,       Technique::Ld,     Technique::Old,
};

std::string_view to_string(Technique t);
/// Throws std::invalid_argument for an unknown tag.
Technique parse_technique(std::string_view name);

/// Upper LLR magnitude a formulation supports with respect to check-node inputs.
WideValue llr_limit(Technique t, const FpFormat& fmt);

// ---------------------------------------------------------------------------
// Resolution (quantization step) expressed in LLR units.

enum class Domain { Llr, Lr, Ld, Git2, Old };

inline constexpr Domain kAllDomains[] = {Domain::Llr, Domain::Lr, Domain::Ld, Domain::Git2,
                                         Domain::Old};

std::string_view to_string(Domain d);
Domain parse_domain(std::string_view name);

/// Technique whose llr_limit bounds the domain.
Technique limiting_technique(Domain d);

struct ResolutionPoint {
    double lambda;
    double step_llr;
    Domain domain;
};

/// Distance from x to the next larger binary64 value.
double ulp(double x);

/// Binary64 quantization step of the domain's stored value at each lambda,
/// mapped back to LLR units through |d lambda / d v|. Throws std::range_error
/// if a lambda exceeds the domain's binary64 llr_limit, std::domain_error for
/// non-positive lambda.
std::vector<ResolutionPoint> resolution_profile(Domain d, std::span<const double> lambda_grid);

} // namespace bpnum
