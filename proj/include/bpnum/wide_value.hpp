#pragma once

#include <string>

namespace bpnum {

/// Positive real stored as significand * 2^exponent.
///
/// Some quantities in this library (the largest binary128 value, the LLR
/// limit 2^(emax+1) of the pairwise and min-sum formulations) exceed every
/// native floating-point type, so they are carried in this split form and
/// only collapsed to a native value on request.
class WideValue {
public:
    WideValue() = default;

    /// v * 2^exponent. v must be finite and non-negative.
    static WideValue scaled(long double v, long exponent);
    static WideValue of(long double v) { return scaled(v, 0); }
    static WideValue pow2(long exponent) { return scaled(1.0L, exponent); }

    bool is_zero() const noexcept { return significand_ == 0.0L; }

    /// Normalized significand in [1, 2), or 0.
    long double significand() const noexcept { return significand_; }
    long exponent() const noexcept { return exponent_; }

    double log2() const;
    double log10() const;

    /// Native value; overflows to +inf or underflows to 0 when out of range.
    long double value() const;

    /// Decimal text with the given number of significant digits, formatted
    /// like printf("%.*g"). Exact (correctly rounded) for every value.
    std::string to_string(int significant_digits = 17) const;

    friend bool operator==(const WideValue&, const WideValue&) = default;

private:
    long double significand_ = 0.0L;
    long exponent_ = 0;
};

} // namespace bpnum
