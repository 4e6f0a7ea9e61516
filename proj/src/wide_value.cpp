#include "bpnum/wide_value.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <vector>

namespace bpnum {

namespace {

// Little-endian base-1e9 unsigned integer, just enough for exact decimal
// expansion of m * 2^k and m * 5^k.
class Decimal {
public:
    explicit Decimal(std::uint64_t v)
    {
        do {
            limbs_.push_back(static_cast<std::uint32_t>(v % kBase));
            v /= kBase;
        } while (v != 0);
    }

    void multiply(std::uint64_t factor)
    {
        std::uint64_t carry = 0;
        for (auto& limb : limbs_) {
            std::uint64_t cur = limb * factor + carry;
            limb = static_cast<std::uint32_t>(cur % kBase);
            carry = cur / kBase;
        }
        while (carry != 0) {
            limbs_.push_back(static_cast<std::uint32_t>(carry % kBase));
            carry /= kBase;
        }
    }

    void multiply_pow2(long k)
    {
        for (; k >= 29; k -= 29)
            multiply(std::uint64_t{1} << 29);
        if (k > 0)
            multiply(std::uint64_t{1} << k);
    }

    void multiply_pow5(long k)
    {
        constexpr std::uint64_t five13 = 1220703125ULL;
        for (; k >= 13; k -= 13)
            multiply(five13);
        std::uint64_t rest = 1;
        for (; k > 0; --k)
            rest *= 5;
        if (rest > 1)
            multiply(rest);
    }

    std::string digits() const
    {
        std::string out = std::to_string(limbs_.back());
        char buf[16];
        for (auto it = limbs_.rbegin() + 1; it != limbs_.rend(); ++it) {
            std::snprintf(buf, sizeof buf, "%09u", static_cast<unsigned>(*it));
            out += buf;
        }
        return out;
    }

private:
    static constexpr std::uint64_t kBase = 1000000000ULL;
    std::vector<std::uint32_t> limbs_;
};

// Round a decimal digit string to n digits, half to even. Returns true when
// rounding carried into a new leading digit.
bool round_digits(std::string& d, std::size_t n)
{
    if (d.size() <= n)
        return false;
    bool up = false;
    char first = d[n];
    if (first > '5') {
        up = true;
    } else if (first == '5') {
        bool sticky = d.find_first_not_of('0', n + 1) != std::string::npos;
        up = sticky || ((d[n - 1] - '0') % 2 == 1);
    }
    d.resize(n);
    if (!up)
        return false;
    for (std::size_t i = n; i-- > 0;) {
        if (d[i] == '9') {
            d[i] = '0';
        } else {
            ++d[i];
            return false;
        }
    }
    d.insert(d.begin(), '1');
    d.resize(n);
    return true;
}

} // namespace

WideValue WideValue::scaled(long double v, long exponent)
{
    if (!std::isfinite(v) || v < 0.0L)
        throw std::invalid_argument("WideValue: value must be finite and non-negative");
    WideValue w;
    if (v == 0.0L)
        return w;
    int e = 0;
    long double m = std::frexp(v, &e); // [0.5, 1)
    w.significand_ = m * 2.0L;
    w.exponent_ = exponent + e - 1;
    return w;
}

double WideValue::log2() const
{
    if (is_zero())
        return -INFINITY;
    return static_cast<double>(std::log2(significand_)) + static_cast<double>(exponent_);
}

double WideValue::log10() const
{
    if (is_zero())
        return -INFINITY;
    return static_cast<double>(std::log10(significand_) +
                               static_cast<long double>(exponent_) * std::log10(2.0L));
}

long double WideValue::value() const
{
    if (is_zero())
        return 0.0L;
    if (exponent_ > 20000)
        return INFINITY;
    if (exponent_ < -20000)
        return 0.0L;
    return std::ldexp(significand_, static_cast<int>(exponent_));
}

std::string WideValue::to_string(int significant_digits) const
{
    if (significant_digits < 1)
        throw std::invalid_argument("WideValue::to_string: need at least one digit");
    if (is_zero())
        return "0";

    // significand has at most 64 significant bits.
    auto mant = static_cast<std::uint64_t>(std::ldexp(significand_, 63));
    long k = exponent_ - 63;
    Decimal dec(mant);
    long exp10 = 0;
    if (k >= 0) {
        dec.multiply_pow2(k);
    } else {
        dec.multiply_pow5(-k);
        exp10 = k;
    }
    std::string d = dec.digits();
    exp10 += static_cast<long>(d.size()) - 1;
    auto n = static_cast<std::size_t>(significant_digits);
    if (round_digits(d, n))
        ++exp10;
    while (d.size() > 1 && d.back() == '0')
        d.pop_back();

    std::string out;
    if (exp10 < -4 || exp10 >= significant_digits) {
        out += d[0];
        if (d.size() > 1) {
            out += '.';
            out.append(d, 1);
        }
        char buf[32];
        std::snprintf(buf, sizeof buf, "e%c%02ld", exp10 < 0 ? '-' : '+', std::labs(exp10));
        out += buf;
    } else if (exp10 < 0) {
        out = "0.";
        out.append(static_cast<std::size_t>(-exp10 - 1), '0');
        out += d;
    } else {
        auto int_len = static_cast<std::size_t>(exp10 + 1);
        if (d.size() <= int_len) {
            out = d + std::string(int_len - d.size(), '0');
        } else {
            out = d.substr(0, int_len) + "." + d.substr(int_len);
        }
    }
    return out;
}

} // namespace bpnum
