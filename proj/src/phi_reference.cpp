#include "quad_reference.hpp"

#include "bpnum/fp_analysis.hpp"

#include <stdexcept>

#include <quadmath.h>

namespace bpnum {
namespace detail {

quad phi_q(quad x)
{
    // ln((1 + e^-x) / (1 - e^-x)) = log1p(2 / expm1(x)); both pieces keep
    // full relative accuracy from tiny x up to the binary128 overflow of expm1.
    quad em1 = expm1q(x);
    if (isinfq(em1))
        return 0;
    return log1pq(2 / em1);
}

quad cn_pairwise_q(quad a, quad b)
{
    quad ma = fabsq(a);
    quad mb = fabsq(b);
    quad sign = ((a < 0) != (b < 0)) ? -1 : 1;
    if (ma == 0 || mb == 0)
        return 0;
    quad lo = ma < mb ? ma : mb;
    quad corr_sum = log1pq(expq(-(ma + mb)));
    quad corr_diff = log1pq(expq(-fabsq(ma - mb)));
    return sign * (lo + corr_sum - corr_diff);
}

quad cn_reduce_q(std::span<const double> inputs)
{
    if (inputs.empty())
        throw std::invalid_argument("cn_reduce_q: no inputs");
    quad acc = inputs[0];
    for (std::size_t i = 1; i < inputs.size(); ++i)
        acc = cn_pairwise_q(acc, inputs[i]);
    return acc;
}

} // namespace detail

double phi_reference(double x)
{
    if (!(x > 0.0) || !std::isfinite(x))
        throw std::domain_error("phi_reference: x must be positive and finite");
    return static_cast<double>(detail::phi_q(x));
}

} // namespace bpnum
