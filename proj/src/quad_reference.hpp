#pragma once

// Internal binary128 reference evaluations (libquadmath). Not installed.

#include <span>

namespace bpnum::detail {

using quad = __float128;

/// Phi(x) = ln(1 + 2 / (e^x - 1)) in binary128. Returns 0 beyond the
/// binary128 range of expm1.
quad phi_q(quad x);

/// Exact pairwise check-node reduction evaluated in binary128.
quad cn_pairwise_q(quad a, quad b);

/// Left fold of cn_pairwise_q over all inputs.
quad cn_reduce_q(std::span<const double> inputs);

} // namespace bpnum::detail
