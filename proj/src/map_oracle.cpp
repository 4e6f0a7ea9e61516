#include "bpnum/montecarlo.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace bpnum {

namespace {

using Row = std::vector<std::uint8_t>;

// Basis of {x : H x = 0} over GF(2), one vector per free column.
std::vector<Row> null_space(const TannerGraph& g)
{
    const std::size_t n = g.n_vars();
    std::vector<Row> h(g.n_checks(), Row(n, 0));
    for (const Edge& e : g.edges())
        h[e.check][e.var] = 1;

    std::vector<std::size_t> pivot_col;
    std::size_t rank = 0;
    for (std::size_t col = 0; col < n && rank < h.size(); ++col) {
        std::size_t r = rank;
        while (r < h.size() && !h[r][col])
            ++r;
        if (r == h.size())
            continue;
        std::swap(h[r], h[rank]);
        for (std::size_t other = 0; other < h.size(); ++other)
            if (other != rank && h[other][col])
                for (std::size_t c = col; c < n; ++c)
                    h[other][c] ^= h[rank][c];
        pivot_col.push_back(col);
        ++rank;
    }

    std::vector<bool> is_pivot(n, false);
    for (auto c : pivot_col)
        is_pivot[c] = true;
    std::vector<Row> basis;
    for (std::size_t f = 0; f < n; ++f) {
        if (is_pivot[f])
            continue;
        Row v(n, 0);
        v[f] = 1;
        for (std::size_t r = 0; r < rank; ++r)
            v[pivot_col[r]] = h[r][f];
        basis.push_back(std::move(v));
    }
    return basis;
}

} // namespace

std::size_t code_dimension(const TannerGraph& g)
{
    return null_space(g).size();
}

MapResult map_oracle(const TannerGraph& g, std::span<const double> channel_llrs, int max_dimension)
{
    const std::size_t n = g.n_vars();
    if (channel_llrs.size() != n)
        throw std::invalid_argument("map_oracle: expected " + std::to_string(n) + " channel LLRs");
    const auto basis = null_space(g);
    const std::size_t k = basis.size();
    if (max_dimension < 0 || k > static_cast<std::size_t>(max_dimension) || k > 62)
        throw std::length_error("map_oracle: code dimension " + std::to_string(k) +
                                " is too large to enumerate");
    const std::uint64_t count = std::uint64_t{1} << k;

    // Codewords are visited in Gray-code order, flipping one basis vector
    // per step. The metric is recomputed from scratch for each codeword.
    auto enumerate = [&](auto&& visit) {
        Row word(n, 0);
        for (std::uint64_t t = 0; t < count; ++t) {
            if (t > 0) {
                const auto& b = basis[static_cast<std::size_t>(std::countr_zero(t))];
                for (std::size_t i = 0; i < n; ++i)
                    word[i] ^= b[i];
            }
            double metric = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                metric += word[i] ? -channel_llrs[i] : channel_llrs[i];
            visit(word, metric / 2.0);
        }
    };

    constexpr double ninf = -std::numeric_limits<double>::infinity();
    std::vector<double> max0(n, ninf), max1(n, ninf);
    enumerate([&](const Row& w, double metric) {
        for (std::size_t i = 0; i < n; ++i) {
            double& m = w[i] ? max1[i] : max0[i];
            m = std::max(m, metric);
        }
    });
    std::vector<double> sum0(n, 0.0), sum1(n, 0.0);
    enumerate([&](const Row& w, double metric) {
        for (std::size_t i = 0; i < n; ++i) {
            if (w[i])
                sum1[i] += std::exp(metric - max1[i]);
            else
                sum0[i] += std::exp(metric - max0[i]);
        }
    });

    MapResult r;
    r.codewords = count;
    r.llr.resize(n);
    r.bits.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (max1[i] == ninf)
            r.llr[i] = std::numeric_limits<double>::infinity();
        else
            r.llr[i] = (max0[i] + std::log(sum0[i])) - (max1[i] + std::log(sum1[i]));
        r.bits[i] = r.llr[i] < 0.0 ? 1 : 0;
    }
    return r;
}

} // namespace bpnum
