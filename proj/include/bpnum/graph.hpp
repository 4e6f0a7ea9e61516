#pragma once

// Tanner graph of a binary parity-check matrix H (checks are rows, variables
// are columns). Edge ids are assigned in column-major order, so the edges of
// variable i occupy a contiguous id range.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace bpnum {

struct Edge {
    std::uint32_t check;
    std::uint32_t var;

    friend bool operator==(const Edge&, const Edge&) = default;
};

class TannerGraph {
public:
    /// Builds the graph from (check, var) pairs in any order. Throws
    /// std::invalid_argument for an empty graph, indices out of range,
    /// duplicate pairs or nodes without edges.
    TannerGraph(std::size_t n_vars, std::size_t n_checks, std::vector<Edge> edges);

    std::size_t n_vars() const noexcept { return n_vars_; }
    std::size_t n_checks() const noexcept { return n_checks_; }
    std::size_t n_edges() const noexcept { return edges_.size(); }

    std::span<const Edge> edges() const noexcept { return edges_; }
    const Edge& edge(std::size_t e) const { return edges_[e]; }

    /// Edge ids incident to variable i, ascending (and so ordered by check).
    std::span<const std::uint32_t> var_edges(std::size_t i) const
    {
        return {var_edge_ids_.data() + var_offset_[i], var_offset_[i + 1] - var_offset_[i]};
    }
    /// Edge ids incident to check j, ordered by variable.
    std::span<const std::uint32_t> check_edges(std::size_t j) const
    {
        return {check_edge_ids_.data() + check_offset_[j], check_offset_[j + 1] - check_offset_[j]};
    }
    std::size_t var_degree(std::size_t i) const { return var_offset_[i + 1] - var_offset_[i]; }
    std::size_t check_degree(std::size_t j) const { return check_offset_[j + 1] - check_offset_[j]; }
    std::size_t max_var_degree() const noexcept { return max_var_degree_; }
    std::size_t max_check_degree() const noexcept { return max_check_degree_; }

    /// Design rate (n_vars - n_checks) / n_vars.
    double design_rate() const noexcept
    {
        return static_cast<double>(n_vars_ - std::min(n_vars_, n_checks_)) / n_vars_;
    }

    friend bool operator==(const TannerGraph& a, const TannerGraph& b)
    {
        return a.n_vars_ == b.n_vars_ && a.n_checks_ == b.n_checks_ && a.edges_ == b.edges_;
    }

private:
    std::size_t n_vars_;
    std::size_t n_checks_;
    std::vector<Edge> edges_;
    std::vector<std::uint32_t> var_offset_;
    std::vector<std::uint32_t> var_edge_ids_;
    std::vector<std::uint32_t> check_offset_;
    std::vector<std::uint32_t> check_edge_ids_;
    std::size_t max_var_degree_ = 0;
    std::size_t max_check_degree_ = 0;
};

class AlistError : public std::runtime_error {
public:
    AlistError(std::size_t line, const std::string& what)
        : std::runtime_error("alist line " + std::to_string(line) + ": " + what), line_(line)
    {
    }
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Parses the alist text format: "n m", max column/row degree, the n column
/// degrees, the m row degrees, then one line of 1-based check indices per
/// column and one line of variable indices per row. Zero entries are padding
/// and ignored, as are lines starting with '#'. Column and row sections must describe the same edges.
/// Throws AlistError with the offending line number.
TannerGraph parse_alist(std::string_view text);
TannerGraph read_alist(const std::filesystem::path& path);

/// Canonical alist: sorted indices, no padding, one record per line.
std::string write_alist(const TannerGraph& g);

/// True iff every check's adjacent bits XOR to zero. Throws
/// std::invalid_argument when bits.size() != n_vars.
bool syndrome_ok(const TannerGraph& g, std::span<const std::uint8_t> bits);

/// True iff two variables share two or more checks.
bool has_four_cycle(const TannerGraph& g);

/// Random (dv, dc)-regular graph on n variables by socket permutation
/// followed by randomized edge swaps that remove duplicate edges and, when
/// girth_floor >= 6, 4-cycles. Deterministic in seed. Throws
/// std::invalid_argument on bad parameters and std::runtime_error when no
/// valid graph is found within the retry budget.
TannerGraph generate_regular(std::size_t n, std::size_t dv, std::size_t dc, std::uint64_t seed,
                             int girth_floor = 6);

} // namespace bpnum
