#include "bpnum/graph.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <random>
#include <sstream>

namespace bpnum {

TannerGraph::TannerGraph(std::size_t n_vars, std::size_t n_checks, std::vector<Edge> edges)
    : n_vars_(n_vars), n_checks_(n_checks), edges_(std::move(edges))
{
    if (n_vars == 0 || n_checks == 0 || edges_.empty())
        throw std::invalid_argument("TannerGraph: empty graph");
    if (n_vars > UINT32_MAX || n_checks > UINT32_MAX || edges_.size() > UINT32_MAX)
        throw std::invalid_argument("TannerGraph: graph too large");
    for (const Edge& e : edges_)
        if (e.var >= n_vars || e.check >= n_checks)
            throw std::invalid_argument("TannerGraph: edge (" + std::to_string(e.check) + ", " +
                                        std::to_string(e.var) + ") out of range");

    std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
        return a.var != b.var ? a.var < b.var : a.check < b.check;
    });
    if (auto dup = std::adjacent_find(edges_.begin(), edges_.end()); dup != edges_.end())
        throw std::invalid_argument("TannerGraph: duplicate edge (" + std::to_string(dup->check) +
                                    ", " + std::to_string(dup->var) + ")");

    var_offset_.assign(n_vars + 1, 0);
    check_offset_.assign(n_checks + 1, 0);
    for (const Edge& e : edges_) {
        ++var_offset_[e.var + 1];
        ++check_offset_[e.check + 1];
    }
    for (std::size_t i = 0; i < n_vars; ++i) {
        if (var_offset_[i + 1] == 0)
            throw std::invalid_argument("TannerGraph: variable " + std::to_string(i) +
                                        " has no edges");
        max_var_degree_ = std::max<std::size_t>(max_var_degree_, var_offset_[i + 1]);
        var_offset_[i + 1] += var_offset_[i];
    }
    for (std::size_t j = 0; j < n_checks; ++j) {
        if (check_offset_[j + 1] == 0)
            throw std::invalid_argument("TannerGraph: check " + std::to_string(j) +
                                        " has no edges");
        max_check_degree_ = std::max<std::size_t>(max_check_degree_, check_offset_[j + 1]);
        check_offset_[j + 1] += check_offset_[j];
    }

    var_edge_ids_.resize(edges_.size());
    check_edge_ids_.resize(edges_.size());
    std::vector<std::uint32_t> fill(check_offset_.begin(), check_offset_.end() - 1);
    for (std::uint32_t e = 0; e < edges_.size(); ++e) {
        var_edge_ids_[e] = e;
        check_edge_ids_[fill[edges_[e].check]++] = e;
    }
}

// ---------------------------------------------------------------------------

namespace {

struct Line {
    std::size_t number;
    std::vector<long> values;
};

std::vector<Line> tokenize(std::string_view text)
{
    std::vector<Line> lines;
    std::size_t number = 0;
    while (!text.empty()) {
        auto nl = text.find('\n');
        std::string_view raw = text.substr(0, nl);
        text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
        ++number;

        Line line{number, {}};
        std::size_t pos = raw.find_first_not_of(" \t");
        if (pos != std::string_view::npos && raw[pos] == '#')
            continue;
        pos = 0;
        while (pos < raw.size()) {
            while (pos < raw.size() && (raw[pos] == ' ' || raw[pos] == '\t' || raw[pos] == '\r'))
                ++pos;
            if (pos == raw.size())
                break;
            long v = 0;
            auto [ptr, ec] = std::from_chars(raw.data() + pos, raw.data() + raw.size(), v);
            if (ec != std::errc())
                throw AlistError(number, "expected an integer");
            pos = static_cast<std::size_t>(ptr - raw.data());
            if (pos < raw.size() && raw[pos] != ' ' && raw[pos] != '\t' && raw[pos] != '\r')
                throw AlistError(number, "expected an integer");
            line.values.push_back(v);
        }
        if (!line.values.empty())
            lines.push_back(std::move(line));
    }
    return lines;
}

} // namespace

TannerGraph parse_alist(std::string_view text)
{
    auto lines = tokenize(text);
    std::size_t cursor = 0;
    std::size_t last_line = 0;
    auto next = [&](const char* what) -> const Line& {
        if (cursor == lines.size())
            throw AlistError(last_line + 1, std::string("unexpected end of file, expected ") + what);
        last_line = lines[cursor].number;
        return lines[cursor++];
    };
    auto expect_count = [](const Line& l, std::size_t count, const char* what) {
        if (l.values.size() != count)
            throw AlistError(l.number, std::string(what) + ": expected " + std::to_string(count) +
                                           " values, found " + std::to_string(l.values.size()));
    };

    const Line& dims = next("dimensions");
    expect_count(dims, 2, "dimensions");
    if (dims.values[0] <= 0 || dims.values[1] <= 0)
        throw AlistError(dims.number, "dimensions must be positive");
    const auto n = static_cast<std::size_t>(dims.values[0]);
    const auto m = static_cast<std::size_t>(dims.values[1]);

    const Line& maxdeg = next("maximum degrees");
    expect_count(maxdeg, 2, "maximum degrees");
    const long max_col = maxdeg.values[0];
    const long max_row = maxdeg.values[1];

    auto read_degrees = [&](std::size_t count, long max, const char* what) {
        const Line& l = next(what);
        expect_count(l, count, what);
        for (long d : l.values)
            if (d < 1 || d > max)
                throw AlistError(l.number, std::string(what) + ": degree " + std::to_string(d) +
                                               " outside [1, " + std::to_string(max) + "]");
        return l.values;
    };
    const auto col_deg = read_degrees(n, max_col, "column degrees");
    const auto row_deg = read_degrees(m, max_row, "row degrees");

    auto read_indices = [&](long degree, long limit, const char* what) {
        const Line& l = next(what);
        std::vector<long> idx;
        for (long v : l.values) {
            if (v == 0)
                continue;
            if (v < 0 || v > limit)
                throw AlistError(l.number, std::string(what) + ": index " + std::to_string(v) +
                                               " out of range [1, " + std::to_string(limit) + "]");
            idx.push_back(v - 1);
        }
        if (static_cast<long>(idx.size()) != degree)
            throw AlistError(l.number, std::string(what) + ": expected " + std::to_string(degree) +
                                           " indices, found " + std::to_string(idx.size()));
        std::sort(idx.begin(), idx.end());
        if (std::adjacent_find(idx.begin(), idx.end()) != idx.end())
            throw AlistError(l.number, std::string(what) + ": repeated index");
        return std::pair{l.number, idx};
    };

    std::vector<Edge> edges;
    std::vector<std::vector<std::uint32_t>> vars_of_check(m);
    for (std::size_t i = 0; i < n; ++i) {
        auto [number, checks] = read_indices(col_deg[i], static_cast<long>(m), "column entries");
        for (long c : checks) {
            edges.push_back({static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(i)});
            vars_of_check[c].push_back(static_cast<std::uint32_t>(i));
        }
    }
    for (std::size_t j = 0; j < m; ++j) {
        auto [number, vars] = read_indices(row_deg[j], static_cast<long>(n), "row entries");
        const auto& expected = vars_of_check[j];
        if (vars.size() != expected.size() ||
            !std::equal(vars.begin(), vars.end(), expected.begin()))
            throw AlistError(number, "row " + std::to_string(j + 1) +
                                         " disagrees with the column section");
    }
    if (cursor != lines.size())
        throw AlistError(lines[cursor].number, "unexpected data after the row section");

    return TannerGraph(n, m, std::move(edges));
}

TannerGraph read_alist(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open alist file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_alist(buf.str());
}

std::string write_alist(const TannerGraph& g)
{
    std::ostringstream out;
    auto write_list = [&](auto count, auto item) {
        for (std::size_t k = 0; k < count; ++k)
            out << (k ? " " : "") << item(k);
        out << '\n';
    };
    out << g.n_vars() << ' ' << g.n_checks() << '\n';
    out << g.max_var_degree() << ' ' << g.max_check_degree() << '\n';
    write_list(g.n_vars(), [&](std::size_t i) { return g.var_degree(i); });
    write_list(g.n_checks(), [&](std::size_t j) { return g.check_degree(j); });
    for (std::size_t i = 0; i < g.n_vars(); ++i) {
        auto ids = g.var_edges(i);
        write_list(ids.size(), [&](std::size_t k) { return g.edge(ids[k]).check + 1; });
    }
    for (std::size_t j = 0; j < g.n_checks(); ++j) {
        auto ids = g.check_edges(j);
        write_list(ids.size(), [&](std::size_t k) { return g.edge(ids[k]).var + 1; });
    }
    return out.str();
}

bool syndrome_ok(const TannerGraph& g, std::span<const std::uint8_t> bits)
{
    if (bits.size() != g.n_vars())
        throw std::invalid_argument("syndrome_ok: expected " + std::to_string(g.n_vars()) +
                                    " bits, got " + std::to_string(bits.size()));
    for (std::size_t j = 0; j < g.n_checks(); ++j) {
        unsigned parity = 0;
        for (auto e : g.check_edges(j))
            parity ^= bits[g.edge(e).var] & 1u;
        if (parity)
            return false;
    }
    return true;
}

bool has_four_cycle(const TannerGraph& g)
{
    std::vector<std::uint32_t> seen_by(g.n_vars(), UINT32_MAX);
    for (std::uint32_t i = 0; i < g.n_vars(); ++i) {
        for (auto e : g.var_edges(i)) {
            for (auto f : g.check_edges(g.edge(e).check)) {
                auto u = g.edge(f).var;
                if (u == i)
                    continue;
                if (seen_by[u] == i)
                    return true;
                seen_by[u] = i;
            }
        }
    }
    return false;
}

// ---------------------------------------------------------------------------

namespace {

// Unbiased draw from [0, bound) by rejection, so the construction does not
// depend on a library's distribution implementation.
std::uint64_t draw_below(std::mt19937_64& rng, std::uint64_t bound)
{
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % bound;
}

class RegularBuilder {
public:
    RegularBuilder(std::size_t n, std::size_t dv, std::size_t dc, bool reject_four_cycles,
                   std::mt19937_64& rng)
        : dv_(dv), m_(n * dv / dc), reject_(reject_four_cycles), rng_(rng),
          check_of_(n * dv), vars_of_(m_)
    {
        for (std::size_t s = 0; s < check_of_.size(); ++s)
            check_of_[s] = static_cast<std::uint32_t>(s / dc);
        for (std::size_t s = check_of_.size(); s > 1; --s)
            std::swap(check_of_[s - 1], check_of_[draw_below(rng_, s)]);
        for (std::size_t s = 0; s < check_of_.size(); ++s)
            vars_of_[check_of_[s]].push_back(var_of(s));
    }

    bool repair(std::size_t max_swaps)
    {
        const std::size_t sockets = check_of_.size();
        std::size_t swaps = 0;
        for (bool clean = false; !clean;) {
            clean = true;
            for (std::size_t s = 0; s < sockets; ++s) {
                if (!bad(s))
                    continue;
                clean = false;
                for (;;) {
                    if (++swaps > max_swaps)
                        return false;
                    std::size_t t = draw_below(rng_, sockets);
                    if (check_of_[t] == check_of_[s] || var_of(t) == var_of(s))
                        continue;
                    swap_checks(s, t);
                    if (!bad(s) && !bad(t))
                        break;
                    swap_checks(s, t);
                }
            }
        }
        return true;
    }

    std::vector<Edge> edges() const
    {
        std::vector<Edge> out(check_of_.size());
        for (std::size_t s = 0; s < check_of_.size(); ++s)
            out[s] = {check_of_[s], var_of(s)};
        return out;
    }

    std::size_t n_checks() const { return m_; }

private:
    std::uint32_t var_of(std::size_t s) const { return static_cast<std::uint32_t>(s / dv_); }

    void swap_checks(std::size_t s, std::size_t t)
    {
        auto move = [&](std::uint32_t var, std::uint32_t from, std::uint32_t to) {
            auto& list = vars_of_[from];
            list.erase(std::find(list.begin(), list.end(), var));
            vars_of_[to].push_back(var);
        };
        const auto cs = check_of_[s];
        const auto ct = check_of_[t];
        move(var_of(s), cs, ct);
        move(var_of(t), ct, cs);
        std::swap(check_of_[s], check_of_[t]);
    }

    // Socket s is a duplicate of another socket of its variable, or lies on
    // a 4-cycle v - c - u - c2 - v.
    bool bad(std::size_t s) const
    {
        const auto v = var_of(s);
        const auto c = check_of_[s];
        const std::size_t first = static_cast<std::size_t>(v) * dv_;
        for (std::size_t k = first; k < first + dv_; ++k) {
            if (k == s)
                continue;
            const auto c2 = check_of_[k];
            if (c2 == c)
                return true;
            if (!reject_)
                continue;
            for (auto u : vars_of_[c]) {
                if (u == v)
                    continue;
                const auto& other = vars_of_[c2];
                if (std::find(other.begin(), other.end(), u) != other.end())
                    return true;
            }
        }
        return false;
    }

    std::size_t dv_;
    std::size_t m_;
    bool reject_;
    std::mt19937_64& rng_;
    std::vector<std::uint32_t> check_of_;
    std::vector<std::vector<std::uint32_t>> vars_of_;
};

} // namespace

TannerGraph generate_regular(std::size_t n, std::size_t dv, std::size_t dc, std::uint64_t seed,
                             int girth_floor)
{
    if (n == 0 || dv < 2 || dc < 2)
        throw std::invalid_argument("generate_regular: need n >= 1, dv >= 2, dc >= 2");
    if ((n * dv) % dc != 0)
        throw std::invalid_argument("generate_regular: n * dv must be divisible by dc");
    if (dc > n)
        throw std::invalid_argument("generate_regular: dc cannot exceed n");
    if (girth_floor > 6)
        throw std::invalid_argument("generate_regular: only 4-cycle rejection is supported");

    std::mt19937_64 rng(seed);
    const bool reject = girth_floor >= 6;
    constexpr int attempts = 50;
    for (int attempt = 0; attempt < attempts; ++attempt) {
        RegularBuilder builder(n, dv, dc, reject, rng);
        if (builder.repair(200 * n * dv))
            return TannerGraph(n, builder.n_checks(), builder.edges());
    }
    throw std::runtime_error("generate_regular: no valid graph after " + std::to_string(attempts) +
                             " attempts");
}

} // namespace bpnum
