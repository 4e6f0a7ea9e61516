#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bpnum/graph.hpp"

#include <algorithm>
#include <filesystem>
#include <set>
#include <sstream>

using namespace bpnum;

namespace {

const std::filesystem::path kData = BPNUM_DATA_DIR;

const char* kSpc3 = "3 1\n1 3\n1 1 1\n3\n1\n1\n1\n1 2 3\n";

std::size_t count_lines(const std::string& s)
{
    return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

// Exhaustive scan: does any pair of variables share two checks?
bool pairwise_four_cycle(const TannerGraph& g)
{
    std::vector<std::set<std::uint32_t>> checks(g.n_vars());
    for (const Edge& e : g.edges())
        checks[e.var].insert(e.check);
    for (std::size_t a = 0; a < g.n_vars(); ++a)
        for (std::size_t b = a + 1; b < g.n_vars(); ++b) {
            int shared = 0;
            for (auto c : checks[a])
                shared += checks[b].count(c);
            if (shared >= 2)
                return true;
        }
    return false;
}

} // namespace

TEST_CASE("single parity check")
{
    auto g = parse_alist(kSpc3);
    CHECK(g.n_vars() == 3);
    CHECK(g.n_checks() == 1);
    CHECK(g.n_edges() == 3);
    CHECK(g.check_degree(0) == 3);
    CHECK(write_alist(g) == kSpc3);
    CHECK(count_lines(write_alist(g)) == 8);
    CHECK(syndrome_ok(g, std::vector<std::uint8_t>{1, 1, 0}));
    CHECK_FALSE(syndrome_ok(g, std::vector<std::uint8_t>{1, 0, 0}));
    CHECK(syndrome_ok(g, std::vector<std::uint8_t>{0, 0, 0}));
    CHECK_THROWS_AS(syndrome_ok(g, std::vector<std::uint8_t>{0, 0}), std::invalid_argument);
}

TEST_CASE("edge ids are column-major and adjacency is consistent")
{
    auto g = read_alist(kData / "hamming74.alist");
    CHECK(g.n_edges() == 12);
    std::size_t total_var = 0, total_check = 0;
    for (std::size_t i = 0; i < g.n_vars(); ++i) {
        for (auto e : g.var_edges(i))
            CHECK(g.edge(e).var == i);
        total_var += g.var_degree(i);
    }
    for (std::size_t j = 0; j < g.n_checks(); ++j) {
        for (auto e : g.check_edges(j))
            CHECK(g.edge(e).check == j);
        total_check += g.check_degree(j);
    }
    CHECK(total_var == g.n_edges());
    CHECK(total_check == g.n_edges());
    for (std::size_t e = 1; e < g.n_edges(); ++e) {
        const auto& a = g.edge(e - 1);
        const auto& b = g.edge(e);
        CHECK((a.var < b.var || (a.var == b.var && a.check < b.check)));
    }
}

TEST_CASE("padding is accepted on input and never written")
{
    auto plain = read_alist(kData / "hamming74.alist");
    auto padded = read_alist(kData / "hamming74_padded.alist");
    CHECK(plain == padded);
    CHECK(write_alist(padded).find(" 0") == std::string::npos);
}

TEST_CASE("fixture corpus round-trips")
{
    int files = 0;
    for (const auto& entry : std::filesystem::directory_iterator(kData)) {
        if (entry.path().extension() != ".alist")
            continue;
        ++files;
        INFO(entry.path().filename().string());
        auto g = read_alist(entry.path());
        auto text = write_alist(g);
        auto again = parse_alist(text);
        CHECK(again == g);
        CHECK(write_alist(again) == text);
    }
    CHECK(files >= 5);
}

TEST_CASE("malformed alist reports the line")
{
    auto line_of = [](const std::string& text) -> std::size_t {
        try {
            parse_alist(text);
        } catch (const AlistError& e) {
            return e.line();
        }
        return 0;
    };
    // Column 2 lists check 1 but row 1 omits variable 2.
    CHECK(line_of("3 1\n1 3\n1 1 1\n3\n1\n1\n1\n1 3 0\n") == 8);
    CHECK(line_of("3 1\n1 3\n1 1 1\n2\n1\n1\n1\n1 3\n") == 8);
    CHECK(line_of("3 1\n1 3\n1 1 1\n3\n1\n2\n1\n1 2 3\n") == 6);
    CHECK(line_of("3 1\n1 3\n1 1\n3\n") == 3);
    CHECK(line_of("3 1\n1 3\n1 1 1\n3\n1\n1\n") == 7);
    CHECK(line_of("3 1\n1 3\n1 1 x\n") == 3);
    CHECK(line_of("3 1\n1 3\n1 1 1\n3\n1\n1\n1\n1 2 3\n5\n") == 9);
    CHECK(line_of("# comment\n3 1\n1 3\n1 1 1\n3\n1\n1\n1\n1 2 2\n") == 9);
    CHECK(line_of("") == 1);
}

TEST_CASE("graph construction rejects invalid edge sets")
{
    CHECK_THROWS_AS(TannerGraph(0, 0, {}), std::invalid_argument);
    CHECK_THROWS_AS(TannerGraph(2, 1, {{0, 0}, {0, 0}}), std::invalid_argument);
    CHECK_THROWS_AS(TannerGraph(2, 1, {{0, 0}, {0, 2}}), std::invalid_argument);
    CHECK_THROWS_AS(TannerGraph(3, 1, {{0, 0}, {0, 1}}), std::invalid_argument);
}

TEST_CASE("regular construction")
{
    auto g = generate_regular(1008, 3, 6, 1, 6);
    CHECK(g.n_edges() == 3024);
    CHECK(g.n_checks() == 504);
    for (std::size_t i = 0; i < g.n_vars(); ++i)
        REQUIRE(g.var_degree(i) == 3);
    for (std::size_t j = 0; j < g.n_checks(); ++j)
        REQUIRE(g.check_degree(j) == 6);
    CHECK_FALSE(pairwise_four_cycle(g));
    CHECK_FALSE(has_four_cycle(g));
    CHECK(g == generate_regular(1008, 3, 6, 1, 6));
    CHECK_FALSE(g == generate_regular(1008, 3, 6, 2, 6));

    auto fixture = read_alist(kData / "regular_1008_3_6.alist");
    CHECK(fixture == g);

    auto small = generate_regular(6, 2, 3, 3, 4);
    CHECK(small.n_edges() == 12);
    CHECK(small.n_checks() == 4);

    CHECK_THROWS_AS(generate_regular(7, 3, 6, 1), std::invalid_argument);
    CHECK_THROWS_AS(generate_regular(6, 1, 3, 1), std::invalid_argument);
    CHECK_THROWS_AS(generate_regular(4, 2, 4, 1, 6), std::runtime_error);
}

TEST_CASE("four-cycle detection")
{
    auto h = parse_alist("2 2\n2 2\n2 2\n2 2\n1 2\n1 2\n1 2\n1 2\n");
    CHECK(has_four_cycle(h));
    CHECK(pairwise_four_cycle(h));
    CHECK_FALSE(has_four_cycle(parse_alist(kSpc3)));
}
