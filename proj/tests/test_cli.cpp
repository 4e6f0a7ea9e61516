#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bpnum/csv.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const fs::path kData = BPNUM_DATA_DIR;

struct Run {
    int status;
    std::string out;
};

Run run(const std::string& args)
{
    const std::string cmd = std::string("'") + BPNUM_CLI + "' " + args + " 2>/dev/null";
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    std::string out;
    char buf[4096];
    while (std::size_t n = std::fread(buf, 1, sizeof buf, p))
        out.append(buf, n);
    const int st = pclose(p);
    return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, out};
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::vector<std::string> lines(const std::string& text)
{
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);)
        out.push_back(l);
    return out;
}

fs::path scratch_dir()
{
    auto d = fs::temp_directory_path() / ("bpnum_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
}

} // namespace

TEST_CASE("exit codes")
{
    CHECK(run("--version").status == 0);
    CHECK(run("limits").status == 0);
    CHECK(run("fer --kernel MSA").status == 2);
    CHECK(run("decode-one --alist /nonexistent.alist --llrs 1,2,3").status == 2);
    CHECK(run("decode-one --alist '" + (kData / "spc3.alist").string() + "' --kernel BOGUS --llrs 1,2,3")
              .status == 2);
    CHECK(run("decode-one --alist '" + (kData / "spc3.alist").string() + "' --llrs 1,2").status == 2);
    CHECK(run("no-such-command").status == 2);
}

TEST_CASE("decode-one row")
{
    auto r = run("decode-one --alist '" + (kData / "spc3.alist").string() + "' --llrs 4,4,-0.1");
    REQUIRE(r.status == 0);
    auto ls = lines(r.out);
    REQUIRE(ls.size() >= 2);
    CHECK(ls[ls.size() - 2] == "converged,iterations,max_abs_llr,rescales,hybrid_switched,bits,posterior");
    const auto& row = ls.back();
    CHECK(row.rfind("1,1,", 0) == 0);
    CHECK(row.find(",000,") != std::string::npos);
    CHECK(row.find(";3.20718822581") != std::string::npos);

    auto capped = run("decode-one --alist '" + (kData / "spc3.alist").string() +
                      "' --max-iters 1 --llrs 1,-1,0.5");
    REQUIRE(capped.status == 0);
    CHECK(lines(capped.out).back().rfind("0,1,", 0) == 0);
}

TEST_CASE("limits rows")
{
    auto r = run("limits --formats binary64");
    REQUIRE(r.status == 0);
    auto ls = lines(r.out);
    std::vector<std::string> rows;
    for (const auto& l : ls)
        if (!l.empty() && l[0] != '#')
            rows.push_back(l);
    REQUIRE(rows.size() == 9);
    CHECK(rows[0] == "technique,format,llr_limit");
    CHECK(rows[1].rfind("TANH,binary64,38.123", 0) == 0);
    CHECK(rows[7].rfind("LD,binary64,37.42", 0) == 0);
}

TEST_CASE("output file and manifest replay")
{
    const auto dir = scratch_dir();
    const auto alist = (kData / "regular_96_3_6.alist").string();
    const auto first = (dir / "first.csv").string();
    const auto second = (dir / "second.csv").string();

    REQUIRE(run("fer --alist '" + alist + "' --kernel MSA_OFFSET --ebn0 1.5,2.5 --min-errors 5 "
                "--max-frames 500 --seed 9 --workers 2 -o '" + first + "'")
                .status == 0);
    REQUIRE(run("fer --config '" + first + "' --workers 1 -o '" + second + "'").status == 0);
    const auto a = slurp(first);
    CHECK(!a.empty());
    CHECK(a == slurp(second));

    auto kv = bpnum::parse_key_values(a);
    CHECK(kv["subcommand"] == "fer");
    CHECK(kv["seed"] == "9");
    CHECK(kv.count("workers") == 0);
    CHECK(kv.count("out") == 0);

    // A later command-line option overrides the replayed one.
    auto changed = run("fer --config '" + first + "' --seed 10");
    CHECK(changed.status == 0);
    CHECK(changed.out != a);
    CHECK(changed.out.find("# seed=10\n") != std::string::npos);

    // Replaying a manifest under another subcommand is rejected.
    CHECK(run("limits --config '" + first + "'").status == 2);
    fs::remove_all(dir);
}

TEST_CASE("gen-regular output is a readable code")
{
    auto r = run("gen-regular --n 96 --dv 3 --dc 6 --seed 5");
    REQUIRE(r.status == 0);
    CHECK(r.out == slurp(kData / "regular_96_3_6.alist"));
}
