#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bpnum/channel.hpp"
#include "bpnum/kernels.hpp"
#include "oracle.hpp"

#include <cfloat>
#include <cmath>
#include <vector>

using namespace bpnum;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

double ref(std::vector<double> in)
{
    return static_cast<double>(oracle::check_node(in));
}

} // namespace

TEST_CASE("kernel names round-trip")
{
    for (const char* name : {"TANH", "PAIRWISE_EXACT", "PAIRWISE_RICHTER", "MSA",
                             "MSA_NORMALIZED(0.8)", "MSA_OFFSET(0.15)", "GIT", "GIT2", "LR", "LD",
                             "OLD", "HYBRID(PAIRWISE_RICHTER,MSA)", "HYBRID(PAIRWISE_EXACT,MSA,1e+20)"})
        CHECK(to_string(parse_kernel(name)) == name);
    CHECK(parse_kernel("GIT(amended)") == parse_kernel("GIT2"));
    CHECK(parse_kernel("GIT(naive)") == parse_kernel("GIT"));
    CHECK(parse_kernel("MSA_NORMALIZED").alpha == 0.8);
    CHECK(parse_kernel("MSA_OFFSET( 0.5 )").beta == 0.5);
    CHECK(parse_kernel("HYBRID").precise == KernelTag::PairwiseRichter);
    for (const char* bad : {"", "FOO", "MSA(1)", "MSA_NORMALIZED(1.5)", "MSA_NORMALIZED(0)",
                            "MSA_OFFSET(-1)", "GIT(x)", "HYBRID(MSA)", "HYBRID(HYBRID,MSA)",
                            "HYBRID(MSA,MSA,-1)", "MSA_OFFSET(0.1"})
        CHECK_THROWS_AS(parse_kernel(bad), std::invalid_argument);
}

TEST_CASE("homogeneity")
{
    CHECK(is_positively_homogeneous(parse_kernel("MSA")));
    CHECK(is_positively_homogeneous(parse_kernel("MSA_NORMALIZED(0.5)")));
    CHECK_FALSE(is_positively_homogeneous(parse_kernel("MSA_OFFSET")));
    CHECK_FALSE(is_positively_homogeneous(parse_kernel("PAIRWISE_EXACT")));
    CHECK_FALSE(is_positively_homogeneous(parse_kernel("HYBRID")));
}

TEST_CASE("tanh rule")
{
    CHECK(cn_tanh(std::vector<double>{2.0, 2.0}) ==
          doctest::Approx(2.0 * std::atanh(std::tanh(1.0) * std::tanh(1.0))).epsilon(1e-15));
    CHECK(cn_tanh(std::vector<double>{2.0, 2.0}) == doctest::Approx(1.3250).epsilon(1e-4));
    CHECK(cn_tanh(std::vector<double>{3.0, -1.0}) < 0.0);
    CHECK(cn_tanh(std::vector<double>{7.5}) == 7.5);
    CHECK(std::isinf(cn_tanh(std::vector<double>{40.0, 40.0})));
    CHECK(cn_tanh(std::vector<double>{40.0, 40.0}, 38.0) ==
          doctest::Approx(2.0 * std::atanh(std::tanh(19.0) * std::tanh(19.0))).epsilon(1e-15));
    CHECK_THROWS_AS(cn_tanh(std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("pairwise exact rule")
{
    CHECK(cn_pairwise_exact(2.0, 2.0) == doctest::Approx(ref({2.0, 2.0})).epsilon(1e-14));
    CHECK(cn_pairwise_exact(-3.0, 0.7) == doctest::Approx(ref({-3.0, 0.7})).epsilon(1e-14));
    CHECK(cn_pairwise_exact(50.0, 60.0) == doctest::Approx(50.0 - std::log1p(std::exp(-10.0))));
    CHECK(cn_pairwise_exact(1e300, 1e300) == 1e300);
    CHECK(cn_pairwise_exact(1e308, -1e308) == -1e308);
    CHECK(std::isfinite(cn_pairwise_exact(DBL_MAX, DBL_MAX)));
    CHECK(cn_pairwise_exact(kInf, 5.0) == doctest::Approx(5.0));
    CHECK(cn_pairwise_exact(kInf, kInf) == kInf);
    CHECK(cn_pairwise_exact(0.0, 7.0) == 0.0);
    CHECK(cn_pairwise_exact(3.0, 4.0) == cn_pairwise_exact(4.0, 3.0));
}

TEST_CASE("richter correction")
{
    CHECK(richter_correction(0.0) == 0.6);
    CHECK(richter_correction(1.0) == doctest::Approx(0.36));
    CHECK(richter_correction(-1.0) == doctest::Approx(0.36));
    CHECK(richter_correction(2.5) == 0.0);
    CHECK(richter_correction(10.0) == 0.0);
    double worst = 0.0;
    for (double x = -20.0; x <= 20.0; x += 1e-4)
        worst = std::max(worst, std::fabs(richter_correction(x) -
                                          static_cast<double>(oracle::jacobian_correction(x))));
    CHECK(worst <= 0.1);
    CHECK(worst == doctest::Approx(std::log(2.0) - 0.6).epsilon(1e-6));
    CHECK(cn_pairwise_richter(1e300, -1e300) == -1e300);
    CHECK(std::fabs(cn_pairwise_richter(1.0, 1.0) - cn_pairwise_exact(1.0, 1.0)) <= 0.2);
}

TEST_CASE("min-sum family")
{
    std::vector<double> in{-1.5, 3.0, 0.5};
    CHECK(cn_min_sum(in) == -0.5);
    CHECK(cn_min_sum(in, {MinSumVariant::Normalized, 0.8, 0.0}) == doctest::Approx(-0.4));
    CHECK(cn_min_sum(in, {MinSumVariant::Offset, 0.8, 0.15}) == doctest::Approx(-0.35));
    CHECK(cn_min_sum(std::vector<double>{0.1, 3.0}, {MinSumVariant::Offset, 0.8, 0.15}) == 0.0);
    CHECK(cn_pairwise_min_sum(-2.0, -5.0) == 2.0);
    CHECK_THROWS_AS(cn_min_sum(in, {MinSumVariant::Normalized, 0.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(cn_min_sum(std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("GIT rule")
{
    CHECK(cn_git(std::vector<double>{2.0, 2.0}, GitPhi::Naive).value ==
          doctest::Approx(ref({2.0, 2.0})).epsilon(1e-12));
    auto sat = cn_git(std::vector<double>{45.0, 45.0}, GitPhi::Naive);
    CHECK(sat.value == 0.0);
    CHECK(has(sat.flags, KernelFlag::phi_underflow));
    auto wide = cn_git(std::vector<double>{45.0, 45.0}, GitPhi::Amended);
    CHECK(wide.value == doctest::Approx(45.0 - std::log(2.0)).epsilon(1e-9));
    CHECK_FALSE(any(wide.flags));
    auto zero = cn_git(std::vector<double>{0.0, 3.0}, GitPhi::Amended);
    CHECK(zero.value == 0.0);
    CHECK(has(zero.flags, KernelFlag::zero_input));
    CHECK(cn_git(std::vector<double>{-2.0, 3.0, -1.0}, GitPhi::Amended).value > 0.0);
}

TEST_CASE("likelihood-ratio rules")
{
    const double e = std::exp(1.0);
    CHECK(cn_lr(e, e) == doctest::Approx((1.0 + e * e) / (2.0 * e)));
    CHECK(std::log(cn_lr(e * e, e * e)) == doctest::Approx(ref({2.0, 2.0})).epsilon(1e-14));
    CHECK(lr_guard_bound() == doctest::Approx(1.3407807929942596e154).epsilon(1e-15));
    CHECK_THROWS_AS(cn_lr(std::exp(356.0), std::exp(356.0)), std::range_error);
    CHECK_NOTHROW(cn_lr(std::exp(354.0), std::exp(354.0)));
    CHECK_THROWS_AS(cn_lr(0.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(cn_lr(-1.0, 1.0), std::domain_error);

    CHECK(vn_lr(e, std::vector<double>{e * e}, VnLrMode::Product).value ==
          doctest::Approx(std::exp(3.0)));
    CHECK(vn_lr(e, std::vector<double>{e * e}, VnLrMode::LogSum).value ==
          doctest::Approx(std::exp(3.0)));
    auto big = vn_lr(1e200, std::vector<double>{1e200}, VnLrMode::Product);
    CHECK(has(big.flags, KernelFlag::overflow));
    auto guarded = vn_lr(1e200, std::vector<double>{1e200}, VnLrMode::LogSum);
    CHECK(has(guarded.flags, KernelFlag::range_guard));
    CHECK(guarded.value < lr_guard_bound());
    CHECK_NOTHROW(cn_lr(guarded.value, 2.0));
}

TEST_CASE("likelihood-difference rules")
{
    const double d = std::tanh(1.0);
    CHECK(cn_ld(std::vector<double>{d, d}) == d * d);
    CHECK(vn_ld_pair(0.5, 0.5) == doctest::Approx(0.8));
    CHECK(vn_ld_pair(d, d) == doctest::Approx(std::tanh(2.0)).epsilon(1e-15));
    CHECK_THROWS_AS(vn_ld_pair(1.0, -1.0), std::domain_error);
    CHECK_THROWS_AS(cn_ld(std::vector<double>{1.5}), std::domain_error);
    CHECK(vn_ld_pair(1.0, 0.3) == 1.0);
}

TEST_CASE("offset likelihood difference")
{
    CHECK(cn_old(std::vector<double>{2.0, -2.0}).value == doctest::Approx(-1.32500).epsilon(1e-5));
    CHECK(old_to_llr(old_from_llr(5.0)) == doctest::Approx(5.0).epsilon(1e-14));
    CHECK(old_to_llr(old_from_llr(700.0)) == doctest::Approx(700.0).epsilon(1e-14));
    auto tail = cn_old(std::vector<double>{740.0, 740.0});
    CHECK(std::isfinite(tail.value));
    CHECK_FALSE(any(tail.flags));
    // The inputs fall in the subnormal range, which keeps only a few
    // significant bits of e^-740.
    CHECK(std::fabs(tail.value - (740.0 - std::log(2.0))) < 0.01);
    CHECK(std::fabs(tail.value - cn_pairwise_exact(740.0, 740.0)) < 0.01);
    auto gone = cn_old(std::vector<double>{800.0, 800.0});
    CHECK(gone.value == kInf);
    CHECK(has(gone.flags, KernelFlag::overflow));
    CHECK(cn_old(std::vector<double>{0.0, 3.0}).value == 0.0);
}

TEST_CASE("variable node and decision")
{
    std::vector<double> in{1.0, -2.0, 0.5};
    CHECK(vn_llr(0.25, in).value == -0.25);
    CHECK(vn_llr(0.25, in, 1).value == 1.75);
    CHECK_THROWS_AS(vn_llr(0.0, in, 3), std::invalid_argument);
    auto big = vn_llr(DBL_MAX, std::vector<double>{DBL_MAX});
    CHECK(big.value == kInf);
    CHECK(has(big.flags, KernelFlag::overflow));
    CHECK(decision(0.0, std::vector<double>{}) == 0);
    CHECK(decision(1.0, std::vector<double>{-1.0}) == 0);
    CHECK(decision(1.0, std::vector<double>{-1.5}) == 1);
}

TEST_CASE("forward-backward matches direct exclusion")
{
    RngStream rng(11);
    CnScratch scratch;
    for (const char* name : {"TANH", "PAIRWISE_EXACT", "MSA", "MSA_NORMALIZED", "MSA_OFFSET", "GIT",
                             "GIT2", "LR", "LD", "OLD"}) {
        const KernelKind k = parse_kernel(name);
        for (int trial = 0; trial < 200; ++trial) {
            const std::size_t d = 2 + trial % 6;
            std::vector<double> in(d), out(d);
            for (auto& x : in)
                x = 8.0 * rng.gaussian();
            cn_extrinsic(k, in, out, scratch);
            for (std::size_t j = 0; j < d; ++j) {
                std::vector<double> rest;
                for (std::size_t i = 0; i < d; ++i)
                    if (i != j)
                        rest.push_back(in[i]);
                const double direct = cn_reduce(k, rest).value;
                INFO(std::string(name) << " d=" << d << " j=" << j);
                CHECK(out[j] == doctest::Approx(direct).epsilon(1e-9).scale(1e-6));
            }
        }
    }
}

TEST_CASE("approximate pairwise rule stays near the exact one in any grouping")
{
    // Each approximate step carries two corrections, each off by at most
    // ln 2 - 0.6, and the rule is 1-Lipschitz in each argument.
    RngStream rng(12);
    CnScratch scratch;
    const KernelKind k = parse_kernel("PAIRWISE_RICHTER");
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t d = 2 + trial % 6;
        std::vector<double> in(d), out(d);
        for (auto& x : in)
            x = 8.0 * rng.gaussian();
        cn_extrinsic(k, in, out, scratch);
        for (std::size_t j = 0; j < d; ++j) {
            std::vector<double> rest;
            for (std::size_t i = 0; i < d; ++i)
                if (i != j)
                    rest.push_back(in[i]);
            CHECK(std::fabs(out[j] - ref(rest)) <= 0.1863 * static_cast<double>(d - 2) + 1e-12);
        }
    }
}

TEST_CASE("extrinsic outputs track the reference")
{
    RngStream rng(5);
    CnScratch scratch;
    const KernelKind exact = parse_kernel("PAIRWISE_EXACT");
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<double> in(6), out(6);
        for (auto& x : in)
            x = 2.0 + 3.0 * rng.gaussian();
        cn_extrinsic(exact, in, out, scratch);
        std::vector<double> rest(in.begin() + 1, in.end());
        CHECK(out[0] == doctest::Approx(ref(rest)).epsilon(1e-12).scale(1e-12));
    }
}

TEST_CASE("extrinsic edge cases")
{
    CnScratch scratch;
    std::vector<double> one{3.0}, out1(1);
    cn_extrinsic(parse_kernel("MSA"), one, out1, scratch);
    CHECK(out1[0] == kInf);
    std::vector<double> in{1.0, 2.0}, small(1);
    CHECK_THROWS_AS(cn_extrinsic(parse_kernel("MSA"), in, small, scratch), std::invalid_argument);
    CHECK_THROWS_AS(cn_extrinsic(parse_kernel("HYBRID"), in, small, scratch), std::invalid_argument);
    std::vector<double> two(2);
    auto flags = cn_extrinsic(parse_kernel("LR"), std::vector<double>{400.0, 3.0}, two, scratch);
    CHECK(has(flags, KernelFlag::range_guard));
    CHECK(two[0] == doctest::Approx(3.0));
}
