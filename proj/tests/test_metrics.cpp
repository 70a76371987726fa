#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <map>

#include "kdc/metrics.hpp"
#include "kdc/rng.hpp"

#include "support/oracles.hpp"

using namespace kdc;

namespace {

using Labels = std::vector<std::int32_t>;
using namespace kdc::oracle;

Labels random_labels(std::mt19937_64& eng, std::size_t n, std::size_t k_max) {
    Labels out(n);
    const std::size_t k = 1 + uniform_below(eng, k_max);
    for (auto& v : out) v = static_cast<std::int32_t>(uniform_below(eng, k));
    return out;
}

}  // namespace

TEST_CASE("identical labelings score 1 on every metric") {
    const Labels a{0, 0, 1, 1, 2, 2};
    CHECK(nmi(a, a) == doctest::Approx(1.0));
    CHECK(ami(a, a) == doctest::Approx(1.0));
    CHECK(ari(a, a) == doctest::Approx(1.0));
    CHECK(pairwise_f1(a, a) == doctest::Approx(1.0));
}

TEST_CASE("metrics are invariant under relabeling") {
    const Labels a{0, 0, 1, 1};
    const Labels b{1, 1, 0, 0};
    CHECK(nmi(a, b) == doctest::Approx(1.0));
    CHECK(ami(a, b) == doctest::Approx(1.0));
    CHECK(ari(a, b) == doctest::Approx(1.0));
    CHECK(pairwise_f1(a, b) == doctest::Approx(1.0));
}

TEST_CASE("independent labelings score 0 NMI and the known ARI value") {
    const Labels a{0, 0, 1, 1};
    const Labels b{0, 1, 0, 1};
    CHECK(nmi(a, b) == doctest::Approx(0.0));
    CHECK(ari(a, b) == doctest::Approx(-0.5));  // hand contingency: a=0, E=2/3, max=2
}

TEST_CASE("pairwise F1 on the hand-enumerated example") {
    const Labels truth{0, 0, 1, 1};
    const Labels pred{0, 0, 0, 1};
    // TP=1, predicted positives=3, actual positives=2 -> P=1/3, R=1/2
    CHECK(pairwise_f1(truth, pred) == doctest::Approx(0.4));
}

TEST_CASE("degenerate conventions") {
    const Labels single{0, 0, 0, 0};
    const Labels multi{0, 1, 2, 0};
    const Labels singletons{0, 1, 2, 3};
    CHECK(nmi(single, single) == doctest::Approx(1.0));
    CHECK(nmi(single, multi) == doctest::Approx(0.0));
    CHECK(ami(single, multi) == doctest::Approx(0.0));
    CHECK(pairwise_f1(multi, singletons) == doctest::Approx(0.0));
    const Labels two_cluster{0, 0, 1, 1};
    CHECK(pairwise_f1(two_cluster, singletons) == doctest::Approx(0.0));
}

TEST_CASE("length mismatch and tiny inputs raise") {
    const Labels a{0, 1};
    const Labels b{0, 1, 2};
    const Labels one{0};
    CHECK_THROWS_AS((void)nmi(a, b), std::invalid_argument);
    CHECK_THROWS_AS((void)ari(one, one), std::invalid_argument);
    CHECK_THROWS_AS((void)pairwise_f1(one, one), std::invalid_argument);
}

TEST_CASE("metrics are symmetric; F1 survives the argument swap") {
    auto eng = RngStream(17, "metrics").engine();
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 2 + uniform_below(eng, 40);
        const auto u = random_labels(eng, n, 5);
        const auto v = random_labels(eng, n, 5);
        CHECK(nmi(u, v) == doctest::Approx(nmi(v, u)).epsilon(1e-12));
        CHECK(ami(u, v) == doctest::Approx(ami(v, u)).epsilon(1e-12));
        CHECK(ari(u, v) == doctest::Approx(ari(v, u)).epsilon(1e-12));
        CHECK(pairwise_f1(u, v) == doctest::Approx(pairwise_f1(v, u)).epsilon(1e-12));
    }
}

TEST_CASE("metrics are invariant under label permutation of either side") {
    auto eng = RngStream(18, "metrics").engine();
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 2 + uniform_below(eng, 40);
        const auto u = random_labels(eng, n, 4);
        auto v = random_labels(eng, n, 4);
        auto v_permuted = v;
        for (auto& x : v_permuted) x = (x + 13) % 4 + 100;
        CHECK(nmi(u, v) == doctest::Approx(nmi(u, v_permuted)).epsilon(1e-12));
        CHECK(ami(u, v) == doctest::Approx(ami(u, v_permuted)).epsilon(1e-12));
        CHECK(ari(u, v) == doctest::Approx(ari(u, v_permuted)).epsilon(1e-12));
        CHECK(pairwise_f1(u, v) == doctest::Approx(pairwise_f1(u, v_permuted)).epsilon(1e-12));
    }
}

TEST_CASE("all four metrics match independent reference implementations") {
    auto eng = RngStream(19, "metrics").engine();
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + uniform_below(eng, 48);
        const auto u = random_labels(eng, n, 6);
        const auto v = random_labels(eng, n, 6);
        CHECK(nmi(u, v) == doctest::Approx(ref_nmi(u, v)).epsilon(1e-10));
        CHECK(ami(u, v) == doctest::Approx(ref_ami(u, v)).epsilon(1e-10));
        CHECK(ari(u, v) == doctest::Approx(ref_ari(u, v)).epsilon(1e-10));
        CHECK(pairwise_f1(u, v) == doctest::Approx(ref_f1(u, v)).epsilon(1e-10));
    }
}

TEST_CASE("ARI of random labelings centers on zero") {
    auto eng = RngStream(20, "metrics").engine();
    double total = 0.0;
    const int trials = 100;
    for (int trial = 0; trial < trials; ++trial) {
        Labels u(1000), v(1000);
        for (auto& x : u) x = static_cast<std::int32_t>(uniform_below(eng, 4));
        for (auto& x : v) x = static_cast<std::int32_t>(uniform_below(eng, 4));
        total += ari(u, v);
    }
    CHECK(std::abs(total / trials) <= 0.02);
}
