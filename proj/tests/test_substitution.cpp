#include <gtest/gtest.h>

#include <numeric>

#include "diffscale/substitution.hpp"

using namespace diffscale;

namespace {
std::vector<std::int64_t> counts(const Word& w, int d) {
    std::vector<std::int64_t> c(static_cast<std::size_t>(d), 0);
    for (int x : w) c[static_cast<std::size_t>(x)]++;
    return c;
}
}  // namespace

TEST(Catalogue, MatricesAndNames) {
    EXPECT_EQ(catalogue("fibonacci").matrix(), (IntegerMatrix{{1, 1}, {1, 0}}));
    EXPECT_EQ(catalogue("noble", 2).matrix(), (IntegerMatrix{{2, 1}, {1, 0}}));
    EXPECT_NEAR(static_cast<double>(spectral_data(catalogue("noble", 2).matrix()).lambda), 1 + std::sqrt(2.0), 1e-15);
    EXPECT_EQ(catalogue("period-doubling").matrix(), (IntegerMatrix{{1, 2}, {1, 0}}));
    EXPECT_EQ(catalogue("limit-quasiperiodic").matrix(), (IntegerMatrix{{2, 2}, {1, 2}}));
    EXPECT_EQ(catalogue("kolakoski-3-1").matrix(), (IntegerMatrix{{1, 1, 0}, {1, 1, 1}, {1, 0, 0}}));
    auto tm = catalogue("gtm", 1, 1);
    EXPECT_EQ(tm.image(0), (Word{0, 1}));
    EXPECT_EQ(tm.image(1), (Word{1, 0}));
    EXPECT_EQ(catalogue("gtm", 3, 2).image(1), (Word{1, 1, 1, 0, 0}));
    EXPECT_EQ(catalogue("fibonacci").image(0), (Word{0, 1}));
    EXPECT_EQ(catalogue("fibonacci").image(1), (Word{0}));
    for (const auto& n : catalogue_names()) EXPECT_TRUE(catalogue(n).matrix().is_primitive()) << n;
}

TEST(Catalogue, ErrorsOnUnknownOrBadParameters) {
    EXPECT_THROW(catalogue("penrose"), Error);
    EXPECT_THROW(catalogue("noble", 0), Error);
    EXPECT_THROW(catalogue("gtm", 0, 1), Error);
    try {
        catalogue("nope");
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("fibonacci"), std::string::npos);
    }
}

TEST(Substitution, AbelianisationOnRandomWords) {
    CounterRng rng(2);
    for (const auto& n : catalogue_names()) {
        auto r = catalogue(n);
        auto m = r.matrix();
        for (int rep = 0; rep < 20; ++rep) {
            Word w;
            for (int i = 0; i < 50; ++i) w.push_back(static_cast<int>(rng() % static_cast<std::uint64_t>(r.size())));
            auto cw = counts(w, r.size());
            auto ci = counts(r.apply(w), r.size());
            for (int i = 0; i < r.size(); ++i) {
                std::int64_t s = 0;
                for (int j = 0; j < r.size(); ++j) s += m(i, j) * cw[static_cast<std::size_t>(j)];
                ASSERT_EQ(s, ci[static_cast<std::size_t>(i)]);
            }
        }
    }
}

TEST(FixedPoint, SeedAndIterates) {
    auto fib = catalogue("fibonacci");
    auto w0 = fixed_point_word(fib, {0, 0}, 0);
    EXPECT_EQ(w0.linear(), (Word{0, 0}));
    auto w1 = fixed_point_word(fib, {0, 0}, 1);
    // ϱ²(a) = aba on both sides
    EXPECT_EQ(w1.linear(), (Word{0, 1, 0, 0, 1, 0}));
    // letter counts equal M² applied to the seed counts
    auto m2 = fib.matrix() * fib.matrix();
    auto c = counts(w1.linear(), 2);
    EXPECT_EQ(c[0], 2 * m2(0, 0));
    EXPECT_EQ(c[1], 2 * m2(1, 0));
}

TEST(FixedPoint, PrefixConsistencyAcrossCatalogue) {
    for (const auto& n : catalogue_names()) {
        auto e = catalogue_entry(n);
        auto a = fixed_point_word(e.rule, e.seed, 2, e.power);
        auto b = fixed_point_word(e.rule, e.seed, 3, e.power);
        ASSERT_LE(a.left.size(), b.left.size());
        EXPECT_TRUE(std::equal(a.left.begin(), a.left.end(), b.left.begin())) << n;
        EXPECT_TRUE(std::equal(a.right.begin(), a.right.end(), b.right.begin())) << n;
    }
}

TEST(FixedPoint, IllegalSeedNamed) {
    try {
        fixed_point_word(catalogue("fibonacci"), {1, 1}, 1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("b|b"), std::string::npos);
    }
    EXPECT_NO_THROW(fixed_point_word(catalogue("fibonacci"), {1, 0}, 1));
}

TEST(FixedPoint, LetterBudget) {
    EXPECT_THROW(fixed_point_word(catalogue("fibonacci"), {0, 0}, 30, 2, 1000), Error);
}

TEST(FixedPoint, PeriodDoublingFrequencies) {
    auto w = fixed_point_word(catalogue("period-doubling"), {0, 0}, 8).linear();
    auto c = counts(w, 2);
    EXPECT_NEAR(static_cast<double>(c[0]) / static_cast<double>(w.size()), 2.0 / 3, 1e-4);
}

TEST(GeometricPatch, FibonacciGapsAndPositions) {
    auto e = catalogue_entry("fibonacci");
    auto w = fixed_point_word(e.rule, e.seed, 6);
    auto p = geometric_patch(w, *e.exact_lengths);
    const AlgebraicNumber tau(0, 1), one(1, 0);
    std::size_t origin = w.left.size();
    EXPECT_TRUE(p.exact[origin].is_zero());
    EXPECT_EQ(p.exact[origin + 1], tau);
    EXPECT_EQ(p.exact[origin + 2], tau + one);
    EXPECT_EQ(p.exact[origin - 1], -tau);
    for (std::size_t i = 0; i + 1 < p.size(); ++i) {
        auto gap = p.exact[i + 1] - p.exact[i];
        ASSERT_TRUE(gap == tau || gap == one);
        ASSERT_EQ(gap, (*e.exact_lengths)[static_cast<std::size_t>(p.types[i])]);
    }
    auto fl = geometric_patch(w, natural_lengths(e.rule));
    for (std::size_t i = 0; i < p.size(); ++i) ASSERT_NEAR(static_cast<double>(fl.positions[i] - p.positions[i]), 0.0, 1e-12);
}

TEST(GeometricPatch, SingleLetterAndKolakoskiLengths) {
    TwoSidedWord w{{}, {0}};
    auto p = geometric_patch(w, std::vector<long double>{1.5L});
    ASSERT_EQ(p.size(), 1u);
    EXPECT_EQ(p.positions[0], 0);
    auto l = natural_lengths(catalogue("kolakoski-3-1"));
    long double lam = spectral_data(catalogue("kolakoski-3-1").matrix()).lambda;
    EXPECT_NEAR(static_cast<double>(l[0]), static_cast<double>(lam * (lam - 1)), 1e-14);
    EXPECT_NEAR(static_cast<double>(l[1]), static_cast<double>(lam), 1e-14);
    EXPECT_NEAR(static_cast<double>(l[2]), 1.0, 1e-14);
    EXPECT_THROW(geometric_patch(w, std::vector<long double>{0.0L}), Error);
}

TEST(GeometricPatch, InflationSelfConsistencyExact) {
    // inflating iterate n by τ and dissecting each tile gives iterate n+1 (one ϱ step)
    auto e = catalogue_entry("fibonacci");
    const auto& len = *e.exact_lengths;
    auto w = fixed_point_word(e.rule, e.seed, 4, 1);
    auto w1 = fixed_point_word(e.rule, e.seed, 5, 1);
    auto p = geometric_patch(w, len);
    auto p1 = geometric_patch(w1, len);
    std::vector<AlgebraicNumber> dissected;
    for (std::size_t i = 0; i < p.size(); ++i) {
        AlgebraicNumber x = p.exact[i].mul_theta();
        for (int letter : e.rule.image(p.types[i])) {
            dissected.push_back(x);
            x = x + len[static_cast<std::size_t>(letter)];
        }
    }
    ASSERT_EQ(dissected.size(), p1.size());
    for (std::size_t i = 0; i < dissected.size(); ++i) ASSERT_EQ(dissected[i], p1.exact[i]);
}

TEST(RudinShapiro, MatchesBinaryOnesOracle) {
    auto w = rudin_shapiro_weights(4);
    EXPECT_EQ(w, (std::vector<int>{1, 1, 1, -1}));
    EXPECT_EQ(rudin_shapiro_weights(1), (std::vector<int>{1}));
    const std::size_t n = 1 << 16;
    auto rs = rudin_shapiro_weights(n);
    long long partial = 0, worst = 0;
    for (std::size_t i = 0; i < n; ++i) {
        // sign is (−1)^(number of adjacent 11 pairs in binary i)
        int pairs = __builtin_popcountll(i & (i >> 1));
        ASSERT_EQ(rs[i], pairs % 2 == 0 ? 1 : -1) << i;
        partial += rs[i];
        worst = std::max(worst, std::abs(partial) * std::abs(partial) / static_cast<long long>(i + 1));
    }
    // |Σ_{i<n} w_i| ≤ C√n with the classical C = √6
    EXPECT_LE(worst, 6);
}

TEST(Bernoullise, ExtremesAndRate) {
    CounterRng rng(9);
    std::vector<int> w(100000, 1);
    EXPECT_EQ(bernoullise(w, 0.0, rng), w);
    auto neg = bernoullise(w, 1.0, rng);
    for (int x : neg) ASSERT_EQ(x, -1);
    auto half = bernoullise(w, 0.5, rng);
    long flips = std::count(half.begin(), half.end(), -1);
    double sigma = std::sqrt(0.25 * static_cast<double>(w.size()));
    EXPECT_NEAR(static_cast<double>(flips), 0.5 * static_cast<double>(w.size()), 3 * sigma);
    EXPECT_THROW(bernoullise(w, 1.5, rng), Error);
}
