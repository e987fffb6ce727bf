#include <gtest/gtest.h>

#include <complex>

#include "diffscale/stochastic.hpp"

using namespace diffscale;

namespace {
/// Composite Simpson rule, independent of the adaptive integrator.
template <typename F>
long double simpson(F f, long double a, long double b, int n = 20000) {
    const long double h = (b - a) / n;
    long double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4 : 2) * f(a + i * h);
    return s * h / 3;
}
}  // namespace

TEST(Analytic, PoissonBernoulliAndMarkovSpecialCases) {
    EXPECT_EQ(z_analytic(StochasticModel::poisson(), 0.37L), 0.37L);
    EXPECT_NEAR(static_cast<double>(z_analytic(StochasticModel::bernoulli(0.3), 0.2L)), 0.3 * 0.7 * 0.2, 1e-15);
    EXPECT_NEAR(static_cast<double>(z_analytic(StochasticModel::bernoulli(0.3, Weighting::plus_minus), 0.2L)), 4 * 0.3 * 0.7 * 0.2, 1e-15);
    auto m = StochasticModel::markov(0.3, 0.7);  // r = 0
    for (long double k : {0.01L, 0.2L, 0.45L}) EXPECT_NEAR(static_cast<double>(z_analytic(m, k)), static_cast<double>(0.7L * 0.3L * k), 1e-15);
    EXPECT_NEAR(static_cast<double>(markov_density(StochasticModel::markov(0.25, 0.25), 0)), 1.0 / 12, 1e-16);
    EXPECT_THROW(StochasticModel::markov(1, 1), Error);
    EXPECT_THROW(StochasticModel::rmt(3), Error);
    EXPECT_THROW(z_analytic(StochasticModel::poisson(), 0), Error);
}

TEST(Analytic, MarkovDensityProperties) {
    for (auto [p, q] : {std::pair{0.25, 0.25}, {0.75, 0.75}, {0.1, 0.6}, {0.9, 0.3}}) {
        auto m = StochasticModel::markov(p, q);
        for (int i = 0; i <= 100; ++i) EXPECT_GE(markov_density(m, i / 100.0L), 0);
        // total ac mass equals the occupation variance ρ(1 − ρ)
        const long double rho = m.rho();
        EXPECT_NEAR(static_cast<double>(z_analytic(m, 1)), static_cast<double>(rho * (1 - rho)), 1e-14);
        EXPECT_NEAR(static_cast<double>(z_analytic(m, 0.3L)), static_cast<double>(simpson([&](long double x) { return markov_density(m, x); }, 0, 0.3L)), 1e-13);
        EXPECT_NEAR(static_cast<double>(z_analytic(m, 1e-2L)), static_cast<double>(markov_expansion(m, 1e-2L)), 1e-6);
        if (m.r() < 0) {
            EXPECT_LT(markov_density(m, 0), markov_density(m, 0.5L));
        }
        if (m.r() > 0) {
            EXPECT_GT(markov_density(m, 0), markov_density(m, 0.5L));
        }
    }
}

TEST(Analytic, RmtExpansionsAndShape) {
    const long double k = 1e-2L;
    EXPECT_NEAR(static_cast<double>(z_analytic(StochasticModel::rmt(1), k)), static_cast<double>(k * k - 2 * k * k * k / 3), 1e-7);
    EXPECT_NEAR(static_cast<double>(z_analytic(StochasticModel::rmt(2), 0.1L)), 0.005, 1e-16);
    EXPECT_NEAR(static_cast<double>(z_analytic(StochasticModel::rmt(4), k)), static_cast<double>(k * k / 4 + k * k * k / 12), 1e-7);
    EXPECT_EQ(rmt_density(2, 0.5L), 0.5L);
    for (int beta : {1, 4}) {
        auto m = StochasticModel::rmt(beta);
        auto f = [&](long double x) { return rmt_density(beta, x); };
        EXPECT_NEAR(static_cast<double>(z_analytic(m, 0.6L)), static_cast<double>(simpson(f, 0, 0.6L)), 1e-12);
    }
    for (int beta : {1, 2}) {
        long double prev = 0;
        for (int i = 0; i <= 200; ++i) {
            long double v = rmt_density(beta, i / 200.0L);
            EXPECT_GE(v, prev - 1e-15);
            prev = v;
        }
    }
    // densities approach the unit background for large k
    EXPECT_NEAR(static_cast<double>(rmt_density(1, 50)), 1.0, 1e-3);
    EXPECT_EQ(rmt_density(4, 3), 1);
}

TEST(Analytic, RandomTilingAgainstRenewalDensity) {
    EXPECT_EQ(z_analytic(StochasticModel::random_tiling(1.5, 1.5, 0.4), 0.1L), 0);
    // renewal process with gap law p δ_u + q δ_v: ac density ρ (1 − |φ|²)/|1 − φ|²
    for (auto [u, v, p] : {std::tuple{1.0, 2.0, 0.5}, {1.0, 1.618033988749895, 0.3}}) {
        auto m = StochasticModel::random_tiling(u, v, p);
        const long double dens = 1 / (p * u + (1 - p) * v);
        auto g = [&](long double k) {
            auto phi = static_cast<long double>(p) * std::polar(1.0L, 2 * kPi * k * static_cast<long double>(u)) +
                       static_cast<long double>(1 - p) * std::polar(1.0L, 2 * kPi * k * static_cast<long double>(v));
            if (k == 0) return static_cast<long double>(random_tiling_coefficient(m));
            return dens * (1 - std::norm(phi)) / std::norm(1.0L - phi);
        };
        const long double k = 5e-3L;
        long double ref = simpson(g, 0, k, 2000);
        EXPECT_NEAR(static_cast<double>(z_analytic(m, k) / ref), 1.0, 1e-7);
        EXPECT_NEAR(static_cast<double>(z_analytic(m, 1e-4L) / 1e-4L / random_tiling_coefficient(m)), 1.0, 1e-6);
    }
}

TEST(Sampling, PoissonCountAndDeterminism) {
    auto a = sample(StochasticModel::poisson(), 10000, 7);
    auto b = sample(StochasticModel::poisson(), 10000, 7);
    EXPECT_EQ(a.positions, b.positions);
    EXPECT_NEAR(static_cast<double>(a.size()), 20000, 3 * std::sqrt(20000.0));
    EXPECT_TRUE(std::is_sorted(a.positions.begin(), a.positions.end()));
    for (auto x : a.positions) EXPECT_LE(std::fabs(x), 10000);
    auto c = sample(StochasticModel::poisson(), 10000, 8);
    EXPECT_NE(a.positions, c.positions);
}

TEST(Sampling, LatticeGasesAndTilings) {
    auto full = sample(StochasticModel::bernoulli(1), 50, 1);
    for (auto w : full.weights) EXPECT_EQ(w, 1);
    EXPECT_EQ(full.size(), 101u);
    auto mk = sample(StochasticModel::markov(0.75, 0.75), 100000, 3);
    long double occ = 0;
    for (auto w : mk.weights) occ += w;
    EXPECT_NEAR(static_cast<double>(occ / mk.size()), 0.5, 0.01);
    auto mk2 = sample(StochasticModel::markov(0.25, 0.25), 100000, 3);
    // nearest-neighbour correlation of occupation equals r for the stationary chain
    long double same = 0;
    for (std::size_t i = 0; i + 1 < mk2.size(); ++i) same += mk2.weights[i] == mk2.weights[i + 1];
    EXPECT_NEAR(static_cast<double>(same / (mk2.size() - 1)), 0.25, 0.01);
    auto rt = sample(StochasticModel::random_tiling(1, 2, 0.5), 1000, 4);
    EXPECT_TRUE(std::is_sorted(rt.positions.begin(), rt.positions.end()));
    for (std::size_t i = 0; i + 1 < rt.size(); ++i) {
        long double gap = rt.positions[i + 1] - rt.positions[i];
        EXPECT_TRUE(gap == 1 || gap == 2);
    }
    EXPECT_THROW(sample(StochasticModel::rmt(2), 10, 1), Error);
}

TEST(Periodogram, DirectSmallCases) {
    WeightedRealisation one;
    one.positions = {0.3L};
    one.weights = {1};
    one.R = 0.5L;
    for (auto pt : empirical_diffraction(one, {0, 0.1L, 0.77L})) EXPECT_NEAR(static_cast<double>(pt.intensity), 1.0, 1e-15);
    auto lat = sample(StochasticModel::bernoulli(1), 100, 1);
    EXPECT_NEAR(static_cast<double>(empirical_diffraction(lat, {0})[0].intensity), 201.0 * 201 / 200, 1e-12);
}

TEST(Periodogram, RudinShapiroAverageIsOne) {
    auto rs = sample(StochasticModel::rudin_shapiro(0), 32767.5L, 0);
    EXPECT_GE(rs.size(), 65535u);
    std::vector<long double> grid;
    for (int i = 1; i < 200; ++i) grid.push_back(i / 400.0L);
    long double mean = 0;
    for (auto pt : empirical_diffraction(rs, grid)) mean += pt.intensity;
    EXPECT_NEAR(static_cast<double>(mean / grid.size()), 1.0, 0.05);
}

TEST(Periodogram, FftMatchesDirectCentredSum) {
    for (auto model : {StochasticModel::poisson(), StochasticModel::markov(0.25, 0.25)}) {
        auto real = sample(model, 300, 11);
        const long double dk = 1 / (4 * real.R);
        const std::size_t B = 400;
        auto I = centred_periodogram(real, dk, B);
        long double wsum = 0;
        for (auto w : real.weights) wsum += w;
        for (std::size_t b : {0u, 1u, 7u, 100u, 399u}) {
            const long double k = b * dk;
            std::complex<long double> s = 0;
            for (std::size_t i = 0; i < real.size(); ++i) {
                long double w = real.weights[i] - (real.lattice ? wsum / real.size() : 0);
                s += w * std::polar(1.0L, -2 * kPi * k * real.positions[i]);
            }
            if (!real.lattice) s -= wsum / (2 * real.R) * (b == 0 ? 2 * real.R : std::sin(2 * kPi * k * real.R) / (kPi * k));
            EXPECT_NEAR(static_cast<double>(I[b]), static_cast<double>(std::norm(s) / (2 * real.R)), 1e-9 * (1 + static_cast<double>(I[b]))) << b;
        }
    }
}

TEST(EmpiricalZ, PoissonAndRudinShapiro) {
    auto poi = sample(StochasticModel::poisson(), 1e5L, 1);
    EXPECT_NEAR(static_cast<double>(empirical_Z(poi, 0.2L).value), 0.2, 0.01);
    auto rs = sample(StochasticModel::rudin_shapiro(0.5), 1e5L, 2);
    EXPECT_NEAR(static_cast<double>(empirical_Z(rs, 0.2L).value), 0.2, 0.01);
    EXPECT_THROW(empirical_Z(poi, 0.2L, 10), NumericalError);
}

TEST(EmpiricalZ, MarkovWithinThreeStandardErrors) {
    auto m = StochasticModel::markov(0.25, 0.25);
    auto real = sample(m, 1e5L, 5);
    auto z = empirical_Z(real, 0.3L);
    EXPECT_GT(z.standard_error, 0);
    EXPECT_LT(std::fabs(z.value - z_analytic(m, 0.3L)), 3 * z.standard_error);
}

TEST(EmpiricalZ, HomometryOfBernoullisedRudinShapiro) {
    std::vector<long double> ks;
    for (int i = 1; i <= 20; ++i) ks.push_back(i * 0.02L);
    auto a = empirical_Z_curve(sample(StochasticModel::rudin_shapiro(0), 65536, 3), ks);
    auto b = empirical_Z_curve(sample(StochasticModel::rudin_shapiro(0.5), 65536, 3), ks);
    for (std::size_t i = 0; i < ks.size(); ++i) {
        long double se = std::hypot(a[i].standard_error, b[i].standard_error);
        EXPECT_LT(std::fabs(a[i].value - b[i].value), 3 * se) << static_cast<double>(ks[i]);
    }
}
