#pragma once

/**
 * @file stochastic.hpp
 * @brief Analytic integrated intensities for stochastic point processes,
 *        Monte Carlo samplers and empirical periodogram estimators.
 */

#include <fftw3.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "diffscale/core.hpp"
#include "diffscale/substitution.hpp"

namespace diffscale {

enum class ModelKind { poisson, bernoulli, rmt, markov, random_tiling, rudin_shapiro };
enum class Weighting { zero_one, plus_minus };

/// One of the stochastic systems with its parameters.
struct StochasticModel {
    ModelKind kind = ModelKind::poisson;
    double p = 0, q = 0;  ///< bernoulli: p; markov: p, q; random tiling: p; rudin-shapiro: flip probability p
    double u = 1, v = 1;  ///< random tiling lengths
    int beta = 2;
    Weighting weighting = Weighting::zero_one;

    static StochasticModel poisson() { return {}; }
    static StochasticModel bernoulli(double p, Weighting w = Weighting::zero_one) {
        check_probability(p);
        StochasticModel m;
        m.kind = ModelKind::bernoulli;
        m.p = p;
        m.weighting = w;
        return m;
    }
    static StochasticModel rmt(int beta) {
        if (beta != 1 && beta != 2 && beta != 4) throw Error("rmt requires beta in {1, 2, 4}");
        StochasticModel m;
        m.kind = ModelKind::rmt;
        m.beta = beta;
        return m;
    }
    static StochasticModel markov(double p, double q) {
        check_probability(p);
        check_probability(q);
        if (!(p + q > 0 && p + q < 2)) throw Error("markov requires 0 < p + q < 2");
        StochasticModel m;
        m.kind = ModelKind::markov;
        m.p = p;
        m.q = q;
        return m;
    }
    static StochasticModel random_tiling(double u, double v, double p) {
        check_probability(p);
        if (!(u > 0 && v > 0)) throw Error("random tiling requires positive lengths");
        StochasticModel m;
        m.kind = ModelKind::random_tiling;
        m.u = u;
        m.v = v;
        m.p = p;
        m.q = 1 - p;
        return m;
    }
    /// Rudin–Shapiro ±1 chain with independent sign flips of probability p.
    static StochasticModel rudin_shapiro(double p) {
        check_probability(p);
        StochasticModel m;
        m.kind = ModelKind::rudin_shapiro;
        m.p = p;
        return m;
    }

    /// r = p + q − 1 for the Markov chain.
    double r() const { return p + q - 1; }
    /// Stationary occupation (1 − p)/(2 − p − q).
    double rho() const { return (1 - p) / (2 - p - q); }

    std::string name() const {
        switch (kind) {
            case ModelKind::poisson: return "poisson";
            case ModelKind::bernoulli: return "bernoulli";
            case ModelKind::rmt: return "rmt";
            case ModelKind::markov: return "markov";
            case ModelKind::random_tiling: return "random-tiling";
            case ModelKind::rudin_shapiro: return "rudin-shapiro";
        }
        return "";
    }

   private:
    static void check_probability(double p) {
        if (!(p >= 0 && p <= 1)) throw Error("probabilities must lie in [0, 1]");
    }
};

/// Markov ac density g(k) = (1−p)(1−q)(1+r) / ((1−r)(1 − 2r cos 2πk + r²)).
inline long double markov_density(const StochasticModel& m, long double k) {
    const long double p = m.p, q = m.q, r = m.r();
    const long double s = std::sin(kPi * k);
    // 1 − 2r cos 2πk + r² = (1 − r)² + 4r sin² πk
    return (1 - p) * (1 - q) * (1 + r) / ((1 - r) * ((1 - r) * (1 - r) + 4 * r * s * s));
}

/// Structure-factor densities of the β-ensembles at unit point density.
inline long double rmt_density(int beta, long double k) {
    if (k < 0) throw Error("rmt_density requires k >= 0");
    switch (beta) {
        case 1:
            return k <= 1 ? 2 * k - k * std::log1p(2 * k) : 2 - k * std::log((2 * k + 1) / (2 * k - 1));
        case 2:
            return std::min<long double>(k, 1);
        case 4:
            return k <= 2 ? k / 2 - k / 4 * std::log(std::fabs(1 - k)) : 1;
        default:
            throw Error("rmt_density requires beta in {1, 2, 4}");
    }
}

/// Adaptive Gauss–Kronrod integral of f over [a, b], mapped onto [0, 1] so tiny intervals converge.
template <typename F>
long double integrate(F f, long double a, long double b, long double tol = 1e-14L) {
    if (b <= a) return 0;
    const long double w = b - a;
    auto g = [&](long double t) { return f(a + w * t); };
    long double err = 0;
    return w * boost::math::quadrature::gauss_kronrod<long double, 61>::integrate(g, 0.0L, 1.0L, 15, tol, &err);
}

/// Leading coefficient pq(u−v)²/(pu+qv)³ of the random tiling.
inline long double random_tiling_coefficient(const StochasticModel& m) {
    const long double p = m.p, q = m.q, u = m.u, v = m.v;
    return p * q * (u - v) * (u - v) / std::pow(p * u + q * v, 3);
}

/// Z(k) = γ̂_ac((0, k]) for the model.
inline long double z_analytic(const StochasticModel& m, long double k) {
    if (!(k > 0)) throw Error("z_analytic requires k > 0");
    switch (m.kind) {
        case ModelKind::poisson:
            return k;
        case ModelKind::bernoulli:
            return (m.weighting == Weighting::zero_one ? 1 : 4) * static_cast<long double>(m.p) * (1 - m.p) * k;
        case ModelKind::rudin_shapiro:
            return k;
        case ModelKind::markov:
            return integrate([&](long double x) { return markov_density(m, x); }, 0, k);
        case ModelKind::rmt: {
            auto f = [&](long double x) { return rmt_density(m.beta, x); };
            // the β = 4 density has a logarithmic singularity at k = 1
            if (k <= 1) return integrate(f, 0, k);
            return integrate(f, 0, 1) + integrate(f, 1, k);
        }
        case ModelKind::random_tiling: {
            const long double p = m.p, q = m.q, u = m.u, v = m.v;
            if (u == v) return 0;
            const long double mom2 = p * u * u + q * v * v;
            const long double c3 = kPi * kPi / 9 * (u * u * v * v - 2 * u * v * mom2) / (p * q * (u - v) * (u - v) - mom2);
            return random_tiling_coefficient(m) * (k + c3 * k * k * k);
        }
    }
    throw Error("unknown model");
}

/// Series expansion g(0)(k − (4π²/3) r/(1−r)² k³) for the Markov chain.
inline long double markov_expansion(const StochasticModel& m, long double k) {
    const long double r = m.r();
    const long double g0 = (1 - m.p) * (1 - m.q) * (1 + r) / std::pow(1 - r, 3);
    return g0 * (k - 4 * kPi * kPi / 3 * r / ((1 - r) * (1 - r)) * k * k * k);
}

/// Weighted point set on [−R, R].
struct WeightedRealisation {
    std::vector<long double> positions;
    std::vector<long double> weights;
    long double R = 0;
    std::uint64_t seed = 0;
    bool lattice = false;  ///< supported on Z; central-peak removal then uses the comb

    std::size_t size() const { return positions.size(); }
};

/// Draws a realisation; Markov starts from its stationary law, tilings grow both ways from 0.
inline WeightedRealisation sample(const StochasticModel& m, long double R, std::uint64_t seed) {
    if (!(R > 0)) throw Error("sample requires R > 0");
    WeightedRealisation out;
    out.R = R;
    out.seed = seed;
    const auto lo = static_cast<std::int64_t>(std::ceil(-R)), hi = static_cast<std::int64_t>(std::floor(R));
    switch (m.kind) {
        case ModelKind::poisson: {
            CounterRng rng(seed, 1);
            for (long double x = -R + rng.exponential(); x <= R; x += rng.exponential()) {
                out.positions.push_back(x);
                out.weights.push_back(1);
            }
            break;
        }
        case ModelKind::bernoulli: {
            out.lattice = true;
            CounterRng rng(seed, 2);
            for (std::int64_t n = lo; n <= hi; ++n) {
                bool occ = rng.bernoulli(m.p);
                out.positions.push_back(static_cast<long double>(n));
                out.weights.push_back(m.weighting == Weighting::zero_one ? (occ ? 1 : 0) : (occ ? 1 : -1));
            }
            break;
        }
        case ModelKind::markov: {
            out.lattice = true;
            CounterRng rng(seed, 3);
            bool occ = rng.bernoulli(m.rho());
            for (std::int64_t n = lo; n <= hi; ++n) {
                if (n > lo) occ = occ ? rng.bernoulli(m.q) : !rng.bernoulli(m.p);
                out.positions.push_back(static_cast<long double>(n));
                out.weights.push_back(occ ? 1 : 0);
            }
            break;
        }
        case ModelKind::random_tiling: {
            CounterRng right(seed, 4), left(seed, 5);
            std::vector<long double> neg;
            for (long double x = 0; x >= -R;) {
                x -= left.bernoulli(m.p) ? m.u : m.v;
                if (x >= -R) neg.push_back(x);
            }
            out.positions.assign(neg.rbegin(), neg.rend());
            for (long double x = 0; x <= R; x += right.bernoulli(m.p) ? m.u : m.v) out.positions.push_back(x);
            out.weights.assign(out.positions.size(), 1);
            break;
        }
        case ModelKind::rudin_shapiro: {
            out.lattice = true;
            CounterRng rng(seed, 6);
            auto w = rudin_shapiro_weights(static_cast<std::size_t>(hi - lo + 1));
            w = bernoullise(w, m.p, rng);
            for (std::int64_t n = lo; n <= hi; ++n) {
                out.positions.push_back(static_cast<long double>(n));
                out.weights.push_back(w[static_cast<std::size_t>(n - lo)]);
            }
            break;
        }
        case ModelKind::rmt:
            throw Error("random matrix ensembles provide densities only; no sampler");
    }
    return out;
}

struct PeriodogramPoint {
    long double k = 0;
    long double intensity = 0;
};

/// I_R(k) = |Σ w e^{−2πikx}|² / (2R) by direct summation.
inline std::vector<PeriodogramPoint> empirical_diffraction(const WeightedRealisation& real, const std::vector<long double>& k_grid) {
    std::vector<PeriodogramPoint> out;
    out.reserve(k_grid.size());
    for (auto k : k_grid) {
        CompensatedSum<long double> re, im;
        for (std::size_t i = 0; i < real.size(); ++i) {
            long double ph = -2 * kPi * std::fmod(k * real.positions[i], 1.0L);
            re.add(real.weights[i] * std::cos(ph));
            im.add(real.weights[i] * std::sin(ph));
        }
        out.push_back({k, (re.value() * re.value() + im.value() * im.value()) / (2 * real.R)});
    }
    return out;
}

/**
 * Centred periodogram on k_b = b·dk, b = 0..B, via FFTs of Taylor moments:
 * x = x₀ + h(j + δ) with h·dk = 1/G and |δ| ≤ 1/2, so e^{−2πik_b x} factors into
 * an FFT kernel in j and a rapidly converging series in δ.
 * The mean density is removed first (comb for lattice data, Lebesgue on [−R, R] otherwise).
 */
inline std::vector<long double> centred_periodogram(const WeightedRealisation& real, long double dk, std::size_t B) {
    if (!(dk > 0) || dk > 1 / (2 * real.R)) throw NumericalError("periodogram spacing must not exceed 1/(2R)");
    const long double R = real.R;
    long double wsum = 0;
    for (auto w : real.weights) wsum += w;
    std::size_t nsites = real.size();
    std::vector<long double> w = real.weights;
    if (real.lattice && nsites > 0) {
        const long double mean = wsum / static_cast<long double>(nsites);
        for (auto& x : w) x -= mean;
    }
    std::size_t G = 1;
    while (G < 4 * (B + 1)) G <<= 1;
    const long double h = 1 / (static_cast<long double>(G) * dk);
    const long double x0 = -R;
    constexpr int T = 18;
    std::vector<std::vector<std::complex<long double>>> moments(T);
    fftw_complex* buf = fftw_alloc_complex(G);
    fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(G), buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
    std::vector<std::size_t> idx(nsites);
    std::vector<long double> delta(nsites);
    for (std::size_t i = 0; i < nsites; ++i) {
        long double t = (real.positions[i] - x0) / h;
        long double j = std::nearbyint(t);
        delta[i] = t - j;
        idx[i] = static_cast<std::size_t>(static_cast<std::int64_t>(j) % static_cast<std::int64_t>(G));
    }
    std::vector<long double> pw = w;  // w δ^t
    for (int t = 0; t < T; ++t) {
        for (std::size_t j = 0; j < G; ++j) buf[j][0] = buf[j][1] = 0;
        if (t > 0)
            for (std::size_t i = 0; i < nsites; ++i) pw[i] *= delta[i];
        for (std::size_t i = 0; i < nsites; ++i) buf[idx[i]][0] += static_cast<double>(pw[i]);
        fftw_execute(plan);
        moments[static_cast<std::size_t>(t)].resize(B + 1);
        for (std::size_t b = 0; b <= B; ++b) moments[static_cast<std::size_t>(t)][b] = {buf[b][0], buf[b][1]};
    }
    fftw_destroy_plan(plan);
    fftw_free(buf);
    std::vector<long double> I(B + 1);
    for (std::size_t b = 0; b <= B; ++b) {
        const long double k = static_cast<long double>(b) * dk;
        const std::complex<long double> z(0, -2 * kPi * static_cast<long double>(b) / static_cast<long double>(G));
        std::complex<long double> s = 0, zt = 1;
        long double fact = 1;
        for (int t = 0; t < T; ++t) {
            if (t > 0) fact *= t;
            s += zt / fact * moments[static_cast<std::size_t>(t)][b];
            zt *= z;
        }
        s *= std::polar(1.0L, -2 * kPi * std::fmod(k * x0, 1.0L));
        if (!real.lattice) {
            // subtract ρ̂ ∫_{−R}^{R} e^{−2πikx} dx
            const long double rho = wsum / (2 * R);
            s -= rho * (b == 0 ? 2 * R : std::sin(2 * kPi * k * R) / (kPi * k));
        }
        I[b] = std::norm(s) / (2 * R);
    }
    return I;
}

struct EmpiricalZ {
    long double k = 0;
    long double value = 0;
    long double standard_error = 0;
};

/// Default bin width: four bins per periodogram correlation length 1/(2R).
inline long double default_bin_width(long double R) { return 1 / (8 * R); }

/// Trapezoidal integrals of the centred periodogram over (4/(2R), k] for each k in ks.
inline std::vector<EmpiricalZ> empirical_Z_curve(const WeightedRealisation& real, const std::vector<long double>& ks, long double dk) {
    if (ks.empty()) return {};
    const long double R = real.R;
    const long double kmax = *std::max_element(ks.begin(), ks.end());
    for (auto k : ks)
        if (!(k > 0)) throw Error("empirical_Z requires k > 0");
    if (!(dk > 0) || dk > 1 / (4 * R)) throw NumericalError("bins under-resolve the periodogram scale 1/(2R)");
    const auto B = static_cast<std::size_t>(std::ceil(kmax / dk)) + 1;
    auto I = centred_periodogram(real, dk, B);
    const long double excl = 4 / (2 * R);
    std::vector<EmpiricalZ> out;
    for (auto k : ks) {
        CompensatedSum<long double> z, z2;
        for (std::size_t b = 0; b + 1 <= B; ++b) {
            long double a = static_cast<long double>(b) * dk, c = a + dk;
            a = std::max(a, excl);
            c = std::min(c, k);
            if (c <= a) continue;
            // linear interpolation between grid values on [a, c]
            auto at = [&](long double x) {
                long double t = x / dk - static_cast<long double>(b);
                return I[b] * (1 - t) + I[b + 1] * t;
            };
            long double fa = at(a), fc = at(c);
            z.add((c - a) * (fa + fc) / 2);
            z2.add((c - a) * (fa * fa + fc * fc) / 2);
        }
        // independent cells of width 1/(2R) with exponential-like spread
        long double se = std::sqrt(std::max<long double>(0, z2.value() / (2 * R) / 2));
        out.push_back({k, z.value(), se});
    }
    return out;
}

inline std::vector<EmpiricalZ> empirical_Z_curve(const WeightedRealisation& real, const std::vector<long double>& ks) {
    return empirical_Z_curve(real, ks, default_bin_width(real.R));
}

/// Z estimate over (0, k] with `bins` trapezoid bins; needs k/bins ≤ 1/(4R).
inline EmpiricalZ empirical_Z(const WeightedRealisation& real, long double k, std::size_t bins) {
    if (bins < 1) throw Error("bins must be >= 1");
    return empirical_Z_curve(real, {k}, k / static_cast<long double>(bins)).front();
}

inline EmpiricalZ empirical_Z(const WeightedRealisation& real, long double k) {
    return empirical_Z_curve(real, {k}).front();
}

}  // namespace diffscale
