#pragma once

/**
 * @file riesz.hpp
 * @brief Riesz products for the Thue–Morse measure and the generalised
 *        Thue–Morse family: densities, distribution functions, bounds.
 */

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "diffscale/core.hpp"

namespace diffscale {

/// α(p, q, r) = p + q − r − 2 min(p, q, r, p + q − r).
inline long alpha_coefficient(int p, int q, int r) {
    return p + q - r - 2L * std::min({p, q, r, p + q - r});
}

/// The gTM factor ϑ with its coefficient list.
class RieszFactor {
   public:
    RieszFactor(int p, int q) : p_(p), q_(q) {
        if (p < 1 || q < 1) throw Error("Riesz factor requires p, q >= 1");
        if (p + q > 64) throw Error("Riesz factor requires p + q <= 64");
        for (int r = 1; r < base(); ++r) alpha_.push_back(alpha_coefficient(p, q, r));
        long s = 0;
        for (long a : alpha_) s += a;
        at_zero_ = 1 + 2.0L * static_cast<long double>(s) / base();
    }

    int p() const { return p_; }
    int q() const { return q_; }
    int base() const { return p_ + q_; }
    const std::vector<long>& alpha() const { return alpha_; }

    /// ϑ(x) = ϑ(0) − (4/b) Σ α_r sin²(π r x); the sin² form avoids cancellation near 0.
    long double operator()(long double x) const {
        long double u = x - std::floor(x);
        long double s = 0;
        for (std::size_t i = 0; i < alpha_.size(); ++i) {
            if (alpha_[i] == 0) continue;
            long double ru = static_cast<long double>(i + 1) * u;
            long double sn = std::sin(static_cast<double>(kPi * (ru - std::floor(ru))));
            s += static_cast<long double>(alpha_[i]) * sn * sn;
        }
        long double v = at_zero_ - 4 * s / base();
        if (v < 0 && v > -1e-12L) v = 0;
        return v;
    }

    long double at_zero() const { return at_zero_; }

   private:
    int p_, q_;
    std::vector<long> alpha_;
    long double at_zero_;
};

inline long double theta(int p, int q, long double x) { return RieszFactor(p, q)(x); }

/// log f_n(x) = Σ_{m<n} log ϑ(b^m x); −∞ at zeros.
inline long double log_f_n(const RieszFactor& th, long double x, int n) {
    if (n < 0) throw Error("n must be non-negative");
    long double s = 0;
    long double y = x - std::floor(x);
    for (int m = 0; m < n; ++m) {
        long double v = th(y);
        if (v <= 0) return -std::numeric_limits<long double>::infinity();
        s += std::log(v);
        y *= th.base();
        y -= std::floor(y);
    }
    return s;
}

/// f_n(x) = Π_{m<n} ϑ(b^m x); f_0 ≡ 1.
inline long double f_n(int p, int q, long double x, int n) { return std::exp(log_f_n(RieszFactor(p, q), x, n)); }

/// Exact TM Fourier coefficients η(m) and η(m+1) by pair recursion.
inline std::pair<Rational, Rational> eta_pair(std::uint64_t m) {
    if (m == 0) return {Rational(1), Rational(-1, 3)};
    if (m == 1) return {Rational(-1, 3), Rational(-1, 3)};
    auto [a, b] = eta_pair(m / 2);
    Rational mid = Rational(-1, 2) * (a + b);
    return m % 2 == 0 ? std::pair{a, mid} : std::pair{mid, b};
}

/// η(0) = 1, η(1) = −1/3, η(2m) = η(m), η(2m+1) = −(η(m) + η(m+1))/2.
inline Rational eta(std::uint64_t m) { return eta_pair(m).first; }

/// Memoised floating table η(0..N).
inline std::vector<long double> eta_table(std::size_t N) {
    std::vector<long double> e(N + 2, 0);
    e[0] = 1;
    if (N + 2 > 1) e[1] = -1.0L / 3;
    for (std::size_t m = 2; m <= N + 1; ++m) e[m] = m % 2 == 0 ? e[m / 2] : -0.5L * (e[m / 2] + e[m / 2 + 1]);
    e.resize(N + 1);
    return e;
}

/// TM distribution function from its Fourier series with M terms.
class TmFourierDistribution {
   public:
    explicit TmFourierDistribution(std::size_t M) : M_(M), eta_(eta_table(M)) {
        if (M < 1) throw Error("term count must be >= 1");
    }

    std::size_t terms() const { return M_; }

    /// Direct truncated series k + Σ_{m≤M} η(m)/(mπ) sin(2πmk).
    long double series(long double k, std::size_t M) const {
        CompensatedSum<long double> s;
        s.add(k);
        long double u = k - std::floor(k);
        for (std::size_t m = 1; m <= M; ++m) {
            long double ph = 2 * kPi * std::fmod(static_cast<long double>(m) * u, 1.0L);
            s.add(eta_[m] / (static_cast<long double>(m) * kPi) * std::sin(static_cast<double>(ph)));
        }
        return s.value();
    }

    struct Value {
        long double value = 0;
        long double tail = 0;  ///< |F_M − F_{M/2}|
        int rescale = 0;       ///< n in F(k) = 2^{−n} ∫_0^{2^n k} g_n dF
    };

    /**
     * F(k) for 0 ≤ k ≤ 1. For k < 1/4 the self-similarity
     * F(k) = 2^{−n} ∫_0^{Y} g_n dF, Y = 2^n k ∈ (1/2, 1], g_n(y) = Π_{j=1}^n 2 sin²(πy/2^j)
     * keeps full relative accuracy where the truncated series cannot resolve F.
     */
    Value operator()(long double k) const {
        if (!(k >= 0 && k <= 1)) throw Error("F_fourier requires 0 <= k <= 1");
        if (k == 0) return {0, 0, 0};
        if (k == 1) return {1, 0, 0};
        if (k > 0.5L) {
            auto v = (*this)(1 - k);
            return {1 - v.value, v.tail, v.rescale};
        }
        if (k >= 0.25L) {
            long double a = series(k, M_), b = series(k, M_ / 2);
            return {a, std::fabs(a - b), 0};
        }
        int n = 0;
        long double y = k;
        while (y <= 0.5L) {
            y *= 2;
            ++n;
        }
        long double a = stieltjes(y, n, grid(M_), M_);
        long double b = stieltjes(y, n, grid(M_ / 2), M_ / 2);
        long double scale = std::ldexp(1.0L, -n);
        return {scale * a, scale * std::fabs(a - b), n};
    }

   private:
    struct Grid {
        std::size_t G = 0;
        std::vector<long double> F;  ///< F(j/G), j = 0..G
    };

    const Grid& grid(std::size_t M) const {
        for (const auto& g : grids_)
            if (g.first == M) return *g.second;
        auto g = std::make_unique<Grid>();
        std::size_t G = 1;
        while (G < 2 * M) G <<= 1;
        g->G = G;
        fftw_complex* buf = fftw_alloc_complex(G);
        for (std::size_t i = 0; i < G; ++i) buf[i][0] = buf[i][1] = 0;
        for (std::size_t m = 1; m <= M; ++m) buf[m][0] = static_cast<double>(eta_[m] / (static_cast<long double>(m) * kPi));
        fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(G), buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
        fftw_execute(plan);
        g->F.resize(G + 1);
        for (std::size_t j = 0; j < G; ++j) g->F[j] = static_cast<long double>(j) / G + buf[j][1];
        g->F[G] = 1;
        fftw_destroy_plan(plan);
        fftw_free(buf);
        grids_.emplace_back(M, std::move(g));
        return *grids_.back().second;
    }

    static long double g_n(long double y, int n) {
        long double p = 1;
        for (int j = 1; j <= n; ++j) {
            long double s = std::sin(static_cast<double>(kPi * std::ldexp(y, -j)));
            p *= 2 * s * s;
        }
        return p;
    }

    long double stieltjes(long double Y, int n, const Grid& gr, std::size_t M) const {
        const std::size_t G = gr.G;
        auto last = static_cast<std::size_t>(std::floor(Y * static_cast<long double>(G)));
        std::vector<long double> terms;
        terms.reserve(last + 1);
        for (std::size_t j = 0; j < last; ++j) {
            long double mid = (static_cast<long double>(j) + 0.5L) / G;
            terms.push_back(g_n(mid, n) * (gr.F[j + 1] - gr.F[j]));
        }
        long double y0 = static_cast<long double>(last) / G;
        if (Y > y0) terms.push_back(g_n((y0 + Y) / 2, n) * (series(Y, M) - gr.F[last]));
        return ordered_sum(std::move(terms));
    }

    std::size_t M_;
    std::vector<long double> eta_;
    mutable std::vector<std::pair<std::size_t, std::unique_ptr<Grid>>> grids_;
};

inline long double F_fourier(long double k, std::size_t M) { return TmFourierDistribution(M)(k).value; }

/// Composite Simpson of f_n on [0, k] with at least `grid` points per unit length.
inline long double F_quadrature(int p, int q, long double k, int n, long double grid) {
    RieszFactor th(p, q);
    if (!(k >= 0 && k <= 1)) throw Error("F_quadrature requires 0 <= k <= 1");
    if (n < 0) throw Error("n must be non-negative");
    const long double need = 8 * std::pow(static_cast<long double>(th.base()), n);
    if (grid < need) throw NumericalError("under-resolved quadrature grid: need at least " + std::to_string(static_cast<double>(need)) + " points per unit");
    if (k == 0) return 0;
    auto N = static_cast<std::size_t>(std::ceil(k * grid));
    if (N % 2) ++N;
    const long double h = k / static_cast<long double>(N);
    const long double b = th.base();
    CompensatedSum<long double> s;
    for (std::size_t j = 0; j <= N; ++j) {
        long double w = (j == 0 || j == N) ? 1 : (j % 2 ? 4 : 2);
        long double y = h * static_cast<long double>(j), prod = 1;
        for (int m = 0; m < n && prod != 0; ++m) {
            prod *= th(y);
            y *= b;
            y -= std::floor(y);
        }
        s.add(w * prod);
    }
    return s.value() * h / 3;
}

/// log F(b^{−n}) from F_{n+extra}(b^{−n}) on an exactly reduced Simpson grid.
inline long double log_F_at_scale(int p, int q, int n, int extra) {
    RieszFactor th(p, q);
    if (n < 0 || extra < 1) throw Error("log_F_at_scale requires n >= 0 and extra >= 1");
    const int b = th.base();
    const int total = n + extra;
    i128 bpow_total = 1;
    for (int i = 0; i < total; ++i) bpow_total = checked_mul(bpow_total, b);
    i128 bn = 1;
    for (int i = 0; i < n; ++i) bn = checked_mul(bn, b);
    // 8 points per oscillation of the finest factor over [0, b^{−n}]
    const i128 N = checked_mul(8, bpow_total / bn);
    const i128 denom = checked_mul(N, bn);  // x_j = j / denom
    std::vector<long double> logs(static_cast<std::size_t>(N) + 1);
    for (i128 j = 0; j <= N; ++j) {
        long double s = 0;
        i128 num = j % denom;
        for (int m = 0; m < total; ++m) {
            long double v = th(static_cast<long double>(num) / static_cast<long double>(denom));
            if (v <= 0) {
                s = -std::numeric_limits<long double>::infinity();
                break;
            }
            s += std::log(v);
            num = checked_mul(num, b) % denom;
        }
        logs[static_cast<std::size_t>(j)] = s;
    }
    long double mx = *std::max_element(logs.begin(), logs.end());
    if (!std::isfinite(mx)) return -std::numeric_limits<long double>::infinity();
    CompensatedSum<long double> acc;
    for (std::size_t j = 0; j < logs.size(); ++j) {
        long double w = (j == 0 || j + 1 == logs.size()) ? 1 : (j % 2 ? 4 : 2);
        acc.add(w * std::exp(logs[j] - mx));
    }
    const long double h = 1 / static_cast<long double>(denom);
    return mx + std::log(acc.value() * h / 3);
}

struct TmBounds {
    int n = 0;
    long double log_lower = 0, log_upper = 0;
    long double lower() const { return std::exp(log_lower); }
    long double upper() const { return std::exp(log_upper); }
};

/// 2^{−n} f_n(2^{−n−1}) ≤ F(2^{−n}) ≤ 2^{−n} f_n(2^{−n}), in log-space.
inline TmBounds tm_bounds(int n) {
    if (n < 1) throw Error("tm_bounds requires n >= 1");
    RieszFactor tm(1, 1);
    TmBounds b;
    b.n = n;
    b.log_upper = -n * kLn2 + log_f_n(tm, std::ldexp(1.0L, -n), n);
    b.log_lower = -n * kLn2 + log_f_n(tm, std::ldexp(1.0L, -n - 1), n);
    return b;
}

/// β = 1/4 − (2/π²) Σ_{m<N} η(2m+1)/(2m+1)².
inline long double tm_beta(std::size_t N) {
    auto e = eta_table(2 * N + 1);
    std::vector<long double> t;
    t.reserve(N);
    for (std::size_t m = 0; m < N; ++m) {
        long double o = static_cast<long double>(2 * m + 1);
        t.push_back(e[2 * m + 1] / (o * o));
    }
    return 0.25L - 2 / (kPi * kPi) * ordered_sum(std::move(t));
}

/// log of 2^{−n} f_{n−1}(2^{−n+1} β).
inline long double tm_improved_lower_log(int n, std::size_t N) {
    if (n < 2) throw Error("tm_improved_lower requires n >= 2");
    long double beta = tm_beta(N);
    return -n * kLn2 + log_f_n(RieszFactor(1, 1), std::ldexp(beta, -n + 1), n - 1);
}
inline long double tm_improved_lower(int n, std::size_t N) { return std::exp(tm_improved_lower_log(n, N)); }

/// Constants c (upper) and π²c/4 (lower) from the bracket at level n.
struct TmConstants {
    int n = 0;
    long double c_upper = 0;
    long double c_lower = 0;
};

inline TmConstants tm_constants(int n) {
    auto b = tm_bounds(n);
    const long double nn = n;
    TmConstants c;
    c.n = n;
    c.c_upper = std::exp(b.log_upper + nn * nn * kLn2 + nn * std::log(2 / (kPi * kPi)));
    c.c_lower = std::exp(b.log_lower + nn * nn * kLn2 + nn * std::log(8 / (kPi * kPi)));
    return c;
}

/// Iterates n until both constants move by less than tol; throws if n_max is reached.
inline TmConstants tm_constants_stabilised(long double tol = 1e-5L, int n_min = 10, int n_max = 200) {
    TmConstants prev = tm_constants(n_min);
    for (int n = n_min + 1; n <= n_max; ++n) {
        auto cur = tm_constants(n);
        if (std::fabs(cur.c_upper - prev.c_upper) < tol && std::fabs(cur.c_lower - prev.c_lower) < tol) return cur;
        prev = cur;
    }
    throw NumericalError("TM constants did not stabilise");
}

struct GtmExponent {
    bool power_law = true;
    long double exponent = 0;
    std::string flag;
};

/// 2 − 2 log|p − q| / log(p + q), or the TM-like flag for p = q.
inline GtmExponent gtm_exponent(int p, int q) {
    if (p < 1 || q < 1) throw Error("gtm_exponent requires p, q >= 1");
    if (p == q) return {false, std::numeric_limits<long double>::infinity(), "TM-like (faster than any power)"};
    return {true, 2 - 2 * std::log(static_cast<long double>(std::abs(p - q))) / std::log(static_cast<long double>(p + q)), ""};
}

}  // namespace diffscale
