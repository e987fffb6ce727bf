#pragma once

/**
 * @file cutproject.hpp
 * @brief Cut-and-project schemes over real quadratic orders: model sets,
 *        Fourier-module enumeration, peak intensities and the pure-point Z(k).
 */

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "diffscale/algebra.hpp"
#include "diffscale/core.hpp"
#include "diffscale/substitution.hpp"

namespace diffscale {

/// Lattice {(x, x⋆) : x ∈ Z[θ]} in R × R.
struct CutProjectScheme {
    QuadraticOrder order = QuadraticOrder::golden();

    long double covolume() const { return order.sqrt_disc(); }
    long double theta() const { return order.theta(); }

    static CutProjectScheme golden() { return {QuadraticOrder::golden()}; }
    static CutProjectScheme noble(int p) { return {QuadraticOrder::noble(p)}; }
};

/// Interval window in internal space; endpoints exact when they lie in the order.
struct Window {
    long double left = 0, right = 0;
    bool left_closed = false, right_closed = true;
    std::optional<AlgebraicNumber> left_exact, right_exact;

    static Window exact(const AlgebraicNumber& l, const AlgebraicNumber& r, bool lc = false, bool rc = true) {
        if (!(l <= r)) throw Error("window endpoints out of order");
        return {l.value(), r.value(), lc, rc, l, r};
    }
    static Window real(long double l, long double r, bool lc = false, bool rc = true) {
        if (!(l <= r)) throw Error("window endpoints out of order");
        return {l, r, lc, rc, std::nullopt, std::nullopt};
    }

    long double length() const {
        if (left_exact && right_exact) return (*right_exact - *left_exact).value();
        return right - left;
    }
    bool has_interior() const { return left_exact && right_exact ? *left_exact < *right_exact : left < right; }

    bool contains(const AlgebraicNumber& xs) const {
        int cl, cr;
        if (left_exact)
            cl = (xs - *left_exact).sign();
        else {
            long double v = xs.value() - left;
            cl = v > 0 ? 1 : (v < 0 ? -1 : 0);
        }
        if (right_exact)
            cr = (*right_exact - xs).sign();
        else {
            long double v = right - xs.value();
            cr = v > 0 ? 1 : (v < 0 ? -1 : 0);
        }
        bool okl = cl > 0 || (cl == 0 && left_closed);
        bool okr = cr > 0 || (cr == 0 && right_closed);
        return okl && okr;
    }
};

/// Window (−1, θ − p] of length 1 + 1/θ; for p = 1 this is (−1, τ − 1].
inline Window noble_window(int p) {
    auto o = QuadraticOrder::noble(p);
    return Window::exact(AlgebraicNumber(-1, 0, o), AlgebraicNumber(-p, 1, o), false, true);
}
inline Window fibonacci_window() { return noble_window(1); }

/// Window length s, exact when s ∈ Z[θ].
struct WindowLength {
    long double s = 0;
    std::optional<AlgebraicNumber> exact;

    WindowLength(const AlgebraicNumber& x) : s(x.value()), exact(x) {
        if (x.sign() <= 0) throw Error("window length must be positive");
    }
    WindowLength(long double x) : s(x) {
        if (!(x > 0)) throw Error("window length must be positive");
    }
    static WindowLength of(const Window& w) {
        if (w.left_exact && w.right_exact) return WindowLength(*w.right_exact - *w.left_exact);
        return WindowLength(w.length());
    }
};

/// All x ∈ Z[θ] with |x| ≤ R and x⋆ ∈ W, sorted, exact.
inline std::vector<AlgebraicNumber> model_set_points(const CutProjectScheme& cps, const Window& w, long double R) {
    if (!(R > 0)) throw Error("radius must be positive");
    std::vector<AlgebraicNumber> out;
    if (!w.has_interior()) return out;
    const auto& o = cps.order;
    const long double th = o.theta(), ths = o.theta_star(), sd = o.sqrt_disc();
    // x − x⋆ = n√D
    auto n_lo = static_cast<long long>(std::floor((-R - w.right) / sd)) - 1;
    auto n_hi = static_cast<long long>(std::ceil((R - w.left) / sd)) + 1;
    for (long long n = n_lo; n <= n_hi; ++n) {
        long double nl = static_cast<long double>(n);
        long double lo = std::max(-R - nl * th, w.left - nl * ths);
        long double hi = std::min(R - nl * th, w.right - nl * ths);
        if (lo > hi + 2) continue;
        for (auto m = static_cast<long long>(std::floor(lo)) - 1; m <= static_cast<long long>(std::ceil(hi)) + 1; ++m) {
            AlgebraicNumber x(m, n, o);
            if (std::fabs(x.value()) > R) continue;
            if (w.contains(x.star())) out.push_back(x);
        }
    }
    std::sort(out.begin(), out.end(), [](const AlgebraicNumber& a, const AlgebraicNumber& b) { return a < b; });
    return out;
}

/// Model set as a typed patch: type 1 (short, gap 1) iff x⋆ + 1 ∈ W, else type 0 (long, gap θ).
inline TypedPatch generate_model_set(const CutProjectScheme& cps, const Window& w, long double R) {
    TypedPatch p;
    p.radius = R;
    p.lengths = {cps.theta(), 1};
    const AlgebraicNumber one(1, 0, cps.order);
    for (const auto& x : model_set_points(cps, w, R)) {
        p.exact.push_back(x);
        p.positions.push_back(x.value());
        p.types.push_back(w.contains(x.star() + one) ? 1 : 0);
    }
    return p;
}

inline long double model_set_density(const CutProjectScheme& cps, const Window& w) {
    return w.has_interior() ? w.length() / cps.covolume() : 0;
}
inline long double model_set_density(const CutProjectScheme& cps, const WindowLength& s) { return s.s / cps.covolume(); }

/// Fourier-module element κ/√D with κ = m + nθ.
struct ModulePoint {
    i128 m = 0, n = 0;
    long double k = 0;      ///< κ/√D
    long double kstar = 0;  ///< −κ⋆/√D
};

inline ModulePoint module_point(const CutProjectScheme& cps, i128 m, i128 n) {
    AlgebraicNumber kappa(m, n, cps.order);
    const long double sd = cps.covolume();
    return {m, n, kappa.value() / sd, -kappa.star_value() / sd};
}

/// dens² · sinc(π s k⋆)²; for s ∈ Z[θ] the sine is evaluated at the reduced argument π s⋆ k.
inline long double peak_intensity(const CutProjectScheme& cps, const WindowLength& s, const ModulePoint& p) {
    const long double dens = model_set_density(cps, s);
    if (p.m == 0 && p.n == 0) return dens * dens;
    const long double arg = kPi * s.s * p.kstar;
    long double num;
    if (s.exact) {
        // s k⋆ + s⋆ k equals the θ-coefficient of s⋆κ, an integer, so |sin(π s k⋆)| = |sin(π s⋆ k)|
        const long double alt = kPi * s.exact->star_value() * p.k;
        num = std::fabs(alt) < std::fabs(arg) ? std::sin(alt) : std::sin(arg);
    } else {
        num = std::sin(arg);
    }
    if (arg == 0) return dens * dens;
    const long double r = num / arg;
    return dens * dens * r * r;
}

inline long double peak_intensity(const CutProjectScheme& cps, const WindowLength& s, i128 m, i128 n) {
    return peak_intensity(cps, s, module_point(cps, m, n));
}

struct Peak {
    ModulePoint point;
    long double intensity = 0;
};

struct PeakSet {
    std::vector<Peak> peaks;  ///< only k > 0, sorted by k
    long double i0 = 0;
};

/// All κ/√D with 0 < k ≤ k_max and |k⋆| ≤ kstar_max, each once, sorted by k.
inline std::vector<ModulePoint> enumerate_fourier_module(const CutProjectScheme& cps, long double k_max, long double kstar_max) {
    std::vector<ModulePoint> out;
    if (!(k_max > 0) || !(kstar_max > 0)) return out;
    const auto& o = cps.order;
    const long double th = o.theta(), ths = o.theta_star(), sd = o.sqrt_disc();
    // k + k⋆ = n
    auto n_lo = static_cast<long long>(std::floor(-kstar_max)) - 1;
    auto n_hi = static_cast<long long>(std::ceil(k_max + kstar_max)) + 1;
    for (long long n = n_lo; n <= n_hi; ++n) {
        long double nl = static_cast<long double>(n);
        long double lo = std::max(-nl * th, -sd * kstar_max - nl * ths);
        long double hi = std::min(sd * k_max - nl * th, sd * kstar_max - nl * ths);
        if (lo > hi + 2) continue;
        for (auto m = static_cast<long long>(std::floor(lo)) - 1; m <= static_cast<long long>(std::ceil(hi)) + 1; ++m) {
            if (AlgebraicNumber(m, n, o).sign() <= 0) continue;
            auto p = module_point(cps, m, n);
            if (p.k > k_max || std::fabs(p.kstar) > kstar_max) continue;
            out.push_back(p);
        }
    }
    std::sort(out.begin(), out.end(), [](const ModulePoint& a, const ModulePoint& b) { return a.k < b.k; });
    return out;
}

inline PeakSet peak_set(const CutProjectScheme& cps, const WindowLength& s, long double k_max, long double kstar_max) {
    PeakSet ps;
    const long double dens = model_set_density(cps, s);
    ps.i0 = dens * dens;
    for (const auto& p : enumerate_fourier_module(cps, k_max, kstar_max)) ps.peaks.push_back({p, peak_intensity(cps, s, p)});
    return ps;
}

struct ZResult {
    long double value = 0;
    long double tail_bound = 0;
    std::size_t shell_points = 0;
};

namespace detail {

/// Bound on Σ_{j≥0} I(κ/θ^j) for an orbit whose first member has |k⋆| ≥ x and k ≤ kmax.
inline long double orbit_bound(const CutProjectScheme& cps, const WindowLength& s, long double x, long double kmax) {
    const long double dens = model_set_density(cps, s), th = cps.theta();
    if (s.exact) {
        // sin² ≤ (π s⋆ k)², decay θ^{-4} per step
        const long double ss = s.exact->star_value();
        const long double r = ss * kmax / (s.s * x);
        return dens * dens * r * r * th * th * th * th / (th * th * th * th - 1);
    }
    const long double r = 1 / (kPi * s.s * x);
    return dens * dens * r * r * th * th / (th * th - 1);
}

}  // namespace detail

/**
 * Z(k) = Σ over module points in (0, k] of I, organised as inflation orbits of
 * the shell (k/θ, k]. Shell representatives with |k⋆|·k > kstar_cut are omitted
 * and bounded rigorously; the cut is invariant under k ↦ k/θ.
 */
inline ZResult z_pure_point(const CutProjectScheme& cps, const WindowLength& s, long double k, long double kstar_cut) {
    if (!(k > 0)) throw Error("z_pure_point requires k > 0");
    if (!(kstar_cut > 0)) throw Error("kstar_cut must be positive");
    const auto& o = cps.order;
    if (o.n != 1 && o.n != -1) throw Error("inflation orbits need θ to be a unit");
    const long double th = o.theta(), ths = o.theta_star(), sd = o.sqrt_disc();
    const long double K = kstar_cut / k;
    const long double klo = k / th;
    std::vector<long double> terms;
    long double tail = 0;
    std::size_t shell = 0;

    auto n_lo = static_cast<long long>(std::floor(-K)) - 1;
    auto n_hi = static_cast<long long>(std::ceil(k + K)) + 1;
    for (long long n = n_lo; n <= n_hi; ++n) {
        long double nl = static_cast<long double>(n);
        long double lo = std::max(sd * klo - nl * th, -sd * K - nl * ths);
        long double hi = std::min(sd * k - nl * th, sd * K - nl * ths);
        if (lo > hi + 2) continue;
        for (auto m = static_cast<long long>(std::floor(lo)) - 1; m <= static_cast<long long>(std::ceil(hi)) + 1; ++m) {
            auto p = module_point(cps, m, n);
            if (!(p.k > klo && p.k <= k) || std::fabs(p.kstar) > K) continue;
            ++shell;
            AlgebraicNumber kappa(m, n, o);
            long double orbit = 0;
            for (int j = 0;; ++j) {
                auto q = module_point(cps, kappa.a(), kappa.b());
                long double t = peak_intensity(cps, s, q);
                terms.push_back(t);
                orbit += t;
                long double rest = detail::orbit_bound(cps, s, std::fabs(q.kstar) * th, q.k / th);
                if (rest <= 1e-19L * orbit || rest == 0) {
                    tail += rest;
                    break;
                }
                if (j >= 400) {
                    tail += rest;
                    break;
                }
                kappa = kappa.div_theta();
            }
        }
    }

    // omitted representatives: |k⋆| > K and |k⋆| ≥ |n| − k, at most c per n
    const long double c = std::floor(sd * k * (1 - 1 / th)) + 1;
    const auto n_first = static_cast<long long>(std::floor(K - k));
    const auto n_last = static_cast<long long>(std::ceil(K + k)) + 1;
    for (long long n = std::max<long long>(n_first, 0); n <= n_last; ++n) {
        long double x = std::max(K, static_cast<long double>(n) - k);
        long double b = c * detail::orbit_bound(cps, s, x, k);
        tail += n == 0 ? b : 2 * b;
    }
    // Σ_{n > n_last} 1/(n − k)² ≤ 1/(n_last − k)
    {
        long double x0 = static_cast<long double>(n_last) - k;
        long double unit = detail::orbit_bound(cps, s, 1, k);
        tail += 2 * c * unit / x0;
    }
    return {ordered_sum(std::move(terms)), tail, shell};
}

/// Σ_{ℓ<depth} I(κ/θ^ℓ) with a rigorous bound on the remainder.
inline ZResult sigma_series(const CutProjectScheme& cps, const WindowLength& s, i128 m, i128 n, int depth) {
    if (depth < 1) throw Error("depth must be >= 1");
    AlgebraicNumber kappa(m, n, cps.order);
    if (kappa.is_zero()) throw Error("sigma_series needs a non-zero module point");
    std::vector<long double> terms;
    long double rest = 0;
    for (int l = 0; l < depth; ++l) {
        auto q = module_point(cps, kappa.a(), kappa.b());
        terms.push_back(peak_intensity(cps, s, q));
        rest = detail::orbit_bound(cps, s, std::fabs(q.kstar) * cps.theta(), std::fabs(q.k) / cps.theta());
        if (l + 1 < depth) kappa = kappa.div_theta();
    }
    return {ordered_sum(std::move(terms)), rest, 1};
}

}  // namespace diffscale
