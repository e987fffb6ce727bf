#pragma once

/**
 * @file algebra.hpp
 * @brief Exact arithmetic in real quadratic orders Z[θ] with the star map, and
 *        eigen-data of small integer matrices.
 */

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "diffscale/core.hpp"

namespace diffscale {

/// Order Z[θ] with θ² = t·θ + n; θ is the larger real root.
struct QuadraticOrder {
    std::int64_t t = 1;
    std::int64_t n = 1;

    constexpr std::int64_t disc() const { return t * t + 4 * n; }
    long double sqrt_disc() const { return std::sqrt(static_cast<long double>(disc())); }
    long double theta() const { return (static_cast<long double>(t) + sqrt_disc()) / 2; }
    long double theta_star() const {
        // product of roots is −n; avoids cancellation in (t − √D)/2
        return -static_cast<long double>(n) / theta();
    }
    bool is_pisot() const { return theta() > 1 && std::fabs(theta_star()) < 1; }

    friend bool operator==(const QuadraticOrder&, const QuadraticOrder&) = default;

    static QuadraticOrder golden() { return {1, 1}; }
    static QuadraticOrder noble(int p) {
        if (p < 1) throw Error("noble mean parameter p must be >= 1");
        return {p, 1};
    }
};

/// Exact element a + b·θ of a quadratic order.
class AlgebraicNumber {
   public:
    AlgebraicNumber() = default;
    AlgebraicNumber(i128 a, i128 b, QuadraticOrder order = QuadraticOrder::golden()) : a_(a), b_(b), order_(order) {
        if (order_.disc() <= 0 || is_square(order_.disc())) throw Error("quadratic order must be real and irrational");
    }

    i128 a() const { return a_; }
    i128 b() const { return b_; }
    const QuadraticOrder& order() const { return order_; }
    bool is_zero() const { return a_ == 0 && b_ == 0; }

    /// Algebraic conjugate: θ ↦ θ⋆ = t − θ.
    AlgebraicNumber star() const {
        return {checked_add(a_, checked_mul(b_, order_.t)), -b_, order_};
    }

    /// Norm x·x⋆ = a² + abt − nb².
    i128 norm() const {
        i128 r = checked_mul(a_, a_);
        r = checked_add(r, checked_mul(checked_mul(a_, b_), order_.t));
        return checked_sub(r, checked_mul(checked_mul(b_, b_), order_.n));
    }

    /// Real value, accurate even under cancellation (recovered from the norm).
    long double value() const { return embed(order_.theta(), order_.theta_star()); }
    /// Value of the conjugate embedding x⋆.
    long double star_value() const { return embed(order_.theta_star(), order_.theta()); }

    /// Exact sign of the real value.
    int sign() const {
        // a + bθ = (X + b√D)/2 with X = 2a + bt
        i128 x = checked_add(checked_mul(2, a_), checked_mul(b_, order_.t));
        int sx = x > 0 ? 1 : (x < 0 ? -1 : 0);
        int sb = b_ > 0 ? 1 : (b_ < 0 ? -1 : 0);
        if (sb == 0) return sx;
        if (sx == 0 || sx == sb) return sb;
        i128 lhs = checked_mul(x, x);
        i128 rhs = checked_mul(checked_mul(b_, b_), order_.disc());
        if (lhs == rhs) return 0;
        return lhs > rhs ? sx : sb;
    }

    friend AlgebraicNumber operator+(const AlgebraicNumber& x, const AlgebraicNumber& y) {
        x.require_same(y);
        return {checked_add(x.a_, y.a_), checked_add(x.b_, y.b_), x.order_};
    }
    friend AlgebraicNumber operator-(const AlgebraicNumber& x) { return {-x.a_, -x.b_, x.order_}; }
    friend AlgebraicNumber operator-(const AlgebraicNumber& x, const AlgebraicNumber& y) {
        x.require_same(y);
        return {checked_sub(x.a_, y.a_), checked_sub(x.b_, y.b_), x.order_};
    }
    friend AlgebraicNumber operator*(const AlgebraicNumber& x, const AlgebraicNumber& y) {
        x.require_same(y);
        // (a + bθ)(c + dθ) = ac + n·bd + (ad + bc + t·bd)θ
        i128 bd = checked_mul(x.b_, y.b_);
        i128 a = checked_add(checked_mul(x.a_, y.a_), checked_mul(bd, x.order_.n));
        i128 b = checked_add(checked_add(checked_mul(x.a_, y.b_), checked_mul(x.b_, y.a_)), checked_mul(bd, x.order_.t));
        return {a, b, x.order_};
    }
    friend bool operator==(const AlgebraicNumber& x, const AlgebraicNumber& y) {
        return x.order_ == y.order_ && x.a_ == y.a_ && x.b_ == y.b_;
    }
    friend bool operator<(const AlgebraicNumber& x, const AlgebraicNumber& y) { return (x - y).sign() < 0; }
    friend bool operator<=(const AlgebraicNumber& x, const AlgebraicNumber& y) { return (x - y).sign() <= 0; }
    friend bool operator>(const AlgebraicNumber& x, const AlgebraicNumber& y) { return (x - y).sign() > 0; }
    friend bool operator>=(const AlgebraicNumber& x, const AlgebraicNumber& y) { return (x - y).sign() >= 0; }

    /// Division by θ; requires θ to be a unit (|n| = 1).
    AlgebraicNumber div_theta() const {
        if (order_.n != 1 && order_.n != -1) throw Error("theta is not a unit in this order");
        // 1/θ = (θ − t)/n
        i128 a = checked_mul(checked_sub(b_, checked_mul(a_, order_.t)), order_.n);
        i128 b = checked_mul(a_, order_.n);
        return {a, b, order_};
    }
    AlgebraicNumber mul_theta() const { return *this * AlgebraicNumber(0, 1, order_); }

    std::string str() const { return to_string(a_) + (b_ < 0 ? "-" : "+") + to_string(abs128(b_)) + "θ"; }

   private:
    static bool is_square(std::int64_t v) {
        if (v < 0) return false;
        auto r = static_cast<std::int64_t>(std::llround(std::sqrt(static_cast<double>(v))));
        return r * r == v;
    }

    long double embed(long double th, long double th_other) const {
        long double va = static_cast<long double>(a_);
        long double vb = static_cast<long double>(b_);
        long double x = va + vb * th;
        long double y = va + vb * th_other;
        if (std::fabs(y) > std::fabs(x) && y != 0) return static_cast<long double>(norm()) / y;
        return x;
    }

    void require_same(const AlgebraicNumber& o) const {
        if (!(order_ == o.order_)) throw Error("algebraic numbers from different orders");
    }

    i128 a_ = 0;
    i128 b_ = 0;
    QuadraticOrder order_{};
};

inline AlgebraicNumber star(const AlgebraicNumber& x) { return x.star(); }

/// Fibonacci number f_n for any integer n (f_{−n} = (−1)^{n+1} f_n); throws on overflow.
inline i128 fibonacci(long n) {
    long m = n < 0 ? -n : n;
    i128 f0 = 0, f1 = 1;
    for (long i = 0; i < m; ++i) {
        i128 f2 = checked_add(f0, f1);
        f0 = f1;
        f1 = f2;
    }
    if (n < 0 && m % 2 == 0) return -f0;
    return f0;
}

/// Square integer matrix with entries M(i, j).
class IntegerMatrix {
   public:
    IntegerMatrix() = default;
    explicit IntegerMatrix(int d) : d_(d), v_(static_cast<std::size_t>(d) * d, 0) {
        if (d < 1 || d > 8) throw Error("matrix dimension must be in 1..8");
    }
    IntegerMatrix(std::initializer_list<std::initializer_list<std::int64_t>> rows) : IntegerMatrix(static_cast<int>(rows.size())) {
        int i = 0;
        for (const auto& r : rows) {
            if (static_cast<int>(r.size()) != d_) throw Error("matrix must be square");
            int j = 0;
            for (auto x : r) (*this)(i, j++) = x;
            ++i;
        }
    }

    static IntegerMatrix identity(int d) {
        IntegerMatrix m(d);
        for (int i = 0; i < d; ++i) m(i, i) = 1;
        return m;
    }

    int dim() const { return d_; }
    std::int64_t& operator()(int i, int j) { return v_[static_cast<std::size_t>(i) * d_ + j]; }
    std::int64_t operator()(int i, int j) const { return v_[static_cast<std::size_t>(i) * d_ + j]; }

    friend IntegerMatrix operator*(const IntegerMatrix& x, const IntegerMatrix& y) {
        IntegerMatrix r(x.d_);
        for (int i = 0; i < x.d_; ++i)
            for (int j = 0; j < x.d_; ++j) {
                i128 s = 0;
                for (int l = 0; l < x.d_; ++l) s = checked_add(s, checked_mul(x(i, l), y(l, j)));
                if (s > INT64_MAX || s < INT64_MIN) throw NumericalError("integer matrix product overflow");
                r(i, j) = static_cast<std::int64_t>(s);
            }
        return r;
    }
    friend bool operator==(const IntegerMatrix&, const IntegerMatrix&) = default;

    /// Some power with exponent ≤ (d−1)² + 1 is strictly positive.
    bool is_primitive() const {
        for (auto x : v_)
            if (x < 0) return false;
        std::vector<char> p(v_.size()), b(v_.size());
        for (std::size_t i = 0; i < v_.size(); ++i) b[i] = p[i] = v_[i] != 0;
        int bound = (d_ - 1) * (d_ - 1) + 1;
        for (int e = 1; e <= bound; ++e) {
            if (std::all_of(p.begin(), p.end(), [](char c) { return c != 0; })) return true;
            std::vector<char> q(v_.size(), 0);
            for (int i = 0; i < d_; ++i)
                for (int j = 0; j < d_; ++j)
                    for (int l = 0; l < d_; ++l)
                        if (p[i * d_ + l] && b[l * d_ + j]) {
                            q[i * d_ + j] = 1;
                            break;
                        }
            p = q;
        }
        return false;
    }

    /// Characteristic polynomial det(xI − M), coefficients c[0..d] with c[d] = 1.
    std::vector<i128> charpoly() const {
        // Faddeev–LeVerrier: M_k = A·M_{k−1} + c_{d−k+1}·I, c_{d−k} = −tr(A·M_k)/k; divisions are exact
        std::vector<i128> c(d_ + 1, 0);
        c[d_] = 1;
        const auto n = v_.size();
        std::vector<i128> mk(n, 0);
        auto times_a = [&](const std::vector<i128>& x) {
            std::vector<i128> r(n, 0);
            for (int i = 0; i < d_; ++i)
                for (int j = 0; j < d_; ++j) {
                    i128 s = 0;
                    for (int l = 0; l < d_; ++l) s = checked_add(s, checked_mul((*this)(i, l), x[l * d_ + j]));
                    r[i * d_ + j] = s;
                }
            return r;
        };
        for (int k = 1; k <= d_; ++k) {
            mk = times_a(mk);
            for (int i = 0; i < d_; ++i) mk[i * d_ + i] = checked_add(mk[i * d_ + i], c[d_ - k + 1]);
            auto amk = times_a(mk);
            i128 tr = 0;
            for (int i = 0; i < d_; ++i) tr = checked_add(tr, amk[i * d_ + i]);
            c[d_ - k] = -tr / k;
        }
        return c;
    }

    i128 det() const {
        auto c = charpoly();
        return d_ % 2 == 0 ? c[0] : -c[0];
    }

    Eigen::MatrixXd to_eigen() const {
        Eigen::MatrixXd m(d_, d_);
        for (int i = 0; i < d_; ++i)
            for (int j = 0; j < d_; ++j) m(i, j) = static_cast<double>((*this)(i, j));
        return m;
    }

   private:
    int d_ = 0;
    std::vector<std::int64_t> v_;
};

namespace detail {

inline long double poly_eval(const std::vector<i128>& c, long double x, long double* deriv = nullptr) {
    long double p = 0, dp = 0;
    for (int i = static_cast<int>(c.size()) - 1; i >= 0; --i) {
        dp = dp * x + p;
        p = p * x + static_cast<long double>(c[static_cast<std::size_t>(i)]);
    }
    if (deriv) *deriv = dp;
    return p;
}

inline long double newton_polish(const std::vector<i128>& c, long double x) {
    for (int it = 0; it < 60; ++it) {
        long double dp;
        long double p = poly_eval(c, x, &dp);
        if (dp == 0) break;
        long double step = p / dp;
        x -= step;
        if (std::fabs(step) <= 1e-18L * std::max<long double>(1, std::fabs(x))) break;
    }
    return x;
}

/// Roots of x² + b x + c, numerically stable.
inline std::vector<std::complex<long double>> quadratic_roots(long double b, long double c) {
    long double disc = b * b - 4 * c;
    if (disc >= 0) {
        long double q = -(b + std::copysign(std::sqrt(disc), b)) / 2;
        if (q == 0) return {0, 0};
        return {q, c / q};
    }
    long double re = -b / 2, im = std::sqrt(-disc) / 2;
    return {{re, im}, {re, -im}};
}

}  // namespace detail

/// All eigenvalues: closed-form characteristic polynomials with Newton polishing for
/// d ≤ 3; Eigen's Hessenberg-QR iteration with real roots polished for d ≥ 4.
inline std::vector<std::complex<long double>> eigenvalues(const IntegerMatrix& m) {
    const int d = m.dim();
    auto c = m.charpoly();
    std::vector<std::complex<long double>> ev;
    if (d == 1) {
        ev.push_back(static_cast<long double>(m(0, 0)));
    } else if (d == 2) {
        ev = detail::quadratic_roots(static_cast<long double>(c[1]), static_cast<long double>(c[0]));
        for (auto& e : ev)
            if (e.imag() == 0) e = detail::newton_polish(c, e.real());
    } else if (d == 3) {
        // a cubic has a real root; take the largest one by bisection, then deflate
        long double bound = 1;
        for (int i = 0; i < 3; ++i) bound = std::max(bound, 1 + std::fabs(static_cast<long double>(c[static_cast<std::size_t>(i)])));
        long double lo = -bound, hi = bound;
        // largest real root: the cubic is positive for x > root, so scan down from the bound
        const int grid = 4096;
        long double step = (hi - lo) / grid;
        long double x1 = hi, x0 = hi - step;
        while (x0 > lo && detail::poly_eval(c, x0) > 0) {
            x1 = x0;
            x0 -= step;
        }
        for (int it = 0; it < 200; ++it) {
            long double mid = (x0 + x1) / 2;
            if (detail::poly_eval(c, mid) > 0)
                x1 = mid;
            else
                x0 = mid;
        }
        long double r = detail::newton_polish(c, (x0 + x1) / 2);
        // x³ + a x² + b x + c0 = (x − r)(x² + (a + r) x + (b + r(a + r)))
        long double a2 = static_cast<long double>(c[2]);
        long double b1 = a2 + r;
        long double c1 = static_cast<long double>(c[1]) + r * b1;
        ev.push_back(r);
        for (auto& e : detail::quadratic_roots(b1, c1)) {
            ev.push_back(e.imag() == 0 ? std::complex<long double>(detail::newton_polish(c, e.real()), 0) : e);
        }
        if (ev[1].imag() != 0 && r != 0) {
            // complex pair modulus from |μ|² = |det|/|r|
            long double mod = std::sqrt(std::fabs(static_cast<long double>(m.det())) / std::fabs(r));
            for (int i = 1; i < 3; ++i) ev[static_cast<std::size_t>(i)] *= mod / std::abs(ev[static_cast<std::size_t>(i)]);
        }
    } else {
        Eigen::EigenSolver<Eigen::MatrixXd> es(m.to_eigen(), false);
        if (es.info() != Eigen::Success) throw NumericalError("eigenvalue iteration did not converge");
        for (int i = 0; i < d; ++i) {
            std::complex<long double> e(es.eigenvalues()[i].real(), es.eigenvalues()[i].imag());
            if (std::fabs(e.imag()) < 1e-12) e = detail::newton_polish(c, e.real());
            ev.push_back(e);
        }
    }
    std::sort(ev.begin(), ev.end(), [](auto x, auto y) {
        long double ax = std::abs(x), ay = std::abs(y);
        if (ax != ay) return ax > ay;
        if (x.real() != y.real()) return x.real() > y.real();
        return x.imag() > y.imag();
    });
    return ev;
}

/// Perron–Frobenius data of a primitive matrix.
struct SpectralData {
    long double lambda = 0;
    std::vector<long double> right;  ///< letter frequencies, sum 1
    std::vector<long double> left;   ///< natural tile lengths, minimum entry 1
    std::vector<std::complex<long double>> eigenvalues;
    std::vector<long double> moduli;  ///< |μ| in non-increasing order
    i128 det = 0;
    std::vector<std::string> warnings;
};

namespace detail {

inline std::vector<long double> pf_vector(const Eigen::MatrixXd& a, long double lambda) {
    const int d = static_cast<int>(a.rows());
    Eigen::MatrixXd shifted = a - static_cast<double>(lambda) * (1 + 1e-12) * Eigen::MatrixXd::Identity(d, d);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(shifted);
    Eigen::VectorXd v = Eigen::VectorXd::Ones(d);
    for (int it = 0; it < 4; ++it) {
        v = lu.solve(v);
        v /= v.norm();
    }
    // refine in long double by power steps normalised to the exact eigenvalue
    std::vector<long double> x(static_cast<std::size_t>(d));
    long double s = 0;
    for (int i = 0; i < d; ++i) s += v[i];
    for (int i = 0; i < d; ++i) x[static_cast<std::size_t>(i)] = v[i] / s;
    for (int it = 0; it < 3; ++it) {
        std::vector<long double> y(static_cast<std::size_t>(d), 0);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) y[static_cast<std::size_t>(i)] += static_cast<long double>(a(i, j)) * x[static_cast<std::size_t>(j)];
        long double t = 0;
        for (auto e : y) t += e;
        for (int i = 0; i < d; ++i) x[static_cast<std::size_t>(i)] = y[static_cast<std::size_t>(i)] / t;
    }
    return x;
}

}  // namespace detail

inline SpectralData spectral_data(const IntegerMatrix& m) {
    if (!m.is_primitive()) throw Error("matrix is not primitive");
    SpectralData sd;
    sd.eigenvalues = eigenvalues(m);
    sd.det = m.det();
    for (auto e : sd.eigenvalues) sd.moduli.push_back(std::abs(e));
    sd.lambda = sd.eigenvalues.front().real();
    if (std::fabs(sd.eigenvalues.front().imag()) > 1e-12 || sd.lambda <= 0) throw NumericalError("Perron-Frobenius eigenvalue not found");
    if (sd.moduli.size() > 1 && sd.moduli[1] > sd.lambda * (1 - 1e-9))
        sd.warnings.push_back("near-degenerate spectrum: subdominant modulus close to the PF eigenvalue");
    Eigen::MatrixXd a = m.to_eigen();
    sd.right = detail::pf_vector(a, sd.lambda);
    auto l = detail::pf_vector(a.transpose(), sd.lambda);
    long double mn = *std::min_element(l.begin(), l.end());
    for (auto& x : l) x /= mn;
    sd.left = l;
    return sd;
}

/// Lyapunov spectrum {log|μ|}, descending, duplicates collapsed; log 0 = −∞.
inline std::vector<long double> lyapunov_spectrum(const IntegerMatrix& m) {
    std::vector<long double> out;
    for (auto e : eigenvalues(m)) {
        long double mod = std::abs(e);
        long double v = mod == 0 ? -std::numeric_limits<long double>::infinity() : std::log(mod);
        bool dup = false;
        for (auto o : out)
            if (o == v || std::fabs(o - v) < 1e-9) dup = true;
        if (!dup) out.push_back(v);
    }
    std::sort(out.begin(), out.end(), std::greater<>());
    return out;
}

}  // namespace diffscale
