#pragma once

/**
 * @file renorm.hpp
 * @brief Fibonacci pair-correlation renormalisation, Fourier matrices of
 *        inflation rules, cocycle Lyapunov exponents and exponent predictions.
 */

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "diffscale/algebra.hpp"
#include "diffscale/core.hpp"
#include "diffscale/substitution.hpp"

namespace diffscale {

/// ν_ij(z) for the Fibonacci tiling, letters 0 = a, 1 = b, z ∈ Z[τ].
class PairCorrelationTable {
   public:
    using Key = std::tuple<int, int, i128, i128>;

    explicit PairCorrelationTable(long double radius = 0) : radius_(radius) {}

    long double radius() const { return radius_; }
    long double operator()(int i, int j, const AlgebraicNumber& z) const {
        auto it = v_.find({i, j, z.a(), z.b()});
        return it == v_.end() ? 0 : it->second;
    }
    /// η(z)/dens = Σ_ij ν_ij(z).
    long double eta_over_density(const AlgebraicNumber& z) const {
        long double s = 0;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) s += (*this)(i, j, z);
        return s;
    }
    void add(int i, int j, const AlgebraicNumber& z, long double v) {
        if (std::fabs(z.value()) > radius_ || v == 0) return;
        v_[{i, j, z.a(), z.b()}] += v;
    }
    const std::map<Key, long double>& entries() const { return v_; }
    std::size_t size() const { return v_.size(); }

    long double sup_distance(const PairCorrelationTable& o) const {
        long double d = 0;
        for (const auto& [k, v] : v_) {
            auto it = o.v_.find(k);
            d = std::max(d, std::fabs(v - (it == o.v_.end() ? 0 : it->second)));
        }
        for (const auto& [k, v] : o.v_)
            if (!v_.count(k)) d = std::max(d, std::fabs(v));
        return d;
    }

   private:
    long double radius_;
    std::map<Key, long double> v_;
};

/**
 * One application of the four Fibonacci equations, written in push form:
 * an entry ν_ij(w) feeds ν_aa(τw); ν_aa(w) also feeds ν_ab(τ(w+1)),
 * ν_ba(τ(w−1)) and ν_bb(τw); ν_ba(w) feeds ν_ab(τ(w+1)); ν_ab(w) feeds
 * ν_ba(τ(w−1)). Every contribution carries the factor 1/τ.
 */
inline PairCorrelationTable renorm_step(const PairCorrelationTable& t) {
    const long double inv_tau = 1 / QuadraticOrder::golden().theta();
    PairCorrelationTable out(t.radius());
    const AlgebraicNumber one(1, 0);
    for (const auto& [key, v] : t.entries()) {
        auto [i, j, a, b] = key;
        AlgebraicNumber w(a, b);
        const long double c = v * inv_tau;
        out.add(0, 0, w.mul_theta(), c);
        if (i == 0 && j == 0) {
            out.add(0, 1, (w + one).mul_theta(), c);
            out.add(1, 0, (w - one).mul_theta(), c);
            out.add(1, 1, w.mul_theta(), c);
        } else if (i == 1 && j == 0) {
            out.add(0, 1, (w + one).mul_theta(), c);
        } else if (i == 0 && j == 1) {
            out.add(1, 0, (w - one).mul_theta(), c);
        }
    }
    return out;
}

/// Fixed point of renorm_step with ν_aa(0) = seed_freq (and ν_bb(0) = seed_freq/τ).
inline PairCorrelationTable solve_pair_correlations(long double seed_freq, long double radius, int max_iter = 200,
                                                    long double tol = 1e-12L) {
    if (!(seed_freq > 0 && seed_freq < 1)) throw Error("seed frequency must lie in (0, 1)");
    if (!(tol > 0)) throw Error("tolerance must be positive");
    const long double tau = QuadraticOrder::golden().theta();
    if (radius < tau * tau) throw Error("radius must be at least τ²");
    PairCorrelationTable t(radius);
    t.add(0, 0, AlgebraicNumber(0, 0), seed_freq);
    t.add(1, 1, AlgebraicNumber(0, 0), seed_freq / tau);
    for (int it = 0; it < max_iter; ++it) {
        auto next = renorm_step(t);
        long double d = next.sup_distance(t);
        t = std::move(next);
        if (d < tol) return t;
    }
    throw NumericalError("pair-correlation renormalisation did not converge within " + std::to_string(max_iter) + " iterations");
}

/// Displacement sets T_ij: offsets of letter i inside the inflated tile j.
inline std::vector<std::vector<std::vector<long double>>> displacement_sets(const SubstitutionRule& rule,
                                                                            const std::vector<long double>& lengths) {
    const int d = rule.size();
    std::vector<std::vector<std::vector<long double>>> t(static_cast<std::size_t>(d),
                                                         std::vector<std::vector<long double>>(static_cast<std::size_t>(d)));
    for (int j = 0; j < d; ++j) {
        long double off = 0;
        for (int i : rule.image(j)) {
            t[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].push_back(off);
            off += lengths.at(static_cast<std::size_t>(i));
        }
    }
    return t;
}

using ComplexMatrix = Eigen::Matrix<std::complex<long double>, Eigen::Dynamic, Eigen::Dynamic>;
using ComplexVector = Eigen::Matrix<std::complex<long double>, Eigen::Dynamic, 1>;

/// B(k) with natural tile lengths fixed at construction.
class FourierMatrix {
   public:
    explicit FourierMatrix(const SubstitutionRule& rule)
        : FourierMatrix(rule, natural_lengths(rule), spectral_data(rule.matrix()).lambda) {}
    FourierMatrix(const SubstitutionRule& rule, std::vector<long double> lengths, long double lambda)
        : d_(rule.size()), lambda_(lambda), lengths_(std::move(lengths)), t_(displacement_sets(rule, lengths_)) {}

    int dim() const { return d_; }
    long double lambda() const { return lambda_; }
    const std::vector<long double>& lengths() const { return lengths_; }
    const std::vector<long double>& offsets(int i, int j) const {
        return t_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }

    ComplexMatrix operator()(long double k) const {
        ComplexMatrix b(d_, d_);
        for (int i = 0; i < d_; ++i)
            for (int j = 0; j < d_; ++j) {
                std::complex<long double> s = 0;
                for (long double t : offsets(i, j)) {
                    long double ph = 2 * kPi * k * t;
                    s += std::complex<long double>(std::cos(ph), std::sin(ph));
                }
                b(i, j) = s;
            }
        return b;
    }

   private:
    int d_;
    long double lambda_;
    std::vector<long double> lengths_;
    std::vector<std::vector<std::vector<long double>>> t_;
};

inline ComplexMatrix fourier_matrix(const SubstitutionRule& rule, long double k) { return FourierMatrix(rule)(k); }

/// (1/n) log ‖B(λ^{−n}k)⋯B(λ^{−1}k) v‖ with per-step renormalisation.
inline long double cocycle_exponent(const FourierMatrix& b, long double k, int n, const ComplexVector& v) {
    if (!(k > 0)) throw Error("cocycle requires k > 0");
    if (n < 1) throw Error("cocycle depth must be >= 1");
    if (v.norm() == 0) throw Error("cocycle start vector must be non-zero");
    ComplexVector x = v / v.norm();
    long double acc = 0;
    long double kk = k;
    for (int j = 1; j <= n; ++j) {
        kk /= b.lambda();
        x = b(kk) * x;
        long double nrm = x.norm();
        if (nrm == 0) return -std::numeric_limits<long double>::infinity();
        acc += std::log(nrm);
        x /= nrm;
    }
    return acc / n;
}

inline long double cocycle_exponent(const SubstitutionRule& rule, long double k, int n, const std::vector<long double>& v) {
    FourierMatrix b(rule);
    ComplexVector x(b.dim());
    for (int i = 0; i < b.dim(); ++i) x(i) = v.at(static_cast<std::size_t>(i));
    return cocycle_exponent(b, k, n, x);
}

/// Full Lyapunov spectrum of the cocycle at k by repeated QR, descending.
inline std::vector<long double> cocycle_spectrum(const FourierMatrix& b, long double k, int n) {
    if (!(k > 0)) throw Error("cocycle requires k > 0");
    if (n < 1) throw Error("cocycle depth must be >= 1");
    const int d = b.dim();
    ComplexMatrix q = ComplexMatrix::Identity(d, d);
    std::vector<long double> sum(static_cast<std::size_t>(d), 0);
    long double kk = k;
    for (int j = 1; j <= n; ++j) {
        kk /= b.lambda();
        ComplexMatrix y = b(kk) * q;
        Eigen::HouseholderQR<ComplexMatrix> qr(y);
        ComplexMatrix r = qr.matrixQR().template triangularView<Eigen::Upper>();
        q = qr.householderQ() * ComplexMatrix::Identity(d, d);
        for (int i = 0; i < d; ++i) {
            long double rii = std::abs(r(i, i));
            sum[static_cast<std::size_t>(i)] += rii > 0 ? std::log(rii) : -std::numeric_limits<long double>::infinity();
        }
    }
    for (auto& s : sum) s /= n;
    std::sort(sum.begin(), sum.end(), std::greater<>());
    return sum;
}

/// Measured Z exponent 2(log λ − χ₂)/log λ from the second cocycle exponent.
inline long double measured_z_exponent(const FourierMatrix& b, long double k, int n) {
    auto s = cocycle_spectrum(b, k, n);
    if (s.size() < 2) throw Error("need at least two letters");
    const long double ll = std::log(b.lambda());
    return 2 * (ll - s[1]) / ll;
}

/// Per-step log-intensity change 2(χ₂ − log λ) of the amplitude-shifted cocycle.
inline long double amplitude_intensity_exponent(const FourierMatrix& b, long double k, int n) {
    auto s = cocycle_spectrum(b, k, n);
    if (s.size() < 2) throw Error("need at least two letters");
    return 2 * (s[1] - std::log(b.lambda()));
}

/// σ_L(M) shifted by −log λ.
inline std::vector<long double> shifted_lyapunov_spectrum(const SubstitutionRule& rule) {
    auto sd = spectral_data(rule.matrix());
    auto s = lyapunov_spectrum(rule.matrix());
    for (auto& x : s) x -= std::log(sd.lambda);
    return s;
}

struct ExponentPrediction {
    std::string rule;
    long double lambda = 0;
    i128 det = 0;
    std::vector<long double> lyapunov;
    long double alpha_tilde = 0;
    long double predicted = 0;  ///< Z(k) ~ k^predicted, predicted = 2α̃
    std::string derivation;     ///< "binary-det" or "subleading-eigenvalue"
    bool exceptional = false;   ///< det = 0 in the binary case
    std::vector<long double> candidates;  ///< 2α̃ for every subdominant eigenvalue modulus (d ≥ 3)
    std::string note;
};

inline ExponentPrediction predict_exponent(const SubstitutionRule& rule) {
    auto m = rule.matrix();
    auto sd = spectral_data(m);
    ExponentPrediction p;
    p.rule = rule.name();
    p.lambda = sd.lambda;
    p.det = sd.det;
    p.lyapunov = lyapunov_spectrum(m);
    const long double ll = std::log(sd.lambda);
    if (rule.size() == 2) {
        p.derivation = "binary-det";
        if (sd.det == 0) {
            p.exceptional = true;
            p.alpha_tilde = std::numeric_limits<long double>::infinity();
            p.predicted = std::numeric_limits<long double>::infinity();
            p.note = "det(M) = 0: exceptional case, no power law from the formula";
            return p;
        }
        p.alpha_tilde = 2 - std::log(std::fabs(static_cast<long double>(sd.det))) / ll;
        p.predicted = 2 * p.alpha_tilde;
        return p;
    }
    p.derivation = "subleading-eigenvalue";
    p.note = "assumes the largest subdominant modulus dominates";
    std::vector<long double> mods;
    for (std::size_t i = 1; i < sd.moduli.size(); ++i) {
        long double mod = sd.moduli[i];
        bool dup = false;
        for (auto x : mods)
            if (std::fabs(x - mod) < 1e-12L) dup = true;
        if (!dup) mods.push_back(mod);
    }
    for (auto mod : mods) p.candidates.push_back(mod > 0 ? 2 * (1 - std::log(mod) / ll) : std::numeric_limits<long double>::infinity());
    if (mods.empty() || mods.front() == 0) {
        p.exceptional = true;
        p.alpha_tilde = p.predicted = std::numeric_limits<long double>::infinity();
        return p;
    }
    p.alpha_tilde = 1 - std::log(mods.front()) / ll;
    p.predicted = 2 * p.alpha_tilde;
    return p;
}

}  // namespace diffscale
