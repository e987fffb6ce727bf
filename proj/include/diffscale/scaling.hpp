#pragma once

/**
 * @file scaling.hpp
 * @brief Geometric scans of Z(k) and power-law / log-quadratic fits in log-space.
 */

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "diffscale/core.hpp"

namespace diffscale {

/// Producer of log Z(k); log-space keeps super-polynomially small values representable.
using LogProducer = std::function<long double(long double)>;

/// Wraps a producer of Z(k) as a producer of log Z(k).
inline LogProducer from_linear(std::function<long double(long double)> z) {
    return [z = std::move(z)](long double k) { return std::log(z(k)); };
}

struct ScanSample {
    int level = 0;
    long double k = 0;
    long double log_z = 0;
    long double z() const { return std::exp(log_z); }
};

struct ScanResult {
    std::string producer;
    long double ratio = 0;
    long double k0 = 0;
    int depth = 0;
    std::vector<ScanSample> samples;

    /// Z non-increasing along the scan.
    bool monotone() const {
        for (std::size_t i = 1; i < samples.size(); ++i)
            if (samples[i].log_z > samples[i - 1].log_z) return false;
        return true;
    }
};

/// Samples k_ℓ = k₀ λ^{−ℓ} for ℓ = 0..L−1; a failing producer is rethrown with its k.
inline ScanResult scan(const std::string& name, const LogProducer& producer, long double k0, long double ratio, int depth) {
    if (!(ratio > 1)) throw Error("scan ratio must exceed 1");
    if (depth < 3) throw Error("scan depth must be >= 3");
    if (!(k0 > 0)) throw Error("scan anchor must be positive");
    ScanResult r{name, ratio, k0, depth, {}};
    for (int l = 0; l < depth; ++l) {
        long double k = k0 * std::pow(ratio, -static_cast<long double>(l));
        long double lz;
        try {
            lz = producer(k);
        } catch (const NumericalError& e) {
            throw NumericalError(name + " failed at k = " + std::to_string(static_cast<double>(k)) + ": " + e.what());
        } catch (const Error& e) {
            throw Error(name + " failed at k = " + std::to_string(static_cast<double>(k)) + ": " + e.what());
        }
        r.samples.push_back({l, k, lz});
    }
    return r;
}

inline constexpr int kDefaultDrop = 2;

struct PowerFit {
    long double exponent = 0;
    long double log_prefactor = 0;
    long double max_residual = 0;
    long double spread = 0;  ///< max − min of log(Z k^{−e}), e = predicted if given
    std::size_t used = 0;
    std::optional<long double> predicted;
    long double tol = 0;
    bool pass = true;             ///< |exponent − predicted| ≤ tol
    bool bounded_ratio = true;    ///< spread < log 10
};

/// Least-squares line through (log k, log Z) after dropping the first `drop` samples.
inline PowerFit fit_power(const ScanResult& s, std::optional<long double> predicted = std::nullopt, long double tol = 0.1L,
                          int drop = kDefaultDrop) {
    std::vector<std::pair<long double, long double>> pts;
    for (const auto& x : s.samples) {
        if (x.level < drop) continue;
        if (!std::isfinite(x.log_z)) throw Error("fit_power requires positive samples");
        pts.emplace_back(std::log(x.k), x.log_z);
    }
    if (pts.size() < 4) throw Error("fit_power requires at least 4 samples");
    const auto n = static_cast<long double>(pts.size());
    long double mx = 0, my = 0;
    for (auto [x, y] : pts) mx += x, my += y;
    mx /= n, my /= n;
    long double sxx = 0, sxy = 0;
    for (auto [x, y] : pts) sxx += (x - mx) * (x - mx), sxy += (x - mx) * (y - my);
    if (sxx <= 0) throw Error("degenerate scan");
    PowerFit f;
    f.exponent = sxy / sxx;
    f.log_prefactor = my - f.exponent * mx;
    f.used = pts.size();
    f.predicted = predicted;
    f.tol = tol;
    const long double e = predicted.value_or(f.exponent);
    long double lo = INFINITY, hi = -INFINITY;
    for (auto [x, y] : pts) {
        f.max_residual = std::max(f.max_residual, std::fabs(y - f.log_prefactor - f.exponent * x));
        lo = std::min(lo, y - e * x);
        hi = std::max(hi, y - e * x);
    }
    f.spread = hi - lo;
    f.bounded_ratio = f.spread < std::log(10.0L);
    if (predicted) f.pass = std::fabs(f.exponent - *predicted) <= tol;
    return f;
}

struct LogQuadraticFit {
    long double A = 0, B = 0, C = 0;
    long double residual = 0;  ///< max |log Z − fit|
    std::size_t used = 0;
};

/// log Z = A (log k)² + B log k + C by least squares.
inline LogQuadraticFit fit_log_quadratic(const ScanResult& s, int drop = 0) {
    std::vector<std::pair<long double, long double>> pts;
    for (const auto& x : s.samples)
        if (x.level >= drop) {
            if (!std::isfinite(x.log_z)) throw Error("fit_log_quadratic requires positive samples");
            pts.emplace_back(std::log(x.k), x.log_z);
        }
    if (pts.size() < 5) throw Error("fit_log_quadratic requires at least 5 samples");
    using Mat = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
    using Vec = Eigen::Matrix<long double, Eigen::Dynamic, 1>;
    const auto n = static_cast<Eigen::Index>(pts.size());
    // centred abscissa keeps the normal equations well conditioned
    long double m = 0;
    for (auto [x, y] : pts) m += x;
    m /= static_cast<long double>(pts.size());
    Mat X(n, 3);
    Vec y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        long double u = pts[static_cast<std::size_t>(i)].first - m;
        X(i, 0) = u * u;
        X(i, 1) = u;
        X(i, 2) = 1;
        y(i) = pts[static_cast<std::size_t>(i)].second;
    }
    Eigen::ColPivHouseholderQR<Mat> qr(X);
    if (qr.rank() < 3) throw Error("degenerate design matrix");
    Vec c = qr.solve(y);
    LogQuadraticFit f;
    // expand a u² + b u + c with u = x − m
    f.A = c(0);
    f.B = c(1) - 2 * c(0) * m;
    f.C = c(2) - c(1) * m + c(0) * m * m;
    f.used = pts.size();
    Vec r = X * c - y;
    f.residual = r.cwiseAbs().maxCoeff();
    return f;
}

/// One comparison row of a scaling report.
struct ReportRow {
    std::string system;
    std::string method;
    long double measured = 0;
    std::optional<long double> predicted;
    long double tol = 0;
    long double spread = 0;
    bool pass = false;
    std::string note;
};

struct ScalingReport {
    std::vector<ReportRow> rows;

    void add(ReportRow r) { rows.push_back(std::move(r)); }

    /// Fixed-width table of measured vs predicted exponents.
    std::string table() const {
        if (rows.empty()) throw Error("empty report");
        std::ostringstream os;
        os.setf(std::ios::fixed);
        os.precision(4);
        os << "system                     method        measured  predicted  tol     spread  result\n";
        for (const auto& r : rows) {
            std::string sys = r.system;
            sys.resize(26, ' ');
            std::string meth = r.method;
            meth.resize(13, ' ');
            os << sys << " " << meth << " " << static_cast<double>(r.measured) << "    ";
            if (r.predicted)
                os << static_cast<double>(*r.predicted);
            else
                os << "  -   ";
            os << "    " << static_cast<double>(r.tol) << "  " << static_cast<double>(r.spread) << "  " << (r.pass ? "PASS" : "FAIL");
            if (!r.note.empty()) os << "  (" << r.note << ")";
            os << "\n";
        }
        return os.str();
    }
};

}  // namespace diffscale
