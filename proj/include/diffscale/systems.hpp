#pragma once

/**
 * @file systems.hpp
 * @brief Named systems: Z(k) producers for scans and the catalogue-wide
 *        comparison of measured against predicted exponents.
 */

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "diffscale/cutproject.hpp"
#include "diffscale/numbertheory.hpp"
#include "diffscale/renorm.hpp"
#include "diffscale/riesz.hpp"
#include "diffscale/scaling.hpp"
#include "diffscale/stochastic.hpp"
#include "diffscale/substitution.hpp"

namespace diffscale {

struct SystemInfo {
    std::string name;
    std::string kind;  ///< substitution | model-set | stochastic | riesz | number-theory
    std::string summary;
};

/// Every system reachable from the command line.
inline std::vector<SystemInfo> system_catalogue() {
    return {
        {"fibonacci", "substitution", "a->ab, b->a; tiles tau and 1; pure point, Z ~ k^4"},
        {"noble", "substitution", "a->a^p b, b->a (--p); pure point, Z ~ k^4"},
        {"period-doubling", "substitution", "a->ab, b->aa; Z ~ k^2"},
        {"limit-quasiperiodic", "substitution", "a->aab, b->abab; Z ~ k^2.8727"},
        {"kolakoski-3-1", "substitution", "a->abc, b->ab, c->b; Z ~ k^3"},
        {"plastic", "substitution", "a->b, b->c, c->ab; Z ~ k^3"},
        {"thue-morse", "substitution", "a->ab, b->ba with weights +-1; faster than any power"},
        {"gtm", "substitution", "a->a^p b^q, b->b^p a^q (--p, --q); Z ~ k^(2-2log|p-q|/log(p+q))"},
        {"rudin-shapiro", "substitution", "four-letter chain with weights +-1; Z = k (--p flips signs)"},
        {"fibonacci-model-set", "model-set", "golden cut and project set, window (-1, tau-1]"},
        {"noble-model-set", "model-set", "noble-mean cut and project set, window (-1, theta-p] (--p)"},
        {"generic-window", "model-set", "golden scheme with window length --s; Z = O(k^2) only"},
        {"tm", "riesz", "Thue-Morse distribution function F at k = 2^-n"},
        {"squarefree", "number-theory", "square-free integers; log Z ~ (3/2) log k (--S)"},
        {"poisson", "stochastic", "unit-density Poisson process; Z = k"},
        {"bernoulli", "stochastic", "Bernoulli lattice gas (--p, --weights 01|pm)"},
        {"markov", "stochastic", "Markov lattice gas (--p, --q)"},
        {"rmt", "stochastic", "random matrix ensembles (--beta 1|2|4); densities only"},
        {"random-tiling", "stochastic", "binary random tiling (--u, --v, --p)"},
    };
}

inline std::string catalogue_list() {
    std::string s;
    for (const auto& x : system_catalogue()) s += (s.empty() ? "" : ", ") + x.name;
    return s;
}

inline const SystemInfo& find_system(const std::string& name) {
    for (const auto& x : system_catalogue())
        if (x.name == name) return x;
    throw Error("unknown system '" + name + "'; catalogue: " + catalogue_list());
}

/// Parameters shared by the producers.
struct SystemParams {
    std::string system = "fibonacci";
    int p = 1, q = 1;
    double prob = 0.5;  ///< bernoulli / random tiling / rudin-shapiro flip probability
    double q_prob = 0.5;  ///< markov q
    double u = 1, v = 2;
    int beta = 2;
    std::string weights = "01";
    double s = 0;  ///< window length; 0 selects the natural window
    double kstar_cut = 50;
    std::size_t S = 8192;
    int extra = 0;  ///< Riesz refinement levels beyond the scale; 0 selects the default
};

/// Smallest e with b^e ≥ 4096 refinement points per scale.
inline int default_scale_extra(int b) {
    int e = 1;
    long double v = b;
    while (v < 4096) v *= b, ++e;
    return e;
}

inline StochasticModel stochastic_model(const SystemParams& sp) {
    const auto& n = sp.system;
    if (n == "poisson") return StochasticModel::poisson();
    if (n == "bernoulli") {
        if (sp.weights != "01" && sp.weights != "pm") throw Error("--weights must be 01 or pm");
        return StochasticModel::bernoulli(sp.prob, sp.weights == "01" ? Weighting::zero_one : Weighting::plus_minus);
    }
    if (n == "markov") return StochasticModel::markov(sp.prob, sp.q_prob);
    if (n == "rmt") return StochasticModel::rmt(sp.beta);
    if (n == "random-tiling") return StochasticModel::random_tiling(sp.u, sp.v, sp.prob);
    if (n == "rudin-shapiro") return StochasticModel::rudin_shapiro(sp.prob);
    throw Error("'" + n + "' is not a stochastic system");
}

/// Cut and project scheme plus window length for the pure-point systems.
inline std::pair<CutProjectScheme, WindowLength> pure_point_setup(const SystemParams& sp) {
    const auto& n = sp.system;
    if (n == "fibonacci" || n == "fibonacci-model-set") {
        auto cps = CutProjectScheme::golden();
        if (sp.s > 0) return {cps, WindowLength(static_cast<long double>(sp.s))};
        return {cps, WindowLength(AlgebraicNumber(0, 1))};
    }
    if (n == "noble" || n == "noble-model-set") {
        auto cps = CutProjectScheme::noble(sp.p);
        if (sp.s > 0) return {cps, WindowLength(static_cast<long double>(sp.s))};
        return {cps, WindowLength(AlgebraicNumber(1 - sp.p, 1, cps.order))};
    }
    if (n == "generic-window") {
        if (!(sp.s > 0)) throw Error("generic-window requires --s > 0");
        return {CutProjectScheme::golden(), WindowLength(static_cast<long double>(sp.s))};
    }
    throw Error("'" + n + "' has no cut and project description");
}

/// Natural scan ratio of a system.
inline long double natural_ratio(const SystemParams& sp) {
    const auto& n = sp.system;
    if (n == "fibonacci" || n == "fibonacci-model-set" || n == "generic-window") return QuadraticOrder::golden().theta();
    if (n == "noble" || n == "noble-model-set") return QuadraticOrder::noble(sp.p).theta();
    if (n == "tm") return 2;
    if (n == "gtm") return sp.p + sp.q;
    if (n == "squarefree") return std::pow(10.0L, 3.0L / 11);
    return 2;
}

/// log F(b^{−n}) for TM / gTM; k must be an exact power of 1/b.
inline long double riesz_log_value(int p, int q, long double k, int extra) {
    const int b = p + q;
    const long double nf = -std::log(k) / std::log(static_cast<long double>(b));
    const long n = std::lround(nf);
    if (n < 0 || std::fabs(nf - static_cast<long double>(n)) > 1e-9L)
        throw Error("Riesz scans need k = " + std::to_string(b) + "^-n");
    return log_F_at_scale(p, q, static_cast<int>(n), extra > 0 ? extra : default_scale_extra(b));
}

/// log Z(k) producer for a named system.
inline LogProducer z_producer(const SystemParams& sp) {
    const auto& info = find_system(sp.system);
    const auto& n = sp.system;
    if (n == "fibonacci" || n == "noble" || info.kind == "model-set") {
        auto [cps, s] = pure_point_setup(sp);
        const long double cut = sp.kstar_cut;
        return [cps, s, cut](long double k) { return std::log(z_pure_point(cps, s, k, cut).value); };
    }
    if (n == "tm" || n == "thue-morse") return [sp](long double k) { return riesz_log_value(1, 1, k, sp.extra); };
    if (n == "gtm") return [sp](long double k) { return riesz_log_value(sp.p, sp.q, k, sp.extra); };
    if (n == "squarefree") {
        auto g = std::make_shared<SquarefreeGenerators>(sp.S);
        return [g](long double k) { return std::log(g->z(k)); };
    }
    if (info.kind == "stochastic" || n == "rudin-shapiro") {
        auto m = stochastic_model(sp);
        return [m](long double k) { return std::log(z_analytic(m, k)); };
    }
    throw Error("no Z(k) producer for '" + n + "'; use lyapunov for the cocycle systems");
}

/// Ten fixed pseudo-random k in [0.05, 0.5].
inline std::vector<long double> random_cocycle_ks(std::uint64_t seed = 2024, int count = 10) {
    CounterRng rng(seed, 0);
    std::vector<long double> ks;
    for (int i = 0; i < count; ++i) ks.push_back(0.05L + 0.45L * static_cast<long double>(rng.uniform()));
    return ks;
}

inline long double median(std::vector<long double> v) {
    if (v.empty()) throw Error("median of empty set");
    std::sort(v.begin(), v.end());
    const auto m = v.size() / 2;
    return v.size() % 2 ? v[m] : (v[m - 1] + v[m]) / 2;
}

/// Median cocycle-measured Z exponent over the fixed random k.
inline long double cocycle_measured_exponent(const SubstitutionRule& rule, int depth) {
    FourierMatrix b(rule);
    std::vector<long double> e;
    for (auto k : random_cocycle_ks()) e.push_back(measured_z_exponent(b, k, depth));
    return median(e);
}

/// Catalogue entries selectable for the report.
inline std::vector<std::string> report_catalogue() {
    return {"fibonacci", "noble-2", "noble-3", "generic-window", "period-doubling", "limit-quasiperiodic", "kolakoski-3-1", "plastic",
            "thue-morse", "gtm-2-1", "gtm-3-1", "gtm-4-1", "gtm-5-1", "gtm-3-2", "rudin-shapiro", "squarefree", "poisson",
            "bernoulli", "markov", "rmt-1", "rmt-2", "rmt-4", "random-tiling"};
}

inline ReportRow pure_point_row(const std::string& label, SystemParams sp, long double tol) {
    const long double ratio = natural_ratio(sp);
    auto s = scan(label, z_producer(sp), 0.4L, ratio, 10);
    auto f = fit_power(s, 4.0L, tol);
    return {label, "z-scan", f.exponent, 4.0L, tol, f.spread, f.pass && f.bounded_ratio, ""};
}

inline ReportRow cocycle_row(const std::string& name, int depth, long double tol) {
    auto rule = catalogue(name);
    auto pred = predict_exponent(rule);
    long double m = cocycle_measured_exponent(rule, depth);
    return {name, "cocycle", m, pred.predicted, tol, 0, std::fabs(m - pred.predicted) <= tol, pred.derivation};
}

inline ReportRow gtm_row(int p, int q) {
    const std::string label = "gtm-" + std::to_string(p) + "-" + std::to_string(q);
    const int b = p + q;
    SystemParams sp;
    sp.system = "gtm";
    sp.p = p;
    sp.q = q;
    auto s = scan(label, z_producer(sp), std::pow(static_cast<long double>(b), -4.0L), b, 9);
    const long double want = gtm_exponent(p, q).exponent;
    auto f = fit_power(s, want, 0.05L * want, 0);
    return {label, "riesz-scan", f.exponent, want, f.tol, f.spread, f.pass, ""};
}

inline ReportRow analytic_row(const std::string& label, SystemParams sp, long double predicted) {
    auto s = scan(label, z_producer(sp), 0.01L, 2, 8);
    auto f = fit_power(s, predicted, 0.05L, 0);
    return {label, "analytic", f.exponent, predicted, 0.05L, f.spread, f.pass, ""};
}

/// One report row per requested catalogue entry.
inline ScalingReport catalogue_report(const std::vector<std::string>& selection) {
    if (selection.empty()) throw Error("empty catalogue selection");
    ScalingReport r;
    for (const auto& name : selection) {
        SystemParams sp;
        if (name == "fibonacci") {
            r.add(pure_point_row(name, sp, 0.1L));
        } else if (name == "noble-2" || name == "noble-3") {
            sp.system = "noble";
            sp.p = name.back() - '0';
            r.add(pure_point_row(name, sp, 0.15L));
        } else if (name == "generic-window") {
            sp.system = name;
            sp.s = 1.5;
            auto s = scan(name, z_producer(sp), 0.4L, natural_ratio(sp), 10);
            auto f = fit_power(s);
            r.add({name + " (s=3/2)", "z-scan", f.exponent, 2.0L, 0.1L, f.spread, f.exponent >= 2 - 0.1L, "upper-bound-only"});
        } else if (name == "period-doubling" || name == "kolakoski-3-1") {
            r.add(cocycle_row(name, 40, 0.1L));
        } else if (name == "limit-quasiperiodic") {
            r.add(cocycle_row(name, 50, 0.1L));
        } else if (name == "plastic") {
            r.add(cocycle_row(name, 120, 0.2L));
        } else if (name == "thue-morse") {
            sp.system = "tm";
            auto s = scan(name, z_producer(sp), 1.0L / 16, 2, 11);
            auto f = fit_log_quadratic(s);
            const long double want = -1 / std::log(2.0L);
            r.add({name, "log-quadratic A", f.A, want, 0.05L, f.residual, std::fabs(f.A - want) <= 0.05L, "det(M) = 0: no power law"});
        } else if (name.rfind("gtm-", 0) == 0) {
            int p = name[4] - '0', q = name[6] - '0';
            r.add(gtm_row(p, q));
        } else if (name == "rudin-shapiro") {
            auto real = sample(StochasticModel::rudin_shapiro(0), 32768, 1);
            std::vector<long double> ks;
            for (int l = 0; l < 6; ++l) ks.push_back(0.4L * std::pow(2.0L, -l));
            auto curve = empirical_Z_curve(real, ks);
            auto s = scan(name, [&](long double k) {
                for (const auto& c : curve)
                    if (c.k == k) return std::log(c.value);
                throw Error("k not on the empirical grid");
            }, 0.4L, 2, 6);
            auto f = fit_power(s, 1.0L, 0.1L, 0);
            r.add({name, "periodogram", f.exponent, 1.0L, 0.1L, f.spread, f.pass, "empirical, R = 2^15"});
        } else if (name == "squarefree") {
            auto pts = r_diagnostic({1e-3L}, 8192);
            r.add({name, "R(1e-3)", pts[0].r, 1.5L, 0.25L, 0, pts[0].r >= 1.5L && pts[0].r - 1.5L < 0.25L, "S = 2^13, upper-biased"});
        } else if (name == "poisson" || name == "bernoulli" || name == "markov" || name == "random-tiling") {
            sp.system = name;
            if (name == "markov") sp.prob = sp.q_prob = 0.25;
            r.add(analytic_row(name, sp, 1));
        } else if (name.rfind("rmt-", 0) == 0) {
            sp.system = "rmt";
            sp.beta = name[4] - '0';
            r.add(analytic_row(name, sp, 2));
        } else {
            std::string all;
            for (const auto& n : report_catalogue()) all += (all.empty() ? "" : ", ") + n;
            throw Error("unknown catalogue entry '" + name + "'; available: " + all);
        }
    }
    return r;
}

}  // namespace diffscale
