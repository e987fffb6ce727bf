/**
 * @file diffscale.cpp
 * @brief Command-line front end: patch generation, Z(k) scans, fits,
 *        Lyapunov spectra, Monte Carlo checks, Thue–Morse bounds and replay.
 */

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <map>

#include "diffscale/diffscale.hpp"

using namespace diffscale;

namespace {

/// Options shared by the subcommands; unset values keep their defaults.
struct Options {
    SystemParams sp;
    std::optional<double> p, q;
    std::string output = "-";
    std::string save_config;
    std::string format = "csv";
    double radius = 100;
    std::uint64_t seed = 1;
    double k0 = 0;
    std::string ratio = "natural";
    int depth = 10;
    double kmin = 1e-4, kmax = 1e-1;
    int points = 12;
    std::string input;
    std::string model = "power";
    double predicted = NAN;
    double tol = 0.1;
    int drop = -1;
    bool catalogue = false;
    std::vector<std::string> systems;
    std::vector<double> ks;
    double bin_width = 0;
    int n = 10;
    int n_max = 0;
    std::size_t fourier_terms = 0;
    std::string config;
};

std::string row_real(long double x) { return format_real(x); }

int integer_parameter(double x, const char* flag) {
    if (x != std::floor(x) || x < 0 || x > 1000) throw Error(std::string(flag) + " must be a non-negative integer here");
    return static_cast<int>(x);
}

/// Routes --p/--q to the integer or probability fields according to the system.
void resolve_parameters(Options& o) {
    const auto& n = o.sp.system;
    const bool probabilistic = n == "bernoulli" || n == "markov" || n == "random-tiling" || n == "rudin-shapiro";
    if (o.p) {
        if (probabilistic)
            o.sp.prob = *o.p;
        else
            o.sp.p = integer_parameter(*o.p, "--p");
    }
    if (o.q) {
        if (probabilistic)
            o.sp.q_prob = *o.q;
        else
            o.sp.q = integer_parameter(*o.q, "--q");
    }
}

void add_system_options(CLI::App* c, Options& o, bool required = true) {
    auto* s = c->add_option("--system", o.sp.system, "system name (see catalogue below)");
    if (required) s->required();
    c->add_option("--p", o.p, "integer p (noble, gtm) or probability p (bernoulli, markov, random-tiling, rudin-shapiro flips)");
    c->add_option("--q", o.q, "integer q (gtm) or markov probability q");
    c->add_option("--prob", o.sp.prob, "probability p; same as --p for the stochastic systems");
    c->add_option("--q-prob", o.sp.q_prob, "markov q; same as --q for markov");
    c->add_option("--u", o.sp.u, "random tiling length u");
    c->add_option("--v", o.sp.v, "random tiling length v");
    c->add_option("--beta", o.sp.beta, "random matrix ensemble parameter (1, 2, 4)");
    c->add_option("--weights", o.sp.weights, "bernoulli weights: 01 or pm");
    c->add_option("--s", o.sp.s, "window length (0 selects the natural window)");
    c->add_option("--kstar-cut", o.sp.kstar_cut, "internal-space cut |k*|·k for pure point sums");
    c->add_option("--S", o.sp.S, "number of square-free generators");
    c->add_option("--extra", o.sp.extra, "Riesz refinement levels beyond the scale (0: automatic)");
}

void add_output_options(CLI::App* c, Options& o) {
    c->add_option("--output,-o", o.output, "output file ('-' for stdout; relative paths honour DIFFSCALE_OUTPUT_DIR)");
    c->add_option("--save-config", o.save_config, "write the run configuration as JSON for replay");
}

// ---------------------------------------------------------------- generate

std::string cmd_generate(const Options& o) {
    const auto& info = find_system(o.sp.system);
    const auto& name = o.sp.system;
    const long double R = o.radius;
    if (!(R > 0)) throw Error("--radius must be positive");
    if (info.kind == "substitution" || name == "tm") {
        auto e = catalogue_entry(name == "tm" ? "thue-morse" : name, o.sp.p, o.sp.q);
        TypedPatch patch;
        for (int n = 1;; ++n) {
            auto w = fixed_point_word(e.rule, e.seed, n, e.power);
            patch = e.exact_lengths ? geometric_patch(w, *e.exact_lengths) : geometric_patch(w, natural_lengths(e.rule));
            if (patch.radius >= R) break;
        }
        patch = clip(patch, R);
        CsvTable t({"position", "type", "weight"});
        for (std::size_t i = 0; i < patch.size(); ++i) {
            int ty = patch.types[i];
            int w = e.weights.empty() ? 1 : e.weights[static_cast<std::size_t>(ty)];
            t.add_row({row_real(patch.positions[i]), SubstitutionRule::letter_name(ty), std::to_string(w)});
        }
        return t.str();
    }
    if (info.kind == "model-set") {
        auto [cps, s] = pure_point_setup(o.sp);
        Window w = name == "fibonacci-model-set" ? fibonacci_window()
                   : name == "noble-model-set"  ? noble_window(o.sp.p)
                                                : Window::real(-1, s.s - 1);
        auto patch = generate_model_set(cps, w, R);
        CsvTable t({"position", "type", "weight"});
        for (std::size_t i = 0; i < patch.size(); ++i)
            t.add_row({row_real(patch.positions[i]), SubstitutionRule::letter_name(patch.types[i]), "1"});
        return t.str();
    }
    if (name == "squarefree") {
        auto sv = sieve(static_cast<std::uint64_t>(std::max<long double>(2, std::floor(R))));
        CsvTable t({"position", "weight"});
        for (auto n = -static_cast<std::int64_t>(std::floor(R)); n <= static_cast<std::int64_t>(std::floor(R)); ++n)
            if (n != 0 && sv.is_squarefree(n)) t.add_row({std::to_string(n), "1"});
        return t.str();
    }
    auto real = sample(stochastic_model(o.sp), R, o.seed);
    CsvTable t({"position", "weight"});
    for (std::size_t i = 0; i < real.size(); ++i) t.add_row({row_real(real.positions[i]), row_real(real.weights[i])});
    return t.str();
}

// ---------------------------------------------------------------- zscan

long double parse_ratio(const Options& o) {
    if (o.ratio == "natural") return natural_ratio(o.sp);
    if (o.ratio == "golden") return QuadraticOrder::golden().theta();
    if (o.ratio == "silver") return QuadraticOrder::noble(2).theta();
    try {
        std::size_t pos = 0;
        long double v = std::stold(o.ratio, &pos);
        if (pos != o.ratio.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw Error("--ratio must be natural, golden, silver or a number > 1");
    }
}

std::string cmd_zscan(const Options& o) {
    const auto& info = find_system(o.sp.system);
    const auto& name = o.sp.system;
    if (name == "squarefree") {
        if (!(o.kmin > 0 && o.kmax < 1 && o.kmin < o.kmax)) throw Error("need 0 < kmin < kmax < 1");
        if (o.points < 2) throw Error("--points must be >= 2");
        std::vector<long double> ks;
        for (int i = 0; i < o.points; ++i)
            ks.push_back(std::exp(std::log(static_cast<long double>(o.kmax)) +
                                  (std::log(static_cast<long double>(o.kmin)) - std::log(static_cast<long double>(o.kmax))) * i / (o.points - 1)));
        CsvTable t({"k", "S", "Z", "R"});
        for (auto pt : r_diagnostic(ks, o.sp.S)) t.add_row({row_real(pt.k), std::to_string(o.sp.S), row_real(pt.z), row_real(pt.r)});
        return t.str();
    }
    const long double ratio = parse_ratio(o);
    if (!(ratio > 1)) throw Error("--ratio must exceed 1");
    if (o.depth < 3) throw Error("--depth must be >= 3");
    if (name == "tm" || name == "gtm") {
        const int p = name == "tm" ? 1 : o.sp.p, q = name == "tm" ? 1 : o.sp.q;
        const int b = p + q;
        const long double k0 = o.k0 > 0 ? o.k0 : 1.0L / b;
        auto s = scan(name, z_producer(o.sp), k0, b, o.depth);
        CsvTable t(name == "tm" ? std::vector<std::string>{"level", "n", "k", "log_k", "log_F", "log_lower", "log_upper"}
                                : std::vector<std::string>{"level", "n", "k", "log_k", "log_F"});
        for (const auto& x : s.samples) {
            const int n = static_cast<int>(std::lround(-std::log(x.k) / std::log(static_cast<long double>(b))));
            std::vector<std::string> row{std::to_string(x.level), std::to_string(n), row_real(x.k), row_real(std::log(x.k)), row_real(x.log_z)};
            if (name == "tm") {
                auto bd = tm_bounds(std::max(n, 1));
                row.push_back(row_real(bd.log_lower));
                row.push_back(row_real(bd.log_upper));
            }
            t.add_row(row);
        }
        return t.str();
    }
    const long double k0 = o.k0 > 0 ? o.k0 : 0.4L;
    if (info.kind == "stochastic" || name == "rudin-shapiro") {
        auto m = stochastic_model(o.sp);
        auto s = scan(name, z_producer(o.sp), k0, ratio, o.depth);
        CsvTable t({"k", "Z", "model"});
        for (const auto& x : s.samples) t.add_row({row_real(x.k), row_real(x.z()), m.name()});
        return t.str();
    }
    if (name == "fibonacci" || name == "noble" || info.kind == "model-set") {
        auto [cps, s] = pure_point_setup(o.sp);
        CsvTable t({"level", "k", "Z", "log_Z", "tail_bound", "shell_points"});
        for (int l = 0; l < o.depth; ++l) {
            long double k = k0 * std::pow(ratio, -static_cast<long double>(l));
            auto z = z_pure_point(cps, s, k, o.sp.kstar_cut);
            t.add_row({std::to_string(l), row_real(k), row_real(z.value), row_real(std::log(z.value)), row_real(z.tail_bound),
                       std::to_string(z.shell_points)});
        }
        return t.str();
    }
    throw Error("no Z(k) scan for '" + name + "'; use lyapunov or fit --catalogue for cocycle systems");
}

// ---------------------------------------------------------------- fit

Json row_json(const ReportRow& r) {
    Json j;
    j["system"] = r.system;
    j["method"] = r.method;
    j["measured"] = json_real(r.measured);
    j["predicted"] = r.predicted ? json_real(*r.predicted) : Json(nullptr);
    j["tolerance"] = json_real(r.tol);
    j["spread"] = json_real(r.spread);
    j["pass"] = r.pass;
    j["note"] = r.note;
    return j;
}

std::string cmd_fit(const Options& o) {
    if (o.catalogue || !o.systems.empty()) {
        auto sel = o.systems.empty() ? report_catalogue() : o.systems;
        auto rep = catalogue_report(sel);
        if (o.format == "table") return rep.table();
        Json j;
        j["report"] = "scaling";
        j["rows"] = Json::array();
        for (const auto& r : rep.rows) j["rows"].push_back(row_json(r));
        return j.dump(2) + "\n";
    }
    if (o.input.empty()) throw Error("fit needs --input FILE or --catalogue");
    auto d = read_csv(o.input);
    auto kc = d.column("k");
    if (!kc) throw Error(o.input + ": no 'k' column");
    std::optional<std::size_t> lc = d.column("log_Z");
    if (!lc) lc = d.column("log_F");
    auto zc = d.column("Z");
    if (!lc && !zc) throw Error(o.input + ": need a log_Z, log_F or Z column");
    ScanResult s;
    s.producer = o.input;
    int level = 0;
    for (const auto& row : d.rows) {
        long double lz = lc ? row[*lc] : std::log(row[*zc]);
        s.samples.push_back({level++, row[*kc], lz});
    }
    s.depth = level;
    Json j;
    j["input"] = o.input;
    j["model"] = o.model;
    if (o.model == "power") {
        std::optional<long double> pred;
        if (!std::isnan(o.predicted)) pred = o.predicted;
        auto f = fit_power(s, pred, o.tol, o.drop >= 0 ? o.drop : kDefaultDrop);
        j["exponent"] = json_real(f.exponent);
        j["log_prefactor"] = json_real(f.log_prefactor);
        j["max_residual"] = json_real(f.max_residual);
        j["spread"] = json_real(f.spread);
        j["samples_used"] = f.used;
        j["predicted"] = pred ? json_real(*pred) : Json(nullptr);
        j["tolerance"] = json_real(f.tol);
        j["pass"] = f.pass;
        j["bounded_ratio"] = f.bounded_ratio;
    } else if (o.model == "log-quadratic") {
        auto f = fit_log_quadratic(s, o.drop >= 0 ? o.drop : 0);
        j["A"] = json_real(f.A);
        j["B"] = json_real(f.B);
        j["C"] = json_real(f.C);
        j["max_residual"] = json_real(f.residual);
        j["samples_used"] = f.used;
    } else {
        throw Error("--model must be power or log-quadratic");
    }
    return j.dump(2) + "\n";
}

// ---------------------------------------------------------------- lyapunov

std::string cmd_lyapunov(const Options& o) {
    const auto& name = o.sp.system;
    auto e = catalogue_entry(name == "tm" ? "thue-morse" : name, o.sp.p, o.sp.q);
    auto m = e.rule.matrix();
    auto sd = spectral_data(m);
    auto pred = predict_exponent(e.rule);
    Json j;
    j["system"] = e.rule.name();
    Json mat = Json::array();
    for (int i = 0; i < m.dim(); ++i) {
        Json r = Json::array();
        for (int c = 0; c < m.dim(); ++c) r.push_back(static_cast<long long>(m(i, c)));
        mat.push_back(r);
    }
    j["matrix"] = mat;
    j["lambda"] = json_real(sd.lambda);
    j["det"] = static_cast<long long>(sd.det);
    Json mods = Json::array();
    for (auto x : sd.moduli) mods.push_back(json_real(x));
    j["eigenvalue_moduli"] = mods;
    Json ly = Json::array(), sh = Json::array();
    for (auto x : lyapunov_spectrum(m)) ly.push_back(json_real(x));
    for (auto x : shifted_lyapunov_spectrum(e.rule)) sh.push_back(json_real(x));
    j["lyapunov"] = ly;
    j["shifted_lyapunov"] = sh;
    Json pj;
    pj["alpha_tilde"] = json_real(pred.alpha_tilde);
    pj["z_exponent"] = json_real(pred.predicted);
    pj["derivation"] = pred.derivation;
    pj["exceptional"] = pred.exceptional;
    Json cand = Json::array();
    for (auto c : pred.candidates) cand.push_back(json_real(c));
    pj["candidates"] = cand;
    pj["note"] = pred.note;
    j["prediction"] = pj;
    if (!o.ks.empty()) {
        FourierMatrix b(e.rule);
        Json cj = Json::array();
        for (double k : o.ks) {
            Json c;
            c["k"] = k;
            Json spec = Json::array();
            for (auto x : cocycle_spectrum(b, k, o.depth)) spec.push_back(json_real(x));
            c["spectrum"] = spec;
            c["z_exponent"] = json_real(measured_z_exponent(b, k, o.depth));
            cj.push_back(c);
        }
        j["cocycle_depth"] = o.depth;
        j["cocycle"] = cj;
    }
    return j.dump(2) + "\n";
}

// ---------------------------------------------------------------- mc

std::string cmd_mc(const Options& o) {
    auto m = stochastic_model(o.sp);
    auto real = sample(m, o.radius, o.seed);
    std::vector<long double> ks;
    for (double k : (o.ks.empty() ? std::vector<double>{0.1, 0.2, 0.3} : o.ks)) ks.push_back(k);
    auto curve = empirical_Z_curve(real, ks, o.bin_width > 0 ? o.bin_width : default_bin_width(real.R));
    CsvTable t({"k", "Z_empirical", "standard_error", "Z_analytic", "z_score"});
    for (const auto& c : curve) {
        long double za = z_analytic(m, c.k);
        t.add_row({row_real(c.k), row_real(c.value), row_real(c.standard_error), row_real(za),
                   row_real(c.standard_error > 0 ? (c.value - za) / c.standard_error : 0)});
    }
    return t.str();
}

// ---------------------------------------------------------------- tm-bounds

std::string cmd_tm_bounds(const Options& o) {
    const int lo = o.n, hi = o.n_max > 0 ? o.n_max : o.n;
    if (lo < 1 || hi < lo) throw Error("need 1 <= n <= n-max");
    std::optional<TmFourierDistribution> F;
    if (o.fourier_terms > 0) F.emplace(o.fourier_terms);
    std::vector<std::string> header{"n", "k", "log_lower", "log_upper", "lower", "upper", "c_lower", "c_upper"};
    if (F) header.push_back("log_F_fourier");
    CsvTable t(header);
    for (int n = lo; n <= hi; ++n) {
        auto b = tm_bounds(n);
        auto c = tm_constants(n);
        std::vector<std::string> row{std::to_string(n), row_real(std::ldexp(1.0L, -n)), row_real(b.log_lower), row_real(b.log_upper),
                                     row_real(b.lower()), row_real(b.upper()), row_real(c.c_lower), row_real(c.c_upper)};
        if (F) row.push_back(row_real(std::log((*F)(std::ldexp(1.0L, -n)).value)));
        t.add_row(row);
    }
    return t.str();
}

// ---------------------------------------------------------------- driver

std::string system_help() {
    std::string s = "Catalogued systems:\n";
    for (const auto& x : system_catalogue()) {
        std::string n = x.name;
        n.resize(22, ' ');
        s += "  " + n + "[" + x.kind + "] " + x.summary + "\n";
    }
    s += "\nExit codes: 0 success, 2 usage or configuration error, 3 numerical failure.\n";
    return s;
}

Json config_json(CLI::App* sub) {
    Json j;
    j["command"] = sub->get_name();
    Json opts = Json::object();
    for (const auto* opt : sub->get_options()) {
        if (opt->count() == 0) continue;
        if (opt->get_lnames().empty()) continue;
        const auto& name = opt->get_lnames().front();
        if (name == "help" || name == "save-config") continue;
        auto res = opt->results();
        if (opt->get_expected_min() == 0)
            opts[name] = true;
        else if (res.size() == 1)
            opts[name] = res.front();
        else
            opts[name] = res;
    }
    j["options"] = opts;
    return j;
}

int run(std::vector<std::string> args, int depth);

int replay(const std::string& path, int depth) {
    if (depth > 0) throw Error("repro configurations cannot nest");
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    Json j;
    try {
        j = Json::parse(in);
    } catch (const std::exception& e) {
        throw Error(path + ": invalid JSON: " + e.what());
    }
    if (!j.contains("command") || !j["command"].is_string()) throw Error(path + ": missing 'command'");
    std::vector<std::string> args{"diffscale", j["command"].get<std::string>()};
    if (j.contains("options"))
        for (auto& [k, v] : j["options"].items()) {
            if (v.is_boolean()) {
                if (v.get<bool>()) args.push_back("--" + k);
            } else if (v.is_array()) {
                args.push_back("--" + k);
                for (auto& x : v) args.push_back(x.get<std::string>());
            } else {
                args.push_back("--" + k);
                args.push_back(v.is_string() ? v.get<std::string>() : v.dump());
            }
        }
    return run(args, depth + 1);
}

int run(std::vector<std::string> args, int depth) {
    Options o;
    CLI::App app{"diffscale: scaling of integrated diffraction intensities near k = 0"};
    app.footer(system_help());
    app.require_subcommand(1);

    auto* gen = app.add_subcommand("generate", "write a patch or realisation as CSV");
    add_system_options(gen, o);
    gen->add_option("--radius", o.radius, "half-width R of the patch");
    gen->add_option("--seed", o.seed, "random seed for stochastic systems");
    add_output_options(gen, o);

    auto* zs = app.add_subcommand("zscan", "scan Z(k) along a geometric sequence");
    add_system_options(zs, o);
    zs->add_option("--k0", o.k0, "anchor k0 (0: system default)");
    zs->add_option("--ratio", o.ratio, "scan ratio: natural, golden, silver or a number");
    zs->add_option("--depth", o.depth, "number of samples");
    zs->add_option("--kmin", o.kmin, "smallest k (squarefree)");
    zs->add_option("--kmax", o.kmax, "largest k (squarefree)");
    zs->add_option("--points", o.points, "number of log-spaced k (squarefree)");
    add_output_options(zs, o);

    auto* fit = app.add_subcommand("fit", "fit a scan file or run the catalogue comparison");
    fit->add_option("--input", o.input, "scan CSV with k and log_Z, log_F or Z columns");
    fit->add_option("--model", o.model, "power or log-quadratic");
    fit->add_option("--predicted", o.predicted, "predicted exponent for the pass/fail check");
    fit->add_option("--tol", o.tol, "tolerance on the exponent");
    fit->add_option("--drop", o.drop, "leading samples to drop (default: 2 for power, 0 for log-quadratic)");
    fit->add_flag("--catalogue", o.catalogue, "compare measured and predicted exponents for the whole catalogue");
    fit->add_option("--systems", o.systems, "catalogue entries to include")->delimiter(',');
    fit->add_option("--format", o.format, "json or table (catalogue mode)");
    add_output_options(fit, o);

    auto* ly = app.add_subcommand("lyapunov", "Lyapunov spectra and exponent predictions of substitution systems");
    add_system_options(ly, o);
    ly->add_option("--k", o.ks, "k values for the Fourier cocycle spectrum")->delimiter(',');
    ly->add_option("--depth", o.depth, "cocycle depth");
    add_output_options(ly, o);

    auto* mc = app.add_subcommand("mc", "Monte Carlo periodogram estimate of Z(k) against the analytic value");
    add_system_options(mc, o);
    mc->add_option("--radius", o.radius, "half-width R of the realisation");
    mc->add_option("--seed", o.seed, "random seed");
    mc->add_option("--k", o.ks, "k values")->delimiter(',');
    mc->add_option("--bin-width", o.bin_width, "periodogram bin width (0: 1/(8R); must not exceed 1/(4R))");
    add_output_options(mc, o);

    auto* tb = app.add_subcommand("tm-bounds", "Thue-Morse bracket 2^-n f_n(2^-n-1) <= F(2^-n) <= 2^-n f_n(2^-n)");
    tb->add_option("--n", o.n, "level n (first level when --n-max is given)");
    tb->add_option("--n-max", o.n_max, "last level");
    tb->add_option("--fourier-terms", o.fourier_terms, "also evaluate F from its Fourier series with this many terms");
    add_output_options(tb, o);

    auto* rp = app.add_subcommand("repro", "replay a stored run configuration");
    rp->add_option("--config", o.config, "configuration JSON written by --save-config")->required();

    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), const_cast<char**>(argv.data()));
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        CLI::App* sub = app.get_subcommands().front();
        if (sub == rp) return replay(o.config, depth);
        if (sub == gen || sub == zs || sub == ly || sub == mc) find_system(o.sp.system);
        resolve_parameters(o);
        if (!o.save_config.empty()) write_output(o.save_config, config_json(sub).dump(2) + "\n");
        std::string text;
        if (sub == gen)
            text = cmd_generate(o);
        else if (sub == zs)
            text = cmd_zscan(o);
        else if (sub == fit)
            text = cmd_fit(o);
        else if (sub == ly)
            text = cmd_lyapunov(o);
        else if (sub == mc)
            text = cmd_mc(o);
        else
            text = cmd_tm_bounds(o);
        write_output(o.output, text);
        return 0;
    } catch (const NumericalError& e) {
        std::cerr << "diffscale: numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << "diffscale: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "diffscale: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace

int main(int argc, char** argv) { return run(std::vector<std::string>(argv, argv + argc), 0); }
