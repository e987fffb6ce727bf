#pragma once

/**
 * @file substitution.hpp
 * @brief Substitution rules, two-sided fixed-point words, geometric
 *        realisations with natural tile lengths, and the rule catalogue.
 */

#include <algorithm>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "diffscale/algebra.hpp"
#include "diffscale/core.hpp"

namespace diffscale {

using Word = std::vector<int>;

/// Letter images over the alphabet {0, …, d−1}, printed as a, b, c, …
class SubstitutionRule {
   public:
    SubstitutionRule() = default;
    SubstitutionRule(std::string name, std::vector<Word> images) : name_(std::move(name)), images_(std::move(images)) {
        const int d = size();
        if (d < 1 || d > 8) throw Error("alphabet size must be in 1..8");
        for (const auto& w : images_) {
            if (w.empty()) throw Error("empty letter image in rule " + name_);
            for (int x : w)
                if (x < 0 || x >= d) throw Error("letter out of range in rule " + name_);
        }
    }

    const std::string& name() const { return name_; }
    int size() const { return static_cast<int>(images_.size()); }
    const Word& image(int letter) const { return images_.at(static_cast<std::size_t>(letter)); }
    const std::vector<Word>& images() const { return images_; }

    /// M(i, j) = number of letters i in the image of j.
    IntegerMatrix matrix() const {
        IntegerMatrix m(size());
        for (int j = 0; j < size(); ++j)
            for (int i : image(j)) m(i, j) += 1;
        return m;
    }

    Word apply(const Word& w) const {
        Word out;
        for (int x : w) {
            const auto& im = image(x);
            out.insert(out.end(), im.begin(), im.end());
        }
        return out;
    }

    /// Two-letter words occurring in some iterate of some letter image.
    std::set<std::pair<int, int>> legal_pairs() const {
        std::set<std::pair<int, int>> legal;
        auto add_from = [&](const Word& w) {
            bool grew = false;
            for (std::size_t i = 0; i + 1 < w.size(); ++i) grew |= legal.insert({w[i], w[i + 1]}).second;
            return grew;
        };
        for (const auto& im : images_) add_from(im);
        bool grew = true;
        while (grew) {
            grew = false;
            auto snapshot = legal;
            for (auto [x, y] : snapshot) grew |= add_from(apply({x, y}));
        }
        return legal;
    }

    static std::string letter_name(int x) { return std::string(1, static_cast<char>('a' + x)); }
    std::string word_string(const Word& w) const {
        std::string s;
        for (int x : w) s += letter_name(x);
        return s;
    }

   private:
    std::string name_;
    std::vector<Word> images_;
};

/// Two-sided word: left is stored reversed (left[0] is the letter left of the origin).
struct TwoSidedWord {
    Word left;
    Word right;

    std::size_t size() const { return left.size() + right.size(); }
    /// Letters in reading order; the origin sits at index left.size().
    Word linear() const {
        Word w(left.rbegin(), left.rend());
        w.insert(w.end(), right.begin(), right.end());
        return w;
    }
};

inline constexpr std::size_t kDefaultLetterBudget = 10'000'000;

/// Applies ϱ^(power·n) to the seed l|r, keeping the origin marker.
inline TwoSidedWord fixed_point_word(const SubstitutionRule& rule, std::pair<int, int> seed, int n, int power = 2,
                                     std::size_t budget = kDefaultLetterBudget) {
    if (n < 0) throw Error("iteration count must be non-negative");
    if (seed.first < 0 || seed.first >= rule.size() || seed.second < 0 || seed.second >= rule.size())
        throw Error("seed letter out of range");
    auto legal = rule.legal_pairs();
    if (!legal.count(seed))
        throw Error("illegal seed " + SubstitutionRule::letter_name(seed.first) + "|" + SubstitutionRule::letter_name(seed.second));
    TwoSidedWord w{{seed.first}, {seed.second}};
    for (int it = 0; it < n * power; ++it) {
        TwoSidedWord next;
        for (int x : w.left) {
            const auto& im = rule.image(x);
            next.left.insert(next.left.end(), im.rbegin(), im.rend());
        }
        next.right = rule.apply(w.right);
        if (next.size() > budget) throw Error("fixed-point iteration exceeds the letter budget of " + std::to_string(budget));
        w = std::move(next);
    }
    return w;
}

/// Points of a tiling: left endpoints of tiles with their types.
struct TypedPatch {
    std::vector<long double> positions;
    std::vector<int> types;
    std::vector<long double> lengths;
    std::vector<AlgebraicNumber> exact;  ///< empty unless lengths are algebraic
    long double radius = 0;

    std::size_t size() const { return positions.size(); }
};

/// Realises a two-sided word with the given tile lengths; origin at the seed vertex.
inline TypedPatch geometric_patch(const TwoSidedWord& w, const std::vector<long double>& lengths) {
    for (auto l : lengths)
        if (!(l > 0)) throw Error("tile lengths must be positive");
    TypedPatch p;
    p.lengths = lengths;
    std::vector<long double> lpos;
    CompensatedSum<long double> acc;
    for (int x : w.left) {
        acc.add(-lengths.at(static_cast<std::size_t>(x)));
        lpos.push_back(acc.value());
    }
    for (std::size_t i = lpos.size(); i-- > 0;) {
        p.positions.push_back(lpos[i]);
        p.types.push_back(w.left[i]);
    }
    CompensatedSum<long double> r;
    for (int x : w.right) {
        p.positions.push_back(r.value());
        p.types.push_back(x);
        r.add(lengths.at(static_cast<std::size_t>(x)));
    }
    p.radius = std::min(lpos.empty() ? 0 : -lpos.back(), r.value());
    return p;
}

/// Exact variant: positions are sums of algebraic lengths.
inline TypedPatch geometric_patch(const TwoSidedWord& w, const std::vector<AlgebraicNumber>& lengths) {
    std::vector<long double> fl;
    for (const auto& l : lengths) {
        if (l.sign() <= 0) throw Error("tile lengths must be positive");
        fl.push_back(l.value());
    }
    TypedPatch p;
    p.lengths = fl;
    const auto& ord = lengths.front().order();
    std::vector<AlgebraicNumber> lpos;
    AlgebraicNumber acc(0, 0, ord);
    for (int x : w.left) {
        acc = acc - lengths.at(static_cast<std::size_t>(x));
        lpos.push_back(acc);
    }
    for (std::size_t i = lpos.size(); i-- > 0;) {
        p.exact.push_back(lpos[i]);
        p.types.push_back(w.left[i]);
    }
    AlgebraicNumber r(0, 0, ord);
    for (int x : w.right) {
        p.exact.push_back(r);
        p.types.push_back(x);
        r = r + lengths.at(static_cast<std::size_t>(x));
    }
    for (const auto& e : p.exact) p.positions.push_back(e.value());
    p.radius = std::min(lpos.empty() ? 0 : -lpos.back().value(), r.value());
    return p;
}

/// Restricts a patch to positions in [−R, R].
inline TypedPatch clip(const TypedPatch& p, long double R) {
    TypedPatch out;
    out.lengths = p.lengths;
    out.radius = R;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (std::fabs(p.positions[i]) > R) continue;
        out.positions.push_back(p.positions[i]);
        out.types.push_back(p.types[i]);
        if (!p.exact.empty()) out.exact.push_back(p.exact[i]);
    }
    return out;
}

/// Catalogue entry: the rule plus optional exact lengths and ±1 letter weights.
struct CatalogueEntry {
    SubstitutionRule rule;
    std::optional<std::vector<AlgebraicNumber>> exact_lengths;
    std::vector<int> weights;  ///< letter projection; empty for plain point sets
    std::pair<int, int> seed{0, 0};
    int power = 2;  ///< ϱ^power fixes the seed
};

inline std::vector<std::string> catalogue_names() {
    return {"fibonacci",   "noble",        "period-doubling", "limit-quasiperiodic", "kolakoski-3-1",
            "plastic",     "thue-morse",   "gtm",             "rudin-shapiro"};
}

inline CatalogueEntry catalogue_entry(const std::string& name, int p = 1, int q = 1) {
    auto repeat = [](int letter, int times) { return Word(static_cast<std::size_t>(times), letter); };
    auto concat = [](Word a, const Word& b) {
        a.insert(a.end(), b.begin(), b.end());
        return a;
    };
    CatalogueEntry e;
    if (name == "fibonacci") {
        e.rule = SubstitutionRule("fibonacci", {{0, 1}, {0}});
        e.exact_lengths = std::vector<AlgebraicNumber>{AlgebraicNumber(0, 1), AlgebraicNumber(1, 0)};
        e.seed = {0, 0};
    } else if (name == "noble") {
        if (p < 1 || p > 64) throw Error("noble requires 1 <= p <= 64");
        e.rule = SubstitutionRule("noble-" + std::to_string(p), {concat(repeat(0, p), {1}), {0}});
        auto o = QuadraticOrder::noble(p);
        e.exact_lengths = std::vector<AlgebraicNumber>{AlgebraicNumber(0, 1, o), AlgebraicNumber(1, 0, o)};
        e.seed = {0, 0};
    } else if (name == "period-doubling") {
        e.rule = SubstitutionRule("period-doubling", {{0, 1}, {0, 0}});
        e.seed = {0, 0};
    } else if (name == "limit-quasiperiodic") {
        e.rule = SubstitutionRule("limit-quasiperiodic", {{0, 0, 1}, {0, 1, 0, 1}});
        e.seed = {1, 0};
    } else if (name == "kolakoski-3-1") {
        e.rule = SubstitutionRule("kolakoski-3-1", {{0, 1, 2}, {0, 1}, {1}});
        e.seed = {1, 0};
    } else if (name == "plastic") {
        e.rule = SubstitutionRule("plastic", {{1}, {2}, {0, 1}});
        e.seed = {1, 0};
        e.power = 6;
    } else if (name == "thue-morse" || name == "gtm") {
        int pp = name == "gtm" ? p : 1, qq = name == "gtm" ? q : 1;
        if (pp < 1 || qq < 1 || pp + qq > 64) throw Error("gtm requires p, q >= 1 and p + q <= 64");
        std::string nm = name == "gtm" ? "gtm-" + std::to_string(pp) + "-" + std::to_string(qq) : "thue-morse";
        e.rule = SubstitutionRule(nm, {concat(repeat(0, pp), repeat(1, qq)), concat(repeat(1, pp), repeat(0, qq))});
        e.weights = {1, -1};
        e.seed = {0, 0};
    } else if (name == "rudin-shapiro") {
        e.rule = SubstitutionRule("rudin-shapiro", {{0, 1}, {0, 2}, {3, 1}, {3, 2}});
        e.weights = {1, 1, -1, -1};
        e.seed = {1, 0};
    } else {
        std::string all;
        for (const auto& n : catalogue_names()) all += (all.empty() ? "" : ", ") + n;
        throw Error("unknown rule '" + name + "'; catalogue: " + all);
    }
    if (!e.rule.matrix().is_primitive()) throw Error("catalogue rule is not primitive: " + e.rule.name());
    return e;
}

inline SubstitutionRule catalogue(const std::string& name, int p = 1, int q = 1) { return catalogue_entry(name, p, q).rule; }

/// Natural tile lengths: left PF eigenvector with minimum entry 1.
inline std::vector<long double> natural_lengths(const SubstitutionRule& rule) { return spectral_data(rule.matrix()).left; }

/// First n weights of the Rudin–Shapiro sequence from the one-sided fixed point of a.
inline std::vector<int> rudin_shapiro_weights(std::size_t n) {
    if (n < 1) throw Error("length must be >= 1");
    auto e = catalogue_entry("rudin-shapiro");
    Word w{0};
    while (w.size() < n) w = e.rule.apply(w);
    std::vector<int> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = e.weights[static_cast<std::size_t>(w[i])];
    return out;
}

/// First n letters of the one-sided fixed point starting with letter 0.
inline Word one_sided_word(const SubstitutionRule& rule, std::size_t n, std::size_t budget = kDefaultLetterBudget) {
    if (rule.image(0).front() != 0) throw Error("letter a does not start its own image");
    Word w{0};
    while (w.size() < n) {
        w = rule.apply(w);
        if (w.size() > budget && w.size() < n) throw Error("one-sided word exceeds the letter budget");
    }
    w.resize(n);
    return w;
}

/// Flips each weight independently with probability p.
template <typename Rng>
std::vector<int> bernoullise(const std::vector<int>& weights, double p, Rng& rng) {
    if (!(p >= 0 && p <= 1)) throw Error("flip probability must lie in [0, 1]");
    std::vector<int> out(weights);
    for (auto& w : out)
        if (rng.uniform() < p) w = -w;
    return out;
}

}  // namespace diffscale
