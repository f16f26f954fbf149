#pragma once

// Test-only helpers for condition expressions: a truth-table oracle that
// does not share code with the evaluator, and random expression generators.

#include <algorithm>
#include <cctype>
#include <random>
#include <string>
#include <vector>

#include "epiplan/condlang/condition.hpp"

namespace epiplan::testing {

// Kleene logic as arithmetic on the order No < Unknown < Yes:
// AND is min, OR is max, NOT mirrors around Unknown.
inline int truth_rank(cond::Truth t) {
    return t == cond::Truth::No ? 0 : t == cond::Truth::Unknown ? 1 : 2;
}

inline cond::Truth rank_truth(int r) {
    return r == 0 ? cond::Truth::No : r == 1 ? cond::Truth::Unknown : cond::Truth::Yes;
}

inline int oracle_rank(const cond::CondExpr& e, const std::vector<std::string>& atoms,
                       const std::vector<int>& ranks) {
    using Op = cond::CondExpr::Op;
    if (e.op() == Op::Atom) {
        for (std::size_t i = 0; i < atoms.size(); ++i)
            if (atoms[i] == e.text()) return ranks[i];
        return 1;
    }
    if (e.op() == Op::Not) return 2 - oracle_rank(e.children()[0], atoms, ranks);
    int acc = e.op() == Op::And ? 2 : 0;
    for (const auto& c : e.children()) {
        int r = oracle_rank(c, atoms, ranks);
        acc = e.op() == Op::And ? std::min(acc, r) : std::max(acc, r);
    }
    return acc;
}

inline cond::Truth oracle_evaluate(const cond::CondExpr& e, const std::vector<std::string>& atoms,
                                   const std::vector<cond::Truth>& values) {
    std::vector<int> ranks;
    for (auto v : values) ranks.push_back(truth_rank(v));
    return rank_truth(oracle_rank(e, atoms, ranks));
}

// Two-word atoms so that OR lists never trigger head-noun borrowing.
inline std::vector<std::string> atom_pool() {
    return {"confirmed case",   "suspected case",  "cluster outbreak", "local infection",
            "imported case",    "vector density",  "school closure",   "contact tracing",
            "severe illness",   "hospital capacity"};
}

struct GeneratedExpr {
    std::string text;                 // surface syntax fed to the parser
    std::vector<std::string> atoms;   // atoms used, with repetition, in order
};

class ExprGenerator {
public:
    explicit ExprGenerator(std::uint32_t seed) : rng_(seed) {}

    // Builds a surface string over atoms drawn from `vocabulary`.
    GeneratedExpr surface(const std::vector<std::string>& vocabulary, int depth) {
        GeneratedExpr g;
        g.text = surface_rec(vocabulary, depth, g.atoms);
        return g;
    }

    cond::CondExpr tree(const std::vector<std::string>& vocabulary, int depth) {
        std::uniform_int_distribution<int> kind(0, depth <= 0 ? 0 : 3);
        switch (kind(rng_)) {
            case 0: return cond::CondExpr::atom(pick(vocabulary));
            case 1: return cond::CondExpr::negate(tree(vocabulary, depth - 1));
            default: {
                std::uniform_int_distribution<int> arity(2, 3);
                std::vector<cond::CondExpr> kids;
                int n = arity(rng_);
                for (int i = 0; i < n; ++i) kids.push_back(tree(vocabulary, depth - 1));
                return kind(rng_) % 2 == 0 ? cond::CondExpr::all_of(std::move(kids))
                                           : cond::CondExpr::any_of(std::move(kids));
            }
        }
    }

    std::mt19937& rng() { return rng_; }

private:
    const std::string& pick(const std::vector<std::string>& v) {
        std::uniform_int_distribution<std::size_t> d(0, v.size() - 1);
        return v[d(rng_)];
    }

    std::string cased(const std::string& atom) {
        // Random capitalisation exercises canonicalisation.
        std::string out = atom;
        std::bernoulli_distribution up(0.5);
        bool start = true;
        for (auto& c : out) {
            if (start && up(rng_)) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
            start = c == ' ';
        }
        return out;
    }

    std::string surface_rec(const std::vector<std::string>& vocab, int depth, std::vector<std::string>& atoms) {
        std::uniform_int_distribution<int> kind(0, depth <= 0 ? 0 : 4);
        switch (kind(rng_)) {
            case 0: {
                const auto& a = pick(vocab);
                atoms.push_back(a);
                return cased(a);
            }
            case 1:
                return "NOT (" + surface_rec(vocab, depth - 1, atoms) + ")";
            case 2: {
                auto l = surface_rec(vocab, depth - 1, atoms);
                auto r = surface_rec(vocab, depth - 1, atoms);
                return "(" + l + ") AND (" + r + ")";
            }
            case 3: {
                auto l = surface_rec(vocab, depth - 1, atoms);
                auto r = surface_rec(vocab, depth - 1, atoms);
                return "(" + l + ") OR (" + r + ")";
            }
            default: {
                auto a = surface_rec(vocab, depth - 1, atoms);
                auto b = surface_rec(vocab, depth - 1, atoms);
                auto c = surface_rec(vocab, depth - 1, atoms);
                return "(" + a + "), (" + b + "), or (" + c + ")";
            }
        }
    }

    std::mt19937 rng_;
};

}  // namespace epiplan::testing
