#include "epiplan/condlang/condition.hpp"

#include <cctype>
#include <set>
#include <stdexcept>

#include "epiplan/common/text.hpp"

namespace epiplan::cond {

std::string_view to_string(Truth t) {
    switch (t) {
        case Truth::Yes: return "Yes";
        case Truth::No: return "No";
        case Truth::Unknown: return "Unknown";
    }
    return "Unknown";
}

Truth truth_from_string(std::string_view s) {
    auto c = text::canonical(s);
    if (c == "yes") return Truth::Yes;
    if (c == "no") return Truth::No;
    return Truth::Unknown;
}

CondExpr CondExpr::atom(std::string_view text) {
    return CondExpr(Op::Atom, text::canonical(text), {});
}

CondExpr CondExpr::negate(CondExpr child) {
    std::vector<CondExpr> c;
    c.push_back(std::move(child));
    return CondExpr(Op::Not, {}, std::move(c));
}

CondExpr CondExpr::all_of(std::vector<CondExpr> children) {
    if (children.size() < 2) throw std::invalid_argument("AND needs at least two operands");
    return CondExpr(Op::And, {}, std::move(children));
}

CondExpr CondExpr::any_of(std::vector<CondExpr> children) {
    if (children.size() < 2) throw std::invalid_argument("OR needs at least two operands");
    return CondExpr(Op::Or, {}, std::move(children));
}

namespace {

enum class Tok { LParen, RParen, Comma, Or, And, Not, Word };

struct Token {
    Tok kind;
    std::string text;
};

std::vector<Token> tokenize(std::string_view s) {
    std::vector<Token> out;
    std::string word;
    auto flush = [&] {
        if (word.empty()) return;
        std::string lower = text::canonical(word);
        if (lower == "or") {
            out.push_back({Tok::Or, word});
        } else if (word == "AND") {
            out.push_back({Tok::And, word});
        } else if (word == "NOT") {
            out.push_back({Tok::Not, word});
        } else {
            out.push_back({Tok::Word, word});
        }
        word.clear();
    };
    for (char c : s) {
        if (c == '(' || c == ')' || c == ',') {
            flush();
            out.push_back({c == '(' ? Tok::LParen : c == ')' ? Tok::RParen : Tok::Comma, std::string(1, c)});
        } else if (std::isspace(static_cast<unsigned char>(c))) {
            flush();
        } else {
            word.push_back(c);
        }
    }
    flush();
    return out;
}

struct ParseFailure {};

struct Item {
    CondExpr expr;
    bool bare = false;  // plain run of words, not grouped or combined
    std::vector<std::string> words;
};

class Parser {
public:
    explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

    CondExpr parse() {
        Item top = disjunction();
        if (pos_ != toks_.size()) throw ParseFailure{};
        return std::move(top.expr);
    }

private:
    bool at(Tok k) const { return pos_ < toks_.size() && toks_[pos_].kind == k; }

    Item disjunction() {
        std::vector<Item> items;
        items.push_back(conjunction());
        while (at(Tok::Or) || at(Tok::Comma)) {
            if (at(Tok::Comma)) {
                ++pos_;
                if (at(Tok::Or)) ++pos_;
            } else {
                ++pos_;
            }
            items.push_back(conjunction());
        }
        if (items.size() == 1) return std::move(items.front());

        distribute_head_noun(items);
        std::vector<CondExpr> children;
        children.reserve(items.size());
        for (auto& it : items) children.push_back(std::move(it.expr));
        return Item{CondExpr::any_of(std::move(children)), false, {}};
    }

    static void distribute_head_noun(std::vector<Item>& items) {
        const Item& last = items.back();
        if (!last.bare || last.words.size() < 2) return;
        const std::string& head = last.words.back();
        for (std::size_t i = 0; i + 1 < items.size(); ++i) {
            Item& it = items[i];
            if (!it.bare || it.words.size() >= last.words.size() || it.words.back() == head) continue;
            it.words.push_back(head);
            std::string joined;
            for (const auto& w : it.words) {
                if (!joined.empty()) joined.push_back(' ');
                joined += w;
            }
            it.expr = CondExpr::atom(joined);
        }
    }

    Item conjunction() {
        std::vector<Item> items;
        items.push_back(negation());
        while (at(Tok::And)) {
            ++pos_;
            items.push_back(negation());
        }
        if (items.size() == 1) return std::move(items.front());
        std::vector<CondExpr> children;
        for (auto& it : items) children.push_back(std::move(it.expr));
        return Item{CondExpr::all_of(std::move(children)), false, {}};
    }

    Item negation() {
        if (at(Tok::Not)) {
            ++pos_;
            Item inner = negation();
            return Item{CondExpr::negate(std::move(inner.expr)), false, {}};
        }
        return primary();
    }

    Item primary() {
        if (at(Tok::LParen)) {
            ++pos_;
            Item inner = disjunction();
            if (!at(Tok::RParen)) throw ParseFailure{};
            ++pos_;
            inner.bare = false;
            return inner;
        }
        std::vector<std::string> words;
        while (at(Tok::Word)) {
            words.push_back(text::canonical(toks_[pos_].text));
            ++pos_;
        }
        if (words.empty()) throw ParseFailure{};
        std::string joined;
        for (const auto& w : words) {
            if (!joined.empty()) joined.push_back(' ');
            joined += w;
        }
        return Item{CondExpr::atom(joined), true, std::move(words)};
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

}  // namespace

ParsedCondition parse_condition(std::string_view text) {
    auto canon = text::canonical(text);
    if (canon.empty()) throw std::invalid_argument("trigger condition is blank");
    try {
        return {Parser(tokenize(text)).parse(), false};
    } catch (const ParseFailure&) {
        return {CondExpr::atom(canon), true};
    }
}

Truth evaluate_condition(const CondExpr& expr, const TruthAssignment& assignment) {
    switch (expr.op()) {
        case CondExpr::Op::Atom: {
            auto it = assignment.find(expr.text());
            return it == assignment.end() ? Truth::Unknown : it->second;
        }
        case CondExpr::Op::Not: {
            Truth t = evaluate_condition(expr.children().front(), assignment);
            if (t == Truth::Yes) return Truth::No;
            if (t == Truth::No) return Truth::Yes;
            return Truth::Unknown;
        }
        case CondExpr::Op::And: {
            bool unknown = false;
            for (const auto& c : expr.children()) {
                Truth t = evaluate_condition(c, assignment);
                if (t == Truth::No) return Truth::No;
                if (t == Truth::Unknown) unknown = true;
            }
            return unknown ? Truth::Unknown : Truth::Yes;
        }
        case CondExpr::Op::Or: {
            bool unknown = false;
            for (const auto& c : expr.children()) {
                Truth t = evaluate_condition(c, assignment);
                if (t == Truth::Yes) return Truth::Yes;
                if (t == Truth::Unknown) unknown = true;
            }
            return unknown ? Truth::Unknown : Truth::No;
        }
    }
    return Truth::Unknown;
}

namespace {
void collect_into(const CondExpr& e, std::vector<std::string>& out, std::set<std::string>& seen) {
    if (e.op() == CondExpr::Op::Atom) {
        if (seen.insert(e.text()).second) out.push_back(e.text());
        return;
    }
    for (const auto& c : e.children()) collect_into(c, out, seen);
}
}  // namespace

std::vector<std::string> collect_atoms(std::span<const CondExpr> exprs) {
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (const auto& e : exprs) collect_into(e, out, seen);
    return out;
}

std::string to_canonical_string(const CondExpr& expr) {
    auto grouped = [](const CondExpr& c) { return "(" + to_canonical_string(c) + ")"; };
    switch (expr.op()) {
        case CondExpr::Op::Atom:
            return expr.text();
        case CondExpr::Op::Not: {
            const auto& c = expr.children().front();
            return "NOT " + (c.op() == CondExpr::Op::Atom ? c.text() : grouped(c));
        }
        case CondExpr::Op::And:
        case CondExpr::Op::Or: {
            bool is_or = expr.op() == CondExpr::Op::Or;
            std::string out;
            for (const auto& c : expr.children()) {
                if (!out.empty()) out += is_or ? " OR " : " AND ";
                // Bare atoms inside OR lists are grouped so re-parsing never
                // borrows a head noun.
                if (c.op() == CondExpr::Op::Atom && !is_or) {
                    out += c.text();
                } else {
                    out += grouped(c);
                }
            }
            return out;
        }
    }
    return {};
}

Json to_json(const CondExpr& expr) {
    Json j;
    switch (expr.op()) {
        case CondExpr::Op::Atom:
            j["op"] = "atom";
            j["text"] = expr.text();
            return j;
        case CondExpr::Op::Not: j["op"] = "not"; break;
        case CondExpr::Op::And: j["op"] = "and"; break;
        case CondExpr::Op::Or: j["op"] = "or"; break;
    }
    j["children"] = Json::array();
    for (const auto& c : expr.children()) j["children"].push_back(to_json(c));
    return j;
}

CondExpr condition_from_json(const Json& j) {
    const std::string op = j.at("op").get<std::string>();
    if (op == "atom") return CondExpr::atom(j.at("text").get<std::string>());
    std::vector<CondExpr> children;
    for (const auto& c : j.at("children")) children.push_back(condition_from_json(c));
    if (op == "not") {
        if (children.size() != 1) throw std::invalid_argument("not takes exactly one child");
        return CondExpr::negate(std::move(children.front()));
    }
    if (op == "and") return CondExpr::all_of(std::move(children));
    if (op == "or") return CondExpr::any_of(std::move(children));
    throw std::invalid_argument("unknown condition op: " + op);
}

}  // namespace epiplan::cond
