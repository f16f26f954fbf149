#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "epiplan/common/json.hpp"

namespace epiplan::cond {

enum class Truth { No, Yes, Unknown };

std::string_view to_string(Truth t);

// Accepts Yes/No/Unknown in any case; anything else reads as Unknown.
Truth truth_from_string(std::string_view s);

/// Trigger-condition expression tree. Atoms hold canonical text; And/Or
/// always have at least two children.
class CondExpr {
public:
    enum class Op { Atom, Not, And, Or };

    static CondExpr atom(std::string_view text);
    static CondExpr negate(CondExpr child);
    static CondExpr all_of(std::vector<CondExpr> children);
    static CondExpr any_of(std::vector<CondExpr> children);

    Op op() const { return op_; }
    const std::string& text() const { return text_; }
    std::span<const CondExpr> children() const { return children_; }

    friend bool operator==(const CondExpr&, const CondExpr&) = default;

private:
    CondExpr(Op op, std::string text, std::vector<CondExpr> children)
        : op_(op), text_(std::move(text)), children_(std::move(children)) {}

    Op op_;
    std::string text_;
    std::vector<CondExpr> children_;
};

struct ParsedCondition {
    CondExpr expr;
    // Set when the text fell outside the grammar and was kept whole as one atom.
    bool degraded = false;
};

/// Grammar:
///   disj    := conj (("OR" | "or" | "," ["or"]) conj)*
///   conj    := neg ("AND" neg)*
///   neg     := "NOT" neg | primary
///   primary := "(" disj ")" | word+
/// In an OR list whose last item is a bare multi-word atom, shorter bare
/// items lacking its head noun borrow it: "Confirmed OR Suspected Case"
/// yields "confirmed case" and "suspected case".
/// Throws std::invalid_argument on blank input.
ParsedCondition parse_condition(std::string_view text);

using TruthAssignment = std::map<std::string, Truth, std::less<>>;

/// Kleene three-valued evaluation; atoms missing from the assignment read
/// as Unknown.
Truth evaluate_condition(const CondExpr& expr, const TruthAssignment& assignment);

/// Canonical atoms in first-occurrence order, deduplicated.
std::vector<std::string> collect_atoms(std::span<const CondExpr> exprs);

/// Text form that re-parses to an identical tree.
std::string to_canonical_string(const CondExpr& expr);

Json to_json(const CondExpr& expr);
CondExpr condition_from_json(const Json& j);

}  // namespace epiplan::cond
