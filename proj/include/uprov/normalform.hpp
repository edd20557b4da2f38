#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "uprov/algebra.hpp"

namespace uprov {

enum class Shape { S1, S2, S3, S4, S5, NotNormal };
std::string shape_name(Shape s);

// Tags an expression against the five per-transaction shapes for annotation p.
Shape classify(const Expr& e, const Annot& p);

struct RuleStep {
    int rule;  // 1..9
    Expr lhs, rhs;
};

struct NormalizeOptions {
    // order in which rules are tried at each step; default is dead contributors first,
    // then insert contributors, then merging, then root rules.
    // Rule 9 folds a tuple that returned to itself: (a - p) +M ((a + B) .M p) becomes a +M (B .M p).
    std::array<int, 9> order{3, 8, 4, 7, 9, 6, 1, 2, 5};
    std::vector<RuleStep>* trace = nullptr;
};

class NotNormalizable : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Attempts one rule at the root of e; nullopt when the rule does not apply.
std::optional<Expr> apply_rule(int rule, const Expr& e, const Annot& p);

// Rewrites one propagation step over a normal-form expression back into a normal shape.
Expr normalize_step(const Expr& e, const Annot& p, const NormalizeOptions& opts = {});

Expr minimize_zero(const Expr& e);

// minimized results may also be the constant 0 or a bare sum[...] .M p
bool is_minimized_shape(const Expr& e, const Annot& p);

}  // namespace uprov
