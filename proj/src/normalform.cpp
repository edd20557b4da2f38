#include "uprov/normalform.hpp"

#include <algorithm>

namespace uprov {

namespace {

bool same(const Annot& a, const Annot& b) {
    return a == b || (a && b && a->kind == b->kind && a->name == b->name);
}

bool atoms_only(const std::vector<Expr>& xs) {
    return std::all_of(xs.begin(), xs.end(), [](const Expr& x) { return is_atom(x); });
}

bool is_ins_p(const Expr& e, const Annot& p) { return e->op == Op::Ins && same(e->annot, p); }
bool is_del_p(const Expr& e, const Annot& p) { return e->op == Op::Del && same(e->annot, p); }

// e = tau +M (X .M p); yields tau and the children of X
bool split_modadd(const Expr& e, const Annot& p, Expr& tau, std::vector<Expr>& kids) {
    if (e->op != Op::ModAdd) return false;
    const Expr& r = e->kids[1];
    if (r->op != Op::ModMul || !same(r->annot, p)) return false;
    tau = e->kids[0];
    kids = sum_children(r->kids[0]);
    return true;
}

Expr contrib(const Expr& tau, std::vector<Expr> kids, const Annot& p) {
    return modadd(tau, modmul(sum(std::move(kids)), p));
}

Expr anchor(const Expr& tau) {
    try {
        return start_leaf(tau);
    } catch (const MalformedShape& e) {
        throw NotNormalizable(e.what());
    }
}

}  // namespace

std::string shape_name(Shape s) {
    switch (s) {
        case Shape::S1: return "S1";
        case Shape::S2: return "S2";
        case Shape::S3: return "S3";
        case Shape::S4: return "S4";
        case Shape::S5: return "S5";
        case Shape::NotNormal: return "NotNormal";
    }
    return "?";
}

Shape classify(const Expr& e, const Annot& p) {
    if (is_atom(e)) return Shape::S1;
    if (is_ins_p(e, p)) return is_atom(e->kids[0]) ? Shape::S2 : Shape::NotNormal;
    if (is_del_p(e, p)) return is_atom(e->kids[0]) ? Shape::S3 : Shape::NotNormal;
    Expr tau;
    std::vector<Expr> kids;
    if (!split_modadd(e, p, tau, kids) || !atoms_only(kids)) return Shape::NotNormal;
    if (is_atom(tau)) return Shape::S4;
    if (is_del_p(tau, p) && is_atom(tau->kids[0])) return Shape::S5;
    return Shape::NotNormal;
}

std::optional<Expr> apply_rule(int rule, const Expr& e, const Annot& p) {
    Expr tau;
    std::vector<Expr> kids;
    switch (rule) {
        case 1:  // an insertion overrides what the transaction did before
            if (is_ins_p(e, p) && !is_atom(e->kids[0])) return ins(anchor(e->kids[0]), p);
            return std::nullopt;
        case 2:
            if (is_del_p(e, p) && !is_atom(e->kids[0])) return del(anchor(e->kids[0]), p);
            return std::nullopt;
        case 3:  // every contributor was deleted
            if (!split_modadd(e, p, tau, kids)) return std::nullopt;
            if (std::all_of(kids.begin(), kids.end(), [&](const Expr& k) { return is_del_p(k, p); })) return tau;
            return std::nullopt;
        case 4:  // an inserted contributor behaves like inserting the target
            if (!split_modadd(e, p, tau, kids)) return std::nullopt;
            if (std::any_of(kids.begin(), kids.end(), [&](const Expr& k) { return is_ins_p(k, p); }))
                return ins(tau, p);
            return std::nullopt;
        case 5:
            if (!split_modadd(e, p, tau, kids) || !is_ins_p(tau, p)) return std::nullopt;
            return tau;
        case 6: {
            if (!split_modadd(e, p, tau, kids)) return std::nullopt;
            Expr inner;
            std::vector<Expr> inner_kids;
            if (!split_modadd(tau, p, inner, inner_kids)) return std::nullopt;
            inner_kids.insert(inner_kids.end(), kids.begin(), kids.end());
            return contrib(inner, std::move(inner_kids), p);
        }
        case 7: {
            if (!split_modadd(e, p, tau, kids)) return std::nullopt;
            std::vector<Expr> flat;
            bool hit = false;
            for (const auto& k : kids) {
                Expr t2;
                std::vector<Expr> k3;
                if (split_modadd(k, p, t2, k3)) {
                    hit = true;
                    flat.push_back(t2);
                    flat.insert(flat.end(), k3.begin(), k3.end());
                } else {
                    flat.push_back(k);
                }
            }
            if (!hit) return std::nullopt;
            return contrib(tau, std::move(flat), p);
        }
        case 8: {
            if (!split_modadd(e, p, tau, kids)) return std::nullopt;
            std::vector<Expr> live;
            for (const auto& k : kids)
                if (!is_del_p(k, p)) live.push_back(k);
            if (live.size() == kids.size() || live.empty()) return std::nullopt;
            return contrib(tau, std::move(live), p);
        }
        case 9: {  // the tuple left and came back: its own start value is among the contributors
            if (!split_modadd(e, p, tau, kids) || !is_del_p(tau, p) || !is_atom(tau->kids[0])) return std::nullopt;
            const Expr& self = tau->kids[0];
            std::vector<Expr> rest;
            for (const auto& k : kids)
                if (!struct_eq(k, self)) rest.push_back(k);
            if (rest.size() == kids.size()) return std::nullopt;
            if (rest.empty()) return self;
            return contrib(self, std::move(rest), p);
        }
        default:
            throw std::invalid_argument("no rule " + std::to_string(rule));
    }
}

Expr normalize_step(const Expr& e, const Annot& p, const NormalizeOptions& opts) {
    Expr cur = e;
    // every rule shrinks the expression or removes an operator, so this bound is generous
    std::size_t budget = 4 * expr_size(e) + 16;
    for (;;) {
        bool fired = false;
        for (int r : opts.order) {
            if (auto next = apply_rule(r, cur, p)) {
                if (opts.trace) opts.trace->push_back({r, cur, *next});
                cur = *next;
                fired = true;
                break;
            }
        }
        if (!fired) break;
        if (budget-- == 0) throw NotNormalizable("rewriting did not terminate on " + render(e));
    }
    if (classify(cur, p) == Shape::NotNormal)
        throw NotNormalizable("input is not one propagation step over a normal form: " + render(e));
    return cur;
}

Expr minimize_zero(const Expr& e) { return zero_simplify(e); }

bool is_minimized_shape(const Expr& e, const Annot& p) {
    if (is_zero(e)) return true;
    if (classify(e, p) != Shape::NotNormal) return true;
    return e->op == Op::ModMul && same(e->annot, p) && atoms_only(sum_children(e->kids[0]));
}

}  // namespace uprov
