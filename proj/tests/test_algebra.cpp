#include <gtest/gtest.h>

#include <algorithm>

#include "helpers.hpp"
#include "uprov/algebra.hpp"
#include "uprov/structures.hpp"

using namespace uprov;
using testing_support::ExprGen;

namespace {

struct Names {
    AnnotRegistry reg;
    Annot p1 = reg.intern("p1", AnnotKind::Tuple);
    Annot p3 = reg.intern("p3", AnnotKind::Tuple);
    Annot x1 = reg.intern("x1", AnnotKind::Tuple);
    Annot p = reg.intern("p", AnnotKind::Transaction);
    Annot q = reg.intern("q", AnnotKind::Transaction);
};

// all Boolean assignments over the names in ExprGen
bool bool_equivalent(const Expr& a, const Expr& b, const ExprGen& g) {
    auto s = boolean_structure();
    std::vector<Annot> all = g.xs;
    all.insert(all.end(), g.ps.begin(), g.ps.end());
    for (unsigned mask = 0; mask < (1u << all.size()); ++mask) {
        Assignment<bool> v;
        for (std::size_t i = 0; i < all.size(); ++i) v.values[all[i]->name] = mask >> i & 1;
        if (evaluate(a, s, v) != evaluate(b, s, v)) return false;
    }
    return true;
}

}  // namespace

TEST(Algebra, RenderGrammar) {
    Names n;
    EXPECT_EQ(render(zero()), "0");
    EXPECT_EQ(render(leaf(n.p1)), "p1");
    EXPECT_EQ(render(ins(leaf(n.p1), n.p)), "(p1 +I p)");
    EXPECT_EQ(render(del(leaf(n.p1), n.p)), "(p1 - p)");
    EXPECT_EQ(render(modadd(leaf(n.p1), modmul(leaf(n.p3), n.p))), "(p1 +M (p3 .M p))");
    EXPECT_EQ(render(modmul(sum({leaf(n.p3), leaf(n.p1)}), n.p)), "(sum[p1, p3] .M p)");
    EXPECT_EQ(render(frozen(del(leaf(n.p1), n.p))), "frozen{(p1 - p)}");
    EXPECT_EQ(render(frozen(del(leaf(n.p1), n.p)), {false}), "(p1 - p)");
}

TEST(Algebra, SizeCountsEveryNode) {
    Names n;
    EXPECT_EQ(expr_size(leaf(n.p1)), 1u);
    EXPECT_EQ(expr_size(zero()), 1u);
    EXPECT_EQ(expr_size(modmul(sum({leaf(n.p1), leaf(n.p3)}), n.p)), 5u);
    // singleton sums and frozen wrappers add nothing
    EXPECT_EQ(expr_size(modmul(sum({leaf(n.p3)}), n.p)), 3u);
    EXPECT_EQ(expr_size(frozen(del(leaf(n.p1), n.p))), 3u);
    // modify wrapper adds three nodes around the two operands
    Expr t1 = del(leaf(n.p1), n.p), t2 = leaf(n.p3);
    EXPECT_EQ(expr_size(modadd(t2, modmul(sum({t1}), n.p))), expr_size(t1) + 3 + expr_size(t2));
    EXPECT_EQ(expr_size(del(t1, n.p)), expr_size(t1) + 2);
}

TEST(Algebra, ZeroSimplifyWorkedCases) {
    Names n;
    Expr e = modadd(zero(), modmul(sum({leaf(n.p1), leaf(n.p3)}), n.p));
    EXPECT_EQ(render(zero_simplify(e)), "(sum[p1, p3] .M p)");
    EXPECT_EQ(render(zero_simplify(del(zero(), n.p))), "0");
    EXPECT_EQ(render(zero_simplify(ins(zero(), n.p))), "p");
}

TEST(Algebra, ZeroSimplifyDropsZeroContribution) {
    ExprGen g(1);
    Expr x1 = leaf(g.xs[0]);
    const Annot& q = g.ps[1];
    Expr e = modadd(ins(x1, q), modmul(zero(), q));
    Expr s = zero_simplify(e);
    EXPECT_EQ(render(s), "(x1 +I q)");
    EXPECT_TRUE(bool_equivalent(e, s, g));
}

TEST(Algebra, StructEq) {
    Names n;
    EXPECT_TRUE(struct_eq(del(leaf(n.p1), n.p), del(leaf(n.p1), n.p)));
    EXPECT_FALSE(struct_eq(del(leaf(n.p1), n.p), ins(leaf(n.p1), n.p)));
    Expr a = modmul(sum({leaf(n.p1), leaf(n.p3)}), n.p);
    Expr b = modmul(sum({leaf(n.p3), leaf(n.p1)}), n.p);
    EXPECT_TRUE(struct_eq(a, b));
    // singleton sum and its child compare equal
    EXPECT_TRUE(struct_eq(modmul(sum({leaf(n.p1)}), n.p), modmul(leaf(n.p1), n.p)));
}

TEST(Algebra, PermutedSumsEvaluateAlike) {
    Names n;
    Expr a = modmul(sum({leaf(n.p1), leaf(n.p3)}), n.p);
    Expr b = modmul(sum({leaf(n.p3), leaf(n.p1)}), n.p);
    auto bs = boolean_structure();
    for (unsigned m = 0; m < 8; ++m) {
        Assignment<bool> v;
        v.values = {{"p1", bool(m & 1)}, {"p3", bool(m & 2)}, {"p", bool(m & 4)}};
        EXPECT_EQ(evaluate(a, bs, v), evaluate(b, bs, v));
    }
    Universe u{{"IL", "FR", "US"}};
    auto ss = set_structure(u);
    for (SetValue x = 0; x < 8; ++x)
        for (SetValue y = 0; y < 8; ++y) {
            Assignment<SetValue> v;
            v.values = {{"p1", x}, {"p3", y}, {"p", 5}};
            EXPECT_EQ(evaluate(a, ss, v), evaluate(b, ss, v));
        }
    auto ts = trust_structure(0.5);
    for (double x : {0.2, 0.7})
        for (double y : {0.1, 0.9}) {
            Assignment<TrustValue> v;
            v.values = {{"p1", {x, 'U'}}, {"p3", {y, 'U'}}, {"p", {1, 'T'}}};
            EXPECT_TRUE(ts.equal(evaluate(a, ts, v), evaluate(b, ts, v)));
        }
}

TEST(Algebra, StartLeaf) {
    Names n;
    Expr e = modadd(leaf(n.p1), modmul(leaf(n.p3), n.p));
    EXPECT_EQ(render(start_leaf(e)), "p1");
    Expr x = leaf(n.x1);
    Expr s5 = modadd(del(x, n.p), modmul(sum({leaf(n.p3)}), n.p));
    EXPECT_EQ(render(start_leaf(s5)), "x1");
    Expr f = frozen(modmul(sum({leaf(n.p1), leaf(n.p3)}), n.p));
    EXPECT_EQ(start_leaf(f), f);
    EXPECT_THROW(start_leaf(modmul(leaf(n.p1), n.p)), MalformedShape);
}

TEST(Algebra, RegistryKindsAreFixed) {
    AnnotRegistry r;
    r.intern("a", AnnotKind::Tuple);
    EXPECT_NO_THROW(r.intern("a", AnnotKind::Tuple));
    EXPECT_THROW(r.intern("a", AnnotKind::Transaction), std::invalid_argument);
    EXPECT_EQ(r.fresh_name("a"), "a1");
}

// ------------------------------------------------------------ properties

TEST(AlgebraProperty, ZeroSimplifyIdempotentAndShrinking) {
    ExprGen g(42);
    for (int i = 0; i < 2000; ++i) {
        Expr e = g.expr(5);
        Expr s = zero_simplify(e);
        ASSERT_TRUE(struct_eq(zero_simplify(s), s)) << render(e);
        ASSERT_LE(expr_size(s), expr_size(e)) << render(e);
    }
}

TEST(AlgebraProperty, ZeroSimplifyPreservesMeaning) {
    ExprGen g(7);
    Universe u{{"a", "b", "c"}};
    auto ss = set_structure(u);
    auto ts = trust_structure(0.5);
    std::mt19937_64 rng(99);
    for (int i = 0; i < 500; ++i) {
        Expr e = g.expr(5);
        Expr s = zero_simplify(e);
        ASSERT_TRUE(bool_equivalent(e, s, g)) << render(e);
        for (int k = 0; k < 20; ++k) {
            Assignment<SetValue> sv;
            Assignment<TrustValue> tv;
            for (const auto& a : g.xs) {
                sv.values[a->name] = rng() & 7;
                tv.values[a->name] = {std::uniform_real_distribution<double>(0, 1)(rng), "TFU"[rng() % 3]};
            }
            for (const auto& a : g.ps) {
                sv.values[a->name] = rng() & 7;
                tv.values[a->name] = {std::uniform_real_distribution<double>(0, 1)(rng), "TFU"[rng() % 3]};
            }
            ASSERT_EQ(evaluate(e, ss, sv), evaluate(s, ss, sv)) << render(e);
            ASSERT_TRUE(ts.equal(evaluate(e, ts, tv), evaluate(s, ts, tv))) << render(e);
        }
    }
}

TEST(AlgebraProperty, StructEqIsAnEquivalenceInvariantUnderSumPermutation) {
    ExprGen g(3);
    std::mt19937_64 rng(5);
    for (int i = 0; i < 500; ++i) {
        std::vector<Expr> kids;
        for (int k = 0; k < 4; ++k) kids.push_back(g.expr(3));
        Expr a = modmul(sum(kids), g.ps[0]);
        std::shuffle(kids.begin(), kids.end(), rng);
        Expr b = modmul(sum(kids), g.ps[0]);
        std::shuffle(kids.begin(), kids.end(), rng);
        Expr c = modmul(sum(kids), g.ps[0]);
        ASSERT_TRUE(struct_eq(a, a));
        ASSERT_TRUE(struct_eq(a, b));
        ASSERT_TRUE(struct_eq(b, a));
        ASSERT_TRUE(struct_eq(b, c));
        ASSERT_TRUE(struct_eq(a, c));
        ASSERT_EQ(render(a), render(b));
    }
}
