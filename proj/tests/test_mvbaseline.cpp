#include <gtest/gtest.h>

#include "helpers.hpp"
#include "uprov/bench.hpp"
#include "uprov/mvbaseline.hpp"

using namespace uprov;
using testing_support::products_db;
using testing_support::prod;

namespace {

MvOptions worked_options() {
    MvOptions o;
    o.start_nu = 2;
    o.initial["p3"] = mv_parse("I^1_{T,2}(x1)");
    return o;
}

std::string mv_row(const MvDatabase& db, const Tuple& t) {
    const MvRow* r = db.find("Products", t);
    return r ? mv_render(r->expr) : "<absent>";
}

// boolean value of an unversioned expression
bool truth(const MvExpr& e, const std::map<std::string, bool>& v) {
    switch (e->op) {
        case MvOp::Var: return v.at(e->name);
        case MvOp::Plus:
            for (const auto& k : e->kids)
                if (truth(k, v)) return true;
            return false;
        case MvOp::Times:
            for (const auto& k : e->kids)
                if (!truth(k, v)) return false;
            return true;
        default: throw std::logic_error("versioned node after unv");
    }
}

// tuple-level events of a plain run: one per insert, one per deleted or moved tuple
std::uint64_t vanilla_events(const AnnotatedDatabase& db0, const std::vector<Transaction>& txs) {
    std::uint64_t n = 0;
    VanillaDatabase v(support(db0), db0.catalog());
    for (const auto& tx : txs)
        for (const auto& q : tx.queries) {
            if (q.kind == QueryKind::Insert) {
                ++n;
            } else {
                for (const auto& [rel, t] : v.support()) {
                    if (rel != q.relation || !matches(t, q.u1)) continue;
                    if (q.kind == QueryKind::Delete || !(modify_target(t, q.u1, q.u2) == t)) ++n;
                }
            }
            v.apply(q);
        }
    return n;
}

}  // namespace

TEST(Mv, Sizes) {
    EXPECT_EQ(mv_size(mv_var("x")), 1u);
    EXPECT_EQ(mv_size(mv_version(MvOp::U, 1, "T", 3, mv_version(MvOp::I, 1, "T", 2, mv_var("x")))), 3u);
    EXPECT_EQ(mv_size(mv_plus({mv_var("a"), mv_var("b")})), 3u);
    EXPECT_EQ(mv_size(mv_version(MvOp::I, 4, "T", 2, nullptr)), 1u);
}

TEST(Mv, RenderParseRoundTrip) {
    for (std::string s : {"x1", "U^3_{p',5}(U^2_{p,4}(I^1_{T,2}(x1)))", "C^1_{p,5}((p1 + U^3_{p,3}(x1)))",
                          "I^7_{T,9}()", "(a * (b + c))", "D^2_{q,3}(x)"}) {
        MvExpr e = mv_parse(s);
        EXPECT_EQ(mv_render(e), s);
        EXPECT_TRUE(mv_equal(mv_parse(mv_render(e)), e));
    }
    EXPECT_THROW(mv_parse("U^_{p,1}(x)"), std::invalid_argument);
    EXPECT_THROW(mv_parse("(a + b"), std::invalid_argument);
    EXPECT_THROW(mv_parse("x y"), std::invalid_argument);
}

TEST(Mv, UnvStripsHistory) {
    EXPECT_EQ(mv_render(unv(mv_parse("U^3_{p',5}(U^2_{p,4}(I^1_{T,2}(x1)))"))), "x1");
    EXPECT_EQ(mv_render(unv(mv_parse("D^2_{q,3}(x)"))), "0");
    EXPECT_EQ(mv_render(unv(mv_parse("I^7_{T,9}()"))), "1");
    EXPECT_EQ(mv_render(unv(mv_parse("(D^1_{q,3}(a) + U^2_{q,3}(b))"))), "b");
    EXPECT_EQ(mv_render(unv(mv_parse("C^1_{p,5}((U^1_{p,4}(y) + (x + z)))"))), "(x + y + z)");
    EXPECT_EQ(mv_render(unv(mv_parse("(a * D^1_{q,3}(b))"))), "0");
    EXPECT_EQ(mv_render(unv(mv_parse("(b * I^1_{q,3}())"))), "b");
}

TEST(Mv, EventCountAndContainment) {
    MvExpr e = mv_parse("C^1_{p,5}((p1 + U^3_{p,3}(I^1_{T,2}(x1))))");
    EXPECT_EQ(mv_event_count(e), 2u);
    EXPECT_TRUE(mv_contains(e, mv_parse("U^3_{p,3}(I^1_{T,2}(x1))")));
    EXPECT_FALSE(mv_contains(e, mv_parse("U^3_{p,4}(I^1_{T,2}(x1))")));
}

TEST(Mv, EmptyTransactionListKeepsVariables) {
    auto db = mv_run(products_db(), {});
    EXPECT_EQ(db.live_count(), 4u);
    EXPECT_EQ(mv_row(db, prod("Kids mnt bike", "Kids", 120)), "p3");
    EXPECT_EQ(db.total_size(), 4u);
    EXPECT_EQ(db.nu, 1u);
}

TEST(Mv, WorkedSequenceHistories) {
    auto a = mv_run(products_db(), testing_support::txs("t1_t2.tx"), worked_options());
    auto b = mv_run(products_db(), testing_support::txs("t1prime_t2.tx"), worked_options());
    const Tuple bikes = prod("Kids mnt bike", "Bicycles", 120);
    EXPECT_EQ(mv_row(a, bikes), "C^1_{p,5}(U^1_{p,4}((p1 + U^3_{p,3}(I^1_{T,2}(x1)))))");
    EXPECT_EQ(mv_row(b, bikes), "C^3_{p,5}((U^3_{p,3}(I^1_{T,2}(x1)) + U^1_{p,4}(p1)))");
    EXPECT_EQ(mv_row(a, prod("Tennis Racket", "Sport", 50)), "C^2_{p',7}(U^2_{p',6}(p2))");
    EXPECT_FALSE(mv_equal(a.find("Products", bikes)->expr, b.find("Products", bikes)->expr));
    // history is dropped by unv, and both runs agree again
    EXPECT_EQ(mv_render(unv(a.find("Products", bikes)->expr)), "(p1 + x1)");
    EXPECT_TRUE(mv_equal(unv(a.find("Products", bikes)->expr), unv(b.find("Products", bikes)->expr)));
    EXPECT_EQ(a.support(), b.support());
}

TEST(Mv, DeleteLeavesTombstone) {
    auto db = mv_run(products_db(), testing_support::txs("ex123.tx"));
    const MvRow* r = db.find("Products", prod("Children sneakers", "Fashion", 40));
    ASSERT_NE(r, nullptr);
    EXPECT_FALSE(r->live);
    EXPECT_EQ(mv_render(r->expr), "C^4_{p,5}(D^4_{p,3}(p4))");
    EXPECT_EQ(mv_row(db, prod("Lego bricks", "Kids", 90)), "C^5_{p,5}(I^5_{p,2}())");
    EXPECT_EQ(db.support(), run_vanilla(products_db(), testing_support::txs("ex123.tx")));
}

TEST(Mv, NuStrictlyIncreases) {
    auto db = mv_init(products_db());
    auto t = testing_support::txs("t1_t2.tx");
    std::uint64_t last = db.nu;
    for (const auto& tx : t) {
        for (const auto& q : tx.queries) {
            mv_apply(db, q, tx.id);
            EXPECT_GT(db.nu, last);
            last = db.nu;
        }
        mv_commit(db, tx.id);
        EXPECT_GT(db.nu, last);
        last = db.nu;
    }
}

TEST(MvProperty, SupportAndEventCountMatchPlainRuns) {
    PairGen g(61);
    for (int i = 0; i < 200; ++i) {
        auto db0 = pairgen_full_database();
        std::vector<Transaction> ts;
        for (int k = 0; k < 2; ++k) {
            Transaction t = g.random_transaction(1 + (i + k) % 5);
            t.id = "t" + std::to_string(k);
            for (auto& q : t.queries) q.annot = t.id;
            ts.push_back(t);
        }
        auto mv = mv_run(db0, ts);
        ASSERT_EQ(mv.support(), run_vanilla(db0, ts)) << print_transactions(ts);
        std::uint64_t events = 0;
        for (const auto& [n, rel] : mv.relations)
            for (const auto& [t, row] : rel.rows) events += mv_event_count(row.expr);
        ASSERT_EQ(events, vanilla_events(db0, ts)) << print_transactions(ts);
    }
}

TEST(MvProperty, UnvAgreesOnEquivalentPairsUnderBooleans) {
    PairGen g(62);
    std::mt19937_64 rng(7);
    auto db0 = pairgen_full_database();
    int checked = 0;
    for (int i = 0; i < 150; ++i) {
        auto pr = g.equivalent_pair();
        EquivOptions o;
        o.max_tuples = 3;
        if (!equiv_oracle({pr.a}, {pr.b}, g.catalog(), o).equivalent) continue;
        auto ma = mv_run(db0, {pr.a});
        auto mb = mv_run(db0, {pr.b});
        ++checked;
        for (int k = 0; k < 10; ++k) {
            std::map<std::string, bool> v;
            for (int x = 1; x <= 9; ++x) v["x" + std::to_string(x)] = rng() % 2;
            for (const auto& [t, row] : ma.relations.at("R").rows) {
                const MvRow* other = mb.find("R", t);
                bool va = truth(unv(row.expr), v);
                bool vb = other ? truth(unv(other->expr), v) : false;
                ASSERT_EQ(va, vb) << pr.rule << "\n" << print_transactions({pr.a, pr.b}) << render_tuple(t);
            }
        }
    }
    EXPECT_GT(checked, 100);
}
