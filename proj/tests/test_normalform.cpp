#include <gtest/gtest.h>

#include "helpers.hpp"
#include "uprov/bench.hpp"
#include "uprov/normalform.hpp"

using namespace uprov;
using testing_support::products_db;
using testing_support::prod;
using testing_support::row_expr;

namespace {

struct Ctx {
    AnnotRegistry reg;
    Annot p = reg.intern("p", AnnotKind::Transaction);
    Annot q = reg.intern("q", AnnotKind::Transaction);
    Expr e(const std::string& s) { return parse_expr(s, reg); }
    std::string rule(int r, const std::string& s) {
        auto out = apply_rule(r, e(s), p);
        return out ? render(*out) : "-";
    }
};

}  // namespace

TEST(NormalForm, ClassifiesTheFiveShapes) {
    Ctx c;
    EXPECT_EQ(classify(c.e("x1"), c.p), Shape::S1);
    EXPECT_EQ(classify(c.e("frozen{(x1 - q)}"), c.p), Shape::S1);
    EXPECT_EQ(classify(c.e("(x1 +I p)"), c.p), Shape::S2);
    EXPECT_EQ(classify(c.e("(x1 - p)"), c.p), Shape::S3);
    EXPECT_EQ(classify(c.e("(x1 +M (sum[x2, x3] .M p))"), c.p), Shape::S4);
    EXPECT_EQ(classify(c.e("((x1 - p) +M (x2 .M p))"), c.p), Shape::S5);

    EXPECT_EQ(classify(c.e("((x1 - p) - p)"), c.p), Shape::NotNormal);
    EXPECT_EQ(classify(c.e("(x1 +I q)"), c.p), Shape::NotNormal);
    EXPECT_EQ(classify(c.e("(x1 +M ((x2 - p) .M p))"), c.p), Shape::NotNormal);
    EXPECT_EQ(classify(c.e("((x1 +I p) +M (x2 .M p))"), c.p), Shape::NotNormal);
    EXPECT_EQ(shape_name(Shape::S4), "S4");
}

TEST(NormalForm, EachRuleOnItsOwnRedex) {
    Ctx c;
    EXPECT_EQ(c.rule(1, "((x1 - p) +I p)"), "(x1 +I p)");
    EXPECT_EQ(c.rule(1, "((x1 +M (sum[x2, x3] .M p)) +I p)"), "(x1 +I p)");
    EXPECT_EQ(c.rule(2, "((x1 +M (x2 .M p)) - p)"), "(x1 - p)");
    EXPECT_EQ(c.rule(2, "(((x1 - p) +M (x2 .M p)) - p)"), "(x1 - p)");
    EXPECT_EQ(c.rule(3, "(x1 +M (sum[(x2 - p), (x3 - p)] .M p))"), "x1");
    EXPECT_EQ(c.rule(4, "(x1 +M (sum[(x2 +I p), x3] .M p))"), "(x1 +I p)");
    EXPECT_EQ(c.rule(5, "((x1 +I p) +M (x2 .M p))"), "(x1 +I p)");
    EXPECT_EQ(c.rule(6, "((x1 +M (x2 .M p)) +M (x3 .M p))"), "(x1 +M (sum[x2, x3] .M p))");
    EXPECT_EQ(c.rule(7, "(0 +M ((x1 +M (x3 .M p)) .M p))"), "(0 +M (sum[x1, x3] .M p))");
    EXPECT_EQ(c.rule(8, "(x1 +M (sum[(x2 - p), x3] .M p))"), "(x1 +M (x3 .M p))");
    EXPECT_EQ(c.rule(9, "((x1 - p) +M (sum[x1, x2] .M p))"), "(x1 +M (x2 .M p))");
    EXPECT_EQ(c.rule(9, "((x1 - p) +M (x1 .M p))"), "x1");
}

TEST(NormalForm, RulesDeclineWhatTheyDoNotMatch) {
    Ctx c;
    EXPECT_EQ(c.rule(1, "(x1 +I p)"), "-");
    EXPECT_EQ(c.rule(1, "((x1 - p) +I q)"), "-");
    EXPECT_EQ(c.rule(2, "(x1 - p)"), "-");
    EXPECT_EQ(c.rule(3, "(x1 +M (sum[(x2 - p), x3] .M p))"), "-");
    EXPECT_EQ(c.rule(4, "(x1 +M (x2 .M p))"), "-");
    EXPECT_EQ(c.rule(5, "(x1 +M (x2 .M p))"), "-");
    EXPECT_EQ(c.rule(8, "(x1 +M ((x2 - p) .M p))"), "-");  // rule 3 owns the all-deleted case
    EXPECT_EQ(c.rule(9, "(x1 +M (sum[x1, x2] .M p))"), "-");  // never left
    EXPECT_THROW(apply_rule(10, c.e("x1"), c.p), std::invalid_argument);
}

TEST(NormalForm, WorkedTransactionTrace) {
    auto db = products_db();
    std::vector<RuleStep> trace;
    db.rule_trace = &trace;
    run_transactions(db, testing_support::txs("t1.tx"), Mode::NormalForm);
    std::vector<std::pair<int, std::string>> got;
    for (const auto& s : trace) got.emplace_back(s.rule, render(s.rhs, {false}));
    // second update: rule 2 on the Sport bike, rule 7 on the Bicycles bike
    EXPECT_NE(std::find(got.begin(), got.end(), std::make_pair(2, std::string("(p1 - p)"))), got.end());
    EXPECT_NE(std::find(got.begin(), got.end(), std::make_pair(7, std::string("(0 +M (sum[p1, p3] .M p))"))),
              got.end());
    EXPECT_EQ(row_expr(db, prod("Kids mnt bike", "Bicycles", 120)), "(sum[p1, p3] .M p)");
    EXPECT_EQ(row_expr(db, prod("Kids mnt bike", "Sport", 120)), "(p1 - p)");
    EXPECT_EQ(row_expr(db, prod("Kids mnt bike", "Kids", 120)), "(p3 - p)");
}

TEST(NormalForm, NormalizeStepRejectsForeignInput) {
    Ctx c;
    // two transactions deep: not one step over a normal form
    EXPECT_THROW(normalize_step(c.e("((x1 +I q) +M (x2 .M p))"), c.p), NotNormalizable);
    EXPECT_EQ(render(normalize_step(c.e("((x1 - p) +I p)"), c.p)), "(x1 +I p)");
}

TEST(NormalForm, RuleOrderDoesNotChangeTheResult) {
    Ctx c;
    Expr e = c.e("((((x1 - p) +M (sum[x2, (x3 - p)] .M p)) +M (x4 .M p)) - p)");
    NormalizeOptions reversed;
    reversed.order = {5, 2, 1, 6, 9, 7, 4, 8, 3};
    EXPECT_TRUE(struct_eq(normalize_step(e, c.p), normalize_step(e, c.p, reversed)));
}

TEST(NormalForm, MinimizedShapes) {
    Ctx c;
    EXPECT_EQ(render(minimize_zero(c.e("(0 +M (sum[x1, x3] .M p))"))), "(sum[x1, x3] .M p)");
    EXPECT_EQ(render(minimize_zero(c.e("(0 +I p)"))), "p");
    EXPECT_EQ(render(minimize_zero(c.e("(0 - p)"))), "0");
    EXPECT_TRUE(is_minimized_shape(c.e("(sum[x1, x3] .M p)"), c.p));
    EXPECT_TRUE(is_minimized_shape(c.e("0"), c.p));
    EXPECT_FALSE(is_minimized_shape(c.e("(sum[x1, (x3 - p)] .M p)"), c.p));
}

TEST(NormalForm, AdversarialRowsStayBounded) {
    auto peak = [](std::size_t i) {
        Workload w = gen_adversarial(i);
        run_transactions(w.db, w.txs, Mode::NormalForm);
        return w.db.peak_row_size();
    };
    const auto bound = peak(2);
    for (std::size_t i : {1u, 3u, 10u, 200u}) EXPECT_LE(peak(i), bound) << i;
}

TEST(NormalFormProperty, StepsLandInNormalShapes) {
    PairGen g(21);
    for (int i = 0; i < 300; ++i) {
        auto db = pairgen_full_database();
        Transaction t = g.random_transaction(1 + i % 6);
        begin_transaction(db, t.id, Mode::NormalForm);
        Annot p = db.registry.find(t.id);
        for (const auto& q : t.queries) {
            apply_query(db, q, Mode::NormalForm);
            for (const auto& row : db.relation("R").rows())
                ASSERT_NE(classify(row.state.expr, p), Shape::NotNormal)
                    << print_transactions({t}) << render(row.state.expr);
        }
        commit_transaction(db, Mode::NormalForm);
        for (const auto& row : db.relation("R").rows())
            ASSERT_TRUE(is_minimized_shape(row.state.expr, p)) << render(row.state.expr);
    }
}

TEST(NormalFormProperty, AgreesWithNaiveUnderEveryStructure) {
    PairGen g(33);
    for (int i = 0; i < 60; ++i) {
        std::vector<Transaction> ts;
        for (int k = 0; k < 3; ++k) {
            Transaction t = g.random_transaction(1 + (i + k) % 5);
            t.id = "t" + std::to_string(k);
            for (auto& q : t.queries) q.annot = t.id;
            ts.push_back(t);
        }
        std::string d = testing_support::mode_agreement(pairgen_full_database(), ts, 30, 1000 + i);
        ASSERT_TRUE(d.empty()) << d << "\n" << print_transactions(ts);
    }
}

TEST(NormalFormProperty, RuleStepsPreserveMeaning) {
    // each traced rewrite is an equality under the boolean structure
    PairGen g(44);
    testing_support::RandomAssignments gen(3);
    auto sb = boolean_structure();
    for (int i = 0; i < 150; ++i) {
        auto db = pairgen_full_database();
        std::vector<RuleStep> trace;
        db.rule_trace = &trace;
        run_transaction(db, g.random_transaction(2 + i % 5), Mode::NormalForm);
        for (const auto& s : trace)
            for (int k = 0; k < 8; ++k) {
                auto a = gen.boolean(db.registry);
                ASSERT_EQ(evaluate(s.lhs, sb, a), evaluate(s.rhs, sb, a))
                    << "rule " << s.rule << ": " << render(s.lhs) << " => " << render(s.rhs);
            }
    }
}
