#include <gtest/gtest.h>

#include "helpers.hpp"
#include "uprov/bench.hpp"
#include "uprov/qlang.hpp"

using namespace uprov;
using testing_support::prod;

namespace {

const Catalog kProducts{{"Products", {"name", "category", "price"}}};

Var v(const std::string& n, std::set<Value> ne = {}) { return Var{n, std::move(ne)}; }

}  // namespace

TEST(Qlang, ParsesWorkedTransaction) {
    auto txs = testing_support::txs("ex123.tx", &kProducts);
    ASSERT_EQ(txs.size(), 1u);
    const auto& q = txs[0].queries;
    ASSERT_EQ(q.size(), 3u);
    EXPECT_EQ(txs[0].id, "p");
    EXPECT_EQ(q[0].kind, QueryKind::Insert);
    EXPECT_EQ(q[0].tuple, prod("Lego bricks", "Kids", 90));
    EXPECT_EQ(q[1].kind, QueryKind::Delete);
    EXPECT_EQ(q[1].u1, (Pattern{v("a"), Value::str("Fashion"), v("b")}));
    EXPECT_EQ(q[2].kind, QueryKind::Modify);
    EXPECT_EQ(q[2].u1, (Pattern{Value::str("Kids mnt bike"), v("a"), v("b")}));
    EXPECT_EQ(q[2].u2, (Pattern{Value::str("Kids mnt bike"), Value::str("Bicycles"), v("b")}));
    for (const auto& x : q) EXPECT_EQ(x.annot, "p");
}

TEST(Qlang, TransactionAnnotationsMayCarryPrimes) {
    auto txs = testing_support::txs("t2.tx");
    ASSERT_EQ(txs.size(), 1u);
    EXPECT_EQ(txs[0].id, "p'");
}

TEST(Qlang, DisequalitiesAndRepeatedVariables) {
    auto txs = parse_transactions("BEGIN q\nR^-(a [!= 1, != 2], a):-\nEND\n");
    const Pattern& u = txs[0].queries[0].u1;
    ASSERT_EQ(u.size(), 2u);
    // repeated variables share their disequalities
    EXPECT_EQ(std::get<Var>(u[0]).not_equal, (std::set<Value>{Value::num(1), Value::num(2)}));
    EXPECT_EQ(std::get<Var>(u[1]).not_equal, std::get<Var>(u[0]).not_equal);
    EXPECT_TRUE(matches({Value::num(3), Value::num(3)}, u));
    EXPECT_FALSE(matches({Value::num(3), Value::num(4)}, u));
    EXPECT_FALSE(matches({Value::num(1), Value::num(1)}, u));
}

TEST(Qlang, ModifyTarget) {
    Pattern u1{v("a"), Value::str("Sport"), v("c")};
    Pattern u2{v("a"), Value::str("Sport"), Value::num(50)};
    EXPECT_EQ(modify_target(prod("Tennis Racket", "Sport", 70), u1, u2), prod("Tennis Racket", "Sport", 50));
    EXPECT_THROW(modify_target(prod("Tennis Racket", "Kids", 70), u1, u2), QueryError);
}

TEST(Qlang, NumbersAreCanonical) {
    EXPECT_EQ(Value::num("007"), Value::num(7));
    EXPECT_EQ(Value::num("1.50"), Value::num("1.5"));
    EXPECT_EQ(Value::num("-0"), Value::num(0));
    EXPECT_NE(Value::num(7), Value::str("7"));
}

TEST(Qlang, ErrorsCarryPositions) {
    try {
        parse_transactions("BEGIN p\nProducts^+(\"x\", 1):-\nEND\n", &kProducts);
        FAIL() << "arity mismatch accepted";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line, 2u);
    }
    EXPECT_THROW(parse_transactions("BEGIN p\nEND\nBEGIN p\nEND\n"), ParseError);
    EXPECT_THROW(parse_transactions("BEGIN p\nBEGIN q\n"), ParseError);
    EXPECT_THROW(parse_transactions("BEGIN p\nR^M(a ; b):-\nEND\n"), ParseError);   // new variable in u2
    EXPECT_THROW(parse_transactions("BEGIN p\nR^M(a, b ; b, a):-\nEND\n"), ParseError);  // moved variable
    EXPECT_THROW(parse_transactions("BEGIN p\nR^+(a):-\nEND\n"), ParseError);  // insert needs constants
    EXPECT_THROW(parse_transactions("BEGIN p\nUnknown^+(1):-\nEND\n", &kProducts), ParseError);
    EXPECT_THROW(parse_transactions("BEGIN p\nR^+(1):-\n"), ParseError);  // missing END
}

TEST(Qlang, CommentsAndBlankLinesAreSkipped) {
    auto txs = parse_transactions("# header\n\n-- note\nBEGIN p\nR^+(1):-\nEND\n");
    ASSERT_EQ(txs.size(), 1u);
    EXPECT_EQ(txs[0].queries.size(), 1u);
}

TEST(Qlang, SqlFragment) {
    const std::string sql =
        "INSERT INTO Products VALUES ('Lego bricks', 'Kids', 90);\n"
        "DELETE FROM Products WHERE category = 'Fashion';\n"
        "UPDATE Products SET category = 'Bicycles' WHERE name = 'Kids mnt bike';\n";
    auto sqltx = parse_sql_fragment(sql, kProducts, "p");
    auto dl = testing_support::txs("ex123.tx", &kProducts);
    ASSERT_EQ(sqltx.size(), 1u);
    ASSERT_EQ(sqltx[0].queries.size(), 3u);
    // same behavior as the datalog form on every small database
    EquivOptions o;
    o.max_tuples = 2;
    EXPECT_TRUE(equiv_oracle(sqltx, dl, kProducts, o).equivalent);
}

TEST(Qlang, SqlDisequalityBecomesVariableConstraint) {
    auto txs = parse_sql_fragment("DELETE FROM Products WHERE category <> 'Sport' AND price = 40", kProducts);
    const Pattern& u = txs[0].queries[0].u1;
    EXPECT_TRUE(matches(prod("Children sneakers", "Fashion", 40), u));
    EXPECT_FALSE(matches(prod("Children sneakers", "Sport", 40), u));
    EXPECT_FALSE(matches(prod("Children sneakers", "Fashion", 41), u));
}

TEST(Qlang, SqlRejectsNonHyperplaneConstructs) {
    auto rejected = [](const std::string& s, const std::string& why) {
        try {
            parse_sql_fragment(s, kProducts);
        } catch (const ParseError& e) {
            return std::string(e.what()).find(why) != std::string::npos;
        }
        return false;
    };
    EXPECT_TRUE(rejected("DELETE FROM Products WHERE price = (SELECT price FROM Products)", "subquery"));
    EXPECT_TRUE(rejected("DELETE FROM Products JOIN Other", "join"));
    EXPECT_TRUE(rejected("DELETE FROM Products, Other WHERE price = 1", "join"));
    EXPECT_TRUE(rejected("DELETE FROM Products WHERE price = 1 OR price = 2", "disjunction"));
    EXPECT_TRUE(rejected("DELETE FROM Products WHERE name = category", "comparison between attributes"));
    EXPECT_TRUE(rejected("DELETE FROM Products WHERE price < 3", "range comparison"));
    EXPECT_TRUE(rejected("UPDATE Products SET price = price + 1", "non-constant SET"));
    EXPECT_TRUE(rejected("DELETE FROM Products WHERE price = 1 AND price = 2", "contradictory"));
}

TEST(QlangProperty, PrintParseRoundTrip) {
    PairGen g(11);
    for (int i = 0; i < 300; ++i) {
        std::vector<Transaction> txs{g.random_transaction(1 + i % 5)};
        std::string text = print_transactions(txs);
        auto back = parse_transactions(text);
        ASSERT_EQ(back, txs) << text;
        ASSERT_EQ(print_transactions(back), text);
    }
}

TEST(QlangProperty, StringsSurviveQuoting) {
    std::vector<std::string> nasty{"a\"b", "back\\slash", "comma, inside", "it's", " spaced "};
    for (const auto& s : nasty) {
        Transaction tx{"p", {}};
        HyperplaneQuery q;
        q.relation = "R";
        q.kind = QueryKind::Insert;
        q.tuple = {Value::str(s)};
        q.annot = "p";
        tx.queries.push_back(q);
        auto back = parse_transactions(print_transactions({tx}));
        ASSERT_EQ(back[0].queries[0].tuple[0], Value::str(s)) << s;
    }
}

TEST(Qlang, SqlTransactionBlocks) {
    const std::string sql =
        "DELETE FROM Products WHERE category = 'Fashion'\n"
        "BEGIN t1\n"
        "UPDATE Products SET price = 50 WHERE category = 'Sport'\n"
        "COMMIT\n"
        "BEGIN t2;\n"
        "INSERT INTO Products VALUES ('it''s', 'Kids', 1)\n"
        "END\n";
    auto txs = parse_sql_fragment(sql, kProducts);
    ASSERT_EQ(txs.size(), 3u);
    EXPECT_EQ(txs[0].id, "q");  // loose statements come first
    EXPECT_EQ(txs[1].id, "t1");
    EXPECT_EQ(txs[2].id, "t2");
    EXPECT_EQ(txs[2].queries[0].tuple[0], Value::str("it's"));
    EXPECT_EQ(txs[1].queries[0].annot, "t1");
    EXPECT_THROW(parse_sql_fragment("BEGIN t\nDELETE FROM Products\n", kProducts), ParseError);
    EXPECT_THROW(parse_sql_fragment("COMMIT\n", kProducts), ParseError);
}
