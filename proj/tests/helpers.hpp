#pragma once

#include <array>
#include <fstream>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include "uprov/algebra.hpp"
#include "uprov/bench.hpp"
#include "uprov/engine.hpp"
#include "uprov/qlang.hpp"
#include "uprov/structures.hpp"

namespace uprov {
// readable gtest diagnostics
inline void PrintTo(const Value& v, std::ostream* os) { *os << v.quoted(); }
}  // namespace uprov

namespace testing_support {

inline std::string data_path(const std::string& rel) { return std::string(UPROV_TEST_DATA) + "/" + rel; }

inline std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline uprov::AnnotatedDatabase products_db() { return uprov::load_database(data_path("products")); }

inline std::vector<uprov::Transaction> txs(const std::string& file, const uprov::Catalog* cat = nullptr) {
    return uprov::parse_transactions(slurp(data_path(file)), cat);
}

inline uprov::Tuple prod(const std::string& name, const std::string& cat, long long price) {
    return {uprov::Value::str(name), uprov::Value::str(cat), uprov::Value::num(price)};
}

inline std::string row_expr(const uprov::AnnotatedDatabase& db, const uprov::Tuple& t,
                            const std::string& rel = "Products", bool frozen_braces = true) {
    const auto* r = db.relation(rel).find(t);
    return r ? uprov::render(r->state.expr, {frozen_braces}) : "<absent>";
}

// Random expression over leaves x1..x4 (tuples) and p, q (transactions).
struct ExprGen {
    uprov::AnnotRegistry reg;
    std::vector<uprov::Annot> xs, ps;
    std::mt19937_64 rng;

    explicit ExprGen(std::uint64_t seed) : rng(seed) {
        for (int i = 1; i <= 4; ++i) xs.push_back(reg.intern("x" + std::to_string(i), uprov::AnnotKind::Tuple));
        ps.push_back(reg.intern("p", uprov::AnnotKind::Transaction));
        ps.push_back(reg.intern("q", uprov::AnnotKind::Transaction));
    }

    uprov::Expr atom() {
        int k = std::uniform_int_distribution<int>(0, 5)(rng);
        if (k == 0) return uprov::zero();
        return uprov::leaf(xs[std::uniform_int_distribution<std::size_t>(0, xs.size() - 1)(rng)]);
    }

    uprov::Annot p() { return ps[std::uniform_int_distribution<std::size_t>(0, ps.size() - 1)(rng)]; }

    uprov::Expr expr(int depth) {
        using namespace uprov;
        if (depth <= 0) return atom();
        switch (std::uniform_int_distribution<int>(0, 6)(rng)) {
            case 0: return atom();
            case 1: return ins(expr(depth - 1), p());
            case 2: return del(expr(depth - 1), p());
            case 3: return modadd(expr(depth - 1), expr(depth - 1));
            case 4: return modmul(expr(depth - 1), p());
            case 5: {
                std::vector<Expr> kids;
                int n = std::uniform_int_distribution<int>(1, 3)(rng);
                for (int i = 0; i < n; ++i) kids.push_back(expr(depth - 1));
                return modmul(sum(kids), p());
            }
            default: return frozen(expr(depth - 1));
        }
    }
};

// First tuple whose value differs between two runs under (s, v); rows one run
// dropped read as 0. Empty when they agree.
template <class V>
std::string disagreement(const uprov::AnnotatedDatabase& a, const uprov::AnnotatedDatabase& b,
                         const uprov::UpdateStructure<V>& s, const uprov::Assignment<V>& v) {
    using namespace uprov;
    auto value = [&](const AnnotatedDatabase& db, const std::string& rel, const Tuple& t) {
        const Row* r = db.relation(rel).find(t);
        return r ? evaluate(r->state.expr, s, v) : s.zero;
    };
    for (const auto* db : {&a, &b})
        for (const auto& [n, rel] : db->relations)
            for (const auto& row : rel.rows()) {
                V x = value(a, n, row.tuple), y = value(b, n, row.tuple);
                if (!s.equal(x, y))
                    return s.name + " " + n + render_tuple(row.tuple) + ": " + s.show(x) + " vs " + s.show(y);
            }
    return {};
}

// Random values for every annotation of the registry.
struct RandomAssignments {
    std::mt19937_64 rng;
    explicit RandomAssignments(std::uint64_t seed) : rng(seed) {}

    uprov::Assignment<bool> boolean(const uprov::AnnotRegistry& reg) {
        uprov::Assignment<bool> a;
        for (const auto& x : reg.all()) a.values[x->name] = rng() % 4 != 0;
        return a;
    }
    uprov::Assignment<uprov::SetValue> set(const uprov::AnnotRegistry& reg, const uprov::Universe& u) {
        uprov::Assignment<uprov::SetValue> a;
        for (const auto& x : reg.all()) a.values[x->name] = rng() & u.full();
        return a;
    }
    uprov::Assignment<uprov::TrustValue> trust(const uprov::AnnotRegistry& reg, double level) {
        static const char rs[] = {'T', 'F', 'U'};
        uprov::Assignment<uprov::TrustValue> a;
        std::uniform_real_distribution<double> d(0, 1);
        for (const auto& x : reg.all()) {
            double v = rng() % 4 == 0 ? level : d(rng);
            a.values[x->name] = uprov::TrustValue{v, rs[rng() % 3]};
        }
        return a;
    }
};

// Runs naive and normal-form modes from db0 and compares support plus n random
// assignments per built-in structure. Empty when everything agrees.
inline std::string mode_agreement(const uprov::AnnotatedDatabase& db0, const std::vector<uprov::Transaction>& txs,
                                  int n, std::uint64_t seed) {
    using namespace uprov;
    AnnotatedDatabase naive = db0, normal = db0;
    run_transactions(naive, txs, Mode::Naive);
    run_transactions(normal, txs, Mode::NormalForm);
    if (support(naive) != support(normal)) return "support differs";
    RandomAssignments gen(seed);
    Universe u{{"a", "b", "c"}};
    auto sb = boolean_structure();
    auto ss = set_structure(u);
    std::array<UpdateStructure<TrustValue>, 3> st{trust_structure(0), trust_structure(0.5), trust_structure(1)};
    for (int i = 0; i < n; ++i) {
        std::string d = disagreement(naive, normal, sb, gen.boolean(naive.registry));
        if (d.empty()) d = disagreement(naive, normal, ss, gen.set(naive.registry, u));
        for (std::size_t k = 0; k < st.size() && d.empty(); ++k) {
            double level = k * 0.5;
            d = disagreement(naive, normal, st[k], gen.trust(naive.registry, level));
        }
        if (!d.empty()) return d;
    }
    return {};
}

// Naive-mode row sizes (t1, t2) of the adversarial workload after k updates, k = 0..2i.
inline std::vector<std::pair<std::uint64_t, std::uint64_t>> adversarial_sizes(std::size_t i) {
    using namespace uprov;
    Workload w = gen_adversarial(i);
    const Tuple a{Value::str("a")}, b{Value::str("b")};
    auto sizes = [&] {
        const auto& r = w.db.relation("R");
        return std::make_pair(expr_size(r.find(a)->state.expr), expr_size(r.find(b)->state.expr));
    };
    std::vector<std::pair<std::uint64_t, std::uint64_t>> out{sizes()};
    begin_transaction(w.db, w.txs[0].id, Mode::Naive);
    for (const auto& q : w.txs[0].queries) {
        apply_query(w.db, q, Mode::Naive);
        out.push_back(sizes());
    }
    commit_transaction(w.db, Mode::Naive);
    return out;
}

// Checks the four size recurrences and the 2^i lower bound for i = 1..n, where the
// k-th state of the recurrences is the one reached after k - 1 updates. Empty when all hold.
inline std::string prop3_violation(std::size_t n) {
    auto s = adversarial_sizes(n);
    // P(k) = sizes after k - 1 updates
    auto P = [&](std::size_t k) { return s.at(k - 1); };
    for (std::size_t i = 1; i <= n; ++i) {
        std::string at = " at i=" + std::to_string(i);
        if (P(2 * i).second != P(2 * i - 1).first + 3 + P(2 * i - 1).second) return "t2 merge recurrence" + at;
        if (P(2 * i).first != P(2 * i - 1).first + 2) return "t1 delete recurrence" + at;
        if (2 * i + 1 <= s.size()) {
            if (P(2 * i + 1).first != P(2 * i).first + 3 + P(2 * i).second) return "t1 merge recurrence" + at;
            if (P(2 * i + 1).second != P(2 * i).second + 2) return "t2 delete recurrence" + at;
        }
        if (i < 64 && P(2 * i).second <= (std::uint64_t{1} << i)) return "2^i bound" + at;
    }
    return {};
}

}  // namespace testing_support
