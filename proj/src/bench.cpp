#include "uprov/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <unordered_set>

#include <json.hpp>

#include "uprov/mvbaseline.hpp"
#include "uprov/structures.hpp"

namespace uprov {

// ---------------------------------------------------------------- config

void WorkloadConfig::validate() const {
    if (!(affected_fraction > 0 && affected_fraction <= 1))
        throw std::invalid_argument("affected_fraction must lie in (0,1]");
    if (n_columns == 0) throw std::invalid_argument("n_columns must be positive");
    if (domain_size == 0) throw std::invalid_argument("domain_size must be positive");
    if (kind == WorkloadKind::Adversarial && iterations == 0)
        throw std::invalid_argument("adversarial workloads need iterations >= 1");
}

WorkloadConfig config_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("workload config: ") + e.what());
    }
    if (!j.is_object()) throw std::invalid_argument("workload config must be a JSON object");
    static const std::set<std::string> known{"n_tuples", "domain_size", "n_columns", "n_transactions",
                                             "statements_per_tx", "affected_fraction", "kind", "iterations",
                                             "seed"};
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known.count(it.key())) throw std::invalid_argument("workload config: unknown key '" + it.key() + "'");
    WorkloadConfig c;
    try {
        c.n_tuples = j.value("n_tuples", c.n_tuples);
        c.domain_size = j.value("domain_size", c.domain_size);
        c.n_columns = j.value("n_columns", c.n_columns);
        c.n_transactions = j.value("n_transactions", c.n_transactions);
        c.statements_per_tx = j.value("statements_per_tx", c.statements_per_tx);
        c.affected_fraction = j.value("affected_fraction", c.affected_fraction);
        c.iterations = j.value("iterations", c.iterations);
        c.seed = j.value("seed", c.seed);
        std::string kind = j.value("kind", std::string("synthetic"));
        if (kind == "synthetic")
            c.kind = WorkloadKind::Synthetic;
        else if (kind == "adversarial")
            c.kind = WorkloadKind::Adversarial;
        else if (kind == "order")
            c.kind = WorkloadKind::OrderStyle;
        else
            throw std::invalid_argument("workload config: unknown kind '" + kind + "'");
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("workload config: ") + e.what());
    }
    c.validate();
    return c;
}

std::size_t Workload::statements() const {
    std::size_t n = 0;
    for (const auto& tx : txs) n += tx.queries.size();
    return n;
}

// ---------------------------------------------------------------- generators

namespace {

std::size_t pick(std::mt19937_64& rng, std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }

Var var(const std::string& name) { return Var{name, {}}; }

HyperplaneQuery insert_q(const std::string& rel, Tuple t, const std::string& annot) {
    HyperplaneQuery q;
    q.relation = rel;
    q.kind = QueryKind::Insert;
    q.tuple = std::move(t);
    q.annot = annot;
    return q;
}

HyperplaneQuery delete_q(const std::string& rel, Pattern u, const std::string& annot) {
    HyperplaneQuery q;
    q.relation = rel;
    q.kind = QueryKind::Delete;
    q.u1 = std::move(u);
    q.annot = annot;
    return q;
}

HyperplaneQuery modify_q(const std::string& rel, Pattern u1, Pattern u2, const std::string& annot) {
    check_modify_shape(u1, u2);
    HyperplaneQuery q;
    q.relation = rel;
    q.kind = QueryKind::Modify;
    q.u1 = std::move(u1);
    q.u2 = std::move(u2);
    q.annot = annot;
    return q;
}

}  // namespace

Workload gen_synthetic(const WorkloadConfig& cfg) {
    cfg.validate();
    std::mt19937_64 rng(cfg.seed);
    const std::size_t cols = cfg.n_columns;
    // hot pool: the tuples deletes and modifies can reach, one selection value each
    const std::size_t hot =
        cfg.n_tuples == 0
            ? 0
            : std::clamp<std::size_t>(static_cast<std::size_t>(std::llround(cfg.affected_fraction * cfg.n_tuples)), 1,
                                      cfg.n_tuples);
    // everything else, inserts included, lives on selection values no statement names
    std::size_t cold = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(1.0 / cfg.affected_fraction)));
    if (cols == 1) cold = std::max(cold, 2 * cfg.n_tuples + 1);

    double capacity = static_cast<double>(cold) * std::pow(static_cast<double>(cfg.domain_size), double(cols - 1));
    if (static_cast<double>(cfg.n_tuples - hot) > capacity)
        throw std::invalid_argument("domain too small for " + std::to_string(cfg.n_tuples) + " distinct tuples");

    std::vector<std::string> names;
    for (std::size_t i = 1; i <= cols; ++i) names.push_back("c" + std::to_string(i));

    auto num = [](std::size_t v) { return Value::num(static_cast<long long>(v)); };
    auto tuple_at = [&](std::size_t key) {
        Tuple t{num(key)};
        for (std::size_t i = 1; i < cols; ++i) t.push_back(num(pick(rng, cfg.domain_size)));
        return t;
    };
    auto cold_tuple = [&] { return tuple_at(hot + pick(rng, cold)); };

    Workload w;
    w.db.add_relation("R", names);
    std::unordered_set<Tuple, TupleHash> seen;
    for (std::size_t h = 0; h < hot; ++h) {
        Tuple t = tuple_at(h);
        seen.insert(t);
        w.db.add_row("R", t);
    }
    while (seen.size() < cfg.n_tuples) {
        Tuple t = cold_tuple();
        if (seen.insert(t).second) w.db.add_row("R", t);
    }

    for (std::size_t k = 1; k <= cfg.n_transactions; ++k) {
        Transaction tx{"T" + std::to_string(k), {}};
        for (std::size_t s = 0; s < cfg.statements_per_tx; ++s) {
            int kind = hot == 0 ? 0 : static_cast<int>(pick(rng, 3));
            if (kind == 0) {
                tx.queries.push_back(insert_q("R", cold_tuple(), tx.id));
                continue;
            }
            // selection on c1 = a pool value, the rest free
            Pattern u1{num(pick(rng, hot))};
            for (std::size_t i = 1; i < cols; ++i) u1.push_back(var("v" + std::to_string(i + 1)));
            if (kind == 1) {
                tx.queries.push_back(delete_q("R", u1, tx.id));
                continue;
            }
            Pattern u2 = u1;
            if (cols == 1) {
                u2[0] = num(pick(rng, hot));
            } else {
                std::size_t j = 1 + pick(rng, cols - 1);
                u2[j] = num(pick(rng, cfg.domain_size));
            }
            tx.queries.push_back(modify_q("R", u1, u2, tx.id));
        }
        w.txs.push_back(std::move(tx));
    }
    return w;
}

Workload gen_adversarial(std::size_t iterations) {
    if (iterations == 0) throw std::invalid_argument("adversarial workloads need iterations >= 1");
    Workload w;
    w.db.add_relation("R", {"v"});
    w.db.add_row("R", {Value::str("a")}, "xa");
    w.db.add_row("R", {Value::str("b")}, "xb");
    Transaction tx{"p", {}};
    for (std::size_t i = 0; i < iterations; ++i) {
        tx.queries.push_back(modify_q("R", {Value::str("a")}, {Value::str("b")}, "p"));
        tx.queries.push_back(modify_q("R", {Value::str("b")}, {Value::str("a")}, "p"));
    }
    w.txs.push_back(std::move(tx));
    return w;
}

Workload gen_order_style(const WorkloadConfig& cfg) {
    cfg.validate();
    std::mt19937_64 rng(cfg.seed);
    const std::size_t customers = std::max<std::size_t>(1, cfg.n_tuples / 4);
    const std::size_t items = std::max<std::size_t>(1, cfg.n_tuples / 4);
    const std::size_t orders = cfg.n_tuples > customers + items ? cfg.n_tuples - customers - items : 0;
    auto num = [](std::size_t v) { return Value::num(static_cast<long long>(v)); };
    const Value fresh = Value::str("new"), done = Value::str("done");

    Workload w;
    w.db.add_relation("Customers", {"c_id", "balance"});
    w.db.add_relation("Stock", {"item", "qty"});
    w.db.add_relation("Orders", {"o_id", "c_id", "status"});
    for (std::size_t c = 0; c < customers; ++c) w.db.add_row("Customers", {num(c), num(pick(rng, 1000))});
    for (std::size_t i = 0; i < items; ++i) w.db.add_row("Stock", {num(i), num(pick(rng, 100))});
    for (std::size_t o = 0; o < orders; ++o)
        w.db.add_row("Orders", {num(o), num(pick(rng, customers)), pick(rng, 2) ? fresh : done});

    std::size_t next_order = orders;
    for (std::size_t k = 1; k <= cfg.n_transactions; ++k) {
        Transaction tx{"T" + std::to_string(k), {}};
        while (tx.queries.size() < cfg.statements_per_tx) {
            switch (pick(rng, 4)) {
                case 0: {  // new order: record it and take one item from stock
                    tx.queries.push_back(insert_q("Orders", {num(next_order++), num(pick(rng, customers)), fresh}, tx.id));
                    Value item = num(pick(rng, items));
                    tx.queries.push_back(
                        modify_q("Stock", {item, var("q")}, {item, num(pick(rng, 100))}, tx.id));
                    break;
                }
                case 1: {  // payment
                    Value c = num(pick(rng, customers));
                    tx.queries.push_back(
                        modify_q("Customers", {c, var("b")}, {c, num(pick(rng, 1000))}, tx.id));
                    break;
                }
                case 2: {  // delivery
                    Value o = num(pick(rng, std::max<std::size_t>(1, next_order)));
                    tx.queries.push_back(
                        modify_q("Orders", {o, var("c"), fresh}, {o, var("c"), done}, tx.id));
                    break;
                }
                default: {  // purge a delivered order
                    Value o = num(pick(rng, std::max<std::size_t>(1, next_order)));
                    tx.queries.push_back(delete_q("Orders", {o, var("c"), done}, tx.id));
                    break;
                }
            }
        }
        tx.queries.resize(cfg.statements_per_tx);
        w.txs.push_back(std::move(tx));
    }
    return w;
}

Workload generate(const WorkloadConfig& cfg) {
    switch (cfg.kind) {
        case WorkloadKind::Synthetic: return gen_synthetic(cfg);
        case WorkloadKind::Adversarial: return gen_adversarial(cfg.iterations);
        case WorkloadKind::OrderStyle: return gen_order_style(cfg);
    }
    throw std::invalid_argument("unknown workload kind");
}

void write_workload(const Workload& w, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir / "db");
    for (const auto& [n, rel] : w.db.relations) {
        std::ofstream out(dir / "db" / (n + ".csv"), std::ios::binary);
        out << relation_to_csv(rel);
        if (!out) throw std::runtime_error("cannot write " + (dir / "db" / (n + ".csv")).string());
    }
    std::ofstream out(dir / "tx.txt", std::ios::binary);
    out << print_transactions(w.txs);
    if (!out) throw std::runtime_error("cannot write " + (dir / "tx.txt").string());
}

// ---------------------------------------------------------------- oracle

std::map<std::string, std::vector<std::set<Value>>> active_domain(const std::vector<Transaction>& a,
                                                                  const std::vector<Transaction>& b,
                                                                  const Catalog& catalog) {
    std::map<std::string, std::vector<std::set<Value>>> dom;
    for (const auto& [n, cols] : catalog) dom[n].resize(cols.size());
    auto note_pattern = [](std::vector<std::set<Value>>& d, const Pattern& u) {
        for (std::size_t i = 0; i < u.size() && i < d.size(); ++i) {
            if (const auto* c = std::get_if<Value>(&u[i]))
                d[i].insert(*c);
            else
                for (const auto& ne : std::get<Var>(u[i]).not_equal) d[i].insert(ne);
        }
    };
    for (const auto* txs : {&a, &b})
        for (const auto& tx : *txs)
            for (const auto& q : tx.queries) {
                auto it = dom.find(q.relation);
                if (it == dom.end()) throw EngineError("unknown relation '" + q.relation + "'");
                auto& d = it->second;
                if (q.kind == QueryKind::Insert) {
                    for (std::size_t i = 0; i < q.tuple.size() && i < d.size(); ++i) d[i].insert(q.tuple[i]);
                } else {
                    note_pattern(d, q.u1);
                    note_pattern(d, q.u2);
                }
            }
    return dom;
}

EquivResult equiv_oracle(const std::vector<Transaction>& a, const std::vector<Transaction>& b,
                         const Catalog& catalog, const EquivOptions& opts) {
    auto dom = active_domain(a, b, catalog);
    std::vector<std::pair<std::string, Tuple>> universe;
    for (auto& [rel, cols] : dom) {
        for (std::size_t i = 0; i < cols.size(); ++i) {
            cols[i].insert(opts.fillers.begin(), opts.fillers.end());
            if (opts.add_fresh) cols[i].insert(Value::str("~fresh" + std::to_string(i + 1)));
        }
        // cartesian product of the column domains
        std::vector<Tuple> acc{{}};
        for (const auto& col : cols) {
            std::vector<Tuple> next;
            for (const auto& t : acc)
                for (const auto& v : col) {
                    Tuple u = t;
                    u.push_back(v);
                    next.push_back(std::move(u));
                }
            acc = std::move(next);
            if (acc.size() > opts.budget) throw BudgetExceeded("candidate tuple space exceeds the enumeration budget");
        }
        if (cols.empty()) acc.clear();
        for (auto& t : acc) universe.emplace_back(rel, std::move(t));
    }

    // number of databases: sum of C(N, k) for k <= max_tuples
    const std::size_t n = universe.size();
    double total = 0, c = 1;
    for (std::size_t k = 0; k <= std::min(opts.max_tuples, n); ++k) {
        total += c;
        c = c * double(n - k) / double(k + 1);
    }
    if (total > double(opts.budget))
        throw BudgetExceeded("enumeration needs " + std::to_string(static_cast<unsigned long long>(total)) +
                             " databases, budget is " + std::to_string(opts.budget));

    EquivResult res;
    std::vector<std::size_t> chosen;
    auto check = [&]() {
        SupportSet d;
        for (std::size_t i : chosen) d.insert(universe[i]);
        ++res.databases;
        SupportSet ra = run_vanilla(d, catalog, a), rb = run_vanilla(d, catalog, b);
        if (ra != rb) {
            res.equivalent = false;
            res.witness = std::move(d);
            res.out_a = std::move(ra);
            res.out_b = std::move(rb);
            return false;
        }
        return true;
    };
    // subsets in order of size, lexicographic within a size
    for (std::size_t k = 0; k <= std::min(opts.max_tuples, n); ++k) {
        chosen.resize(k);
        for (std::size_t i = 0; i < k; ++i) chosen[i] = i;
        for (;;) {
            if (!check()) return res;
            std::size_t i = k;
            while (i > 0 && chosen[i - 1] == n - k + i - 1) --i;
            if (i == 0) break;
            ++chosen[i - 1];
            for (std::size_t j = i; j < k; ++j) chosen[j] = chosen[j - 1] + 1;
        }
    }
    return res;
}

// ---------------------------------------------------------------- pair generators

PairGen::PairGen(std::uint64_t seed) : rng_(seed) {}

Catalog PairGen::catalog() const { return {{"R", {"A", "B"}}}; }

std::vector<Value> PairGen::values() const { return {Value::num(0), Value::num(1), Value::num(2)}; }

Value PairGen::val() { return Value::num(static_cast<long long>(pick(rng_, 3))); }

Value PairGen::other_val(const Value& v) {
    for (;;) {
        Value w = val();
        if (!(w == v)) return w;
    }
}

std::string PairGen::fresh_var() { return "v" + std::to_string(++var_counter_); }

Pattern PairGen::random_pattern() {
    Pattern u;
    for (int i = 0; i < 2; ++i) {
        if (pick(rng_, 2)) {
            u.push_back(val());
        } else {
            Var v = var(fresh_var());
            if (pick(rng_, 5) == 0) v.not_equal.insert(val());
            u.push_back(v);
        }
    }
    return u;
}

HyperplaneQuery PairGen::make_modify(Pattern u1, const std::vector<std::optional<Value>>& writes) {
    Pattern u2;
    for (std::size_t i = 0; i < u1.size(); ++i) {
        if (writes[i])
            u2.push_back(*writes[i]);
        else if (const auto* v = std::get_if<Var>(&u1[i]))
            u2.push_back(var(v->name));
        else
            u2.push_back(u1[i]);
    }
    return modify_q("R", std::move(u1), std::move(u2), "p");
}

HyperplaneQuery PairGen::random_statement() {
    switch (pick(rng_, 3)) {
        case 0: return insert_q("R", {val(), val()}, "p");
        case 1: return delete_q("R", random_pattern(), "p");
        default: {
            Pattern u1 = random_pattern();
            std::vector<std::optional<Value>> writes(2);
            for (auto& w : writes)
                if (pick(rng_, 2)) w = val();
            return make_modify(std::move(u1), writes);
        }
    }
}

Transaction PairGen::random_transaction(std::size_t n) {
    Transaction tx{"p", {}};
    for (std::size_t i = 0; i < n; ++i) tx.queries.push_back(random_statement());
    return tx;
}

const std::vector<std::string>& PairGen::rule_names() {
    static const std::vector<std::string> names{"chain",          "insert-delete", "delete-delete",
                                                "delete-insert",  "modify-delete", "insert-modify",
                                                "commute-deletes", "identity-modify", "split-modify",
                                                "commute-merges"};
    return names;
}

PairGen::Pair PairGen::wrap(std::vector<HyperplaneQuery> lhs, std::vector<HyperplaneQuery> rhs,
                            const std::string& rule) {
    Transaction pre = random_transaction(pick(rng_, 3));
    Transaction post = random_transaction(pick(rng_, 3));
    Pair out{pre, pre, rule};
    out.a.queries.insert(out.a.queries.end(), lhs.begin(), lhs.end());
    out.b.queries.insert(out.b.queries.end(), rhs.begin(), rhs.end());
    out.a.queries.insert(out.a.queries.end(), post.queries.begin(), post.queries.end());
    out.b.queries.insert(out.b.queries.end(), post.queries.begin(), post.queries.end());
    return out;
}

PairGen::Pair PairGen::equivalent_pair() {
    const auto& rules = rule_names();
    const std::string rule = rules[pick(rng_, rules.size())];
    const std::size_t col = pick(rng_, 2);
    // pattern with `col` fixed to k and the other column free
    auto at = [&](const Value& k) {
        Pattern u(2);
        u[col] = k;
        u[1 - col] = var(fresh_var());
        return u;
    };
    auto set_col = [&](const Value& k) {
        std::vector<std::optional<Value>> w(2);
        w[col] = k;
        return w;
    };

    if (rule == "chain") {
        Value k1 = val(), k2 = other_val(k1), k3 = val();
        return wrap({make_modify(at(k1), set_col(k2)), make_modify(at(k2), set_col(k3))},
                    {make_modify(at(k1), set_col(k3)), make_modify(at(k2), set_col(k3))}, rule);
    }
    if (rule == "insert-delete") {
        Tuple t{val(), val()};
        Pattern u;
        for (const auto& v : t) u.push_back(pick(rng_, 2) ? Term(v) : Term(var(fresh_var())));
        return wrap({insert_q("R", t, "p"), delete_q("R", u, "p")}, {delete_q("R", u, "p")}, rule);
    }
    if (rule == "delete-delete") {
        Pattern u = random_pattern();
        return wrap({delete_q("R", u, "p"), delete_q("R", u, "p")}, {delete_q("R", u, "p")}, rule);
    }
    if (rule == "delete-insert") {
        Tuple t{val(), val()};
        Pattern u(t.begin(), t.end());
        return wrap({delete_q("R", u, "p"), insert_q("R", t, "p")}, {insert_q("R", t, "p")}, rule);
    }
    if (rule == "modify-delete") {
        Value k1 = val(), k2 = other_val(k1);
        return wrap({make_modify(at(k1), set_col(k2)), delete_q("R", at(k2), "p")},
                    {delete_q("R", at(k1), "p"), delete_q("R", at(k2), "p")}, rule);
    }
    if (rule == "insert-modify") {
        Tuple t{val(), val()};
        HyperplaneQuery m = random_statement();
        while (m.kind != QueryKind::Modify) m = random_statement();
        Tuple image = matches(t, m.u1) ? modify_target(t, m.u1, m.u2) : t;
        return wrap({insert_q("R", t, "p"), m}, {m, insert_q("R", image, "p")}, rule);
    }
    if (rule == "commute-deletes") {
        Pattern u = random_pattern(), v = random_pattern();
        return wrap({delete_q("R", u, "p"), delete_q("R", v, "p")}, {delete_q("R", v, "p"), delete_q("R", u, "p")},
                    rule);
    }
    if (rule == "identity-modify") {
        Pattern u = random_pattern();
        for (auto& term : u)
            if (auto* v = std::get_if<Var>(&term)) v->not_equal.clear();
        return wrap({make_modify(u, {std::nullopt, std::nullopt})}, {}, rule);
    }
    if (rule == "split-modify") {
        Pattern u1 = random_pattern();
        std::string name = fresh_var();
        u1[col] = var(name);
        std::vector<std::optional<Value>> writes(2);
        for (auto& w : writes)
            if (pick(rng_, 2)) w = val();
        Value c = val();
        Pattern ne = u1, eq = u1;
        std::get<Var>(ne[col]).not_equal.insert(c);
        eq[col] = c;
        auto eq_writes = writes;
        if (!eq_writes[col]) eq_writes[col] = c;
        return wrap({make_modify(u1, writes)}, {make_modify(ne, writes), make_modify(eq, eq_writes)}, rule);
    }
    // commute-merges: two sources merged into the third value, in either order
    Value k1 = val(), k2 = other_val(k1), k3 = Value::num(3 - std::stoll(k1.text) - std::stoll(k2.text));
    return wrap({make_modify(at(k1), set_col(k3)), make_modify(at(k2), set_col(k3))},
                {make_modify(at(k2), set_col(k3)), make_modify(at(k1), set_col(k3))}, rule);
}

PairGen::Pair PairGen::mutated_pair() {
    for (;;) {
        Transaction a = random_transaction(1 + pick(rng_, 4));
        Transaction b = a;
        std::size_t i = pick(rng_, b.queries.size());
        switch (pick(rng_, 3)) {
            case 0: b.queries.erase(b.queries.begin() + static_cast<std::ptrdiff_t>(i)); break;
            case 1: b.queries[i] = random_statement(); break;
            default: {
                auto& q = b.queries[i];
                if (q.kind == QueryKind::Insert) {
                    std::size_t j = pick(rng_, 2);
                    q.tuple[j] = other_val(q.tuple[j]);
                } else {
                    Pattern& u = (q.kind == QueryKind::Modify && pick(rng_, 2)) ? q.u2 : q.u1;
                    std::size_t j = pick(rng_, 2);
                    if (auto* c = std::get_if<Value>(&u[j])) *c = other_val(*c);
                    else q = random_statement();
                }
            }
        }
        if (!(a == b)) return {a, b, "mutation"};
    }
}

AnnotatedDatabase pairgen_full_database() {
    AnnotatedDatabase db;
    db.add_relation("R", {"A", "B"});
    int k = 0;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) db.add_row("R", {Value::num(a), Value::num(b)}, "x" + std::to_string(++k));
    return db;
}

std::vector<std::string> normal_form_mismatches(const AnnotatedDatabase& db0, const Transaction& a,
                                                const Transaction& b) {
    AnnotatedDatabase da = db0, dbb = db0;
    run_transaction(da, a, Mode::NormalForm);
    run_transaction(dbb, b, Mode::NormalForm);
    std::vector<std::string> out;
    for (const auto& [n, ra] : da.relations) {
        const auto& rb = dbb.relation(n);
        std::set<Tuple> tuples;
        for (const auto& r : ra.rows()) tuples.insert(r.tuple);
        for (const auto& r : rb.rows()) tuples.insert(r.tuple);
        for (const auto& t : tuples) {
            const Row* x = ra.find(t);
            const Row* y = rb.find(t);
            Expr ex = x ? x->state.expr : zero(), ey = y ? y->state.expr : zero();
            if (!struct_eq(ex, ey)) out.push_back(n + render_tuple(t) + ": " + render(ex) + " vs " + render(ey));
        }
    }
    return out;
}

// ---------------------------------------------------------------- metrics

std::string bench_mode_name(BenchMode m) {
    switch (m) {
        case BenchMode::Naive: return "naive";
        case BenchMode::NormalForm: return "normal";
        case BenchMode::MV: return "mv";
        case BenchMode::NoProv: return "noprov";
    }
    return "?";
}

BenchMode parse_bench_mode(const std::string& s) {
    for (auto m : {BenchMode::Naive, BenchMode::NormalForm, BenchMode::MV, BenchMode::NoProv})
        if (bench_mode_name(m) == s) return m;
    throw std::invalid_argument("unknown bench mode '" + s + "' (naive, normal, mv, noprov)");
}

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    std::size_t n = v.size();
    return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2;
}

struct Snapshot {
    std::uint64_t done, tuples, total, peak;
};

// One execution of a workload in one mode. `sample` is called at every
// checkpoint with the clock stopped.
class Runner {
public:
    Runner(const Workload& w, BenchMode m) : w_(w), mode_(m) {
        if (m == BenchMode::Naive || m == BenchMode::NormalForm)
            db_ = w.db;
        else if (m == BenchMode::MV)
            mv_ = mv_init(w.db);
        else
            van_.emplace(support(w.db), w.db.catalog());
    }

    void begin(const Transaction& tx) {
        if (db_) begin_transaction(*db_, tx.id, engine_mode());
    }
    void apply(const Transaction& tx, const HyperplaneQuery& q) {
        if (db_)
            apply_query(*db_, q, engine_mode());
        else if (mv_)
            mv_apply(*mv_, q, tx.id);
        else
            van_->apply(q);
    }
    void commit(const Transaction& tx) {
        if (db_)
            commit_transaction(*db_, engine_mode());
        else if (mv_)
            mv_commit(*mv_, tx.id);
    }

    Snapshot snapshot(std::uint64_t done) const {
        if (db_) return {done, db_->row_count(), db_->total_size(), db_->peak_row_size()};
        if (mv_) {
            std::uint64_t peak = 0;
            for (const auto& [n, rel] : mv_->relations)
                for (const auto& [t, row] : rel.rows) peak = std::max(peak, mv_size(row.expr));
            return {done, mv_->row_count(), mv_->total_size(), peak};
        }
        return {done, van_->size(), 0, 0};
    }

    const AnnotatedDatabase* db() const { return db_ ? &*db_ : nullptr; }

private:
    Mode engine_mode() const { return mode_ == BenchMode::Naive ? Mode::Naive : Mode::NormalForm; }
    const Workload& w_;
    BenchMode mode_;
    std::optional<AnnotatedDatabase> db_;
    std::optional<MvDatabase> mv_;
    std::optional<VanillaDatabase> van_;
};

}  // namespace

std::vector<MetricsRow> run_bench(const Workload& w, const BenchOptions& opts) {
    if (opts.repetitions < 1) throw std::invalid_argument("repetitions must be positive");
    const std::size_t total = w.statements();
    const std::size_t every = opts.checkpoint_every ? opts.checkpoint_every : std::max<std::size_t>(1, total / 50);

    // deleted tuples for the specialization timing, fixed by the seed
    std::vector<std::pair<std::string, const Row*>> initial;
    for (const auto& [n, rel] : w.db.relations)
        for (const auto& row : rel.rows())
            if (row.state.present && is_atom(row.state.expr) && !is_zero(row.state.expr)) initial.emplace_back(n, &row);
    std::mt19937_64 rng(opts.seed);
    std::shuffle(initial.begin(), initial.end(), rng);
    initial.resize(std::min(initial.size(), opts.deleted_sample));
    std::set<std::string> deleted_names;
    SupportSet reduced = support(w.db);
    for (const auto& [n, row] : initial) {
        deleted_names.insert(row->state.expr->annot->name);
        reduced.erase({n, row->tuple});
    }
    const Catalog cat = w.db.catalog();

    std::vector<MetricsRow> out;
    for (BenchMode mode : opts.modes) {
        std::vector<Snapshot> snaps;
        std::vector<std::vector<double>> times;  // per checkpoint, per repetition
        std::vector<double> spec_times;
        for (int rep = 0; rep < opts.repetitions; ++rep) {
            Runner r(w, mode);
            std::size_t done = 0, cp = 0;
            double elapsed = 0;
            auto record = [&](double at) {
                if (rep == 0) snaps.push_back(r.snapshot(done));
                if (times.size() <= cp) times.emplace_back();
                times[cp++].push_back(at);
            };
            for (std::size_t ti = 0; ti < w.txs.size(); ++ti) {
                const auto& tx = w.txs[ti];
                auto t0 = Clock::now();
                r.begin(tx);
                for (std::size_t qi = 0; qi < tx.queries.size(); ++qi) {
                    r.apply(tx, tx.queries[qi]);
                    ++done;
                    bool last = ti + 1 == w.txs.size() && qi + 1 == tx.queries.size();
                    if (done % every == 0 && !last) {
                        elapsed += ms_since(t0);
                        record(elapsed);
                        t0 = Clock::now();
                    }
                }
                r.commit(tx);
                elapsed += ms_since(t0);
            }
            record(elapsed);

            if (mode == BenchMode::Naive || mode == BenchMode::NormalForm) {
                auto t0 = Clock::now();
                SupportSet s = delete_propagate(*r.db(), deleted_names);
                spec_times.push_back(ms_since(t0));
                if (s.size() > r.db()->row_count()) throw std::logic_error("support larger than the database");
            } else if (mode == BenchMode::NoProv) {
                auto t0 = Clock::now();
                SupportSet s = run_vanilla(reduced, cat, w.txs);
                spec_times.push_back(ms_since(t0));
                (void)s;
            }
        }
        for (std::size_t i = 0; i < snaps.size(); ++i) {
            MetricsRow m;
            m.mode = mode;
            m.updates_done = snaps[i].done;
            m.db_tuples = snaps[i].tuples;
            m.total_prov_size = snaps[i].total;
            m.peak_prov_size = snaps[i].peak;
            m.track_ms = median(times[i]);
            m.track_ms_mean = std::accumulate(times[i].begin(), times[i].end(), 0.0) / times[i].size();
            if (i + 1 == snaps.size() && !spec_times.empty()) m.specialize_ms = median(spec_times);
            if (mode == BenchMode::MV) {
                m.mv_total_size = snaps[i].total;
                m.mv_tuples = snaps[i].tuples;
            }
            out.push_back(m);
        }
    }
    return out;
}

std::string metrics_csv(const std::vector<MetricsRow>& rows) {
    std::string out = "mode,updates_done,db_tuples,total_prov_size,peak_prov_size,track_ms,specialize_ms,mv_total_size,mv_tuples,track_ms_mean\n";
    char buf[64];
    for (const auto& r : rows) {
        out += bench_mode_name(r.mode) + "," + std::to_string(r.updates_done) + "," + std::to_string(r.db_tuples) + "," +
               std::to_string(r.total_prov_size) + "," + std::to_string(r.peak_prov_size) + ",";
        std::snprintf(buf, sizeof buf, "%.3f", r.track_ms);
        out += buf;
        out += ",";
        if (r.specialize_ms) {
            std::snprintf(buf, sizeof buf, "%.3f", *r.specialize_ms);
            out += buf;
        }
        out += ",";
        if (r.mv_total_size) out += std::to_string(*r.mv_total_size);
        out += ",";
        if (r.mv_tuples) out += std::to_string(*r.mv_tuples);
        std::snprintf(buf, sizeof buf, ",%.3f\n", r.track_ms_mean);
        out += buf;
    }
    return out;
}

}  // namespace uprov
