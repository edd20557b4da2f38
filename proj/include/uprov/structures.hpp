#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "uprov/algebra.hpp"
#include "uprov/engine.hpp"

namespace uprov {

template <class V>
using BinOp = std::function<V(const V&, const V&)>;

template <class V>
struct UpdateStructure {
    std::string name;
    BinOp<V> modadd, modmul, minus, ins, sum;
    V zero;
    // carrier equality; structures whose elements have several encodings override it
    std::function<bool(const V&, const V&)> equal = [](const V& a, const V& b) { return a == b; };
    std::function<std::string(const V&)> show = [](const V&) { return std::string("?"); };
};

class EvalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

template <class V>
struct Assignment {
    std::map<std::string, V> values;
    std::optional<V> default_tuple, default_tx;

    V operator()(const Annot& a) const {
        auto it = values.find(a->name);
        if (it != values.end()) return it->second;
        const auto& d = a->kind == AnnotKind::Tuple ? default_tuple : default_tx;
        if (!d) throw EvalError("no value for annotation '" + a->name + "'");
        return *d;
    }
};

namespace detail {

template <class V>
V evaluate_node(const Expr& e, const UpdateStructure<V>& s, const Assignment<V>& v,
                std::unordered_map<const Node*, V>* memo);

template <class V>
V evaluate_rec(const Expr& e, const UpdateStructure<V>& s, const Assignment<V>& v,
               std::unordered_map<const Node*, V>* memo) {
    if (!memo || e->kids.empty()) return evaluate_node(e, s, v, memo);
    auto it = memo->find(e.get());
    if (it != memo->end()) return it->second;
    V out = evaluate_node(e, s, v, memo);
    memo->emplace(e.get(), out);
    return out;
}

template <class V>
V evaluate_node(const Expr& e, const UpdateStructure<V>& s, const Assignment<V>& v,
                std::unordered_map<const Node*, V>* memo) {
    auto ev = [&](const Expr& k) { return evaluate_rec(k, s, v, memo); };
    switch (e->op) {
        case Op::Zero:
            return s.zero;
        case Op::Leaf:
            return v(e->annot);
        case Op::Frozen:
            return ev(e->kids[0]);
        case Op::Ins:
            return s.ins(ev(e->kids[0]), v(e->annot));
        case Op::Del:
            return s.minus(ev(e->kids[0]), v(e->annot));
        case Op::ModAdd:
            return s.modadd(ev(e->kids[0]), ev(e->kids[1]));
        case Op::ModMul:
            return s.modmul(ev(e->kids[0]), v(e->annot));
        case Op::Sum: {
            V acc = ev(e->kids[0]);
            for (std::size_t i = 1; i < e->kids.size(); ++i) acc = s.sum(acc, ev(e->kids[i]));
            return acc;
        }
    }
    throw EvalError("unknown node");
}

}  // namespace detail

// Large expressions are usually DAGs with shared subterms; those are evaluated once.
template <class V>
V evaluate(const Expr& e, const UpdateStructure<V>& s, const Assignment<V>& v) {
    if (e->size <= 64) return detail::evaluate_rec<V>(e, s, v, nullptr);
    std::unordered_map<const Node*, V> memo;
    return detail::evaluate_rec<V>(e, s, v, &memo);
}

// ---------------------------------------------------------------- built-ins

UpdateStructure<bool> boolean_structure();

// subsets of a universe of at most 64 names, as bit masks
using SetValue = std::uint64_t;
struct Universe {
    std::vector<std::string> names;
    SetValue full() const { return names.size() >= 64 ? ~SetValue{0} : (SetValue{1} << names.size()) - 1; }
    SetValue encode(const std::vector<std::string>& elems) const;
    std::vector<std::string> decode(SetValue s) const;
};
UpdateStructure<SetValue> set_structure(const Universe& u);

struct TrustValue {
    double v = 0;
    char r = 'F';  // 'T', 'F' or 'U'
    friend bool operator==(const TrustValue&, const TrustValue&) = default;
};
bool trusted(const TrustValue& x, double level);
UpdateStructure<TrustValue> trust_structure(double level);

// ---------------------------------------------------------------- axioms

enum class AxiomId { Ax1, Ax2, Ax3, Ax4, Ax5, Ax6, Ax7, Ax8, Ax9, Ax10, Ax11, Ax12, Z1, Z2, Z3, Z4 };
constexpr std::array<AxiomId, 16> kAllAxioms{AxiomId::Ax1, AxiomId::Ax2,  AxiomId::Ax3,  AxiomId::Ax4,
                                              AxiomId::Ax5, AxiomId::Ax6,  AxiomId::Ax7,  AxiomId::Ax8,
                                              AxiomId::Ax9, AxiomId::Ax10, AxiomId::Ax11, AxiomId::Ax12,
                                              AxiomId::Z1,  AxiomId::Z2,   AxiomId::Z3,   AxiomId::Z4};
std::string axiom_name(AxiomId id);

struct AxiomResult {
    AxiomId id;
    std::uint64_t checked = 0;
    std::uint64_t failed = 0;
    std::string witness;  // first counterexample
};

struct AxiomReport {
    std::vector<AxiomResult> results;
    bool exhaustive = false;
    std::uint64_t samples = 0;

    std::size_t passed() const {
        return std::count_if(results.begin(), results.end(), [](const AxiomResult& r) { return r.failed == 0; });
    }
    bool ok() const { return passed() == results.size(); }
    const AxiomResult* find(AxiomId id) const {
        for (const auto& r : results)
            if (r.id == id) return &r;
        return nullptr;
    }
    std::string summary() const;
};

namespace detail {

// One axiom instance: scalar slots plus the list-valued slots some axioms need.
template <class V>
struct Instance {
    std::vector<V> x;                 // a, b, c, d as needed
    std::vector<V> list1, list2;      // I / b_i / d_j
    std::vector<std::size_t> block;   // Ax3: block index of each element of I
    std::vector<V> bs;                // Ax3: one b per block
};

template <class V>
V fold_sum(const UpdateStructure<V>& s, const std::vector<V>& xs) {
    if (xs.empty()) return s.zero;
    V acc = xs[0];
    for (std::size_t i = 1; i < xs.size(); ++i) acc = s.sum(acc, xs[i]);
    return acc;
}

inline std::size_t scalar_arity(AxiomId id) {
    switch (id) {
        case AxiomId::Ax1: case AxiomId::Ax12: return 4;
        case AxiomId::Ax2: case AxiomId::Ax6: case AxiomId::Ax8: case AxiomId::Ax9: return 3;
        case AxiomId::Ax3: case AxiomId::Ax5: case AxiomId::Ax11:
        case AxiomId::Ax4: case AxiomId::Ax7: case AxiomId::Ax10: return 2;
        default: return 1;
    }
}

template <class V>
bool holds(const UpdateStructure<V>& s, AxiomId id, const Instance<V>& in) {
    const auto& x = in.x;
    auto eq = [&](const V& l, const V& r) { return s.equal(l, r); };
    switch (id) {
        case AxiomId::Ax1: {
            const V &a = x[0], &b = x[1], &c = x[2], &d = x[3];
            return eq(s.modadd(s.modadd(a, s.modmul(b, c)), s.modmul(d, c)),
                      s.modadd(s.modadd(a, s.modmul(d, c)), s.modmul(b, c)));
        }
        case AxiomId::Ax2:
            return eq(s.minus(s.modadd(x[0], s.modmul(x[1], x[2])), x[2]), s.minus(x[0], x[2]));
        case AxiomId::Ax3: {
            const V &a = x[0], &d = x[1];
            V lhs = s.modadd(s.modadd(a, s.modmul(fold_sum(s, in.list1), d)), s.modmul(fold_sum(s, in.bs), d));
            std::vector<V> parts;
            for (std::size_t i = 0; i < in.bs.size(); ++i) {
                std::vector<V> si;
                for (std::size_t j = 0; j < in.list1.size(); ++j)
                    if (in.block[j] == i) si.push_back(in.list1[j]);
                parts.push_back(s.modadd(in.bs[i], s.modmul(fold_sum(s, si), d)));
            }
            return eq(lhs, s.modadd(a, s.modmul(fold_sum(s, parts), d)));
        }
        case AxiomId::Ax4:
            return eq(s.minus(s.minus(x[0], x[1]), x[1]), s.minus(x[0], x[1]));
        case AxiomId::Ax5: {
            const V &a = x[0], &c = x[1];
            std::vector<V> terms;
            for (const auto& b : in.list1) terms.push_back(s.minus(b, c));
            return eq(s.modadd(a, s.modmul(fold_sum(s, terms), c)), a);
        }
        case AxiomId::Ax6:
            return eq(s.ins(s.modadd(x[0], s.modmul(x[1], x[2])), x[2]),
                      s.modadd(s.ins(x[0], x[2]), s.modmul(x[1], x[2])));
        case AxiomId::Ax7:
            return eq(s.minus(s.ins(x[0], x[1]), x[1]), s.minus(x[0], x[1]));
        case AxiomId::Ax8:
            return eq(s.modadd(x[0], s.modmul(s.ins(x[1], x[2]), x[2])),
                      s.modadd(s.ins(x[0], x[2]), s.modmul(x[1], x[2])));
        case AxiomId::Ax9:
            return eq(s.ins(s.modadd(x[0], s.modmul(x[1], x[2])), x[2]), s.ins(x[0], x[2]));
        case AxiomId::Ax10:
            return eq(s.ins(s.minus(x[0], x[1]), x[1]), s.ins(x[0], x[1]));
        case AxiomId::Ax11: {
            const V &a = x[0], &c = x[1];
            V both = s.sum(fold_sum(s, in.list1), fold_sum(s, in.list2));
            return eq(s.modadd(a, s.modmul(both, c)),
                      s.modadd(s.modadd(a, s.modmul(fold_sum(s, in.list1), c)), s.modmul(fold_sum(s, in.list2), c)));
        }
        case AxiomId::Ax12: {
            const V &a = x[0], &b = x[1], &c = x[2], &d = x[3];
            V amb = s.minus(a, b);
            return eq(s.modadd(amb, s.modmul(c, b)),
                      s.modadd(amb, s.modmul(s.modadd(s.minus(d, b), s.modmul(c, b)), b)));
        }
        case AxiomId::Z1:
            return eq(s.minus(s.zero, x[0]), s.zero);
        case AxiomId::Z2:
            return eq(s.modadd(s.zero, x[0]), x[0]) && eq(s.ins(s.zero, x[0]), x[0]);
        case AxiomId::Z3:
            return eq(s.ins(x[0], s.zero), x[0]) && eq(s.modadd(x[0], s.zero), x[0]) && eq(s.minus(x[0], s.zero), x[0]);
        case AxiomId::Z4:
            return eq(s.modmul(x[0], s.zero), s.zero) && eq(s.modmul(s.zero, x[0]), s.zero);
    }
    return false;
}

template <class V>
std::string describe(const UpdateStructure<V>& s, AxiomId id, const Instance<V>& in) {
    static const char* names = "abcd";
    std::ostringstream os;
    std::size_t slot = 0;
    auto scalar = [&](const char* n) {
        if (slot < in.x.size()) os << n << '=' << s.show(in.x[slot++]) << ' ';
    };
    auto list = [&](const char* n, const std::vector<V>& xs) {
        os << n << "=[";
        for (std::size_t i = 0; i < xs.size(); ++i) os << (i ? "," : "") << s.show(xs[i]);
        os << "] ";
    };
    switch (id) {
        case AxiomId::Ax3:
            scalar("a"), scalar("d");
            list("I", in.list1);
            os << "blocks=[";
            for (std::size_t i = 0; i < in.block.size(); ++i) os << (i ? "," : "") << in.block[i];
            os << "] ";
            list("b", in.bs);
            break;
        case AxiomId::Ax5:
            scalar("a"), scalar("c");
            list("b", in.list1);
            break;
        case AxiomId::Ax11:
            scalar("a"), scalar("c");
            list("b", in.list1);
            list("d", in.list2);
            break;
        default:
            for (std::size_t i = 0; i < in.x.size(); ++i) {
                char n[2] = {names[i], 0};
                scalar(n);
            }
    }
    std::string out = os.str();
    if (!out.empty()) out.pop_back();
    return out;
}

// set partitions of {0..n-1} as restricted growth strings
inline std::vector<std::vector<std::size_t>> partitions(std::size_t n) {
    std::vector<std::vector<std::size_t>> out;
    std::vector<std::size_t> cur(n, 0);
    std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t i, std::size_t used) {
        if (i == n) {
            out.push_back(cur);
            return;
        }
        for (std::size_t b = 0; b <= used; ++b) {
            cur[i] = b;
            rec(i + 1, b == used ? used + 1 : used);
        }
    };
    if (n) rec(0, 0);
    return out;
}

template <class V>
void record(const UpdateStructure<V>& s, AxiomId id, const Instance<V>& in, AxiomResult& r) {
    ++r.checked;
    if (!holds(s, id, in)) {
        if (r.failed++ == 0) r.witness = describe(s, id, in);
    }
}

// calls f with every assignment of carrier values to k slots, in lexicographic order
template <class V, class F>
void odometer(const std::vector<V>& carrier, std::size_t k, F&& f) {
    std::vector<std::size_t> idx(k, 0);
    std::vector<V> vals(k, carrier.empty() ? V{} : carrier[0]);
    if (carrier.empty()) return;
    for (;;) {
        for (std::size_t i = 0; i < k; ++i) vals[i] = carrier[idx[i]];
        f(vals);
        std::size_t i = k;
        while (i > 0) {
            --i;
            if (++idx[i] < carrier.size()) break;
            idx[i] = 0;
            if (i == 0) return;
        }
        if (k == 0) return;
    }
}

}  // namespace detail

// Every axiom instance over the given carrier; list-valued slots range over lengths 1..max_list.
template <class V>
AxiomReport check_axioms_exhaustive(const UpdateStructure<V>& s, const std::vector<V>& carrier,
                                    std::size_t max_list = 2) {
    using namespace detail;
    AxiomReport rep;
    rep.exhaustive = true;
    for (AxiomId id : kAllAxioms) {
        AxiomResult r;
        r.id = id;
        std::size_t k = scalar_arity(id);
        if (id == AxiomId::Ax3) {
            for (std::size_t n = 1; n <= max_list; ++n) {
                for (const auto& part : partitions(n)) {
                    std::size_t blocks = *std::max_element(part.begin(), part.end()) + 1;
                    odometer(carrier, k + n + blocks, [&](const std::vector<V>& v) {
                        Instance<V> in;
                        in.x.assign(v.begin(), v.begin() + k);
                        in.list1.assign(v.begin() + k, v.begin() + k + n);
                        in.bs.assign(v.begin() + k + n, v.end());
                        in.block = part;
                        record(s, id, in, r);
                    });
                }
            }
        } else if (id == AxiomId::Ax5) {
            for (std::size_t n = 1; n <= max_list; ++n)
                odometer(carrier, k + n, [&](const std::vector<V>& v) {
                    Instance<V> in;
                    in.x.assign(v.begin(), v.begin() + k);
                    in.list1.assign(v.begin() + k, v.end());
                    record(s, id, in, r);
                });
        } else if (id == AxiomId::Ax11) {
            for (std::size_t n = 1; n <= max_list; ++n)
                for (std::size_t m = 1; m <= max_list; ++m)
                    odometer(carrier, k + n + m, [&](const std::vector<V>& v) {
                        Instance<V> in;
                        in.x.assign(v.begin(), v.begin() + k);
                        in.list1.assign(v.begin() + k, v.begin() + k + n);
                        in.list2.assign(v.begin() + k + n, v.end());
                        record(s, id, in, r);
                    });
        } else {
            odometer(carrier, k, [&](const std::vector<V>& v) {
                Instance<V> in;
                in.x = v;
                record(s, id, in, r);
            });
        }
        rep.results.push_back(r);
    }
    return rep;
}

// n random instances per axiom; list lengths uniform in 1..max_list
template <class V>
AxiomReport check_axioms_random(const UpdateStructure<V>& s, const std::function<V(std::mt19937_64&)>& sampler,
                                std::uint64_t n, std::uint64_t seed, std::size_t max_list = 4) {
    using namespace detail;
    AxiomReport rep;
    rep.samples = n;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> len(1, max_list);
    for (AxiomId id : kAllAxioms) {
        AxiomResult r;
        r.id = id;
        for (std::uint64_t i = 0; i < n; ++i) {
            Instance<V> in;
            for (std::size_t k = 0; k < scalar_arity(id); ++k) in.x.push_back(sampler(rng));
            if (id == AxiomId::Ax3) {
                std::size_t m = len(rng);
                for (std::size_t j = 0; j < m; ++j) in.list1.push_back(sampler(rng));
                // random labels, renumbered so blocks are non-empty and ordered by first use
                std::uniform_int_distribution<std::size_t> lab(0, m - 1);
                std::map<std::size_t, std::size_t> renum;
                for (std::size_t j = 0; j < m; ++j) {
                    std::size_t l = lab(rng);
                    auto it = renum.try_emplace(l, renum.size()).first;
                    in.block.push_back(it->second);
                }
                for (std::size_t b = 0; b < renum.size(); ++b) in.bs.push_back(sampler(rng));
            } else if (id == AxiomId::Ax5) {
                std::size_t m = len(rng);
                for (std::size_t j = 0; j < m; ++j) in.list1.push_back(sampler(rng));
            } else if (id == AxiomId::Ax11) {
                std::size_t m1 = len(rng), m2 = len(rng);
                for (std::size_t j = 0; j < m1; ++j) in.list1.push_back(sampler(rng));
                for (std::size_t j = 0; j < m2; ++j) in.list2.push_back(sampler(rng));
            }
            record(s, id, in, r);
        }
        rep.results.push_back(r);
    }
    return rep;
}

// ---------------------------------------------------------------- semiring lift

struct LiftViolation {
    std::string law;
    std::string witness;
};

template <class V>
struct LiftResult {
    UpdateStructure<V> structure;
    std::vector<LiftViolation> violations;
    bool ok() const { return violations.empty(); }
    const LiftViolation* find(const std::string& law) const {
        for (const auto& v : violations)
            if (v.law == law) return &v;
        return nullptr;
    }
};

// Builds the structure with +M = +I = sum = plus and .M = times, then audits the
// preconditions over `samples`: a + 1 = 1, a . a = a and the minus axioms 2, 4, 5, 7, 10, 12.
// Samples are scanned in order, so the first witness reported is the lexicographically smallest.
template <class V>
LiftResult<V> lift_semiring(const std::string& name, BinOp<V> plus, BinOp<V> times, V zero, V one, BinOp<V> minus,
                            const std::vector<V>& samples, std::function<std::string(const V&)> show) {
    LiftResult<V> out;
    auto& s = out.structure;
    s.name = name;
    s.modadd = s.ins = s.sum = plus;
    s.modmul = times;
    s.minus = minus;
    s.zero = zero;
    s.show = show;

    for (const auto& a : samples) {
        if (!(plus(a, one) == one)) {
            out.violations.push_back({"absorption", "a=" + show(a)});
            break;
        }
    }
    for (const auto& a : samples) {
        if (!(times(a, a) == a)) {
            out.violations.push_back({"idempotence", "a=" + show(a)});
            break;
        }
    }
    auto rep = check_axioms_exhaustive(s, samples, 2);
    for (AxiomId id : {AxiomId::Ax2, AxiomId::Ax4, AxiomId::Ax5, AxiomId::Ax7, AxiomId::Ax10, AxiomId::Ax12}) {
        const auto* r = rep.find(id);
        if (r && r->failed) out.violations.push_back({axiom_name(id), r->witness});
    }
    return out;
}

// ---------------------------------------------------------------- specialization

// Boolean what-if over a tracked run: named tuple annotations become False, everything else True.
SupportSet delete_propagate(const AnnotatedDatabase& tracked, const std::set<std::string>& deleted);
// Same with transaction annotations set to False.
SupportSet abort_transactions(const AnnotatedDatabase& tracked, const std::set<std::string>& aborted);

template <class V>
SupportSet specialize_support(const AnnotatedDatabase& tracked, const UpdateStructure<V>& s, const Assignment<V>& a) {
    SupportSet out;
    for (const auto& [n, rel] : tracked.relations)
        for (const auto& row : rel.rows())
            if (!s.equal(evaluate(row.state.expr, s, a), s.zero)) out.emplace(n, row.tuple);
    return out;
}

// Runs the transactions with carrier values in place of symbolic annotations,
// using the same propagation as the naive engine. Keys are (relation, tuple).
template <class V>
std::map<std::pair<std::string, Tuple>, V> concrete_run(const AnnotatedDatabase& db0, const std::vector<Transaction>& txs,
                                                         const UpdateStructure<V>& s, const Assignment<V>& a) {
    using Key = std::pair<std::string, Tuple>;
    std::map<std::string, std::vector<std::pair<Tuple, V>>> rels;
    for (const auto& [n, rel] : db0.relations) {
        auto& out = rels[n];
        for (const auto& row : rel.rows()) out.emplace_back(row.tuple, evaluate(row.state.expr, s, a));
    }
    auto find = [](std::vector<std::pair<Tuple, V>>& rows, const Tuple& t) -> std::size_t {
        for (std::size_t i = 0; i < rows.size(); ++i)
            if (rows[i].first == t) return i;
        rows.emplace_back(t, V{});
        return rows.size() - 1;
    };
    for (const auto& tx : txs) {
        Annot pa = std::make_shared<const AnnotInfo>(AnnotInfo{tx.id, AnnotKind::Transaction, 0});
        V p = a(pa);
        for (const auto& q : tx.queries) {
            auto& rows = rels.at(q.relation);
            switch (q.kind) {
                case QueryKind::Insert: {
                    bool fresh = true;
                    for (auto& [t, v] : rows) fresh = fresh && !(t == q.tuple);
                    std::size_t i = find(rows, q.tuple);
                    if (fresh) rows[i].second = s.zero;
                    rows[i].second = s.ins(rows[i].second, p);
                    break;
                }
                case QueryKind::Delete:
                    for (auto& [t, v] : rows)
                        if (matches(t, q.u1)) v = s.minus(v, p);
                    break;
                case QueryKind::Modify: {
                    std::vector<std::size_t> moved;
                    std::vector<Tuple> targets;
                    std::map<Tuple, std::vector<V>> contrib;
                    for (std::size_t i = 0; i < rows.size(); ++i) {
                        if (!matches(rows[i].first, q.u1)) continue;
                        Tuple t2 = modify_target(rows[i].first, q.u1, q.u2);
                        if (t2 == rows[i].first) continue;
                        moved.push_back(i);
                        if (!contrib.count(t2)) targets.push_back(t2);
                        contrib[t2].push_back(rows[i].second);
                    }
                    for (std::size_t i : moved) rows[i].second = s.minus(rows[i].second, p);
                    for (const auto& t2 : targets) {
                        bool fresh = true;
                        for (auto& [t, v] : rows) fresh = fresh && !(t == t2);
                        std::size_t i = find(rows, t2);
                        if (fresh) rows[i].second = s.zero;
                        rows[i].second = s.modadd(rows[i].second, s.modmul(detail::fold_sum(s, contrib[t2]), p));
                    }
                    break;
                }
            }
        }
    }
    std::map<Key, V> out;
    for (auto& [n, rows] : rels)
        for (auto& [t, v] : rows) out.emplace(Key{n, t}, v);
    return out;
}

}  // namespace uprov
