#include "uprov/structures.hpp"

#include <functional>
#include <unordered_set>

namespace uprov {

UpdateStructure<bool> boolean_structure() {
    UpdateStructure<bool> s;
    s.name = "bool";
    auto disj = [](const bool& a, const bool& b) { return a || b; };
    s.modadd = s.ins = s.sum = disj;
    s.modmul = [](const bool& a, const bool& b) { return a && b; };
    s.minus = [](const bool& a, const bool& b) { return a && !b; };
    s.zero = false;
    s.show = [](const bool& a) { return std::string(a ? "T" : "F"); };
    return s;
}

SetValue Universe::encode(const std::vector<std::string>& elems) const {
    SetValue out = 0;
    for (const auto& e : elems) {
        auto it = std::find(names.begin(), names.end(), e);
        if (it == names.end()) throw EvalError("'" + e + "' is not in the universe");
        out |= SetValue{1} << (it - names.begin());
    }
    return out;
}

std::vector<std::string> Universe::decode(SetValue s) const {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < names.size() && i < 64; ++i)
        if (s >> i & 1) out.push_back(names[i]);
    return out;
}

UpdateStructure<SetValue> set_structure(const Universe& u) {
    if (u.names.size() > 64) throw EvalError("set universes are limited to 64 elements");
    UpdateStructure<SetValue> s;
    s.name = "set";
    auto uni = [](const SetValue& a, const SetValue& b) { return a | b; };
    s.modadd = s.ins = s.sum = uni;
    s.modmul = [](const SetValue& a, const SetValue& b) { return a & b; };
    s.minus = [](const SetValue& a, const SetValue& b) { return a & ~b; };
    s.zero = 0;
    s.show = [u](const SetValue& v) {
        std::string out = "{";
        bool first = true;
        for (const auto& n : u.decode(v)) {
            out += (first ? "" : ",") + n;
            first = false;
        }
        return out + "}";
    };
    return s;
}

bool trusted(const TrustValue& x, double level) { return x.r == 'T' || (x.r == 'U' && x.v > level); }

UpdateStructure<TrustValue> trust_structure(double level) {
    if (!(level >= 0 && level <= 1)) throw EvalError("trust level must lie in [0,1]");
    UpdateStructure<TrustValue> s;
    s.name = "trust";
    const TrustValue yes{1, 'T'}, no{0, 'F'};
    auto out = [yes, no](bool b) { return b ? yes : no; };
    auto either = [=](const TrustValue& a, const TrustValue& b) { return out(trusted(a, level) || trusted(b, level)); };
    s.modadd = s.ins = s.sum = either;
    s.modmul = [=](const TrustValue& a, const TrustValue& b) { return out(trusted(a, level) && trusted(b, level)); };
    s.minus = [=](const TrustValue& a, const TrustValue& b) { return out(trusted(a, level) && !trusted(b, level)); };
    s.zero = no;
    // two encodings denote the same element when they agree on trusted()
    s.equal = [level](const TrustValue& a, const TrustValue& b) { return trusted(a, level) == trusted(b, level); };
    s.show = [](const TrustValue& a) {
        std::ostringstream os;
        os << '(' << a.v << ',' << a.r << ')';
        return os.str();
    };
    return s;
}

std::string axiom_name(AxiomId id) {
    static const char* names[] = {"Ax1", "Ax2", "Ax3", "Ax4",  "Ax5",  "Ax6", "Ax7", "Ax8",
                                  "Ax9", "Ax10", "Ax11", "Ax12", "Z1", "Z2", "Z3", "Z4"};
    return names[static_cast<int>(id)];
}

std::string AxiomReport::summary() const {
    std::string how = exhaustive ? "exhaustive" : std::to_string(samples) + " samples";
    return std::to_string(passed()) + "/" + std::to_string(results.size()) + " axioms pass (" + how + ")";
}

namespace {

SupportSet boolean_what_if(const AnnotatedDatabase& tracked, const std::set<std::string>& off, AnnotKind kind) {
    for (const auto& n : off) {
        Annot a = tracked.registry.find(n);
        if (!a || a->kind != kind)
            throw EvalError("unknown " + std::string(kind == AnnotKind::Tuple ? "tuple" : "transaction") +
                            " annotation '" + n + "'");
    }
    // same values as boolean_structure() with every other annotation true;
    // annotations are interned, so switched-off ones are known by address
    std::unordered_set<const AnnotInfo*> dead;
    for (const auto& n : off) dead.insert(tracked.registry.find(n).get());
    std::unordered_map<const Node*, bool> memo;  // shared across rows, big nodes only
    auto on = [&](const Annot& a) { return !dead.count(a.get()); };
    std::function<bool(const Expr&)> ev = [&](const Expr& e) -> bool {
        const bool keep = e->size > 16;
        if (keep)
            if (auto it = memo.find(e.get()); it != memo.end()) return it->second;
        bool r = false;
        switch (e->op) {
            case Op::Zero: r = false; break;
            case Op::Leaf: r = on(e->annot); break;
            case Op::Frozen: r = ev(e->kids[0]); break;
            case Op::Ins: r = on(e->annot) || ev(e->kids[0]); break;
            case Op::Del: r = !on(e->annot) && ev(e->kids[0]); break;
            case Op::ModAdd: r = ev(e->kids[0]) || ev(e->kids[1]); break;
            case Op::ModMul: r = on(e->annot) && ev(e->kids[0]); break;
            case Op::Sum:
                for (const auto& k : e->kids)
                    if (ev(k)) {
                        r = true;
                        break;
                    }
                break;
        }
        if (keep) memo.emplace(e.get(), r);
        return r;
    };
    SupportSet out;
    for (const auto& [n, rel] : tracked.relations)
        for (const auto& row : rel.rows())
            if (ev(row.state.expr)) out.emplace(n, row.tuple);
    return out;
}

}  // namespace

SupportSet delete_propagate(const AnnotatedDatabase& tracked, const std::set<std::string>& deleted) {
    return boolean_what_if(tracked, deleted, AnnotKind::Tuple);
}

SupportSet abort_transactions(const AnnotatedDatabase& tracked, const std::set<std::string>& aborted) {
    return boolean_what_if(tracked, aborted, AnnotKind::Transaction);
}

}  // namespace uprov
