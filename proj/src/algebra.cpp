#include "uprov/algebra.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <sstream>
#include <unordered_map>

namespace uprov {

namespace {

constexpr std::uint64_t kNoLeaf = std::numeric_limits<std::uint64_t>::max();

// tree sizes of shared DAGs can exceed 64 bits; they stick at the maximum
std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) {
    return a > std::numeric_limits<std::uint64_t>::max() - b ? std::numeric_limits<std::uint64_t>::max() : a + b;
}

Expr make(Op op, Annot annot, std::vector<Expr> kids) {
    std::uint64_t size = 1;
    std::uint64_t mo = kNoLeaf;
    std::size_t depth = 0;
    for (const auto& k : kids) {
        size = sat_add(size, k->size);
        mo = std::min(mo, k->min_order);
        depth = std::max(depth, k->depth);
    }
    switch (op) {
        case Op::Leaf:
            mo = annot->order;
            break;
        case Op::Ins:
        case Op::Del:
        case Op::ModMul:
            size = sat_add(size, 1);  // the p leaf
            break;
        case Op::Frozen:
            if (size != kNoLeaf) size -= 1;  // transparent wrapper
            break;
        case Op::Sum:
            if (kids.size() == 1 && size != kNoLeaf) size -= 1;  // singleton Sum counts as its child
            break;
        default:
            break;
    }
    return std::make_shared<const Node>(Node{op, std::move(annot), std::move(kids), size, mo, depth + 1});
}

void need(const Expr& e) {
    if (!e) throw std::invalid_argument("null expression");
}

void need(const Annot& a) {
    if (!a) throw std::invalid_argument("null annotation");
}

}  // namespace

Annot AnnotRegistry::intern(const std::string& name, AnnotKind kind) {
    auto it = by_name_.find(name);
    if (it != by_name_.end()) {
        if (it->second->kind != kind)
            throw std::invalid_argument("annotation '" + name + "' reused with a different kind");
        return it->second;
    }
    auto a = std::make_shared<const AnnotInfo>(AnnotInfo{name, kind, next_order_++});
    by_name_.emplace(name, a);
    return a;
}

Annot AnnotRegistry::find(const std::string& name) const {
    auto it = by_name_.find(name);
    return it == by_name_.end() ? nullptr : it->second;
}

std::string AnnotRegistry::fresh_name(const std::string& prefix) {
    for (;;) {
        std::string n = prefix + std::to_string(++fresh_counter_);
        if (!contains(n)) return n;
    }
}

Expr zero() {
    static const Expr z = make(Op::Zero, nullptr, {});
    return z;
}

Expr leaf(const Annot& a) {
    need(a);
    return make(Op::Leaf, a, {});
}

Expr frozen(const Expr& e) {
    need(e);
    return make(Op::Frozen, nullptr, {e});
}

Expr ins(const Expr& e, const Annot& p) {
    need(e), need(p);
    return make(Op::Ins, p, {e});
}

Expr del(const Expr& e, const Annot& p) {
    need(e), need(p);
    return make(Op::Del, p, {e});
}

Expr modadd(const Expr& l, const Expr& r) {
    need(l), need(r);
    return make(Op::ModAdd, nullptr, {l, r});
}

Expr modmul(const Expr& e, const Annot& p) {
    need(e), need(p);
    return make(Op::ModMul, p, {e});
}

Expr sum(std::vector<Expr> children) {
    if (children.empty()) throw std::invalid_argument("sum needs at least one child");
    for (const auto& c : children) need(c);
    std::stable_sort(children.begin(), children.end(), [](const Expr& a, const Expr& b) {
        if (a->min_order != b->min_order) return a->min_order < b->min_order;
        return struct_compare(a, b) < 0;
    });
    return make(Op::Sum, nullptr, std::move(children));
}

bool is_atom(const Expr& e) {
    return e->op == Op::Zero || e->op == Op::Leaf || e->op == Op::Frozen;
}

bool is_zero(const Expr& e) { return e->op == Op::Zero; }

std::vector<Expr> sum_children(const Expr& e) {
    if (e->op == Op::Sum) return e->kids;
    return {e};
}

std::uint64_t expr_size(const Expr& e) { return e->size; }

namespace {

const Expr& unwrap_single(const Expr& e) {
    const Expr* cur = &e;
    while ((*cur)->op == Op::Sum && (*cur)->kids.size() == 1) cur = &(*cur)->kids[0];
    return *cur;
}

int cmp_annot(const Annot& a, const Annot& b) {
    if (!a || !b) return (a ? 1 : 0) - (b ? 1 : 0);
    if (a->kind != b->kind) return a->kind < b->kind ? -1 : 1;
    return a->name.compare(b->name) < 0 ? -1 : (a->name == b->name ? 0 : 1);
}

}  // namespace

int struct_compare(const Expr& x, const Expr& y) {
    const Expr& a = unwrap_single(x);
    const Expr& b = unwrap_single(y);
    if (a == b) return 0;
    if (a->op != b->op) return a->op < b->op ? -1 : 1;
    if (a->size != b->size) return a->size < b->size ? -1 : 1;
    if (int c = cmp_annot(a->annot, b->annot)) return c;
    if (a->kids.size() != b->kids.size()) return a->kids.size() < b->kids.size() ? -1 : 1;
    for (std::size_t i = 0; i < a->kids.size(); ++i)
        if (int c = struct_compare(a->kids[i], b->kids[i])) return c;
    return 0;
}

bool struct_eq(const Expr& a, const Expr& b) { return struct_compare(a, b) == 0; }

namespace {

// shared subexpressions are simplified once
using SimplifyMemo = std::unordered_map<const Node*, Expr>;

Expr simplify_node(const Expr& e, SimplifyMemo& memo);

Expr simplify(const Expr& e, SimplifyMemo& memo) {
    if (e->kids.empty()) return e;
    auto it = memo.find(e.get());
    if (it != memo.end()) return it->second;
    Expr out = simplify_node(e, memo);
    memo.emplace(e.get(), out);
    return out;
}

Expr simplify_node(const Expr& e, SimplifyMemo& memo) {
    switch (e->op) {
        case Op::Zero:
        case Op::Leaf:
            return e;
        case Op::Frozen: {
            Expr in = simplify(e->kids[0], memo);
            if (is_atom(in)) return in;
            return in == e->kids[0] ? e : frozen(in);
        }
        case Op::Ins: {
            Expr l = simplify(e->kids[0], memo);
            if (is_zero(l)) return leaf(e->annot);  // 0 +I p = p
            return l == e->kids[0] ? e : ins(l, e->annot);
        }
        case Op::Del: {
            Expr l = simplify(e->kids[0], memo);
            if (is_zero(l)) return zero();
            return l == e->kids[0] ? e : del(l, e->annot);
        }
        case Op::ModMul: {
            Expr l = simplify(e->kids[0], memo);
            if (is_zero(l)) return zero();
            return l == e->kids[0] ? e : modmul(l, e->annot);
        }
        case Op::ModAdd: {
            Expr l = simplify(e->kids[0], memo);
            Expr r = simplify(e->kids[1], memo);
            if (is_zero(r)) return l;
            if (is_zero(l)) return r;
            return (l == e->kids[0] && r == e->kids[1]) ? e : modadd(l, r);
        }
        case Op::Sum: {
            std::vector<Expr> out;
            bool changed = false;
            for (const auto& k : e->kids) {
                Expr s = simplify(k, memo);
                changed |= s != k;
                if (is_zero(s)) {
                    changed = true;
                    continue;
                }
                out.push_back(std::move(s));
            }
            if (out.empty()) return zero();
            return changed ? sum(std::move(out)) : e;
        }
    }
    return e;
}

}  // namespace

Expr zero_simplify(const Expr& e) {
    SimplifyMemo memo;
    return simplify(e, memo);
}

Expr start_leaf(const Expr& e) {
    switch (e->op) {
        case Op::Zero:
        case Op::Leaf:
        case Op::Frozen:
            return e;
        case Op::Ins:
        case Op::Del:
        case Op::ModAdd:
            return start_leaf(e->kids[0]);
        default:
            throw MalformedShape("start_leaf: expression is not in a transaction shape: " + render(e));
    }
}

namespace {

void render_to(std::ostream& os, const Expr& e, const RenderOptions& opts) {
    switch (e->op) {
        case Op::Zero:
            os << '0';
            return;
        case Op::Leaf:
            os << e->annot->name;
            return;
        case Op::Frozen:
            if (opts.show_frozen) os << "frozen{";
            render_to(os, e->kids[0], opts);
            if (opts.show_frozen) os << '}';
            return;
        case Op::Ins:
        case Op::Del:
        case Op::ModMul:
            os << '(';
            render_to(os, e->kids[0], opts);
            os << (e->op == Op::Ins ? " +I " : e->op == Op::Del ? " - " : " .M ") << e->annot->name << ')';
            return;
        case Op::ModAdd:
            os << '(';
            render_to(os, e->kids[0], opts);
            os << " +M ";
            render_to(os, e->kids[1], opts);
            os << ')';
            return;
        case Op::Sum:
            if (e->kids.size() == 1) {
                render_to(os, e->kids[0], opts);
                return;
            }
            os << "sum[";
            for (std::size_t i = 0; i < e->kids.size(); ++i) {
                if (i) os << ", ";
                render_to(os, e->kids[i], opts);
            }
            os << ']';
            return;
    }
}

}  // namespace

std::string render(const Expr& e, RenderOptions opts) {
    std::ostringstream os;
    render_to(os, e, opts);
    return os.str();
}

std::vector<Annot> AnnotRegistry::all() const {
    std::vector<Annot> out;
    for (const auto& [n, a] : by_name_) out.push_back(a);
    std::sort(out.begin(), out.end(), [](const Annot& a, const Annot& b) { return a->order < b->order; });
    return out;
}

// ---------------------------------------------------------------- parsing

namespace {

class ExprParser {
public:
    ExprParser(const std::string& s, AnnotRegistry& reg) : s_(s), reg_(reg) {}

    Expr parse() {
        Expr e = expr();
        skip();
        if (i_ != s_.size()) fail("trailing input");
        return e;
    }

private:
    const std::string& s_;
    AnnotRegistry& reg_;
    std::size_t i_ = 0;

    [[noreturn]] void fail(const std::string& what) {
        throw ExprParseError(what + " at offset " + std::to_string(i_) + " in '" + s_ + "'");
    }
    void skip() {
        while (i_ < s_.size() && (s_[i_] == ' ' || s_[i_] == '\t')) ++i_;
    }
    bool eat(const std::string& tok) {
        skip();
        if (s_.compare(i_, tok.size(), tok) != 0) return false;
        i_ += tok.size();
        return true;
    }
    void expect(const std::string& tok) {
        if (!eat(tok)) fail("expected '" + tok + "'");
    }
    static bool name_char(char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'' || c == '.' || c == '#';
    }
    std::string name() {
        skip();
        std::size_t b = i_;
        // a '.' may only continue a name, never start one (".M" is an operator)
        while (i_ < s_.size() && name_char(s_[i_]) && !(s_[i_] == '.' && s_.compare(i_, 2, ".M") == 0)) ++i_;
        if (b == i_) fail("expected a name");
        return s_.substr(b, i_ - b);
    }
    Annot annot(const std::string& n, AnnotKind kind) {
        if (Annot a = reg_.find(n)) return a;
        return reg_.intern(n, kind);
    }

    Expr expr() {
        skip();
        if (eat("frozen{")) {
            Expr e = expr();
            expect("}");
            return frozen(e);
        }
        if (eat("sum[")) {
            std::vector<Expr> kids{expr()};
            while (eat(",")) kids.push_back(expr());
            expect("]");
            return sum(std::move(kids));
        }
        if (eat("(")) {
            Expr l = expr();
            Expr out;
            if (eat("+I"))
                out = ins(l, annot(name(), AnnotKind::Transaction));
            else if (eat("+M"))
                out = modadd(l, expr());
            else if (eat(".M"))
                out = modmul(l, annot(name(), AnnotKind::Transaction));
            else if (eat("-"))
                out = del(l, annot(name(), AnnotKind::Transaction));
            else
                fail("expected an operator");
            expect(")");
            return out;
        }
        std::string n = name();
        if (n == "0") return zero();
        return leaf(annot(n, AnnotKind::Tuple));
    }
};

}  // namespace

Expr parse_expr(const std::string& text, AnnotRegistry& reg) { return ExprParser(text, reg).parse(); }

}  // namespace uprov
