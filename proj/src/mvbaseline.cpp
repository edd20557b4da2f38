#include "uprov/mvbaseline.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace uprov {

namespace {

char op_letter(MvOp op) {
    switch (op) {
        case MvOp::U: return 'U';
        case MvOp::I: return 'I';
        case MvOp::D: return 'D';
        case MvOp::C: return 'C';
        default: return '?';
    }
}

bool is_version(MvOp op) { return op == MvOp::U || op == MvOp::I || op == MvOp::D || op == MvOp::C; }

const MvExpr& zero_mv() {
    static const MvExpr z = mv_plus({});
    return z;
}
const MvExpr& one_mv() {
    static const MvExpr o = mv_times({});
    return o;
}
bool is_zero_mv(const MvExpr& e) { return e->op == MvOp::Plus && e->kids.empty(); }
bool is_one_mv(const MvExpr& e) { return e->op == MvOp::Times && e->kids.empty(); }

}  // namespace

MvExpr mv_var(const std::string& name) {
    auto n = std::make_shared<MvNode>();
    n->op = MvOp::Var;
    n->name = name;
    return n;
}

MvExpr mv_version(MvOp op, std::uint64_t id, const std::string& tx, std::uint64_t nu, MvExpr inner) {
    if (!is_version(op)) throw std::invalid_argument("not a version annotation");
    auto n = std::make_shared<MvNode>();
    n->op = op;
    n->id = id;
    n->tx = tx;
    n->nu = nu;
    if (inner) {
        n->size += inner->size;
        n->kids.push_back(std::move(inner));
    }
    return n;
}

static MvExpr mv_nary(MvOp op, std::vector<MvExpr> kids) {
    auto n = std::make_shared<MvNode>();
    n->op = op;
    for (const auto& k : kids) n->size += k->size;
    n->kids = std::move(kids);
    return n;
}

MvExpr mv_plus(std::vector<MvExpr> kids) { return mv_nary(MvOp::Plus, std::move(kids)); }
MvExpr mv_times(std::vector<MvExpr> kids) { return mv_nary(MvOp::Times, std::move(kids)); }

std::uint64_t mv_size(const MvExpr& e) { return e->size; }

bool mv_equal(const MvExpr& a, const MvExpr& b) {
    if (a == b) return true;
    if (a->op != b->op || a->size != b->size || a->name != b->name || a->id != b->id || a->tx != b->tx ||
        a->nu != b->nu || a->kids.size() != b->kids.size())
        return false;
    for (std::size_t i = 0; i < a->kids.size(); ++i)
        if (!mv_equal(a->kids[i], b->kids[i])) return false;
    return true;
}

std::string mv_render(const MvExpr& e) {
    switch (e->op) {
        case MvOp::Var: return e->name;
        case MvOp::Plus:
        case MvOp::Times: {
            if (e->kids.empty()) return e->op == MvOp::Plus ? "0" : "1";
            std::string sep = e->op == MvOp::Plus ? " + " : " * ";
            std::string out = "(";
            for (std::size_t i = 0; i < e->kids.size(); ++i) out += (i ? sep : "") + mv_render(e->kids[i]);
            return out + ")";
        }
        default: {
            std::string out = std::string(1, op_letter(e->op)) + "^" + std::to_string(e->id) + "_{" + e->tx + "," +
                              std::to_string(e->nu) + "}(";
            if (!e->kids.empty()) out += mv_render(e->kids[0]);
            return out + ")";
        }
    }
}

namespace {

// operands of a commutative operator in a fixed order, so equal values compare equal
std::vector<MvExpr> canonical(std::vector<MvExpr> kids) {
    std::vector<std::pair<std::string, MvExpr>> keyed;
    for (auto& k : kids) keyed.emplace_back(mv_render(k), std::move(k));
    std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<MvExpr> out;
    for (auto& [key, k] : keyed) out.push_back(std::move(k));
    return out;
}

}  // namespace

MvExpr unv(const MvExpr& e) {
    switch (e->op) {
        case MvOp::Var: return e;
        case MvOp::D: return zero_mv();
        case MvOp::I:
            if (e->kids.empty()) return one_mv();
            return unv(e->kids[0]);
        case MvOp::U:
        case MvOp::C: return e->kids.empty() ? one_mv() : unv(e->kids[0]);
        case MvOp::Plus: {
            std::vector<MvExpr> kids;
            for (const auto& k : e->kids) {
                MvExpr u = unv(k);
                if (is_zero_mv(u)) continue;
                if (u->op == MvOp::Plus)
                    kids.insert(kids.end(), u->kids.begin(), u->kids.end());
                else
                    kids.push_back(u);
            }
            if (kids.size() == 1) return kids[0];
            return mv_plus(canonical(std::move(kids)));
        }
        case MvOp::Times: {
            std::vector<MvExpr> kids;
            for (const auto& k : e->kids) {
                MvExpr u = unv(k);
                if (is_zero_mv(u)) return zero_mv();
                if (is_one_mv(u)) continue;
                if (u->op == MvOp::Times)
                    kids.insert(kids.end(), u->kids.begin(), u->kids.end());
                else
                    kids.push_back(u);
            }
            if (kids.size() == 1) return kids[0];
            return mv_times(canonical(std::move(kids)));
        }
    }
    return e;
}

std::uint64_t mv_event_count(const MvExpr& e) {
    std::uint64_t n = (e->op == MvOp::U || e->op == MvOp::I || e->op == MvOp::D) ? 1 : 0;
    for (const auto& k : e->kids) n += mv_event_count(k);
    return n;
}

bool mv_contains(const MvExpr& h, const MvExpr& needle) {
    if (mv_equal(h, needle)) return true;
    for (const auto& k : h->kids)
        if (mv_contains(k, needle)) return true;
    return false;
}

// ---------------------------------------------------------------- parsing

namespace {

class MvParser {
public:
    explicit MvParser(const std::string& s) : s_(s) {}
    MvExpr parse() {
        MvExpr e = expr();
        skip();
        if (i_ != s_.size()) fail("trailing input");
        return e;
    }

private:
    const std::string& s_;
    std::size_t i_ = 0;

    [[noreturn]] void fail(const std::string& m) {
        throw std::invalid_argument(m + " at offset " + std::to_string(i_) + " in '" + s_ + "'");
    }
    void skip() {
        while (i_ < s_.size() && s_[i_] == ' ') ++i_;
    }
    bool eat(char c) {
        skip();
        if (i_ < s_.size() && s_[i_] == c) {
            ++i_;
            return true;
        }
        return false;
    }
    void expect(char c) {
        if (!eat(c)) fail(std::string("expected '") + c + "'");
    }
    std::string word() {
        skip();
        std::size_t b = i_;
        while (i_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_' || s_[i_] == '\''))
            ++i_;
        if (b == i_) fail("expected a name");
        return s_.substr(b, i_ - b);
    }
    std::uint64_t number() {
        skip();
        std::size_t b = i_;
        while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
        if (b == i_) fail("expected a number");
        return std::stoull(s_.substr(b, i_ - b));
    }
    MvExpr expr() {
        skip();
        if (eat('(')) {
            std::vector<MvExpr> kids{expr()};
            skip();
            char sep = i_ < s_.size() ? s_[i_] : ')';
            if (sep != '+' && sep != '*' && sep != ')') fail("expected '+', '*' or ')'");
            while (sep != ')' && eat(sep)) kids.push_back(expr());
            expect(')');
            if (kids.size() == 1) return kids[0];
            return sep == '*' ? mv_times(std::move(kids)) : mv_plus(std::move(kids));
        }
        std::string w = word();
        if (w.size() == 1 && i_ < s_.size() && s_[i_] == '^' && std::string("UIDC").find(w[0]) != std::string::npos) {
            MvOp op = w == "U" ? MvOp::U : w == "I" ? MvOp::I : w == "D" ? MvOp::D : MvOp::C;
            ++i_;
            std::uint64_t id = number();
            expect('_');
            expect('{');
            std::string tx = word();
            expect(',');
            std::uint64_t nu = number();
            expect('}');
            expect('(');
            MvExpr inner;
            if (!eat(')')) {
                inner = expr();
                expect(')');
            }
            return mv_version(op, id, tx, nu, inner);
        }
        if (w == "0") return mv_plus({});
        if (w == "1") return mv_times({});
        return mv_var(w);
    }
};

}  // namespace

MvExpr mv_parse(const std::string& text) { return MvParser(text).parse(); }

// ---------------------------------------------------------------- database

const MvRow* MvDatabase::find(const std::string& rel, const Tuple& t) const {
    auto it = relations.find(rel);
    if (it == relations.end()) return nullptr;
    auto r = it->second.rows.find(t);
    return r == it->second.rows.end() ? nullptr : &r->second;
}

std::uint64_t MvDatabase::total_size() const {
    std::uint64_t s = 0;
    for (const auto& [n, rel] : relations)
        for (const auto& [t, row] : rel.rows) s += mv_size(row.expr);
    return s;
}

std::size_t MvDatabase::live_count() const {
    std::size_t c = 0;
    for (const auto& [n, rel] : relations)
        for (const auto& [t, row] : rel.rows) c += row.live;
    return c;
}

std::size_t MvDatabase::row_count() const {
    std::size_t c = 0;
    for (const auto& [n, rel] : relations) c += rel.rows.size();
    return c;
}

SupportSet MvDatabase::support() const {
    SupportSet out;
    for (const auto& [n, rel] : relations)
        for (const auto& [t, row] : rel.rows)
            if (row.live) out.emplace(n, t);
    return out;
}

MvDatabase mv_init(const AnnotatedDatabase& db0, const MvOptions& opts) {
    if (db0.in_transaction()) throw EngineError("MV run started inside an open transaction");
    MvDatabase db;
    db.nu = opts.start_nu;
    for (const auto& [n, rel] : db0.relations) {
        MvRelation& mr = db.relations[n];
        mr.columns = rel.columns();
        for (const auto& row : rel.rows()) {
            if (!row.state.present) continue;
            std::string name = render(row.state.expr);
            auto it = opts.initial.find(name);
            MvRow r;
            r.expr = it != opts.initial.end() ? it->second : mv_var(name);
            r.id = db.next_id++;
            mr.rows.emplace(row.tuple, std::move(r));
        }
    }
    return db;
}

namespace {

// rows are sorted by tuple, so a constant first column bounds the scan
using MvRows = std::map<Tuple, MvRow>;

MvRows::iterator scan_begin(MvRows& rows, const Pattern& u) {
    if (u.empty() || !std::holds_alternative<Value>(u[0])) return rows.begin();
    return rows.lower_bound(Tuple{std::get<Value>(u[0])});
}

bool in_scan(const MvRows& rows, MvRows::const_iterator r, const Pattern& u) {
    if (r == rows.end()) return false;
    const auto* v = u.empty() ? nullptr : std::get_if<Value>(&u[0]);
    return !v || (!r->first.empty() && r->first[0] == *v);
}

}  // namespace

void mv_apply(MvDatabase& db, const HyperplaneQuery& q, const std::string& tx) {
    auto it = db.relations.find(q.relation);
    if (it == db.relations.end()) throw EngineError("unknown relation '" + q.relation + "'");
    auto& rows = it->second.rows;
    std::uint64_t nu = ++db.nu;

    switch (q.kind) {
        case QueryKind::Insert: {
            auto r = rows.find(q.tuple);
            if (r == rows.end()) {
                std::uint64_t id = db.next_id++;
                rows.emplace(q.tuple, MvRow{mv_version(MvOp::I, id, tx, nu, nullptr), id, true, true});
            } else {
                MvRow& row = r->second;
                row.expr = mv_plus({row.expr, mv_version(MvOp::I, row.id, tx, nu, nullptr)});
                row.live = row.touched = true;
            }
            return;
        }
        case QueryKind::Delete:
            for (auto r = scan_begin(rows, q.u1); in_scan(rows, r, q.u1); ++r) {
                MvRow& row = r->second;
                if (row.live && matches(r->first, q.u1)) {
                    row.expr = mv_version(MvOp::D, row.id, tx, nu, row.expr);
                    row.live = false;
                    row.touched = true;
                }
            }
            return;
        case QueryKind::Modify: {
            struct Move {
                Tuple target;
                MvExpr wrapped;
                std::uint64_t id;
            };
            std::vector<Move> moves;
            for (auto r = scan_begin(rows, q.u1); in_scan(rows, r, q.u1);) {
                if (!r->second.live || !matches(r->first, q.u1)) {
                    ++r;
                    continue;
                }
                Tuple t2 = modify_target(r->first, q.u1, q.u2);
                if (t2 == r->first) {
                    ++r;
                    continue;
                }
                moves.push_back({std::move(t2), mv_version(MvOp::U, r->second.id, tx, nu, r->second.expr),
                                 r->second.id});
                r = rows.erase(r);  // the tuple leaves with its history
            }
            for (auto& m : moves) {
                auto r = rows.find(m.target);
                if (r == rows.end()) {
                    rows.emplace(m.target, MvRow{m.wrapped, m.id, true, true});
                } else {
                    r->second.expr = mv_plus({r->second.expr, m.wrapped});
                    r->second.live = r->second.touched = true;
                }
            }
            return;
        }
    }
}

void mv_commit(MvDatabase& db, const std::string& tx) {
    std::uint64_t nu = ++db.nu;
    for (auto& [n, rel] : db.relations)
        for (auto& [t, row] : rel.rows)
            if (row.touched) {
                row.expr = mv_version(MvOp::C, row.id, tx, nu, row.expr);
                row.touched = false;
            }
}

void mv_run_transaction(MvDatabase& db, const Transaction& tx) {
    for (const auto& q : tx.queries) mv_apply(db, q, tx.id);
    mv_commit(db, tx.id);
}

MvDatabase mv_run(const AnnotatedDatabase& db0, const std::vector<Transaction>& txs, const MvOptions& opts) {
    MvDatabase db = mv_init(db0, opts);
    for (const auto& tx : txs) mv_run_transaction(db, tx);
    return db;
}

}  // namespace uprov
