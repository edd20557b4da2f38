#include "uprov/engine.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "csv.hpp"

namespace uprov {

// ---------------------------------------------------------------- relation

AnnotatedRelation::AnnotatedRelation(std::string name, std::vector<std::string> columns)
    : name_(std::move(name)), columns_(std::move(columns)) {}

Row* AnnotatedRelation::find(const Tuple& t) {
    auto it = index_.find(t);
    return it == index_.end() ? nullptr : &rows_[it->second];
}

const Row* AnnotatedRelation::find(const Tuple& t) const {
    auto it = index_.find(t);
    return it == index_.end() ? nullptr : &rows_[it->second];
}

Row& AnnotatedRelation::get_or_create(const Tuple& t) {
    if (t.size() != arity()) throw EngineError("arity mismatch for relation '" + name_ + "'");
    auto [it, fresh] = index_.try_emplace(t, rows_.size());
    if (fresh) {
        rows_.push_back(Row{t, RowState{zero(), false, zero()}, false});
        for (std::size_t c = 0; c < col_built_.size(); ++c)
            if (col_built_[c]) by_col_[c][t[c].text].push_back(it->second);
    }
    return rows_[it->second];
}

const std::vector<std::size_t>* AnnotatedRelation::candidates(const Pattern& u) {
    // numeric and string constants can share text, so the key is only a filter
    for (std::size_t c = 0; c < u.size() && c < arity(); ++c) {
        const auto* v = std::get_if<Value>(&u[c]);
        if (!v) continue;
        if (col_built_.size() != arity()) {
            col_built_.assign(arity(), false);
            by_col_.assign(arity(), {});
        }
        if (!col_built_[c]) {
            for (std::size_t i = 0; i < rows_.size(); ++i) by_col_[c][rows_[i].tuple[c].text].push_back(i);
            col_built_[c] = true;
        }
        static const std::vector<std::size_t> none;
        auto it = by_col_[c].find(v->text);
        return it == by_col_[c].end() ? &none : &it->second;
    }
    return nullptr;
}

void AnnotatedRelation::drop_zero_rows() {
    std::size_t j = 0;
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        if (is_zero(rows_[i].state.expr)) {
            index_.erase(rows_[i].tuple);
            continue;
        }
        if (i != j) {
            index_.find(rows_[i].tuple)->second = j;
            rows_[j] = std::move(rows_[i]);
        }
        ++j;
    }
    if (j == rows_.size()) return;
    rows_.erase(rows_.begin() + static_cast<std::ptrdiff_t>(j), rows_.end());
    by_col_.clear();
    col_built_.clear();
}

// ---------------------------------------------------------------- database

Catalog AnnotatedDatabase::catalog() const {
    Catalog c;
    for (const auto& [n, r] : relations) c[n] = r.columns();
    return c;
}

AnnotatedRelation& AnnotatedDatabase::relation(const std::string& name) {
    auto it = relations.find(name);
    if (it == relations.end()) throw EngineError("unknown relation '" + name + "'");
    return it->second;
}

const AnnotatedRelation& AnnotatedDatabase::relation(const std::string& name) const {
    auto it = relations.find(name);
    if (it == relations.end()) throw EngineError("unknown relation '" + name + "'");
    return it->second;
}

void AnnotatedDatabase::add_relation(const std::string& name, std::vector<std::string> columns) {
    if (relations.count(name)) throw EngineError("relation '" + name + "' declared twice");
    relations.emplace(name, AnnotatedRelation(name, std::move(columns)));
}

void AnnotatedDatabase::add_row(const std::string& rel, Tuple t, const std::string& annot) {
    auto& r = relation(rel);
    if (t.size() != r.arity())
        throw EngineError("arity mismatch in '" + rel + "': expected " + std::to_string(r.arity()) + " values");
    if (r.find(t)) throw EngineError("duplicate tuple " + render_tuple(t) + " in '" + rel + "'");
    std::string name = annot.empty() ? registry.fresh_name("x") : annot;
    if (registry.contains(name)) throw EngineError("duplicate annotation name '" + name + "'");
    Expr e = leaf(registry.intern(name, AnnotKind::Tuple));
    Row& row = r.get_or_create(t);
    row.state = RowState{e, true, e};
}

void AnnotatedDatabase::add_row_expr(const std::string& rel, Tuple t, Expr e, bool present) {
    auto& r = relation(rel);
    if (t.size() != r.arity())
        throw EngineError("arity mismatch in '" + rel + "': expected " + std::to_string(r.arity()) + " values");
    if (r.find(t)) throw EngineError("duplicate tuple " + render_tuple(t) + " in '" + rel + "'");
    Row& row = r.get_or_create(t);
    row.state = RowState{e, present, e};
}

const Annot& AnnotatedDatabase::open_annotation() const {
    if (!open_) throw EngineError("no open transaction");
    return *open_;
}

std::uint64_t AnnotatedDatabase::total_size() const {
    std::uint64_t s = 0;
    for (const auto& [n, r] : relations)
        for (const auto& row : r.rows()) s += expr_size(row.state.expr);
    return s;
}

std::uint64_t AnnotatedDatabase::peak_row_size() const {
    std::uint64_t s = 0;
    for (const auto& [n, r] : relations)
        for (const auto& row : r.rows()) s = std::max(s, expr_size(row.state.expr));
    return s;
}

std::size_t AnnotatedDatabase::row_count() const {
    std::size_t n = 0;
    for (const auto& [name, r] : relations) n += r.rows().size();
    return n;
}

// ---------------------------------------------------------------- CSV

namespace {

Value field_value(const csv::Field& f) {
    if (f.quoted) return Value::str(f.text);
    if (csv::looks_numeric(f.text)) return Value::num(f.text);
    return Value::str(f.text);
}

bool plain_identifier(const std::string& s) {
    if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
    return std::all_of(s.begin(), s.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
    });
}

}  // namespace

void load_relation_csv(AnnotatedDatabase& db, const std::string& text, const std::string& origin) {
    std::istringstream is(text);
    std::string line;
    std::size_t lineno = 0;
    std::string rel;
    bool has_annot = false;
    std::size_t arity = 0;
    auto fail = [&](const std::string& m) {
        throw EngineError(origin + ":" + std::to_string(lineno) + ": " + m);
    };
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        std::vector<csv::Field> fields;
        try {
            fields = csv::split(line);
        } catch (const std::exception& e) {
            fail(e.what());
        }
        if (rel.empty()) {
            if (fields.empty() || fields[0].text.empty()) fail("header must start with the relation name");
            rel = fields[0].text;
            std::vector<std::string> cols;
            for (std::size_t i = 1; i < fields.size(); ++i) {
                const auto& name = fields[i].text;
                if (!name.empty() && name[0] == '@') {
                    if (i + 1 != fields.size()) fail("the annotation column must be last");
                    has_annot = true;
                } else {
                    cols.push_back(name);
                }
            }
            arity = cols.size();
            try {
                db.add_relation(rel, cols);
            } catch (const EngineError& e) {
                fail(e.what());
            }
            continue;
        }
        std::size_t want = arity + (has_annot ? 1 : 0);
        if (fields.size() != want && !(has_annot && fields.size() == arity))
            fail("arity mismatch: expected " + std::to_string(want) + " fields, got " + std::to_string(fields.size()));
        Tuple t;
        for (std::size_t i = 0; i < arity; ++i) t.push_back(field_value(fields[i]));
        std::string annot = (has_annot && fields.size() > arity) ? fields[arity].text : "";
        try {
            if (annot.empty() || plain_identifier(annot))
                db.add_row(rel, std::move(t), annot);
            else
                db.add_row_expr(rel, std::move(t), parse_expr(annot, db.registry), true);  // output of an earlier run
        } catch (const EngineError& e) {
            fail(e.what());
        } catch (const ExprParseError& e) {
            fail(e.what());
        } catch (const std::invalid_argument& e) {
            fail(e.what());
        }
    }
    if (rel.empty()) throw EngineError(origin + ": missing header line");
}

AnnotatedDatabase load_database(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) throw EngineError("not a directory: " + dir.string());
    std::vector<std::filesystem::path> files;
    for (const auto& ent : std::filesystem::directory_iterator(dir))
        if (ent.is_regular_file() && ent.path().extension() == ".csv") files.push_back(ent.path());
    std::sort(files.begin(), files.end());
    AnnotatedDatabase db;
    for (const auto& f : files) {
        std::ifstream in(f);
        if (!in) throw EngineError("cannot read " + f.string());
        std::stringstream ss;
        ss << in.rdbuf();
        load_relation_csv(db, ss.str(), f.string());
    }
    return db;
}

namespace {

std::string tuple_csv(const Tuple& t) {
    std::string out;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (i) out += ',';
        out += t[i].quoted();
    }
    return out;
}

}  // namespace

std::string relation_to_csv(const AnnotatedRelation& rel) {
    std::string out = rel.name();
    for (const auto& c : rel.columns()) out += "," + c;
    out += ",@annot\n";
    for (const auto& row : rel.rows()) {
        if (!row.state.present) continue;
        std::string a = render(row.state.expr, {false});
        out += tuple_csv(row.tuple) + "," + (plain_identifier(a) ? a : Value::str(a).quoted()) + "\n";
    }
    return out;
}

std::string relation_provenance(const AnnotatedRelation& rel, const std::optional<Annot>& shape_annot,
                                RenderOptions opts) {
    std::string out;
    for (const auto& row : rel.rows()) {
        out += tuple_csv(row.tuple) + "\t" + render(row.state.expr, opts);
        if (!row.state.present) out += "\t#deleted";
        if (shape_annot && row.touched) {
            const Expr& e = row.state.expr;
            Shape s = classify(e, *shape_annot);
            if (s != Shape::NotNormal)
                out += "\t" + shape_name(s);
            else if (is_minimized_shape(e, *shape_annot))
                out += "\tSUM.M";
        }
        out += "\n";
    }
    return out;
}

std::string annotations_manifest(const AnnotRegistry& reg) {
    std::string out;
    for (const auto& a : reg.all())
        out += std::string(a->kind == AnnotKind::Tuple ? "tuple" : "transaction") + "\t" + a->name + "\n";
    return out;
}

void export_database(const AnnotatedDatabase& db, const std::filesystem::path& dir, RenderOptions opts) {
    std::filesystem::create_directories(dir);
    auto put = [&](const std::filesystem::path& f, const std::string& text) {
        std::ofstream out(f, std::ios::binary);
        out << text;
        if (!out) throw EngineError("cannot write " + f.string());
    };
    for (const auto& [name, rel] : db.relations) {
        put(dir / (name + ".csv"), relation_to_csv(rel));
        put(dir / (name + ".prov"), relation_provenance(rel, db.last_normal_commit(), opts));
    }
    put(dir / "annotations.tsv", annotations_manifest(db.registry));
}

namespace {

std::string read_file(const std::filesystem::path& f) {
    std::ifstream in(f, std::ios::binary);
    if (!in) throw EngineError("cannot read " + f.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

AnnotatedDatabase load_provenance(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) throw EngineError("not a directory: " + dir.string());
    AnnotatedDatabase db;
    auto manifest = dir / "annotations.tsv";
    if (std::filesystem::exists(manifest)) {
        std::istringstream is(read_file(manifest));
        std::string line;
        while (std::getline(is, line)) {
            if (line.empty()) continue;
            auto tab = line.find('\t');
            if (tab == std::string::npos) throw EngineError(manifest.string() + ": malformed line '" + line + "'");
            std::string kind = line.substr(0, tab), name = line.substr(tab + 1);
            if (kind != "tuple" && kind != "transaction")
                throw EngineError(manifest.string() + ": unknown kind '" + kind + "'");
            db.registry.intern(name, kind == "tuple" ? AnnotKind::Tuple : AnnotKind::Transaction);
        }
    }
    std::vector<std::filesystem::path> files;
    for (const auto& ent : std::filesystem::directory_iterator(dir))
        if (ent.is_regular_file() && ent.path().extension() == ".prov") files.push_back(ent.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw EngineError("no .prov files in " + dir.string());
    for (const auto& f : files) {
        auto header_file = std::filesystem::path(f).replace_extension(".csv");
        std::string header = read_file(header_file);
        header = header.substr(0, header.find('\n'));
        if (!header.empty() && header.back() == '\r') header.pop_back();
        auto hf = csv::split(header);
        if (hf.empty()) throw EngineError(header_file.string() + ": missing header");
        std::string rel = hf[0].text;
        std::vector<std::string> cols;
        for (std::size_t i = 1; i < hf.size(); ++i)
            if (hf[i].text.empty() || hf[i].text[0] != '@') cols.push_back(hf[i].text);
        db.add_relation(rel, cols);

        std::istringstream is(read_file(f));
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(is, line)) {
            ++lineno;
            if (line.empty()) continue;
            auto fail = [&](const std::string& m) {
                throw EngineError(f.string() + ":" + std::to_string(lineno) + ": " + m);
            };
            std::vector<std::string> parts;
            std::size_t b = 0;
            for (;;) {
                auto t = line.find('\t', b);
                parts.push_back(line.substr(b, t == std::string::npos ? std::string::npos : t - b));
                if (t == std::string::npos) break;
                b = t + 1;
            }
            if (parts.size() < 2) fail("expected tuple and expression separated by a tab");
            Tuple t;
            try {
                for (const auto& fld : csv::split(parts[0])) t.push_back(field_value(fld));
                bool present = std::find(parts.begin() + 2, parts.end(), "#deleted") == parts.end();
                db.add_row_expr(rel, std::move(t), parse_expr(parts[1], db.registry), present);
            } catch (const EngineError& e) {
                fail(e.what());
            } catch (const std::exception& e) {
                fail(e.what());
            }
        }
    }
    return db;
}

// ---------------------------------------------------------------- execution

namespace {

void write(AnnotatedDatabase& db, Row& row, Expr e, bool present, Mode mode, const Annot& p) {
    if (mode == Mode::NormalForm) {
        NormalizeOptions o;
        o.trace = db.rule_trace;
        e = normalize_step(e, p, o);
    }
    row.state.expr = std::move(e);
    row.state.present = present;
    row.touched = true;
}

void check_mode(const AnnotatedDatabase& db, Mode mode) {
    if (db.open_mode() != mode) throw EngineError("query mode differs from the transaction's mode");
}

}  // namespace

void begin_transaction(AnnotatedDatabase& db, const std::string& id, Mode mode) {
    if (db.open_) throw EngineError("nested begin: transaction '" + (*db.open_)->name + "' is open");
    Annot p = db.registry.intern(id, AnnotKind::Transaction);
    for (auto& [n, rel] : db.relations) {
        for (auto& row : rel.rows()) {
            if (mode == Mode::NormalForm && !is_atom(row.state.expr)) row.state.expr = frozen(row.state.expr);
            row.state.tx_start = row.state.expr;
            row.touched = false;
        }
    }
    db.open_ = p;
    db.mode_ = mode;
}

namespace {

// visits matching candidates in row order; the list is copied since writes may add rows
template <class F>
void for_candidates(AnnotatedRelation& rel, const Pattern& u, F&& f) {
    if (const auto* c = rel.candidates(u)) {
        const std::vector<std::size_t> ids = *c;
        for (std::size_t i : ids) f(i);
    } else {
        const std::size_t n = rel.rows().size();
        for (std::size_t i = 0; i < n; ++i) f(i);
    }
}

}  // namespace

void apply_query(AnnotatedDatabase& db, const HyperplaneQuery& q, Mode mode) {
    const Annot& p = db.open_annotation();
    check_mode(db, mode);
    if (q.annot != p->name) throw EngineError("query annotation '" + q.annot + "' differs from the open transaction");
    AnnotatedRelation& rel = db.relation(q.relation);
    auto& rows = rel.rows();

    switch (q.kind) {
        case QueryKind::Insert: {
            Row& row = rel.get_or_create(q.tuple);
            write(db, row, ins(row.state.expr, p), true, mode, p);
            return;
        }
        case QueryKind::Delete: {
            if (q.u1.size() != rel.arity()) throw EngineError("arity mismatch for '" + q.relation + "'");
            for_candidates(rel, q.u1, [&](std::size_t i) {
                Row& row = rows[i];
                if (!is_zero(row.state.expr) && matches(row.tuple, q.u1))
                    write(db, row, del(row.state.expr, p), false, mode, p);
            });
            return;
        }
        case QueryKind::Modify: {
            if (q.u1.size() != rel.arity()) throw EngineError("arity mismatch for '" + q.relation + "'");
            // pre-update snapshot: every read below uses it
            std::vector<std::size_t> moved;
            std::vector<Tuple> targets;
            std::unordered_map<Tuple, std::vector<Expr>, TupleHash> contributors;
            std::unordered_set<Tuple, TupleHash> live_targets;  // reached from a present source
            for_candidates(rel, q.u1, [&](std::size_t i) {
                const Row& row = rows[i];
                if (is_zero(row.state.expr) || !matches(row.tuple, q.u1)) return;
                Tuple t2 = modify_target(row.tuple, q.u1, q.u2);
                if (t2 == row.tuple) return;  // a tuple mapped onto itself stays and is not its own source
                moved.push_back(i);
                auto [it, fresh] = contributors.try_emplace(t2);
                if (fresh) targets.push_back(t2);
                it->second.push_back(row.state.expr);
                if (row.state.present) live_targets.insert(t2);
            });
            for (std::size_t i : moved) write(db, rows[i], del(rows[i].state.expr, p), false, mode, p);
            for (const auto& t2 : targets) {
                Row& row = rel.get_or_create(t2);
                Expr e = modadd(row.state.expr, modmul(sum(contributors[t2]), p));
                write(db, row, e, row.state.present || live_targets.count(t2), mode, p);
            }
            return;
        }
    }
}

void commit_transaction(AnnotatedDatabase& db, Mode mode) {
    if (!db.open_) throw EngineError("commit without begin");
    check_mode(db, mode);
    for (auto& [n, rel] : db.relations) {
        if (mode == Mode::NormalForm) {
            for (auto& row : rel.rows()) {
                if (row.touched)
                    row.state.expr = minimize_zero(row.state.expr);
                else if (row.state.expr->op == Op::Frozen)
                    row.state.expr = row.state.expr->kids[0];  // undo the wrap from begin
            }
            rel.drop_zero_rows();
        }
        for (auto& row : rel.rows()) row.state.tx_start = row.state.expr;
    }
    db.last_nf_ = mode == Mode::NormalForm ? db.open_ : std::nullopt;
    db.open_.reset();
}

void run_transaction(AnnotatedDatabase& db, const Transaction& tx, Mode mode) {
    begin_transaction(db, tx.id, mode);
    for (const auto& q : tx.queries) apply_query(db, q, mode);
    commit_transaction(db, mode);
}

void run_transactions(AnnotatedDatabase& db, const std::vector<Transaction>& txs, Mode mode) {
    for (const auto& tx : txs) run_transaction(db, tx, mode);
}

SupportSet support(const AnnotatedDatabase& db) {
    if (db.in_transaction()) throw EngineError("support requested inside an open transaction");
    SupportSet out;
    for (const auto& [n, rel] : db.relations)
        for (const auto& row : rel.rows())
            if (row.state.present) out.emplace(n, row.tuple);
    return out;
}

// ---------------------------------------------------------------- vanilla

void VanillaDatabase::Rel::add(const Tuple& t) {
    auto [it, fresh] = members.try_emplace(t, slots.size());
    if (!fresh) return;
    slots.emplace_back(t);
    for (std::size_t c = 0; c < col_built.size(); ++c)
        if (col_built[c]) by_col[c][t[c].text].push_back(it->second);
}

void VanillaDatabase::Rel::remove(std::size_t slot) {
    members.erase(*slots[slot]);
    slots[slot].reset();
}

std::vector<std::size_t> VanillaDatabase::Rel::matching(const Pattern& u) {
    std::vector<std::size_t> out;
    for (std::size_t c = 0; c < u.size(); ++c) {
        const auto* v = std::get_if<Value>(&u[c]);
        if (!v) continue;
        if (col_built.size() != u.size()) {
            col_built.assign(u.size(), false);
            by_col.assign(u.size(), {});
        }
        if (!col_built[c]) {
            for (std::size_t i = 0; i < slots.size(); ++i)
                if (slots[i]) by_col[c][(*slots[i])[c].text].push_back(i);
            col_built[c] = true;
        }
        auto it = by_col[c].find(v->text);
        if (it == by_col[c].end()) return out;
        auto& ids = it->second;
        std::erase_if(ids, [&](std::size_t i) { return !slots[i]; });
        for (std::size_t i : ids)
            if (matches(*slots[i], u)) out.push_back(i);
        return out;
    }
    for (std::size_t i = 0; i < slots.size(); ++i)
        if (slots[i] && matches(*slots[i], u)) out.push_back(i);
    return out;
}

VanillaDatabase::VanillaDatabase(const SupportSet& initial, const Catalog& catalog) {
    for (const auto& [n, cols] : catalog) rels_[n];
    for (const auto& [n, t] : initial) {
        auto it = rels_.find(n);
        if (it == rels_.end()) throw EngineError("unknown relation '" + n + "'");
        it->second.add(t);
    }
}

void VanillaDatabase::apply(const HyperplaneQuery& q) {
    auto it = rels_.find(q.relation);
    if (it == rels_.end()) throw EngineError("unknown relation '" + q.relation + "'");
    Rel& r = it->second;
    switch (q.kind) {
        case QueryKind::Insert:
            r.add(q.tuple);
            break;
        case QueryKind::Delete:
            for (std::size_t i : r.matching(q.u1)) r.remove(i);
            break;
        case QueryKind::Modify: {
            std::vector<Tuple> added;
            for (std::size_t i : r.matching(q.u1)) {
                Tuple t2 = modify_target(*r.slots[i], q.u1, q.u2);
                if (t2 == *r.slots[i]) continue;
                added.push_back(std::move(t2));
                r.remove(i);
            }
            for (const auto& t2 : added) r.add(t2);
            break;
        }
    }
}

SupportSet VanillaDatabase::support() const {
    SupportSet out;
    for (const auto& [n, r] : rels_)
        for (const auto& t : r.slots)
            if (t) out.emplace(n, *t);
    return out;
}

std::size_t VanillaDatabase::size() const {
    std::size_t n = 0;
    for (const auto& [k, r] : rels_) n += r.members.size();
    return n;
}

SupportSet run_vanilla(const SupportSet& initial, const Catalog& catalog, const std::vector<Transaction>& txs) {
    VanillaDatabase v(initial, catalog);
    for (const auto& tx : txs)
        for (const auto& q : tx.queries) v.apply(q);
    return v.support();
}

SupportSet run_vanilla(const AnnotatedDatabase& db0, const std::vector<Transaction>& txs) {
    return run_vanilla(support(db0), db0.catalog(), txs);
}

// ---------------------------------------------------------------- size checks

std::uint64_t shape_size(const Expr& e) {
    if (is_atom(e)) return 1;
    std::uint64_t s = 1;
    if (e->op == Op::Ins || e->op == Op::Del || e->op == Op::ModMul) s += 1;
    if (e->op == Op::Sum && e->kids.size() == 1) s -= 1;
    for (const auto& k : e->kids) s += shape_size(k);
    return s;
}

SizeBoundReport size_bound_check(const AnnotatedDatabase& db, const Transaction& tx, std::size_t rows_at_start) {
    SizeBoundReport rep;
    std::size_t inserts = 0;
    for (const auto& q : tx.queries) inserts += q.kind == QueryKind::Insert;
    std::uint64_t bound = 6 + rows_at_start + inserts;
    const Annot p = db.registry.find(tx.id);
    for (const auto& [n, rel] : db.relations) {
        for (const auto& row : rel.rows()) {
            if (!row.touched) continue;
            ++rep.rows_checked;
            const Expr& e = row.state.expr;
            std::string where = n + render_tuple(row.tuple);
            if (p && !is_minimized_shape(e, p)) rep.violations.push_back(where + ": not in a normal shape: " + render(e));
            if (shape_size(e) > bound)
                rep.violations.push_back(where + ": size " + std::to_string(shape_size(e)) + " exceeds " +
                                         std::to_string(bound));
        }
    }
    return rep;
}

}  // namespace uprov
