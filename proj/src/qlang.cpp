#include "uprov/qlang.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace uprov {

// ---------------------------------------------------------------- values

Value Value::num(const std::string& digits) {
    std::string s = digits;
    bool neg = false;
    std::size_t i = 0;
    if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
        neg = s[0] == '-';
        i = 1;
    }
    std::string ip, fp;
    bool dot = false;
    for (; i < s.size(); ++i) {
        char c = s[i];
        if (c == '.' && !dot) {
            dot = true;
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            (dot ? fp : ip) += c;
        } else {
            throw std::invalid_argument("not a decimal number: " + digits);
        }
    }
    if (ip.empty() && fp.empty()) throw std::invalid_argument("not a decimal number: " + digits);
    ip.erase(0, std::min(ip.find_first_not_of('0'), ip.size()));
    if (ip.empty()) ip = "0";
    while (!fp.empty() && fp.back() == '0') fp.pop_back();
    std::string out = ip;
    if (!fp.empty()) out += "." + fp;
    if (neg && out != "0") out = "-" + out;
    return Value{true, out};
}

std::string Value::quoted() const {
    if (numeric) return text;
    std::string out = "\"";
    for (char c : text) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + "\"";
}

std::size_t TupleHash::operator()(const Tuple& t) const noexcept {
    std::size_t h = 1469598103934665603ull;
    for (const auto& v : t) {
        h ^= std::hash<std::string>{}(v.text) + (v.numeric ? 0x9e37 : 0);
        h *= 1099511628211ull;
    }
    return h;
}

std::string render_tuple(const Tuple& t) {
    std::string out = "(";
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (i) out += ", ";
        out += t[i].quoted();
    }
    return out + ")";
}

ParseError::ParseError(const std::string& msg, std::size_t l, std::size_t c)
    : std::runtime_error("line " + std::to_string(l) + ", column " + std::to_string(c) + ": " + msg),
      line(l),
      col(c) {}

// ---------------------------------------------------------------- lexer

namespace {

enum class Tok { Ident, Str, Num, Punct, End };

struct Token {
    Tok kind;
    std::string text;
    std::size_t col;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\''; }

// `quote` is the string delimiter; the datalog syntax uses ", SQL uses '
std::vector<Token> lex_line(const std::string& line, std::size_t lineno, char quote) {
    std::vector<Token> out;
    std::size_t i = 0;
    auto fail = [&](const std::string& m) { throw ParseError(m, lineno, i + 1); };
    while (i < line.size()) {
        char c = line[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        std::size_t start = i;
        if (c == quote) {
            std::string s;
            ++i;
            for (;;) {
                if (i >= line.size()) fail("unterminated string");
                char d = line[i];
                if (quote == '"' && d == '\\' && i + 1 < line.size()) {
                    s += line[i + 1];
                    i += 2;
                    continue;
                }
                if (d == quote) {
                    if (quote == '\'' && i + 1 < line.size() && line[i + 1] == '\'') {  // SQL '' escape
                        s += '\'';
                        i += 2;
                        continue;
                    }
                    ++i;
                    break;
                }
                s += d;
                ++i;
            }
            out.push_back({Tok::Str, s, start + 1});
        } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                   ((c == '-' || c == '.') && i + 1 < line.size() &&
                    std::isdigit(static_cast<unsigned char>(line[i + 1])) &&
                    (out.empty() || out.back().kind == Tok::Punct))) {
            ++i;
            while (i < line.size() && (std::isdigit(static_cast<unsigned char>(line[i])) || line[i] == '.')) ++i;
            out.push_back({Tok::Num, line.substr(start, i - start), start + 1});
        } else if (ident_start(c)) {
            while (i < line.size() && ident_char(line[i]) && !(quote == '\'' && line[i] == '\'')) ++i;
            out.push_back({Tok::Ident, line.substr(start, i - start), start + 1});
        } else {
            static const char* two[] = {"^+", "^-", "^M", ":-", "!=", "<>", "<=", ">="};
            bool matched = false;
            for (const char* t : two) {
                if (line.compare(i, 2, t) == 0) {
                    out.push_back({Tok::Punct, t, start + 1});
                    i += 2;
                    matched = true;
                    break;
                }
            }
            if (matched) continue;
            if (std::string("()[],;=<>*.+-/").find(c) == std::string::npos) fail(std::string("unexpected character '") + c + "'");
            out.push_back({Tok::Punct, std::string(1, c), start + 1});
            ++i;
        }
    }
    out.push_back({Tok::End, "", line.size() + 1});
    return out;
}

class Cursor {
public:
    Cursor(std::vector<Token> toks, std::size_t line) : toks_(std::move(toks)), line_(line) {}

    const Token& peek() const { return toks_[pos_]; }
    const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
    bool at_end() const { return peek().kind == Tok::End; }
    bool is(const std::string& punct) const { return peek().kind == Tok::Punct && peek().text == punct; }
    bool accept(const std::string& punct) {
        if (!is(punct)) return false;
        ++pos_;
        return true;
    }
    void expect(const std::string& punct) {
        if (!accept(punct)) fail("expected '" + punct + "'");
    }
    [[noreturn]] void fail(const std::string& msg) const {
        std::string got = peek().kind == Tok::End ? "end of line" : "'" + peek().text + "'";
        throw ParseError(msg + ", found " + got, line_, peek().col);
    }
    [[noreturn]] void fail_here(const std::string& msg) const { throw ParseError(msg, line_, peek().col); }
    std::size_t line() const { return line_; }

private:
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    std::size_t line_;
};

std::string upper(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return s;
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::string cur;
    std::istringstream is(text);
    while (std::getline(is, cur)) {
        if (!cur.empty() && cur.back() == '\r') cur.pop_back();
        lines.push_back(cur);
    }
    return lines;
}

bool blank_or_comment(const std::string& line) {
    auto p = line.find_first_not_of(" \t");
    return p == std::string::npos || line[p] == '#' || line.compare(p, 2, "--") == 0;
}

// ---------------------------------------------------------------- datalog syntax

std::optional<Value> parse_const(Cursor& c) {
    const Token& t = c.peek();
    if (t.kind == Tok::Str) {
        c.next();
        return Value::str(t.text);
    }
    if (t.kind == Tok::Num) {
        c.next();
        try {
            return Value::num(t.text);
        } catch (const std::invalid_argument&) {
            throw ParseError("malformed number '" + t.text + "'", c.line(), t.col);
        }
    }
    return std::nullopt;
}

Term parse_term(Cursor& c) {
    if (auto v = parse_const(c)) return *v;
    if (c.peek().kind != Tok::Ident) c.fail("expected a constant or variable");
    Var var{c.next().text, {}};
    if (c.accept("[")) {
        do {
            c.expect("!=");
            auto v = parse_const(c);
            if (!v) c.fail("expected a constant after '!='");
            var.not_equal.insert(*v);
        } while (c.accept(","));
        c.expect("]");
    }
    return var;
}

Pattern parse_terms(Cursor& c, const std::string& stop) {
    Pattern out;
    if (c.is(stop)) return out;
    do {
        out.push_back(parse_term(c));
    } while (c.accept(","));
    return out;
}

// a repeated variable carries the union of its disequalities at every occurrence
void unify_vars(Pattern& u) {
    std::map<std::string, std::set<Value>> ne;
    for (auto& t : u)
        if (auto* v = std::get_if<Var>(&t)) ne[v->name].insert(v->not_equal.begin(), v->not_equal.end());
    for (auto& t : u)
        if (auto* v = std::get_if<Var>(&t)) v->not_equal = ne[v->name];
}

void check_arity(const Catalog* cat, const std::string& rel, std::size_t n, Cursor& c) {
    if (!cat) return;
    auto it = cat->find(rel);
    if (it == cat->end()) throw ParseError("unknown relation '" + rel + "'", c.line(), 1);
    if (it->second.size() != n)
        throw ParseError("arity mismatch for '" + rel + "': expected " + std::to_string(it->second.size()) +
                             ", got " + std::to_string(n),
                         c.line(), 1);
}

HyperplaneQuery parse_stmt(Cursor& c, const std::string& annot, const Catalog* cat) {
    HyperplaneQuery q;
    q.annot = annot;
    if (c.peek().kind != Tok::Ident) c.fail("expected a relation name");
    q.relation = c.next().text;
    if (c.accept("^+")) {
        q.kind = QueryKind::Insert;
        c.expect("(");
        if (!c.is(")")) {
            do {
                auto v = parse_const(c);
                if (!v) c.fail("insert values must be constants");
                q.tuple.push_back(*v);
            } while (c.accept(","));
        }
        c.expect(")");
        check_arity(cat, q.relation, q.tuple.size(), c);
    } else if (c.accept("^-")) {
        q.kind = QueryKind::Delete;
        c.expect("(");
        q.u1 = parse_terms(c, ")");
        c.expect(")");
        unify_vars(q.u1);
        check_arity(cat, q.relation, q.u1.size(), c);
    } else if (c.accept("^M")) {
        q.kind = QueryKind::Modify;
        c.expect("(");
        q.u1 = parse_terms(c, ";");
        c.expect(";");
        q.u2 = parse_terms(c, ")");
        c.expect(")");
        if (q.u1.size() != q.u2.size())
            throw ParseError("modify patterns differ in arity", c.line(), 1);
        unify_vars(q.u1);
        check_arity(cat, q.relation, q.u1.size(), c);
        try {
            check_modify_shape(q.u1, q.u2);
        } catch (const QueryError& e) {
            throw ParseError(e.what(), c.line(), 1);
        }
        // the replacement mentions variables by name only
        for (auto& t : q.u2)
            if (auto* v = std::get_if<Var>(&t)) v->not_equal.clear();
    } else {
        c.fail("expected '^+', '^-' or '^M'");
    }
    c.expect(":-");
    if (!c.at_end()) c.fail("unexpected trailing input");
    return q;
}

}  // namespace

void check_modify_shape(const Pattern& u1, const Pattern& u2) {
    if (u1.size() != u2.size()) throw QueryError("modify patterns differ in arity");
    for (std::size_t i = 0; i < u2.size(); ++i) {
        const auto* v2 = std::get_if<Var>(&u2[i]);
        if (!v2) continue;
        const auto* v1 = std::get_if<Var>(&u1[i]);
        if (!v1 || v1->name != v2->name)
            throw QueryError("replacement position " + std::to_string(i + 1) + " must repeat the source variable or be a constant");
        if (!v2->not_equal.empty() && v2->not_equal != v1->not_equal)
            throw QueryError("disequalities belong to the source pattern");
    }
}

std::vector<Transaction> parse_transactions(const std::string& text, const Catalog* catalog) {
    std::vector<Transaction> out;
    std::optional<Transaction> open;
    std::set<std::string> ids;
    auto lines = split_lines(text);
    for (std::size_t n = 0; n < lines.size(); ++n) {
        const auto& line = lines[n];
        if (blank_or_comment(line)) continue;
        Cursor c(lex_line(line, n + 1, '"'), n + 1);
        if (c.peek().kind == Tok::Ident && c.peek().text == "BEGIN") {
            if (open) c.fail_here("BEGIN inside an open transaction");
            c.next();
            if (c.peek().kind != Tok::Ident) c.fail("expected a transaction annotation");
            std::string id = c.next().text;
            if (!c.at_end()) c.fail("unexpected trailing input");
            if (!ids.insert(id).second) throw ParseError("transaction annotation '" + id + "' used twice", n + 1, 1);
            open = Transaction{id, {}};
        } else if (c.peek().kind == Tok::Ident && c.peek().text == "END") {
            if (!open) c.fail_here("END without BEGIN");
            c.next();
            if (!c.at_end()) c.fail("unexpected trailing input");
            out.push_back(std::move(*open));
            open.reset();
        } else {
            if (!open) c.fail_here("statement outside BEGIN/END");
            open->queries.push_back(parse_stmt(c, open->id, catalog));
        }
    }
    if (open) throw ParseError("missing END for transaction '" + open->id + "'", lines.size() + 1, 1);
    return out;
}

// ---------------------------------------------------------------- printing

std::string render_pattern(const Pattern& u) {
    std::string out;
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (i) out += ", ";
        if (const auto* v = std::get_if<Value>(&u[i])) {
            out += v->quoted();
        } else {
            const auto& var = std::get<Var>(u[i]);
            out += var.name;
            if (!var.not_equal.empty()) {
                out += "[";
                bool first = true;
                for (const auto& c : var.not_equal) {
                    if (!first) out += ", ";
                    first = false;
                    out += "!= " + c.quoted();
                }
                out += "]";
            }
        }
    }
    return out;
}

std::string render_query(const HyperplaneQuery& q) {
    switch (q.kind) {
        case QueryKind::Insert: {
            std::string body = render_tuple(q.tuple);
            return q.relation + "^+" + body + ":-";
        }
        case QueryKind::Delete:
            return q.relation + "^-(" + render_pattern(q.u1) + "):-";
        case QueryKind::Modify:
            return q.relation + "^M(" + render_pattern(q.u1) + " ; " + render_pattern(q.u2) + "):-";
    }
    return {};
}

std::string print_transactions(const std::vector<Transaction>& txs) {
    std::string out;
    for (const auto& tx : txs) {
        out += "BEGIN " + tx.id + "\n";
        for (const auto& q : tx.queries) out += render_query(q) + "\n";
        out += "END\n";
    }
    return out;
}

// ---------------------------------------------------------------- matching

bool matches(const Tuple& t, const Pattern& u) {
    if (t.size() != u.size()) throw QueryError("arity mismatch between tuple and pattern");
    // repeated variables are rare; a tiny linear binding list is enough
    std::vector<std::pair<const std::string*, const Value*>> bound;
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (const auto* c = std::get_if<Value>(&u[i])) {
            if (!(*c == t[i])) return false;
            continue;
        }
        const auto& var = std::get<Var>(u[i]);
        if (!var.not_equal.empty() && var.not_equal.count(t[i])) return false;
        bool seen = false;
        for (const auto& [name, val] : bound) {
            if (*name == var.name) {
                if (!(*val == t[i])) return false;
                seen = true;
                break;
            }
        }
        if (!seen) bound.emplace_back(&var.name, &t[i]);
    }
    return true;
}

Tuple modify_target(const Tuple& t, const Pattern& u1, const Pattern& u2) {
    if (!matches(t, u1)) throw QueryError("modify_target: tuple does not match the source pattern");
    Tuple out = t;
    for (std::size_t i = 0; i < u2.size(); ++i)
        if (const auto* c = std::get_if<Value>(&u2[i])) out[i] = *c;
    return out;
}

// ---------------------------------------------------------------- SQL fragment

namespace {

struct SqlCond {
    std::size_t col;
    bool equal;
    Value value;
};

std::size_t column_index(const std::vector<std::string>& cols, const std::string& name, Cursor& c) {
    for (std::size_t i = 0; i < cols.size(); ++i)
        if (upper(cols[i]) == upper(name)) return i;
    c.fail_here("unknown attribute '" + name + "'");
}

void reject_unsupported(const std::string& line, std::size_t lineno) {
    // coarse keyword screen for constructs outside the hyperplane fragment
    std::string u = upper(line);
    auto has_word = [&](const std::string& w) {
        std::size_t p = 0;
        while ((p = u.find(w, p)) != std::string::npos) {
            bool left = p == 0 || !ident_char(u[p - 1]);
            bool right = p + w.size() >= u.size() || !ident_char(u[p + w.size()]);
            if (left && right) return true;
            p += w.size();
        }
        return false;
    };
    if (has_word("SELECT")) throw ParseError("unsupported construct: subquery", lineno, 1);
    if (has_word("JOIN") || has_word("USING")) throw ParseError("unsupported construct: join", lineno, 1);
    if (has_word("OR")) throw ParseError("unsupported construct: disjunction in WHERE", lineno, 1);
}

Value sql_const(Cursor& c, const std::string& what) {
    const Token& t = c.peek();
    if (t.kind == Tok::Str) {
        c.next();
        return Value::str(t.text);
    }
    if (t.kind == Tok::Num) {
        c.next();
        return Value::num(t.text);
    }
    if (t.kind == Tok::Ident) c.fail_here("unsupported construct: comparison between attributes in " + what);
    c.fail("expected a constant in " + what);
}

std::vector<SqlCond> parse_where(Cursor& c, const std::vector<std::string>& cols) {
    std::vector<SqlCond> out;
    do {
        if (c.peek().kind != Tok::Ident) c.fail("expected an attribute name");
        std::size_t col = column_index(cols, c.next().text, c);
        bool eq;
        if (c.accept("=")) {
            eq = true;
        } else if (c.accept("!=") || c.accept("<>")) {
            eq = false;
        } else if (c.is("<") || c.is(">") || c.is("<=") || c.is(">=")) {
            c.fail_here("unsupported construct: range comparison");
        } else {
            c.fail("expected '=' or '!='");
        }
        Value v = sql_const(c, "WHERE");
        if (c.is("+") || c.is("-") || c.is("*") || c.is("/")) c.fail_here("unsupported construct: arithmetic");
        out.push_back({col, eq, v});
    } while (c.peek().kind == Tok::Ident && upper(c.peek().text) == "AND" && (c.next(), true));
    return out;
}

Pattern where_pattern(const std::vector<SqlCond>& conds, std::size_t arity, std::size_t lineno) {
    Pattern u;
    for (std::size_t i = 0; i < arity; ++i) u.push_back(Var{"v" + std::to_string(i + 1), {}});
    std::vector<std::optional<Value>> fixed(arity);
    for (const auto& k : conds) {
        if (k.equal) {
            if (fixed[k.col] && !(*fixed[k.col] == k.value))
                throw ParseError("contradictory equalities on one attribute", lineno, 1);
            fixed[k.col] = k.value;
        } else {
            std::get<Var>(u[k.col]).not_equal.insert(k.value);
        }
    }
    for (std::size_t i = 0; i < arity; ++i) {
        if (!fixed[i]) continue;
        if (std::get<Var>(u[i]).not_equal.count(*fixed[i]))
            throw ParseError("contradictory equality and disequality on one attribute", lineno, 1);
        u[i] = *fixed[i];
    }
    return u;
}

void expect_kw(Cursor& c, const std::string& kw) {
    if (c.peek().kind != Tok::Ident || upper(c.peek().text) != kw) c.fail("expected " + kw);
    c.next();
}

const std::vector<std::string>& relation_cols(const Catalog& cat, Cursor& c, std::string& name) {
    if (c.peek().kind != Tok::Ident) c.fail("expected a relation name");
    name = c.next().text;
    if (c.is(",")) c.fail_here("unsupported construct: join");
    auto it = cat.find(name);
    if (it == cat.end()) c.fail_here("unknown relation '" + name + "'");
    return it->second;
}

HyperplaneQuery parse_sql_stmt(Cursor& c, const Catalog& cat, const std::string& annot) {
    HyperplaneQuery q;
    q.annot = annot;
    if (c.peek().kind != Tok::Ident) c.fail("expected INSERT, DELETE or UPDATE");
    std::string kw = upper(c.next().text);
    if (kw == "INSERT") {
        expect_kw(c, "INTO");
        const auto& cols = relation_cols(cat, c, q.relation);
        expect_kw(c, "VALUES");
        c.expect("(");
        do {
            q.tuple.push_back(sql_const(c, "VALUES"));
        } while (c.accept(","));
        c.expect(")");
        if (q.tuple.size() != cols.size()) c.fail_here("arity mismatch for '" + q.relation + "'");
        q.kind = QueryKind::Insert;
    } else if (kw == "DELETE") {
        expect_kw(c, "FROM");
        const auto& cols = relation_cols(cat, c, q.relation);
        std::vector<SqlCond> conds;
        if (c.peek().kind == Tok::Ident && upper(c.peek().text) == "WHERE") {
            c.next();
            conds = parse_where(c, cols);
        }
        q.kind = QueryKind::Delete;
        q.u1 = where_pattern(conds, cols.size(), c.line());
    } else if (kw == "UPDATE") {
        const auto& cols = relation_cols(cat, c, q.relation);
        expect_kw(c, "SET");
        std::vector<std::pair<std::size_t, Value>> sets;
        do {
            if (c.peek().kind != Tok::Ident) c.fail("expected an attribute name");
            std::size_t col = column_index(cols, c.next().text, c);
            c.expect("=");
            if (c.peek().kind == Tok::Ident) c.fail_here("unsupported construct: non-constant SET");
            Value v = sql_const(c, "SET");
            if (!c.at_end() && (c.is("+") || c.is("-") || c.is("*") || c.is("/")))
                c.fail_here("unsupported construct: non-constant SET");
            sets.emplace_back(col, v);
        } while (c.accept(","));
        std::vector<SqlCond> conds;
        if (c.peek().kind == Tok::Ident && upper(c.peek().text) == "WHERE") {
            c.next();
            conds = parse_where(c, cols);
        }
        q.kind = QueryKind::Modify;
        q.u1 = where_pattern(conds, cols.size(), c.line());
        q.u2 = q.u1;
        for (auto& t : q.u2)
            if (auto* v = std::get_if<Var>(&t)) v->not_equal.clear();
        for (const auto& [col, v] : sets) q.u2[col] = v;
    } else {
        c.fail_here("unsupported statement '" + kw + "'");
    }
    c.accept(";");
    if (!c.at_end()) c.fail("unexpected trailing input");
    return q;
}

}  // namespace

std::vector<Transaction> parse_sql_fragment(const std::string& text, const Catalog& catalog, const std::string& tx_id) {
    std::vector<Transaction> out;
    std::optional<Transaction> open;
    std::optional<Transaction> loose;
    auto lines = split_lines(text);
    for (std::size_t n = 0; n < lines.size(); ++n) {
        const auto& line = lines[n];
        if (blank_or_comment(line)) continue;
        reject_unsupported(line, n + 1);
        Cursor c(lex_line(line, n + 1, '\''), n + 1);
        std::string head = c.peek().kind == Tok::Ident ? upper(c.peek().text) : "";
        if (head == "BEGIN") {
            if (open) c.fail_here("BEGIN inside an open transaction");
            c.next();
            if (c.peek().kind != Tok::Ident) c.fail("expected a transaction annotation");
            open = Transaction{c.next().text, {}};
            c.accept(";");
        } else if (head == "COMMIT" || head == "END") {
            if (!open) c.fail_here(head + " without BEGIN");
            out.push_back(std::move(*open));
            open.reset();
        } else if (open) {
            open->queries.push_back(parse_sql_stmt(c, catalog, open->id));
        } else {
            if (!loose) loose = Transaction{tx_id, {}};
            loose->queries.push_back(parse_sql_stmt(c, catalog, tx_id));
        }
    }
    if (open) throw ParseError("missing COMMIT for transaction '" + open->id + "'", lines.size() + 1, 1);
    if (loose) out.insert(out.begin(), std::move(*loose));
    return out;
}

}  // namespace uprov
