#include "uprov/cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "uprov/bench.hpp"
#include "uprov/engine.hpp"
#include "uprov/mvbaseline.hpp"
#include "uprov/structures.hpp"

namespace uprov {

namespace {

using nlohmann::json;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json read_json(const std::string& path) {
    try {
        return json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

Value json_value(const json& j) {
    if (j.is_string()) return Value::str(j.get<std::string>());
    if (j.is_number_integer()) return Value::num(j.get<long long>());
    if (j.is_number()) return Value::num(j.dump());
    throw std::runtime_error("domain values must be strings or numbers, got " + j.dump());
}

std::vector<Transaction> load_transactions(const std::string& path, const Catalog& cat, bool sql) {
    std::string text = read_file(path);
    if (sql || (path.size() > 4 && path.compare(path.size() - 4, 4, ".sql") == 0))
        return parse_sql_fragment(text, cat);
    return parse_transactions(text, &cat);
}

std::string row_label(const std::string& rel, const Tuple& t) { return rel + render_tuple(t); }

// ---------------------------------------------------------------- structures

struct StructureSpec {
    std::string kind, arg;
};

StructureSpec parse_structure(const std::string& s) {
    auto colon = s.find(':');
    StructureSpec sel{s.substr(0, colon), colon == std::string::npos ? "" : s.substr(colon + 1)};
    if (sel.kind == "bool") {
        if (!sel.arg.empty()) throw UsageError("'bool' takes no argument");
    } else if (sel.kind == "set" || sel.kind == "trust" || sel.kind == "lifted") {
        if (sel.arg.empty()) throw UsageError("'" + sel.kind + "' needs an argument, e.g. " + sel.kind + ":<...>");
    } else {
        throw UsageError("unknown structure '" + s + "' (bool, set:<file>, trust:<L>, lifted:<file>)");
    }
    return sel;
}

Universe load_universe(const std::string& path) {
    Universe u;
    std::istringstream is(read_file(path));
    std::string line;
    while (std::getline(is, line)) {
        auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos || line[b] == '#') continue;
        auto e = line.find_last_not_of(" \t\r");
        u.names.push_back(line.substr(b, e - b + 1));
    }
    if (u.names.empty()) throw std::runtime_error(path + ": empty universe");
    return u;
}

double parse_level(const std::string& s) {
    try {
        std::size_t used = 0;
        double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::logic_error&) {
        throw UsageError("trust level must be a number, got '" + s + "'");
    }
}

// Finite semiring given by operation tables over named elements.
struct Table {
    std::vector<std::string> elements;
    std::size_t zero = 0, one = 0;
    std::vector<std::vector<std::size_t>> plus, times, minus;
    std::string name;

    std::size_t index(const json& j) const {
        if (!j.is_string()) throw std::runtime_error("lifted values are element names, got " + j.dump());
        auto s = j.get<std::string>();
        auto it = std::find(elements.begin(), elements.end(), s);
        if (it == elements.end()) throw std::runtime_error("'" + s + "' is not an element");
        return static_cast<std::size_t>(it - elements.begin());
    }
};

Table load_table(const std::string& path) {
    json j = read_json(path);
    Table t;
    try {
        t.name = j.value("name", std::string("lifted"));
        t.elements = j.at("elements").get<std::vector<std::string>>();
        if (t.elements.empty()) throw std::runtime_error("no elements");
        t.zero = t.index(j.at("zero"));
        t.one = t.index(j.at("one"));
        auto op = [&](const char* key) {
            std::vector<std::vector<std::size_t>> m;
            const auto& rows = j.at(key);
            if (!rows.is_array() || rows.size() != t.elements.size())
                throw std::runtime_error(std::string("table '") + key + "' must have one row per element");
            for (const auto& r : rows) {
                if (!r.is_array() || r.size() != t.elements.size())
                    throw std::runtime_error(std::string("table '") + key + "' must be square");
                std::vector<std::size_t> row;
                for (const auto& c : r) row.push_back(t.index(c));
                m.push_back(row);
            }
            return m;
        };
        t.plus = op("plus");
        t.times = op("times");
        t.minus = op("minus");
    } catch (const json::exception& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
    return t;
}

LiftResult<std::size_t> lift_table(const Table& t) {
    std::vector<std::size_t> all(t.elements.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    auto tab = [](const std::vector<std::vector<std::size_t>>& m) {
        return [m](const std::size_t& a, const std::size_t& b) { return m[a][b]; };
    };
    auto names = t.elements;
    return lift_semiring<std::size_t>(t.name, tab(t.plus), tab(t.times), t.zero, t.one, tab(t.minus), all,
                                      [names](const std::size_t& i) { return names[i]; });
}

// ---------------------------------------------------------------- subcommands

struct RunArgs {
    std::string db, tx, mode = "normal", out;
    bool sql = false, hide_frozen = false;
};

int cmd_run(const RunArgs& a, std::ostream& out) {
    Mode mode;
    if (a.mode == "naive")
        mode = Mode::Naive;
    else if (a.mode == "normal")
        mode = Mode::NormalForm;
    else
        throw UsageError("--mode must be naive or normal");
    AnnotatedDatabase db = load_database(a.db);
    auto txs = load_transactions(a.tx, db.catalog(), a.sql);
    run_transactions(db, txs, mode);
    export_database(db, a.out, RenderOptions{!a.hide_frozen});
    out << "support: " << support(db).size() << " rows\n";
    out << "total provenance size: " << db.total_size() << "\n";
    return 0;
}

struct SpecializeArgs {
    std::string prov, structure, assign, what = "support";
};

template <class V, class Conv>
Assignment<V> build_assignment(const json& j, const AnnotRegistry& reg, Conv conv) {
    if (!j.is_object()) throw std::runtime_error("assignment must be a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (it.key() != "tuples" && it.key() != "transactions" && it.key() != "defaults")
            throw std::runtime_error("assignment: unknown key '" + it.key() + "'");
    Assignment<V> a;
    auto take = [&](const char* key, AnnotKind kind) {
        if (!j.contains(key)) return;
        for (auto it = j.at(key).begin(); it != j.at(key).end(); ++it) {
            Annot an = reg.find(it.key());
            std::string what = kind == AnnotKind::Tuple ? "tuple" : "transaction";
            if (!an || an->kind != kind) throw EvalError("unknown " + what + " annotation '" + it.key() + "'");
            a.values[it.key()] = conv(it.value());
        }
    };
    take("tuples", AnnotKind::Tuple);
    take("transactions", AnnotKind::Transaction);
    if (j.contains("defaults")) {
        const auto& d = j.at("defaults");
        if (d.contains("tuple")) a.default_tuple = conv(d.at("tuple"));
        if (d.contains("transaction")) a.default_tx = conv(d.at("transaction"));
    }
    return a;
}

template <class V>
int specialize_with(const AnnotatedDatabase& db, const UpdateStructure<V>& s, const Assignment<V>& a,
                    const std::string& what, std::ostream& out) {
    for (const auto& [n, rel] : db.relations)
        for (const auto& row : rel.rows()) {
            V v = evaluate(row.state.expr, s, a);
            if (what == "values")
                out << row_label(n, row.tuple) << "\t" << s.show(v) << "\n";
            else if (!s.equal(v, s.zero))
                out << row_label(n, row.tuple) << "\n";
        }
    return 0;
}

int cmd_specialize(const SpecializeArgs& a, std::ostream& out) {
    if (a.what != "support" && a.what != "values") throw UsageError("--what must be support or values");
    StructureSpec sel = parse_structure(a.structure);
    AnnotatedDatabase db = load_provenance(a.prov);
    json j = read_json(a.assign);

    if (sel.kind == "bool") {
        auto conv = [](const json& v) {
            if (v.is_boolean()) return v.get<bool>();
            throw std::runtime_error("bool values are true or false, got " + v.dump());
        };
        return specialize_with(db, boolean_structure(), build_assignment<bool>(j, db.registry, conv), a.what, out);
    }
    if (sel.kind == "set") {
        Universe u = load_universe(sel.arg);
        auto conv = [&u](const json& v) {
            if (v == "full") return u.full();
            if (!v.is_array()) throw std::runtime_error("set values are arrays of elements or \"full\", got " + v.dump());
            return u.encode(v.get<std::vector<std::string>>());
        };
        return specialize_with(db, set_structure(u), build_assignment<SetValue>(j, db.registry, conv), a.what, out);
    }
    if (sel.kind == "trust") {
        double level = parse_level(sel.arg);
        auto conv = [](const json& v) {
            TrustValue t;
            std::string r;
            if (v.is_array() && v.size() == 2) {
                t.v = v[0].get<double>();
                r = v[1].get<std::string>();
            } else if (v.is_object()) {
                t.v = v.at("v").get<double>();
                r = v.at("r").get<std::string>();
            } else {
                throw std::runtime_error("trust values are [v, \"T\"|\"F\"|\"U\"], got " + v.dump());
            }
            if (r.size() != 1 || std::string("TFU").find(r[0]) == std::string::npos)
                throw std::runtime_error("trust tag must be T, F or U");
            t.r = r[0];
            return t;
        };
        return specialize_with(db, trust_structure(level), build_assignment<TrustValue>(j, db.registry, conv), a.what,
                               out);
    }
    Table t = load_table(sel.arg);
    auto lifted = lift_table(t);
    if (!lifted.ok()) {
        std::string why;
        for (const auto& v : lifted.violations) why += " " + v.law + " (" + v.witness + ")";
        throw EvalError(t.name + " does not lift:" + why);
    }
    auto conv = [&t](const json& v) { return t.index(v); };
    return specialize_with(db, lifted.structure, build_assignment<std::size_t>(j, db.registry, conv), a.what, out);
}

struct AuditArgs {
    std::string structure;
    std::uint64_t samples = 10000;
    std::optional<std::uint64_t> seed;
};

void print_report(const AxiomReport& rep, std::ostream& out) {
    out << rep.summary() << "\n";
    for (const auto& r : rep.results)
        if (r.failed) out << "  " << axiom_name(r.id) << " fails: " << r.witness << "\n";
}

int cmd_audit(const AuditArgs& a, std::ostream& out) {
    StructureSpec sel = parse_structure(a.structure);
    auto need_seed = [&] {
        if (!a.seed) throw UsageError("sampled audits need --seed");
        return *a.seed;
    };
    AxiomReport rep;
    if (sel.kind == "bool") {
        rep = check_axioms_exhaustive(boolean_structure(), {false, true});
    } else if (sel.kind == "set") {
        Universe u = load_universe(sel.arg);
        auto s = set_structure(u);
        if (u.names.size() <= 3) {
            std::vector<SetValue> all;
            for (SetValue v = 0; v <= u.full(); ++v) all.push_back(v);
            rep = check_axioms_exhaustive(s, all);
        } else {
            SetValue full = u.full();
            std::function<SetValue(std::mt19937_64&)> sampler = [full](std::mt19937_64& g) { return g() & full; };
            rep = check_axioms_random(s, sampler, a.samples, need_seed());
        }
    } else if (sel.kind == "trust") {
        double level = parse_level(sel.arg);
        if (!(level >= 0 && level <= 1)) throw UsageError("trust level must lie in [0,1]");
        std::function<TrustValue(std::mt19937_64&)> sampler = [level](std::mt19937_64& g) {
            static const char tags[] = {'T', 'F', 'U'};
            TrustValue t;
            t.r = tags[g() % 3];
            // the threshold itself is drawn often, strictness matters there
            t.v = g() % 4 == 0 ? level : std::uniform_real_distribution<double>(0, 1)(g);
            return t;
        };
        rep = check_axioms_random(trust_structure(level), sampler, a.samples, need_seed());
    } else {
        Table t = load_table(sel.arg);
        auto lifted = lift_table(t);
        for (const auto& v : lifted.violations) out << "lift precondition " << v.law << " fails: " << v.witness << "\n";
        std::vector<std::size_t> all(t.elements.size());
        for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
        rep = check_axioms_exhaustive(lifted.structure, all);
        print_report(rep, out);
        return lifted.ok() && rep.ok() ? 0 : 1;
    }
    print_report(rep, out);
    return rep.ok() ? 0 : 1;
}

struct EquivArgs {
    std::string tx1, tx2, domain;
};

int cmd_equiv(const EquivArgs& a, std::ostream& out) {
    json d = read_json(a.domain);
    Catalog cat;
    EquivOptions opts;
    try {
        for (auto it = d.at("relations").begin(); it != d.at("relations").end(); ++it)
            cat[it.key()] = it.value().get<std::vector<std::string>>();
        if (d.contains("fillers"))
            for (const auto& v : d.at("fillers")) opts.fillers.push_back(json_value(v));
        opts.max_tuples = d.value("max_tuples", opts.max_tuples);
        opts.add_fresh = d.value("fresh", opts.add_fresh);
        opts.budget = d.value("budget", opts.budget);
    } catch (const json::exception& e) {
        throw std::runtime_error(a.domain + ": " + e.what());
    }
    auto t1 = load_transactions(a.tx1, cat, false);
    auto t2 = load_transactions(a.tx2, cat, false);
    EquivResult r = equiv_oracle(t1, t2, cat, opts);
    if (r.equivalent) {
        out << "SET-EQUIVALENT\n";
        out << "checked " << r.databases << " databases\n";
        return 0;
    }
    auto dump = [&out](const char* title, const SupportSet& s) {
        out << title << "\n";
        for (const auto& [rel, t] : s) out << "  " << row_label(rel, t) << "\n";
    };
    out << "NOT SET-EQUIVALENT\n";
    dump("witness database:", *r.witness);
    dump("after tx1:", r.out_a);
    dump("after tx2:", r.out_b);
    return 0;
}

struct BenchArgs {
    std::string config, modes = "naive,normal,mv,noprov", out, workload_out;
    std::optional<std::uint64_t> seed;
    int reps = 5;
    std::size_t every = 0;
};

int cmd_bench(const BenchArgs& a, std::ostream& out) {
    if (!a.seed) throw UsageError("bench needs --seed");
    WorkloadConfig cfg;
    try {
        cfg = config_from_json(read_file(a.config));
    } catch (const std::invalid_argument& e) {
        throw std::runtime_error(e.what());
    }
    cfg.seed = *a.seed;
    BenchOptions opts;
    opts.modes.clear();
    std::stringstream ms(a.modes);
    std::string m;
    while (std::getline(ms, m, ',')) {
        try {
            opts.modes.insert(parse_bench_mode(m));
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
    }
    if (opts.modes.empty()) throw UsageError("--modes is empty");
    opts.repetitions = a.reps;
    opts.checkpoint_every = a.every;
    opts.seed = *a.seed;
    Workload w = generate(cfg);
    if (!a.workload_out.empty()) write_workload(w, a.workload_out);
    std::string csv = metrics_csv(run_bench(w, opts));
    if (a.out.empty()) {
        out << csv;
    } else {
        std::ofstream f(a.out, std::ios::binary);
        f << csv;
        if (!f) throw std::runtime_error("cannot write " + a.out);
    }
    return 0;
}

struct MvArgs {
    std::string db, tx;
    std::uint64_t start_nu = 1;
    std::vector<std::string> initial;
    bool unv = false, sql = false;
};

int cmd_mvrun(const MvArgs& a, std::ostream& out) {
    AnnotatedDatabase db = load_database(a.db);
    auto txs = load_transactions(a.tx, db.catalog(), a.sql);
    MvOptions opts;
    opts.start_nu = a.start_nu;
    for (const auto& s : a.initial) {
        auto eq = s.find('=');
        if (eq == std::string::npos || eq == 0) throw UsageError("--initial expects NAME=EXPR, got '" + s + "'");
        opts.initial[s.substr(0, eq)] = mv_parse(s.substr(eq + 1));
    }
    MvDatabase mv = mv_run(db, txs, opts);
    for (const auto& [n, rel] : mv.relations)
        for (const auto& [t, row] : rel.rows) {
            out << row_label(n, t) << "\t" << mv_render(a.unv ? unv(row.expr) : row.expr);
            if (!row.live) out << "\t#deleted";
            out << "\n";
        }
    out << "total MV size: " << mv.total_size() << "\n";
    return 0;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Update provenance: track, normalize and specialize provenance of update transactions", "uprov"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Help for every subcommand");

    RunArgs ra;
    auto* run = app.add_subcommand("run", "Run transactions over a database and export annotated relations");
    run->add_option("--db", ra.db, "Directory with one CSV file per relation")->required()->check(CLI::ExistingDirectory);
    run->add_option("--tx", ra.tx, "Transaction file (datalog form, or SQL with --sql or a .sql suffix)")
        ->required()
        ->check(CLI::ExistingFile);
    run->add_option("--mode", ra.mode, "naive or normal")->check(CLI::IsMember({"naive", "normal"}));
    run->add_option("--out", ra.out, "Output directory for <rel>.csv, <rel>.prov and annotations.tsv")->required();
    run->add_flag("--sql", ra.sql, "Read --tx as SQL statements");
    run->add_flag("--hide-frozen", ra.hide_frozen, "Render frozen{...} markers as their content");

    SpecializeArgs sa;
    auto* spec_cmd = app.add_subcommand("specialize", "Evaluate exported provenance in a concrete structure");
    spec_cmd->add_option("--prov", sa.prov, "Directory written by 'run'")->required()->check(CLI::ExistingDirectory);
    spec_cmd->add_option("--structure", sa.structure, "bool, set:<universe file>, trust:<level> or lifted:<table.json>")
        ->required();
    spec_cmd->add_option("--assign", sa.assign, "JSON with tuples, transactions and defaults")
        ->required()
        ->check(CLI::ExistingFile);
    spec_cmd->add_option("--what", sa.what, "support (rows with a non-zero value) or values")
        ->check(CLI::IsMember({"support", "values"}));

    AuditArgs aa;
    std::uint64_t audit_seed = 0;
    auto* audit = app.add_subcommand("audit", "Check the equivalence axioms and zero rules on a structure");
    audit->add_option("--structure", aa.structure, "bool, set:<universe file>, trust:<level> or lifted:<table.json>")
        ->required();
    audit->add_option("--samples", aa.samples, "Random instances per axiom for sampled audits");
    auto* audit_seed_opt = audit->add_option("--seed", audit_seed, "Seed for sampled audits");

    EquivArgs ea;
    auto* equiv = app.add_subcommand("equiv", "Decide set-equivalence of two transaction files by enumeration");
    equiv->add_option("--tx1", ea.tx1, "First transaction file")->required()->check(CLI::ExistingFile);
    equiv->add_option("--tx2", ea.tx2, "Second transaction file")->required()->check(CLI::ExistingFile);
    equiv->add_option("--domain", ea.domain, "JSON with relations, fillers, max_tuples, fresh")
        ->required()
        ->check(CLI::ExistingFile);

    BenchArgs ba;
    std::uint64_t bench_seed = 0;
    auto* bench = app.add_subcommand("bench", "Generate a workload and emit per-checkpoint metrics as CSV");
    bench->add_option("--config", ba.config, "Workload JSON")->required()->check(CLI::ExistingFile);
    auto* bench_seed_opt = bench->add_option("--seed", bench_seed, "Seed for workload and sampling");
    bench->add_option("--modes", ba.modes, "Comma-separated subset of naive,normal,mv,noprov");
    bench->add_option("--reps", ba.reps, "Repetitions per mode; times are medians")->check(CLI::PositiveNumber);
    bench->add_option("--every", ba.every, "Checkpoint every N statements (default: max(1, n/50))");
    bench->add_option("--out", ba.out, "Write the CSV here instead of stdout");
    bench->add_option("--workload-out", ba.workload_out, "Also write the generated db/ and tx.txt here");

    MvArgs ma;
    auto* mvrun = app.add_subcommand("mvrun", "Run transactions under multi-version provenance");
    mvrun->add_option("--db", ma.db, "Directory with one CSV file per relation")
        ->required()
        ->check(CLI::ExistingDirectory);
    mvrun->add_option("--tx", ma.tx, "Transaction file")->required()->check(CLI::ExistingFile);
    mvrun->add_option("--start-nu", ma.start_nu, "Version time before the first statement");
    mvrun->add_option("--initial", ma.initial, "NAME=EXPR replacing a tuple annotation, e.g. p3=I^1_{T,2}(x1)");
    mvrun->add_flag("--unv", ma.unv, "Print expressions with version annotations stripped");
    mvrun->add_flag("--sql", ma.sql, "Read --tx as SQL statements");

    std::vector<std::string> rev(args.rbegin(), args.rend());
    if (!rev.empty()) rev.pop_back();  // program name
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*run) return cmd_run(ra, out);
        if (*spec_cmd) return cmd_specialize(sa, out);
        if (*audit) {
            if (*audit_seed_opt) aa.seed = audit_seed;
            return cmd_audit(aa, out);
        }
        if (*equiv) return cmd_equiv(ea, out);
        if (*bench) {
            if (*bench_seed_opt) ba.seed = bench_seed;
            return cmd_bench(ba, out);
        }
        if (*mvrun) return cmd_mvrun(ma, out);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

}  // namespace uprov
