#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "uprov/algebra.hpp"
#include "uprov/normalform.hpp"
#include "uprov/qlang.hpp"

namespace uprov {

enum class Mode { Naive, NormalForm };

struct RowState {
    Expr expr;
    bool present = false;
    Expr tx_start;
};

struct Row {
    Tuple tuple;
    RowState state;
    bool touched = false;  // written during the open transaction
};

class AnnotatedRelation {
public:
    AnnotatedRelation() = default;
    AnnotatedRelation(std::string name, std::vector<std::string> columns);

    const std::string& name() const { return name_; }
    const std::vector<std::string>& columns() const { return columns_; }
    std::size_t arity() const { return columns_.size(); }

    const std::vector<Row>& rows() const { return rows_; }
    std::vector<Row>& rows() { return rows_; }

    Row* find(const Tuple& t);
    const Row* find(const Tuple& t) const;
    Row& get_or_create(const Tuple& t);  // absent tuples start as (0, not present)
    // removes rows whose expression is the constant 0
    void drop_zero_rows();
    // positions of rows that can match u, ascending; null when u has no constant
    const std::vector<std::size_t>* candidates(const Pattern& u);

private:
    std::string name_;
    std::vector<std::string> columns_;
    std::vector<Row> rows_;
    std::unordered_map<Tuple, std::size_t, TupleHash> index_;
    // per column, built on first use; cleared when rows are dropped
    std::vector<std::unordered_map<std::string, std::vector<std::size_t>>> by_col_;
    std::vector<bool> col_built_;
};

using SupportSet = std::set<std::pair<std::string, Tuple>>;

class EngineError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class AnnotatedDatabase {
public:
    std::map<std::string, AnnotatedRelation> relations;
    AnnotRegistry registry;

    Catalog catalog() const;
    AnnotatedRelation& relation(const std::string& name);
    const AnnotatedRelation& relation(const std::string& name) const;
    void add_relation(const std::string& name, std::vector<std::string> columns);
    // initial row; annotation name may be empty for an automatic x<i>
    void add_row(const std::string& rel, Tuple t, const std::string& annot = "");
    // row with an arbitrary expression over this registry
    void add_row_expr(const std::string& rel, Tuple t, Expr e, bool present);

    bool in_transaction() const { return open_.has_value(); }
    const Annot& open_annotation() const;
    Mode open_mode() const { return mode_; }
    // annotation of the most recent transaction committed in normal-form mode
    const std::optional<Annot>& last_normal_commit() const { return last_nf_; }

    std::uint64_t total_size() const;      // sum of expr_size over all rows
    std::uint64_t peak_row_size() const;
    std::size_t row_count() const;

    // trace of every rule application during normal-form normalization
    std::vector<RuleStep>* rule_trace = nullptr;

private:
    friend void begin_transaction(AnnotatedDatabase&, const std::string&, Mode);
    friend void commit_transaction(AnnotatedDatabase&, Mode);
    std::optional<Annot> open_, last_nf_;
    Mode mode_ = Mode::Naive;
};

// --- loading / export

AnnotatedDatabase load_database(const std::filesystem::path& dir);
// one relation in CSV form, appended to db
void load_relation_csv(AnnotatedDatabase& db, const std::string& text, const std::string& origin = "<input>");
std::string relation_to_csv(const AnnotatedRelation& rel);
// sidecar: one line per row, tuple, rendered expression, tags
std::string relation_provenance(const AnnotatedRelation& rel, const std::optional<Annot>& shape_annot,
                                RenderOptions opts = {});
// <rel>.csv, <rel>.prov and annotations.tsv (kind and name of every annotation).
// After a normal-form commit, rows touched by that transaction carry their shape tag in .prov.
void export_database(const AnnotatedDatabase& db, const std::filesystem::path& dir, RenderOptions opts = {});
std::string annotations_manifest(const AnnotRegistry& reg);
// reads what export_database wrote, deleted rows included
AnnotatedDatabase load_provenance(const std::filesystem::path& dir);

// --- execution

void begin_transaction(AnnotatedDatabase& db, const std::string& id, Mode mode);
void apply_query(AnnotatedDatabase& db, const HyperplaneQuery& q, Mode mode);
void commit_transaction(AnnotatedDatabase& db, Mode mode);
void run_transaction(AnnotatedDatabase& db, const Transaction& tx, Mode mode);
void run_transactions(AnnotatedDatabase& db, const std::vector<Transaction>& txs, Mode mode);

SupportSet support(const AnnotatedDatabase& db);

// Plain set semantics without annotations; the reference result for presence.
class VanillaDatabase {
public:
    VanillaDatabase(const SupportSet& initial, const Catalog& catalog);
    void apply(const HyperplaneQuery& q);
    SupportSet support() const;
    std::size_t size() const;

private:
    struct Rel {
        std::vector<std::optional<Tuple>> slots;  // emptied on removal, never reused
        std::unordered_map<Tuple, std::size_t, TupleHash> members;
        // column value to slots; may hold emptied slots until next visit
        std::vector<std::unordered_map<std::string, std::vector<std::size_t>>> by_col;
        std::vector<bool> col_built;

        void add(const Tuple& t);
        void remove(std::size_t slot);
        std::vector<std::size_t> matching(const Pattern& u);
    };
    std::map<std::string, Rel> rels_;
};

SupportSet run_vanilla(const SupportSet& initial, const Catalog& catalog, const std::vector<Transaction>& txs);
SupportSet run_vanilla(const AnnotatedDatabase& db0, const std::vector<Transaction>& txs);

// --- size checks for normal-form runs

struct SizeBoundReport {
    std::size_t rows_checked = 0;
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};
// Row expressions measured with atoms counted as one node must stay within
// 6 + (rows at transaction start + inserts in the transaction).
SizeBoundReport size_bound_check(const AnnotatedDatabase& db, const Transaction& tx, std::size_t rows_at_start);
std::uint64_t shape_size(const Expr& e);

}  // namespace uprov
