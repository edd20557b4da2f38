#pragma once

// Multi-version provenance: every tuple carries the nested history of the
// operations that produced it, U/I/D/C version annotations over variables.

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "uprov/engine.hpp"
#include "uprov/qlang.hpp"

namespace uprov {

enum class MvOp { Var, U, I, D, C, Plus, Times };

struct MvNode;
using MvExpr = std::shared_ptr<const MvNode>;

struct MvNode {
    MvOp op;
    std::string name;      // Var
    std::uint64_t id = 0;  // version annotations
    std::string tx;
    std::uint64_t nu = 0;
    std::vector<MvExpr> kids;  // inner (0 or 1) for versions, operands for Plus/Times
    std::uint64_t size = 1;
};

MvExpr mv_var(const std::string& name);
// inner may be null (fresh insert)
MvExpr mv_version(MvOp op, std::uint64_t id, const std::string& tx, std::uint64_t nu, MvExpr inner);
MvExpr mv_plus(std::vector<MvExpr> kids);  // empty is the semiring 0
MvExpr mv_times(std::vector<MvExpr> kids);  // empty is 1

std::uint64_t mv_size(const MvExpr& e);
bool mv_equal(const MvExpr& a, const MvExpr& b);
// U^id_{T,v}(...) notation
std::string mv_render(const MvExpr& e);
// inverse of mv_render; throws std::invalid_argument
MvExpr mv_parse(const std::string& text);
// strips version annotations; D histories denote an absent tuple (0), an I without inner denotes 1.
// Operands of + and * come out flattened and sorted.
MvExpr unv(const MvExpr& e);
// number of U, I and D annotations
std::uint64_t mv_event_count(const MvExpr& e);
bool mv_contains(const MvExpr& haystack, const MvExpr& needle);

struct MvRow {
    MvExpr expr;
    std::uint64_t id = 0;
    bool live = true;
    bool touched = false;
};

struct MvRelation {
    std::vector<std::string> columns;
    std::map<Tuple, MvRow> rows;
};

struct MvDatabase {
    std::map<std::string, MvRelation> relations;
    std::uint64_t nu = 1;  // time of the last step
    std::uint64_t next_id = 1;

    const MvRow* find(const std::string& rel, const Tuple& t) const;
    std::uint64_t total_size() const;
    std::size_t live_count() const;
    std::size_t row_count() const;  // live rows plus tombstones
    SupportSet support() const;
};

struct MvOptions {
    std::uint64_t start_nu = 1;
    // replaces the initial Var of the named tuple annotation
    std::map<std::string, MvExpr> initial;
};

MvDatabase mv_init(const AnnotatedDatabase& db0, const MvOptions& opts = {});
void mv_apply(MvDatabase& db, const HyperplaneQuery& q, const std::string& tx);
void mv_commit(MvDatabase& db, const std::string& tx);
void mv_run_transaction(MvDatabase& db, const Transaction& tx);
MvDatabase mv_run(const AnnotatedDatabase& db0, const std::vector<Transaction>& txs, const MvOptions& opts = {});

}  // namespace uprov
