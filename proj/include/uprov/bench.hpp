#pragma once

// Workload generation, the brute-force set-equivalence oracle, equivalence
// pair generators, and the metric harness.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "uprov/engine.hpp"
#include "uprov/qlang.hpp"

namespace uprov {

enum class WorkloadKind { Synthetic, Adversarial, OrderStyle };

struct WorkloadConfig {
    std::size_t n_tuples = 1000;
    std::size_t domain_size = 100;  // values per non-selection column
    std::size_t n_columns = 3;
    std::size_t n_transactions = 10;
    std::size_t statements_per_tx = 5;
    // share of the initial tuples that deletes and modifies reach over the whole run;
    // with few of them and many statements, each one is updated many times
    double affected_fraction = 0.01;
    WorkloadKind kind = WorkloadKind::Synthetic;
    std::size_t iterations = 1;  // adversarial: number of U12/U21 pairs
    std::uint64_t seed = 0;

    void validate() const;  // throws std::invalid_argument
};

// JSON object with the field names above; "kind" is "synthetic", "adversarial" or "order".
WorkloadConfig config_from_json(const std::string& text);

struct Workload {
    AnnotatedDatabase db;
    std::vector<Transaction> txs;
    std::size_t statements() const;
};

Workload gen_synthetic(const WorkloadConfig& cfg);
Workload gen_adversarial(std::size_t iterations);
Workload gen_order_style(const WorkloadConfig& cfg);
Workload generate(const WorkloadConfig& cfg);
// db/<relation>.csv and tx.txt under dir
void write_workload(const Workload& w, const std::filesystem::path& dir);

// ---------------------------------------------------------------- oracle

struct EquivOptions {
    std::vector<Value> fillers;  // added to every column's domain
    std::size_t max_tuples = 3;
    bool add_fresh = true;  // one value per column that no statement mentions
    std::uint64_t budget = 5'000'000;
};

struct EquivResult {
    bool equivalent = true;
    std::uint64_t databases = 0;
    std::optional<SupportSet> witness;  // a database where the two runs differ
    SupportSet out_a, out_b;            // the runs on the witness
};

class BudgetExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Per relation and column: constants the statements compare against or write.
std::map<std::string, std::vector<std::set<Value>>> active_domain(const std::vector<Transaction>& a,
                                                                  const std::vector<Transaction>& b,
                                                                  const Catalog& catalog);

EquivResult equiv_oracle(const std::vector<Transaction>& a, const std::vector<Transaction>& b,
                         const Catalog& catalog, const EquivOptions& opts);

// ---------------------------------------------------------------- pair generators

// Random single-relation transactions over R(A,B) with values {0,1,2}.
struct PairGen {
    explicit PairGen(std::uint64_t seed);

    Catalog catalog() const;
    std::vector<Value> values() const;

    HyperplaneQuery random_statement();
    Transaction random_transaction(std::size_t n_statements);

    struct Pair {
        Transaction a, b;
        std::string rule;
    };
    // rewrites that preserve set semantics; each instance still goes through the oracle
    Pair equivalent_pair();
    // one statement of a random base changed
    Pair mutated_pair();

    static const std::vector<std::string>& rule_names();

private:
    std::mt19937_64 rng_;
    int var_counter_ = 0;
    Value val();
    Value other_val(const Value& v);
    std::string fresh_var();
    Pattern random_pattern();
    HyperplaneQuery make_modify(Pattern u1, const std::vector<std::optional<Value>>& writes);
    Pair wrap(std::vector<HyperplaneQuery> lhs, std::vector<HyperplaneQuery> rhs, const std::string& rule);
};

// Every tuple over the pair generator's domain, annotated x1..x9.
AnnotatedDatabase pairgen_full_database();

// Runs both transactions in normal-form mode from db0 and compares per-tuple
// expressions with struct_eq; empty when they all agree.
std::vector<std::string> normal_form_mismatches(const AnnotatedDatabase& db0, const Transaction& a,
                                                const Transaction& b);

// ---------------------------------------------------------------- metrics

enum class BenchMode { Naive, NormalForm, MV, NoProv };
std::string bench_mode_name(BenchMode m);
BenchMode parse_bench_mode(const std::string& s);

struct MetricsRow {
    BenchMode mode = BenchMode::Naive;
    std::uint64_t updates_done = 0;
    std::uint64_t db_tuples = 0;
    std::uint64_t total_prov_size = 0;
    std::uint64_t peak_prov_size = 0;
    double track_ms = 0;  // cumulative, median over repetitions
    double track_ms_mean = 0;
    std::optional<double> specialize_ms;  // final checkpoint only
    std::optional<std::uint64_t> mv_total_size, mv_tuples;
};

struct BenchOptions {
    std::set<BenchMode> modes{BenchMode::Naive, BenchMode::NormalForm, BenchMode::MV, BenchMode::NoProv};
    std::size_t checkpoint_every = 0;  // 0: max(1, statements/50)
    int repetitions = 5;
    std::size_t deleted_sample = 10;  // tuples removed for the specialization timing
    std::uint64_t seed = 0;
};

std::vector<MetricsRow> run_bench(const Workload& w, const BenchOptions& opts);
std::string metrics_csv(const std::vector<MetricsRow>& rows);

}  // namespace uprov
