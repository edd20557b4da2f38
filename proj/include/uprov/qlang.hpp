#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace uprov {

// A constant: either a string or a decimal number kept in canonical text form.
struct Value {
    bool numeric = false;
    std::string text;

    static Value str(std::string s) { return Value{false, std::move(s)}; }
    static Value num(const std::string& digits);  // canonicalizes, throws on bad input
    static Value num(long long v) { return num(std::to_string(v)); }

    std::string quoted() const;  // "..." for strings, bare for numbers

    friend bool operator==(const Value& a, const Value& b) = default;
    friend auto operator<=>(const Value& a, const Value& b) = default;
};

using Tuple = std::vector<Value>;

struct TupleHash {
    std::size_t operator()(const Tuple& t) const noexcept;
};

std::string render_tuple(const Tuple& t);

struct Var {
    std::string name;
    std::set<Value> not_equal;
    friend bool operator==(const Var&, const Var&) = default;
};
using Term = std::variant<Value, Var>;
using Pattern = std::vector<Term>;

enum class QueryKind { Insert, Delete, Modify };

struct HyperplaneQuery {
    std::string relation;
    QueryKind kind = QueryKind::Insert;
    Tuple tuple;    // Insert
    Pattern u1;     // Delete pattern, or Modify source
    Pattern u2;     // Modify replacement
    std::string annot;

    friend bool operator==(const HyperplaneQuery&, const HyperplaneQuery&) = default;
};

struct Transaction {
    std::string id;
    std::vector<HyperplaneQuery> queries;

    friend bool operator==(const Transaction&, const Transaction&) = default;
};

// relation name -> column names
using Catalog = std::map<std::string, std::vector<std::string>>;

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, std::size_t line, std::size_t col);
    std::size_t line, col;
};

class QueryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Throws ParseError. When a catalog is given, relation names and arities are checked against it.
std::vector<Transaction> parse_transactions(const std::string& text, const Catalog* catalog = nullptr);
std::string print_transactions(const std::vector<Transaction>& txs);

// One statement per line; all statements of the input form a single transaction named `tx_id`.
// The catalog supplies the attribute names used in WHERE/SET.
std::vector<Transaction> parse_sql_fragment(const std::string& text, const Catalog& catalog,
                                            const std::string& tx_id = "q");

bool matches(const Tuple& t, const Pattern& u);
Tuple modify_target(const Tuple& t, const Pattern& u1, const Pattern& u2);

// Throws QueryError when u2 renames a variable or uses a variable at a new position.
void check_modify_shape(const Pattern& u1, const Pattern& u2);

std::string render_pattern(const Pattern& u);
std::string render_query(const HyperplaneQuery& q);

}  // namespace uprov
