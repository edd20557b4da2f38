#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace uprov {

enum class AnnotKind { Tuple, Transaction };

struct AnnotInfo {
    std::string name;
    AnnotKind kind;
    std::uint64_t order;  // creation index, drives canonical Sum order
};
using Annot = std::shared_ptr<const AnnotInfo>;

// Issues annotations; a name maps to exactly one kind for the lifetime of the registry.
class AnnotRegistry {
public:
    Annot intern(const std::string& name, AnnotKind kind);
    Annot find(const std::string& name) const;
    bool contains(const std::string& name) const { return by_name_.count(name) != 0; }
    // next unused name of the form <prefix><i>
    std::string fresh_name(const std::string& prefix);
    std::size_t size() const { return by_name_.size(); }
    // every annotation in creation order
    std::vector<Annot> all() const;

private:
    std::map<std::string, Annot> by_name_;
    std::uint64_t next_order_ = 0;
    std::uint64_t fresh_counter_ = 0;
};

enum class Op { Zero, Leaf, Frozen, Ins, Del, ModAdd, ModMul, Sum };

struct Node;
using Expr = std::shared_ptr<const Node>;

struct Node {
    Op op;
    Annot annot;              // Leaf name, or p of Ins/Del/ModMul
    std::vector<Expr> kids;   // left (and right) operand, or Sum children
    std::uint64_t size;       // cached node count
    std::uint64_t min_order;  // earliest leaf creation index; UINT64_MAX when leaf-free
    std::size_t depth;
};

class MalformedShape : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

Expr zero();
Expr leaf(const Annot& a);
Expr frozen(const Expr& e);
Expr ins(const Expr& e, const Annot& p);
Expr del(const Expr& e, const Annot& p);
Expr modadd(const Expr& l, const Expr& r);
Expr modmul(const Expr& e, const Annot& p);
// children are sorted into canonical order; at least one child required
Expr sum(std::vector<Expr> children);

bool is_atom(const Expr& e);  // Zero, Leaf or Frozen
bool is_zero(const Expr& e);

// Sum children of a ModMul operand; a non-Sum operand is its own single child
std::vector<Expr> sum_children(const Expr& e);

std::uint64_t expr_size(const Expr& e);

// total order used for canonical Sum ordering; 0 means structurally equal
int struct_compare(const Expr& a, const Expr& b);
bool struct_eq(const Expr& a, const Expr& b);

Expr zero_simplify(const Expr& e);

class ExprParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
// Inverse of render. Unknown names are interned: a leaf as a tuple
// annotation, the right operand of +I, - and .M as a transaction.
Expr parse_expr(const std::string& text, AnnotRegistry& reg);
Expr start_leaf(const Expr& e);

struct RenderOptions {
    bool show_frozen = true;
};
std::string render(const Expr& e, RenderOptions opts = {});

}  // namespace uprov
