#ifndef CSIBN_MODEL_HPP
#define CSIBN_MODEL_HPP

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

namespace csibn {

/// Raised for network documents or context strings that are not well formed.
/// `position()` is a byte offset into the offending text.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t position)
        : std::runtime_error(what), position_(position) {}
    std::size_t position() const { return position_; }

private:
    std::size_t position_;
};

/// Raised when a document parses but describes an invalid network
/// (unknown variable, duplicate name, cycle, malformed CPT).
class SemanticError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Variable {
    std::string name;
    std::vector<std::string> values;

    std::size_t cardinality() const { return values.size(); }
    std::optional<std::size_t> value_index(std::string_view value) const;

    friend bool operator==(const Variable&, const Variable&) = default;
};

/// Probability vector aligned with the owning variable's value order.
using Distribution = std::vector<double>;

inline constexpr double kNormalizationTolerance = 1e-9;

struct CptBranch;

/// Decision-tree CPT. Internal t-nodes test a parent variable and carry one
/// branch per value of that variable, in the variable's declared value order.
class CptTree {
public:
    CptTree() = default;

    static CptTree leaf(Distribution distribution);
    static CptTree node(std::string test, std::vector<CptBranch> branches);

    bool is_leaf() const { return test_.empty(); }
    const Distribution& distribution() const { return distribution_; }
    const std::string& test() const { return test_; }
    std::span<const CptBranch> branches() const { return branches_; }

    /// Subtree for the branch labelled `value`; throws std::out_of_range.
    const CptTree& branch(std::string_view value) const;

    friend bool operator==(const CptTree& a, const CptTree& b);

private:
    std::string test_;
    std::vector<CptBranch> branches_;
    Distribution distribution_;
};

struct CptBranch {
    std::string value;
    CptTree subtree;

    friend bool operator==(const CptBranch&, const CptBranch&) = default;
};

/// Tabular CPT: one row per full parent assignment, row-major in the declared
/// parent order (last parent varies fastest).
struct CptTable {
    std::vector<Distribution> rows;

    friend bool operator==(const CptTable&, const CptTable&) = default;
};

using Cpt = std::variant<CptTable, CptTree>;

struct Node {
    std::string var;
    std::vector<std::string> parents;
    bool deterministic = false;
    Cpt cpt;

    bool has_tree() const { return std::holds_alternative<CptTree>(cpt); }

    friend bool operator==(const Node&, const Node&) = default;
};

/// Partial assignment of values to variables, keyed by variable name.
class Context {
public:
    using Bindings = std::map<std::string, std::string, std::less<>>;

    Context() = default;
    Context(std::initializer_list<std::pair<const std::string, std::string>> bindings);

    /// Throws std::invalid_argument when `var` is already bound.
    void bind(std::string var, std::string value);

    bool binds(std::string_view var) const { return bindings_.find(var) != bindings_.end(); }
    std::optional<std::string_view> value_of(std::string_view var) const;
    bool empty() const { return bindings_.empty(); }
    std::size_t size() const { return bindings_.size(); }
    const Bindings& bindings() const { return bindings_; }
    std::vector<std::string> variables() const;

    Context restricted_to(std::span<const std::string> vars) const;
    bool consistent_with(const Context& other) const;
    /// Union of two contexts; throws std::invalid_argument on conflict.
    Context merged(const Context& other) const;

    /// Comma-separated `Var=value` pairs in variable-name order.
    std::string to_string() const;

    friend bool operator==(const Context&, const Context&) = default;

private:
    Bindings bindings_;
};

/// Bayesian network over discrete variables. Immutable once built; the
/// derived operations return fresh networks.
class Network {
public:
    Network() = default;
    Network(std::vector<Variable> variables, std::vector<Node> nodes);

    const std::vector<Variable>& variables() const { return variables_; }
    const std::vector<Node>& nodes() const { return nodes_; }
    std::size_t size() const { return variables_.size(); }

    std::optional<std::size_t> variable_index(std::string_view name) const;
    const Variable* find_variable(std::string_view name) const;
    const Node* find_node(std::string_view var) const;
    /// Throws std::out_of_range for unknown names.
    const Variable& variable(std::string_view name) const;
    const Node& node(std::string_view var) const;

    /// Children of `var`, in node declaration order.
    std::vector<std::string> children(std::string_view var) const;
    /// Kahn order over nodes; ties resolve to declaration order.
    /// Throws SemanticError when the parent relation has a cycle.
    std::vector<std::string> topological_order() const;

    friend bool operator==(const Network& a, const Network& b) {
        return a.variables_ == b.variables_ && a.nodes_ == b.nodes_;
    }

private:
    std::vector<Variable> variables_;
    std::vector<Node> nodes_;
    std::unordered_map<std::string, std::size_t> var_index_;
    std::unordered_map<std::string, std::size_t> node_index_;
};

struct Violation {
    std::string code;
    std::string message;
};

/// Every broken network or CPT invariant, in a stable order. Empty means valid.
std::vector<Violation> validate(const Network& net);

/// Number of entries of a CPT structure: leaves of a tree, rows of a table.
std::size_t tree_size(const CptTree& tree);
std::size_t cpt_size(const Cpt& cpt);

/// Full tree testing `parents` in order, with table rows at the leaves.
CptTree table_to_tree(const CptTable& table, std::span<const Variable> parents);

/// CPT of `node` as a tree; tables are expanded with table_to_tree.
CptTree cpt_as_tree(const Network& net, const Node& node);

/// Leaf distribution on the path selected by `assignment`.
/// Throws std::invalid_argument when a tested variable is unbound.
const Distribution& tree_lookup(const CptTree& tree, const Context& assignment);

/// Same lookup with value indices supplied by `value_of(test variable)`.
const Distribution& tree_lookup(const CptTree& tree,
                                const std::function<std::size_t(const std::string&)>& value_of);

/// Distinct variables tested anywhere in the tree.
std::vector<std::string> tested_variables(const CptTree& tree);

/// Product of the cardinalities of `node`'s parents.
std::size_t parent_configurations(const Network& net, const Node& node);

}  // namespace csibn

#endif  // CSIBN_MODEL_HPP
