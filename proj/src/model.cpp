#include "csibn/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace csibn {

std::optional<std::size_t> Variable::value_index(std::string_view value) const {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] == value) return i;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// CptTree

CptTree CptTree::leaf(Distribution distribution) {
    CptTree t;
    t.distribution_ = std::move(distribution);
    return t;
}

CptTree CptTree::node(std::string test, std::vector<CptBranch> branches) {
    if (test.empty()) throw std::invalid_argument("CptTree::node: empty test variable");
    CptTree t;
    t.test_ = std::move(test);
    t.branches_ = std::move(branches);
    return t;
}

const CptTree& CptTree::branch(std::string_view value) const {
    for (const auto& b : branches_) {
        if (b.value == value) return b.subtree;
    }
    throw std::out_of_range("no branch '" + std::string(value) + "' under test " + test_);
}

bool operator==(const CptTree& a, const CptTree& b) {
    return a.test_ == b.test_ && a.distribution_ == b.distribution_ && a.branches_ == b.branches_;
}

// ---------------------------------------------------------------------------
// Context

Context::Context(std::initializer_list<std::pair<const std::string, std::string>> bindings) {
    for (const auto& [var, value] : bindings) bind(var, value);
}

void Context::bind(std::string var, std::string value) {
    if (binds(var)) throw std::invalid_argument("variable bound twice in context: " + var);
    bindings_.emplace(std::move(var), std::move(value));
}

std::optional<std::string_view> Context::value_of(std::string_view var) const {
    auto it = bindings_.find(var);
    if (it == bindings_.end()) return std::nullopt;
    return std::string_view(it->second);
}

std::vector<std::string> Context::variables() const {
    std::vector<std::string> out;
    out.reserve(bindings_.size());
    for (const auto& [var, _] : bindings_) out.push_back(var);
    return out;
}

Context Context::restricted_to(std::span<const std::string> vars) const {
    Context out;
    for (const auto& v : vars) {
        auto it = bindings_.find(v);
        if (it != bindings_.end() && !out.binds(v)) out.bindings_.emplace(it->first, it->second);
    }
    return out;
}

bool Context::consistent_with(const Context& other) const {
    for (const auto& [var, value] : other.bindings_) {
        auto it = bindings_.find(var);
        if (it != bindings_.end() && it->second != value) return false;
    }
    return true;
}

Context Context::merged(const Context& other) const {
    if (!consistent_with(other)) throw std::invalid_argument("conflicting contexts");
    Context out = *this;
    for (const auto& [var, value] : other.bindings_) out.bindings_.emplace(var, value);
    return out;
}

std::string Context::to_string() const {
    std::string out;
    for (const auto& [var, value] : bindings_) {
        if (!out.empty()) out += ',';
        out += var;
        out += '=';
        out += value;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Network

Network::Network(std::vector<Variable> variables, std::vector<Node> nodes)
    : variables_(std::move(variables)), nodes_(std::move(nodes)) {
    // First occurrence wins; duplicates are reported by validate().
    for (std::size_t i = 0; i < variables_.size(); ++i) var_index_.try_emplace(variables_[i].name, i);
    for (std::size_t i = 0; i < nodes_.size(); ++i) node_index_.try_emplace(nodes_[i].var, i);
}

std::optional<std::size_t> Network::variable_index(std::string_view name) const {
    auto it = var_index_.find(std::string(name));
    if (it == var_index_.end()) return std::nullopt;
    return it->second;
}

const Variable* Network::find_variable(std::string_view name) const {
    auto idx = variable_index(name);
    return idx ? &variables_[*idx] : nullptr;
}

const Node* Network::find_node(std::string_view var) const {
    auto it = node_index_.find(std::string(var));
    return it == node_index_.end() ? nullptr : &nodes_[it->second];
}

const Variable& Network::variable(std::string_view name) const {
    if (const auto* v = find_variable(name)) return *v;
    throw std::out_of_range("unknown variable: " + std::string(name));
}

const Node& Network::node(std::string_view var) const {
    if (const auto* n = find_node(var)) return *n;
    throw std::out_of_range("unknown node: " + std::string(var));
}

std::vector<std::string> Network::children(std::string_view var) const {
    std::vector<std::string> out;
    for (const auto& n : nodes_) {
        if (std::find(n.parents.begin(), n.parents.end(), var) != n.parents.end()) out.push_back(n.var);
    }
    return out;
}

std::vector<std::string> Network::topological_order() const {
    std::vector<std::size_t> pending(nodes_.size(), 0);
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        for (const auto& p : nodes_[i].parents) {
            if (node_index_.count(p)) ++pending[i];
        }
    }
    std::vector<std::string> order;
    std::vector<bool> done(nodes_.size(), false);
    while (order.size() < nodes_.size()) {
        bool progressed = false;
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            if (done[i] || pending[i] != 0) continue;
            done[i] = true;
            progressed = true;
            order.push_back(nodes_[i].var);
            for (std::size_t j = 0; j < nodes_.size(); ++j) {
                const auto& ps = nodes_[j].parents;
                pending[j] -= static_cast<std::size_t>(std::count(ps.begin(), ps.end(), nodes_[i].var));
            }
            break;
        }
        if (!progressed) {
            std::string members;
            for (std::size_t i = 0; i < nodes_.size(); ++i) {
                if (!done[i]) members += (members.empty() ? "" : ",") + nodes_[i].var;
            }
            throw SemanticError("cycle among nodes " + members);
        }
    }
    return order;
}

// ---------------------------------------------------------------------------
// Validation

namespace {

class Validator {
public:
    explicit Validator(const Network& net) : net_(net) {}

    std::vector<Violation> run() {
        check_variables();
        check_nodes();
        check_acyclic();
        return std::move(out_);
    }

private:
    void add(std::string code, std::string message) { out_.push_back({std::move(code), std::move(message)}); }

    void check_variables() {
        std::set<std::string> names;
        for (const auto& v : net_.variables()) {
            if (!names.insert(v.name).second) add("duplicate-variable", "duplicate variable name " + v.name);
            if (v.values.size() < 2) add("degenerate-variable", "variable " + v.name + " has fewer than 2 values");
            std::set<std::string> seen;
            for (const auto& value : v.values) {
                if (!seen.insert(value).second) add("duplicate-value", "variable " + v.name + " repeats value " + value);
            }
        }
    }

    void check_nodes() {
        std::set<std::string> seen;
        for (const auto& n : net_.nodes()) {
            if (!seen.insert(n.var).second) add("duplicate-node", "duplicate node for variable " + n.var);
            const Variable* owner = net_.find_variable(n.var);
            if (!owner) {
                add("unknown-variable", "node for undeclared variable " + n.var);
                continue;
            }
            bool parents_ok = true;
            std::set<std::string> ps;
            for (const auto& p : n.parents) {
                if (!ps.insert(p).second) {
                    add("duplicate-parent", "node " + n.var + " lists parent " + p + " twice");
                    parents_ok = false;
                }
                if (!net_.find_variable(p)) {
                    add("unknown-variable", "node " + n.var + " has undeclared parent " + p);
                    parents_ok = false;
                }
            }
            if (!parents_ok) continue;
            if (const auto* table = std::get_if<CptTable>(&n.cpt)) {
                check_table(n, *owner, *table);
            } else {
                std::vector<std::string> path;
                check_tree(n, *owner, std::get<CptTree>(n.cpt), path);
            }
        }
        for (const auto& v : net_.variables()) {
            if (!net_.find_node(v.name)) add("missing-node", "variable " + v.name + " has no node");
        }
    }

    void check_distribution(const std::string& where, const std::string& kind, const Variable& owner,
                            const Distribution& d) {
        if (d.size() != owner.cardinality()) {
            add("distribution-length", kind + " at " + where + " has " + std::to_string(d.size()) +
                                           " entries, expected " + std::to_string(owner.cardinality()));
            return;
        }
        double sum = 0.0;
        for (double p : d) {
            if (!(p >= 0.0) || !std::isfinite(p)) {
                add("negative-probability", kind + " at " + where + " has an invalid probability");
                return;
            }
            sum += p;
        }
        if (std::abs(sum - 1.0) > kNormalizationTolerance) {
            std::ostringstream msg;
            msg << "unnormalized " << kind << " at " << where << ": sums to " << sum;
            add("unnormalized-" + kind, msg.str());
        }
    }

    void check_table(const Node& n, const Variable& owner, const CptTable& table) {
        std::size_t expected = parent_configurations(net_, n);
        if (table.rows.size() != expected) {
            add("table-rows", "table for " + n.var + " has " + std::to_string(table.rows.size()) +
                                  " rows, expected " + std::to_string(expected));
        }
        for (std::size_t r = 0; r < table.rows.size(); ++r) {
            check_distribution(n.var + " row " + std::to_string(r), "row", owner, table.rows[r]);
        }
    }

    void check_tree(const Node& n, const Variable& owner, const CptTree& t, std::vector<std::string>& path) {
        auto where = [&] {
            std::string s = n.var;
            if (!path.empty()) {
                s += " path ";
                for (std::size_t i = 0; i < path.size(); ++i) s += (i ? "," : "") + path[i];
            }
            return s;
        };
        if (t.is_leaf()) {
            check_distribution(where(), "leaf", owner, t.distribution());
            return;
        }
        const std::string& test = t.test();
        if (std::find(n.parents.begin(), n.parents.end(), test) == n.parents.end()) {
            add("test-not-parent", "tree for " + n.var + " tests " + test + ", which is not a parent");
        }
        for (const auto& step : path) {
            if (step.substr(0, step.find('=')) == test) {
                add("repeated-test", "tree for " + n.var + " tests " + test + " twice on path at " + where());
                return;
            }
        }
        const Variable* tv = net_.find_variable(test);
        if (!tv) {
            add("unknown-variable", "tree for " + n.var + " tests undeclared variable " + test);
            return;
        }
        bool shape_ok = t.branches().size() == tv->cardinality();
        for (std::size_t i = 0; shape_ok && i < t.branches().size(); ++i) {
            shape_ok = t.branches()[i].value == tv->values[i];
        }
        if (!shape_ok) {
            add("branch-mismatch", "tree for " + n.var + " at test " + test +
                                       " must have exactly one branch per value, in declared order");
        }
        for (const auto& b : t.branches()) {
            path.push_back(test + "=" + b.value);
            check_tree(n, owner, b.subtree, path);
            path.pop_back();
        }
    }

    void check_acyclic() {
        try {
            (void)net_.topological_order();
        } catch (const SemanticError& e) {
            add("cycle", e.what());
        }
    }

    const Network& net_;
    std::vector<Violation> out_;
};

}  // namespace

std::vector<Violation> validate(const Network& net) { return Validator(net).run(); }

// ---------------------------------------------------------------------------
// CPT helpers

std::size_t tree_size(const CptTree& tree) {
    if (tree.is_leaf()) return 1;
    std::size_t n = 0;
    for (const auto& b : tree.branches()) n += tree_size(b.subtree);
    return n;
}

std::size_t cpt_size(const Cpt& cpt) {
    if (const auto* table = std::get_if<CptTable>(&cpt)) return table->rows.size();
    return tree_size(std::get<CptTree>(cpt));
}

namespace {

CptTree expand_table(const CptTable& table, std::span<const Variable> parents, std::size_t depth,
                     std::size_t row_offset, std::size_t stride) {
    if (depth == parents.size()) return CptTree::leaf(table.rows.at(row_offset));
    const Variable& p = parents[depth];
    std::size_t child_stride = stride / p.cardinality();
    std::vector<CptBranch> branches;
    branches.reserve(p.cardinality());
    for (std::size_t i = 0; i < p.cardinality(); ++i) {
        branches.push_back(
            {p.values[i], expand_table(table, parents, depth + 1, row_offset + i * child_stride, child_stride)});
    }
    return CptTree::node(p.name, std::move(branches));
}

}  // namespace

CptTree table_to_tree(const CptTable& table, std::span<const Variable> parents) {
    std::size_t rows = 1;
    for (const auto& p : parents) rows *= p.cardinality();
    if (table.rows.size() != rows) {
        throw std::invalid_argument("table_to_tree: table has " + std::to_string(table.rows.size()) +
                                    " rows, expected " + std::to_string(rows));
    }
    return expand_table(table, parents, 0, 0, rows);
}

CptTree cpt_as_tree(const Network& net, const Node& node) {
    if (const auto* tree = std::get_if<CptTree>(&node.cpt)) return *tree;
    std::vector<Variable> parents;
    parents.reserve(node.parents.size());
    for (const auto& p : node.parents) parents.push_back(net.variable(p));
    return table_to_tree(std::get<CptTable>(node.cpt), parents);
}

const Distribution& tree_lookup(const CptTree& tree, const Context& assignment) {
    const CptTree* t = &tree;
    while (!t->is_leaf()) {
        auto value = assignment.value_of(t->test());
        if (!value) throw std::invalid_argument("tree_lookup: tested variable " + t->test() + " is unbound");
        t = &t->branch(*value);
    }
    return t->distribution();
}

const Distribution& tree_lookup(const CptTree& tree,
                                const std::function<std::size_t(const std::string&)>& value_of) {
    const CptTree* t = &tree;
    while (!t->is_leaf()) t = &t->branches()[value_of(t->test())].subtree;
    return t->distribution();
}

namespace {

void collect_tested(const CptTree& t, std::vector<std::string>& out) {
    if (t.is_leaf()) return;
    if (std::find(out.begin(), out.end(), t.test()) == out.end()) out.push_back(t.test());
    for (const auto& b : t.branches()) collect_tested(b.subtree, out);
}

}  // namespace

std::vector<std::string> tested_variables(const CptTree& tree) {
    std::vector<std::string> out;
    collect_tested(tree, out);
    return out;
}

std::size_t parent_configurations(const Network& net, const Node& node) {
    std::size_t n = 1;
    for (const auto& p : node.parents) n *= net.variable(p).cardinality();
    return n;
}

}  // namespace csibn
