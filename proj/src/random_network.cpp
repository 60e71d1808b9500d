#include "csibn/random_network.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "csibn/inference.hpp"

namespace csibn {

namespace {

Distribution random_distribution(std::mt19937_64& rng, std::size_t k, const RandomNetworkOptions& o) {
    std::uniform_real_distribution<double> u(o.min_parameter, o.max_parameter);
    if (k == 2) {
        double p = u(rng);
        return {p, 1.0 - p};
    }
    Distribution d(k);
    for (double& x : d) x = u(rng);
    double sum = std::accumulate(d.begin(), d.end(), 0.0);
    for (double& x : d) x /= sum;
    return d;
}

CptTree random_tree(std::mt19937_64& rng, const std::vector<const Variable*>& available, std::size_t k,
                    const RandomNetworkOptions& o, bool root) {
    std::bernoulli_distribution stop(o.leaf_probability);
    if (available.empty() || (!root && stop(rng))) return CptTree::leaf(random_distribution(rng, k, o));
    std::uniform_int_distribution<std::size_t> pick(0, available.size() - 1);
    const Variable* test = available[pick(rng)];
    std::vector<const Variable*> rest;
    for (const auto* v : available) {
        if (v != test) rest.push_back(v);
    }
    std::vector<CptBranch> branches;
    for (const auto& value : test->values) branches.push_back({value, random_tree(rng, rest, k, o, false)});
    return CptTree::node(test->name, std::move(branches));
}

}  // namespace

Network random_network(std::mt19937_64& rng, const RandomNetworkOptions& o) {
    std::vector<Variable> vars;
    for (std::size_t i = 0; i < o.variables; ++i) {
        Variable v{"V" + std::to_string(i), {}};
        if (o.cardinality == 2) {
            v.values = {"t", "f"};
        } else {
            for (std::size_t j = 0; j < o.cardinality; ++j) v.values.push_back("v" + std::to_string(j));
        }
        vars.push_back(std::move(v));
    }
    std::bernoulli_distribution as_table(o.table_probability);
    std::vector<Node> nodes;
    for (std::size_t i = 0; i < o.variables; ++i) {
        std::vector<std::size_t> candidates(i);
        std::iota(candidates.begin(), candidates.end(), std::size_t{0});
        std::shuffle(candidates.begin(), candidates.end(), rng);
        std::uniform_int_distribution<std::size_t> count(0, std::min(o.max_parents, i));
        candidates.resize(count(rng));
        std::sort(candidates.begin(), candidates.end());

        Node node;
        node.var = vars[i].name;
        std::vector<const Variable*> parents;
        for (std::size_t c : candidates) {
            node.parents.push_back(vars[c].name);
            parents.push_back(&vars[c]);
        }
        if (as_table(rng)) {
            std::size_t rows = 1;
            for (const auto* p : parents) rows *= p->cardinality();
            CptTable table;
            for (std::size_t r = 0; r < rows; ++r) table.rows.push_back(random_distribution(rng, o.cardinality, o));
            node.cpt = std::move(table);
        } else {
            node.cpt = random_tree(rng, parents, o.cardinality, o, true);
        }
        nodes.push_back(std::move(node));
    }
    return Network(std::move(vars), std::move(nodes));
}

Network random_loopy_network(std::mt19937_64& rng, const RandomNetworkOptions& options) {
    for (;;) {
        Network net = random_network(rng, options);
        if (!is_singly_connected(net)) return net;
    }
}

}  // namespace csibn
