#ifndef CSIBN_RANDOM_NETWORK_HPP
#define CSIBN_RANDOM_NETWORK_HPP

#include <cstddef>
#include <random>

#include "csibn/model.hpp"

namespace csibn {

struct RandomNetworkOptions {
    std::size_t variables = 6;
    std::size_t max_parents = 3;
    std::size_t cardinality = 2;
    // Chance that a t-node below the root is replaced by a leaf.
    double leaf_probability = 0.35;
    double min_parameter = 0.05;
    double max_parameter = 0.95;
    // Emit some nodes as tables instead of trees.
    double table_probability = 0.0;
};

/// Random DAG over V0..V{n-1} (each node draws parents among earlier nodes)
/// with random tree CPTs. Binary variables take values t/f.
Network random_network(std::mt19937_64& rng, const RandomNetworkOptions& options);

/// Redraws until the skeleton has at least one cycle.
Network random_loopy_network(std::mt19937_64& rng, const RandomNetworkOptions& options);

}  // namespace csibn

#endif  // CSIBN_RANDOM_NETWORK_HPP
