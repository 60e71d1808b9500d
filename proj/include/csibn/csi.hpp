#ifndef CSIBN_CSI_HPP
#define CSIBN_CSI_HPP

#include <string>
#include <utility>
#include <vector>

#include "csibn/model.hpp"

namespace csibn {

using Edge = std::pair<std::string, std::string>;  // (parent, child)

/// True iff some root-to-leaf path of `tree` that is consistent with `c`
/// tests `y`. Throws std::invalid_argument when `y` is bound in `c`.
bool occurs_consistent(const CptTree& tree, const std::string& y, const Context& c);

/// Parents of `x` that are unbound in `c` and occur on no path of x's CPT
/// tree consistent with `c`; these edges are vacuous given `c`. Table CPTs
/// are expanded to full trees first, which never yield vacuous edges.
/// Returned in declared parent order.
std::vector<std::string> vacuous_parents(const Network& net, const std::string& x, const Context& c);

/// Tree conditioned on `c`: t-nodes testing a bound variable are replaced by
/// the reduced subtree of the selected branch. One traversal, O(|tree|).
CptTree reduce_tree(const CptTree& tree, const Context& c);

/// d-separation of `xs` and `ys` given `zs` on the parent graph of `net`.
bool d_separated(const Network& net, const std::vector<std::string>& xs, const std::vector<std::string>& ys,
                 const std::vector<std::string>& zs);

/// Network B(c): every vacuous edge given `c` deleted and every CPT replaced
/// by its reduction under the restriction of `c` to the node's parents.
struct ContextNetwork {
    Network base;
    Context context;
    std::vector<Edge> deleted_edges;  // in node order, then parent order
    Network reduced;
};

ContextNetwork context_network(const Network& net, const Context& c);

/// d-separation in B(c) with the context variables added to the separating set.
bool csi_separated(const Network& net, const std::vector<std::string>& xs, const std::vector<std::string>& ys,
                   const std::vector<std::string>& zs, const Context& c);

/// B(c) with the outgoing arcs of every context variable removed as well:
/// children see the bound value through their reduced CPTs, while the bound
/// node keeps its incoming arcs and is treated as observed. Every parent list
/// is cut down to the variables its reduced tree still tests.
Network instantiate_context(const Network& net, const Context& c);

}  // namespace csibn

#endif  // CSIBN_CSI_HPP
