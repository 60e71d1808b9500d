#ifndef CSIBN_INFERENCE_HPP
#define CSIBN_INFERENCE_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "csibn/cutset.hpp"
#include "csibn/model.hpp"

namespace csibn {

/// Evidence with probability zero under the network.
class ImpossibleEvidence : public std::runtime_error {
public:
    ImpossibleEvidence() : std::runtime_error("impossible evidence: probability of the evidence is zero") {}
};

/// A singly connected solver was handed a network whose skeleton has a cycle.
class NotSinglyConnected : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Query {
    std::string target;
    Context evidence;
};

struct InferenceResult {
    Distribution posterior;
    std::vector<double> weights;  // unnormalized P(target = x, evidence)
    double evidence_probability = 0.0;
    std::size_t evaluations = 1;
};

/// Product of every node's CPT entry at a full assignment.
/// Throws std::invalid_argument when a variable is unbound.
double joint_probability(const Network& net, const Context& assignment);

/// Exhaustive summation over all assignments consistent with the evidence.
/// The summation is split into fixed-size blocks that run in parallel when
/// built with OpenMP; block partials are added in block order, so results do
/// not depend on the thread count.
InferenceResult query_enumerate(const Network& net, const Query& q);

/// Single-threaded reference for query_enumerate: same blocks, same order.
InferenceResult query_enumerate_serial(const Network& net, const Query& q);

/// Unnormalized joint table P(vars, evidence), row-major over `vars` in the
/// order given, by enumeration.
std::vector<double> enumerate_marginal(const Network& net, const std::vector<std::string>& vars,
                                       const Context& evidence);

/// Numeric check of I_c(X; Y | Z, c): for every x, y, z with P(y, z, c) > tol,
/// |P(x | z, c, y) - P(x | z, c)| <= tol.
bool contextually_independent(const Network& net, const std::vector<std::string>& xs,
                              const std::vector<std::string>& ys, const std::vector<std::string>& zs,
                              const Context& c, double tol = 1e-9);

/// Variable elimination with a min-fill order (ties by variable name).
InferenceResult variable_elimination(const Network& net, const Query& q);

/// Sum-product over the family factor graph, which is a forest when the
/// network skeleton is. Throws NotSinglyConnected otherwise.
InferenceResult solve_singly_connected(const Network& net, const Query& q);

/// Reasoning by cases over the branch contexts of `cutset`. Each branch
/// conditions the network on its context (instantiate_context) and calls the
/// singly connected solver; branch weights are summed in branch order.
/// Branches that contradict the evidence contribute zero but still count as
/// evaluations. Branches run in parallel when built with OpenMP.
InferenceResult cutset_infer(const Network& net, const Query& q, const CutsetTree& cutset);

/// Single-threaded reference for cutset_infer; bit-identical results.
InferenceResult cutset_infer_serial(const Network& net, const Query& q, const CutsetTree& cutset);

/// True when the undirected skeleton of the parent graph has no cycle.
bool is_singly_connected(const Network& net);

}  // namespace csibn

#endif  // CSIBN_INFERENCE_HPP
