#ifndef CSIBN_TESTS_SUPPORT_HPP
#define CSIBN_TESTS_SUPPORT_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "csibn/model.hpp"

namespace testing {

using csibn::Context;
using csibn::Network;

std::string fixture_path(const std::string& name);
Network fixture(const std::string& name);
std::vector<std::string> fixture_names();

// Full assignment as value indices in network variable order.
using Assignment = std::vector<std::size_t>;

// Visits every full assignment (last variable fastest).
void for_each_assignment(const Network& net, const std::function<void(const Assignment&)>& fn);

// Joint probability computed directly from the CPT structures, without the
// library's compiled factors.
double oracle_joint(const Network& net, const Assignment& a);

// P(target | evidence) and P(evidence) by brute force over oracle_joint.
std::pair<std::vector<double>, double> oracle_posterior(const Network& net, const std::string& target,
                                                        const Context& evidence);

// Every context binding exactly `vars` (last variable fastest).
std::vector<Context> all_contexts(const Network& net, const std::vector<std::string>& vars);

// Ancestral moral graph criterion, independent of the Bayes-ball code.
bool moral_dsep_oracle(const Network& net, const std::vector<std::string>& xs,
                       const std::vector<std::string>& ys, const std::vector<std::string>& zs);

// Undirected cycle detection by DFS over an explicit edge list.
bool has_undirected_cycle(const std::vector<std::string>& vertices,
                          const std::vector<std::pair<std::string, std::string>>& edges);

// Skeleton left when the context's variables keep their incoming arcs but lose
// their outgoing ones, and arcs vacuous under the context are dropped.
bool branch_leaves_forest(const Network& net, const Context& c);

// Removal form: context variables are deleted outright.
bool branch_leaves_forest_removing(const Network& net, const Context& c);

std::vector<std::string> subset(const std::vector<std::string>& xs, std::uint64_t mask);

}  // namespace testing

#endif  // CSIBN_TESTS_SUPPORT_HPP
