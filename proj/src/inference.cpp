#include "csibn/inference.hpp"

#include <algorithm>
#include <exception>
#include <functional>
#include <map>
#include <numeric>
#include <set>

#ifdef CSIBN_HAVE_OPENMP
#include <omp.h>
#endif

#include "csibn/csi.hpp"
#include "factor.hpp"

namespace csibn {

using detail::CompiledNetwork;
using detail::Factor;

namespace {

constexpr std::size_t kEnumerationBlock = 4096;

std::size_t index_of(const Network& net, const std::string& name) {
    auto idx = net.variable_index(name);
    if (!idx) throw std::invalid_argument("unknown variable: " + name);
    return *idx;
}

// Evidence as a per-variable value index; SIZE_MAX marks free variables.
std::vector<std::size_t> evidence_vector(const Network& net, const Context& evidence) {
    std::vector<std::size_t> out(net.size(), SIZE_MAX);
    for (const auto& [var, value] : evidence.bindings()) {
        std::size_t i = index_of(net, var);
        auto v = net.variables()[i].value_index(value);
        if (!v) throw std::invalid_argument("unknown value " + value + " for variable " + var);
        out[i] = *v;
    }
    return out;
}

void check_query(const Network& net, const Query& q) {
    index_of(net, q.target);
    if (q.evidence.binds(q.target)) throw std::invalid_argument("query target " + q.target + " is bound in the evidence");
    evidence_vector(net, q.evidence);
}

InferenceResult finish(std::vector<double> weights, std::size_t evaluations) {
    InferenceResult r;
    r.evidence_probability = 0.0;
    for (double w : weights) r.evidence_probability += w;
    if (!(r.evidence_probability > 0.0)) throw ImpossibleEvidence();
    r.posterior.reserve(weights.size());
    for (double w : weights) r.posterior.push_back(w / r.evidence_probability);
    r.weights = std::move(weights);
    r.evaluations = evaluations;
    return r;
}

// ---------------------------------------------------------------------------
// Enumeration

struct EnumerationPlan {
    CompiledNetwork cn;
    std::vector<std::size_t> base;  // evidence values; free slots overwritten
    std::vector<std::size_t> free_vars;
    std::vector<std::size_t> free_cards;
    std::vector<std::size_t> out_vars;
    std::vector<std::size_t> out_strides;
    std::size_t out_size = 1;
    std::size_t total = 1;
};

EnumerationPlan plan_enumeration(const Network& net, const std::vector<std::string>& out_names, const Context& evidence) {
    EnumerationPlan plan;
    plan.cn = detail::compile(net);
    plan.base = evidence_vector(net, evidence);
    for (std::size_t i = 0; i < net.size(); ++i) {
        if (plan.base[i] != SIZE_MAX) continue;
        plan.free_vars.push_back(i);
        plan.free_cards.push_back(plan.cn.cards[i]);
        plan.total *= plan.cn.cards[i];
        plan.base[i] = 0;
    }
    for (const auto& name : out_names) plan.out_vars.push_back(index_of(net, name));
    plan.out_strides.assign(plan.out_vars.size(), 1);
    for (std::size_t i = plan.out_vars.size(); i-- > 0;) {
        plan.out_strides[i] = plan.out_size;
        plan.out_size *= plan.cn.cards[plan.out_vars[i]];
    }
    return plan;
}

// Adds the joint weight of assignments [begin, end) (mixed radix over the
// free variables, last fastest) into `acc`.
void enumerate_range(const EnumerationPlan& plan, std::size_t begin, std::size_t end, double* acc) {
    std::vector<std::size_t> assignment = plan.base;
    std::size_t rest = begin;
    for (std::size_t i = plan.free_vars.size(); i-- > 0;) {
        assignment[plan.free_vars[i]] = rest % plan.free_cards[i];
        rest /= plan.free_cards[i];
    }
    for (std::size_t k = begin; k < end; ++k) {
        double p = detail::joint_at(plan.cn, assignment);
        std::size_t idx = 0;
        for (std::size_t i = 0; i < plan.out_vars.size(); ++i) idx += assignment[plan.out_vars[i]] * plan.out_strides[i];
        acc[idx] += p;
        for (std::size_t i = plan.free_vars.size(); i-- > 0;) {
            std::size_t& digit = assignment[plan.free_vars[i]];
            if (++digit < plan.free_cards[i]) break;
            digit = 0;
        }
    }
}

std::vector<double> enumerate_blocked(const EnumerationPlan& plan) {
    const std::size_t blocks = (plan.total + kEnumerationBlock - 1) / kEnumerationBlock;
    std::vector<double> partial(blocks * plan.out_size, 0.0);
#ifdef CSIBN_HAVE_OPENMP
#pragma omp parallel for schedule(static) if (blocks > 1)
#endif
    for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(blocks); ++b) {
        std::size_t begin = static_cast<std::size_t>(b) * kEnumerationBlock;
        std::size_t end = std::min(plan.total, begin + kEnumerationBlock);
        enumerate_range(plan, begin, end, partial.data() + static_cast<std::size_t>(b) * plan.out_size);
    }
    std::vector<double> out(plan.out_size, 0.0);
    for (std::size_t b = 0; b < blocks; ++b) {
        for (std::size_t i = 0; i < plan.out_size; ++i) out[i] += partial[b * plan.out_size + i];
    }
    return out;
}

// Same blocks and the same reduction order as enumerate_blocked, one thread.
std::vector<double> enumerate_serial(const EnumerationPlan& plan) {
    std::vector<double> out(plan.out_size, 0.0);
    std::vector<double> partial(plan.out_size);
    for (std::size_t begin = 0; begin < plan.total; begin += kEnumerationBlock) {
        std::fill(partial.begin(), partial.end(), 0.0);
        enumerate_range(plan, begin, std::min(plan.total, begin + kEnumerationBlock), partial.data());
        for (std::size_t i = 0; i < plan.out_size; ++i) out[i] += partial[i];
    }
    return out;
}

// ---------------------------------------------------------------------------
// Variable elimination

std::vector<Factor> evidence_factors(const Network& net, const CompiledNetwork& cn,
                                     const std::vector<std::size_t>& evidence) {
    std::vector<Factor> factors;
    for (const auto& node : cn.nodes) {
        Factor f = detail::family_factor(cn, node);
        for (std::size_t v = 0; v < net.size(); ++v) {
            if (evidence[v] != SIZE_MAX) f = f.reduce(v, evidence[v]);
        }
        factors.push_back(std::move(f));
    }
    return factors;
}

std::vector<double> eliminate(const Network& net, const Query& q) {
    CompiledNetwork cn = detail::compile(net);
    auto evidence = evidence_vector(net, q.evidence);
    const std::size_t target = index_of(net, q.target);
    std::vector<Factor> factors = evidence_factors(net, cn, evidence);

    // Interaction graph over free variables; the target is kept but never eliminated.
    std::map<std::size_t, std::set<std::size_t>> adj;
    for (std::size_t v = 0; v < net.size(); ++v) {
        if (evidence[v] == SIZE_MAX) adj[v];
    }
    for (const auto& f : factors) {
        for (std::size_t a : f.vars()) {
            for (std::size_t b : f.vars()) {
                if (a != b) adj[a].insert(b);
            }
        }
    }
    while (adj.size() > 1) {
        // Min-fill with ties broken by variable name.
        std::size_t best = SIZE_MAX, best_fill = SIZE_MAX;
        for (const auto& [v, nbrs] : adj) {
            if (v == target) continue;
            std::size_t fill = 0;
            for (auto a = nbrs.begin(); a != nbrs.end(); ++a) {
                for (auto b = std::next(a); b != nbrs.end(); ++b) {
                    if (!adj.at(*a).count(*b)) ++fill;
                }
            }
            if (fill < best_fill ||
                (fill == best_fill && net.variables()[v].name < net.variables()[best].name)) {
                best = v;
                best_fill = fill;
            }
        }
        Factor merged;
        std::vector<Factor> rest;
        for (auto& f : factors) {
            if (f.contains(best)) {
                merged = merged.product(f);
            } else {
                rest.push_back(std::move(f));
            }
        }
        rest.push_back(merged.sum_out(best));
        factors = std::move(rest);
        const auto nbrs = adj.at(best);
        adj.erase(best);
        for (std::size_t a : nbrs) {
            adj[a].erase(best);
            for (std::size_t b : nbrs) {
                if (a != b) adj[a].insert(b);
            }
        }
    }
    Factor result;
    for (const auto& f : factors) result = result.product(f);
    return result.values();
}

// ---------------------------------------------------------------------------
// Sum-product on the family factor graph

class ForestSolver {
public:
    ForestSolver(const Network& net, const Context& evidence) : cn_(detail::compile(net)) {
        evidence_ = evidence_vector(net, evidence);
        for (auto& f : evidence_factors(net, cn_, evidence_)) {
            if (f.vars().empty()) {
                constant_ *= f.values()[0];
            } else {
                factors_.push_back(std::move(f));
            }
        }
        var_factors_.resize(cn_.cards.size());
        for (std::size_t i = 0; i < factors_.size(); ++i) {
            for (std::size_t v : factors_[i].vars()) var_factors_[v].push_back(i);
        }
        factor_seen_.assign(factors_.size(), false);
    }

    // Unnormalized P(target = x, evidence).
    std::vector<double> weights(std::size_t target) {
        std::vector<double> out(cn_.cards[target], 0.0);
        double others = 1.0;
        if (evidence_[target] == SIZE_MAX) {
            out = belief(target);
        } else {
            out[evidence_[target]] = 1.0;
        }
        for (std::size_t i = 0; i < factors_.size(); ++i) {
            if (factor_seen_[i]) continue;
            auto b = belief(factors_[i].vars().front());
            others *= std::accumulate(b.begin(), b.end(), 0.0);
        }
        for (double& w : out) w *= others * constant_;
        return out;
    }

private:
    std::vector<double> belief(std::size_t v) {
        std::vector<double> b(cn_.cards[v], 1.0);
        for (std::size_t f : var_factors_[v]) {
            auto m = factor_to_var(f, v);
            for (std::size_t i = 0; i < b.size(); ++i) b[i] *= m[i];
        }
        return b;
    }

    std::vector<double> var_to_factor(std::size_t v, std::size_t from) {
        std::vector<double> m(cn_.cards[v], 1.0);
        for (std::size_t f : var_factors_[v]) {
            if (f == from) continue;
            auto in = factor_to_var(f, v);
            for (std::size_t i = 0; i < m.size(); ++i) m[i] *= in[i];
        }
        return m;
    }

    std::vector<double> factor_to_var(std::size_t f, std::size_t v) {
        factor_seen_[f] = true;
        const Factor& factor = factors_[f];
        const auto& vars = factor.vars();
        const auto& cards = factor.cards();
        std::vector<std::vector<double>> incoming(vars.size());
        std::size_t target_pos = 0;
        for (std::size_t i = 0; i < vars.size(); ++i) {
            if (vars[i] == v) {
                target_pos = i;
            } else {
                incoming[i] = var_to_factor(vars[i], f);
            }
        }
        std::vector<double> out(cn_.cards[v], 0.0);
        std::vector<std::size_t> digits(vars.size(), 0);
        for (double value : factor.values()) {
            double p = value;
            for (std::size_t i = 0; i < vars.size(); ++i) {
                if (i != target_pos) p *= incoming[i][digits[i]];
            }
            out[digits[target_pos]] += p;
            for (std::size_t i = digits.size(); i-- > 0;) {
                if (++digits[i] < cards[i]) break;
                digits[i] = 0;
            }
        }
        return out;
    }

    CompiledNetwork cn_;
    std::vector<std::size_t> evidence_;
    std::vector<Factor> factors_;
    std::vector<std::vector<std::size_t>> var_factors_;
    std::vector<bool> factor_seen_;
    double constant_ = 1.0;
};

// Target may be bound in `evidence` here; the weight then sits on its value.
std::vector<double> forest_weights(const Network& net, const std::string& target, const Context& evidence) {
    if (!is_singly_connected(net)) throw NotSinglyConnected("network skeleton contains a cycle");
    ForestSolver solver(net, evidence);
    return solver.weights(index_of(net, target));
}

std::vector<double> branch_weights(const Network& net, const Query& q, const Context& branch) {
    if (!branch.consistent_with(q.evidence)) {
        return std::vector<double>(net.variable(q.target).cardinality(), 0.0);
    }
    return forest_weights(instantiate_context(net, branch), q.target, branch.merged(q.evidence));
}

InferenceResult run_cutset(const Network& net, const Query& q, const CutsetTree& cutset, bool parallel) {
    check_query(net, q);
    const auto contexts = branch_contexts(cutset);
    const std::size_t n = contexts.size();
    std::vector<std::vector<double>> per_branch(n);
    std::vector<std::exception_ptr> errors(n);
#ifdef CSIBN_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic) if (parallel && n > 1)
#endif
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
        auto k = static_cast<std::size_t>(i);
        try {
            per_branch[k] = branch_weights(net, q, contexts[k]);
        } catch (...) {
            errors[k] = std::current_exception();
        }
    }
    (void)parallel;
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    std::vector<double> total(net.variable(q.target).cardinality(), 0.0);
    for (const auto& w : per_branch) {
        for (std::size_t i = 0; i < total.size(); ++i) total[i] += w[i];
    }
    return finish(std::move(total), n);
}

}  // namespace

double joint_probability(const Network& net, const Context& assignment) {
    auto values = evidence_vector(net, assignment);
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] == SIZE_MAX) {
            throw std::invalid_argument("joint_probability: variable " + net.variables()[i].name + " is unbound");
        }
    }
    return detail::joint_at(detail::compile(net), values);
}

InferenceResult query_enumerate(const Network& net, const Query& q) {
    check_query(net, q);
    return finish(enumerate_blocked(plan_enumeration(net, {q.target}, q.evidence)), 1);
}

InferenceResult query_enumerate_serial(const Network& net, const Query& q) {
    check_query(net, q);
    return finish(enumerate_serial(plan_enumeration(net, {q.target}, q.evidence)), 1);
}

std::vector<double> enumerate_marginal(const Network& net, const std::vector<std::string>& vars,
                                       const Context& evidence) {
    return enumerate_blocked(plan_enumeration(net, vars, evidence));
}

bool contextually_independent(const Network& net, const std::vector<std::string>& xs,
                              const std::vector<std::string>& ys, const std::vector<std::string>& zs,
                              const Context& c, double tol) {
    std::set<std::string> seen;
    for (const auto* group : {&xs, &ys, &zs}) {
        for (const auto& v : *group) {
            if (!seen.insert(v).second || c.binds(v)) {
                throw std::invalid_argument("contextually_independent: sets must be disjoint: " + v);
            }
        }
    }
    auto size_of = [&](const std::vector<std::string>& vs) {
        std::size_t n = 1;
        for (const auto& v : vs) n *= net.variable(v).cardinality();
        return n;
    };
    const std::size_t nx = size_of(xs), ny = size_of(ys), nz = size_of(zs);
    std::vector<std::string> all = xs;
    all.insert(all.end(), ys.begin(), ys.end());
    all.insert(all.end(), zs.begin(), zs.end());
    const std::vector<double> joint = enumerate_marginal(net, all, c);
    auto at = [&](std::size_t x, std::size_t y, std::size_t z) { return joint[(x * ny + y) * nz + z]; };

    for (std::size_t z = 0; z < nz; ++z) {
        double pz = 0.0;
        std::vector<double> pxz(nx, 0.0);
        for (std::size_t x = 0; x < nx; ++x) {
            for (std::size_t y = 0; y < ny; ++y) {
                pxz[x] += at(x, y, z);
                pz += at(x, y, z);
            }
        }
        for (std::size_t y = 0; y < ny; ++y) {
            double pyz = 0.0;
            for (std::size_t x = 0; x < nx; ++x) pyz += at(x, y, z);
            if (!(pyz > tol)) continue;
            for (std::size_t x = 0; x < nx; ++x) {
                if (std::abs(at(x, y, z) / pyz - pxz[x] / pz) > tol) return false;
            }
        }
    }
    return true;
}

InferenceResult variable_elimination(const Network& net, const Query& q) {
    check_query(net, q);
    return finish(eliminate(net, q), 1);
}

InferenceResult solve_singly_connected(const Network& net, const Query& q) {
    check_query(net, q);
    return finish(forest_weights(net, q.target, q.evidence), 1);
}

InferenceResult cutset_infer(const Network& net, const Query& q, const CutsetTree& cutset) {
    return run_cutset(net, q, cutset, true);
}

InferenceResult cutset_infer_serial(const Network& net, const Query& q, const CutsetTree& cutset) {
    return run_cutset(net, q, cutset, false);
}

bool is_singly_connected(const Network& net) {
    std::vector<std::size_t> parent(net.size());
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    std::function<std::size_t(std::size_t)> find = [&](std::size_t i) {
        return parent[i] == i ? i : parent[i] = find(parent[i]);
    };
    for (const auto& node : net.nodes()) {
        std::size_t x = index_of(net, node.var);
        for (const auto& p : node.parents) {
            std::size_t a = find(index_of(net, p)), b = find(x);
            if (a == b) return false;
            parent[a] = b;
        }
    }
    return true;
}

}  // namespace csibn
