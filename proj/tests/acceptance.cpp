// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "csibn/csi.hpp"
#include "csibn/cutset.hpp"
#include "csibn/inference.hpp"
#include "csibn/random_network.hpp"
#include "csibn/transform.hpp"
#include "support.hpp"

using namespace csibn;

namespace {

struct Verdict {
    bool ok;
    std::string detail;
};

int failures = 0;

void criterion(int id, const std::string& title, double limit_seconds, const std::function<Verdict()>& body) {
    auto start = std::chrono::steady_clock::now();
    Verdict v{false, ""};
    try {
        v = body();
    } catch (const std::exception& e) {
        v = {false, std::string("exception: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool in_time = secs < limit_seconds;
    bool ok = v.ok && in_time;
    if (!ok) ++failures;
    std::printf("%s [%d] %s: %s (%.3fs, limit %.0fs%s)\n", ok ? "PASS" : "FAIL", id, title.c_str(), v.detail.c_str(),
                secs, limit_seconds, in_time ? "" : ", too slow");
    std::fflush(stdout);
}

std::string list(const std::vector<std::string>& xs) {
    std::string s = "{";
    for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + xs[i];
    return s + "}";
}

double max_gap(const InferenceResult& a, const std::pair<std::vector<double>, double>& oracle) {
    double g = std::abs(a.evidence_probability - oracle.second);
    for (std::size_t i = 0; i < a.posterior.size(); ++i) g = std::max(g, std::abs(a.posterior[i] - oracle.first[i]));
    return g;
}

}  // namespace

int main() {
    criterion(1, "fig3 CPT-size reduction", 1, [] {
        Decomposition d = decompose_network(testing::fixture("fig3.json"));
        if (d.reports.size() != 1) return Verdict{false, "expected one decomposed node"};
        const auto& r = d.reports[0];
        std::ostringstream s;
        bool ok = r.table_entries_before == 32 && r.conditionals.size() == 2;
        s << "original " << r.table_entries_before << " entries; conditional";
        for (const auto& c : r.conditionals) {
            s << " " << c.name << "=" << c.entries;
            ok = ok && c.entries == 4;
        }
        return Verdict{ok, s.str()};
    });

    criterion(2, "fig2 decomposition shape", 1, [] {
        Decomposition d = decompose_network(testing::fixture("fig2.json"));
        const std::vector<std::pair<std::string, std::vector<std::string>>> want{
            {"X@A=t", {"D"}}, {"X@A=f,B=t", {}}, {"X@A=f,B=f,C=t", {}}, {"X@A=f,B=f,C=f", {"D"}}};
        std::vector<std::pair<std::string, std::vector<std::string>>> got;
        std::string s;
        for (const auto& c : d.reports.at(0).conditionals) {
            got.push_back({c.name, c.parents});
            s += c.name + " " + list(c.parents) + "; ";
        }
        bool mux = true;
        for (const auto& m : d.reports.at(0).multiplexers) mux = mux && d.network.node(m).deterministic;
        s += "multiplexers " + list(d.reports.at(0).multiplexers);
        return Verdict{got == want && mux && d.reports.at(0).multiplexers.size() == 3, s};
    });

    criterion(3, "fig1 evaluation count, greedy cutset vs flat {U,V,W}", 1, [] {
        Network fig1 = testing::fixture("fig1.json");
        Query q{"X", {}};
        auto greedy = cutset_infer(fig1, q, build_conditional_cutset(fig1));
        auto flat = cutset_infer(fig1, q, flat_cutset(fig1, {"U", "V", "W"}));
        std::ostringstream s;
        s << "greedy " << greedy.evaluations << " (cutset " << list(cutset_variables(build_conditional_cutset(fig1)))
          << "), flat " << flat.evaluations << ", required 5 vs 8";
        return Verdict{greedy.evaluations == 5 && flat.evaluations == 8, s.str()};
    });
    {
        // Informational: the conditional form of the standard cutset {U,V,W}.
        Network fig1 = testing::fixture("fig1.json");
        auto ordered = cutset_infer(fig1, {"X", {}}, order_cutset(fig1, {"U", "V", "W"}));
        std::printf("INFO [3] ordered standard cutset {U,V,W}: %zu evaluations vs %zu flat\n", ordered.evaluations,
                    flat_cutset_size(fig1, order_cutset(fig1, {"U", "V", "W"})));
    }

    criterion(4, "vacuity claims", 1, [] {
        Network fig1 = testing::fixture("fig1.json");
        Network fig2 = testing::fixture("fig2.json");
        auto a = vacuous_parents(fig1, "X", Context{{"U", "t"}});
        auto b = vacuous_parents(fig2, "X", Context{{"A", "t"}});
        auto c = vacuous_parents(fig2, "X", Context{{"A", "f"}, {"B", "t"}});
        bool ok = a == std::vector<std::string>{"V", "W"} && b == std::vector<std::string>{"B", "C"} &&
                  c == std::vector<std::string>{"C", "D"};
        return Verdict{ok, "u: " + list(a) + ", a: " + list(b) + ", a-bar b: " + list(c)};
    });

    criterion(5, "CSI-separation soundness on 120 random networks", 60, [] {
        std::mt19937_64 rng(2024);
        std::size_t positives = 0, counterexamples = 0;
        for (int n = 0; n < 120; ++n) {
            RandomNetworkOptions o;
            o.variables = 3 + static_cast<std::size_t>(n % 4);
            o.max_parents = 3;
            Network net = random_network(rng, o);
            std::vector<std::string> names;
            for (const auto& v : net.variables()) names.push_back(v.name);
            // Every ordered split into X, Y, one Z variable and one context variable.
            for (std::size_t x = 0; x < names.size(); ++x) {
                for (std::size_t y = x + 1; y < names.size(); ++y) {
                    for (std::size_t k = 0; k < names.size(); ++k) {
                        if (k == x || k == y) continue;
                        for (std::size_t z = 0; z <= names.size(); ++z) {
                            if (z == x || z == y || z == k) continue;
                            std::vector<std::string> zs;
                            if (z < names.size()) zs.push_back(names[z]);
                            for (const auto& c : testing::all_contexts(net, {names[k]})) {
                                if (!csi_separated(net, {names[x]}, {names[y]}, zs, c)) continue;
                                ++positives;
                                if (!contextually_independent(net, {names[x]}, {names[y]}, zs, c)) ++counterexamples;
                            }
                        }
                    }
                }
            }
        }
        std::ostringstream s;
        s << positives << " positive answers, " << counterexamples << " counterexamples";
        return Verdict{counterexamples == 0 && positives > 0, s.str()};
    });

    criterion(6, "vacuous-parent and reduced-tree equivalence over all fixture contexts", 10, [] {
        std::size_t checks = 0, mismatches = 0;
        for (const auto& name : testing::fixture_names()) {
            Network net = testing::fixture(name);
            for (const auto& node : net.nodes()) {
                if (node.parents.size() > 4) continue;
                CptTree t = cpt_as_tree(net, node);
                for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << node.parents.size()); ++mask) {
                    for (const auto& c : testing::all_contexts(net, testing::subset(node.parents, mask))) {
                        auto in_r = tested_variables(reduce_tree(t, c));
                        for (const auto& y : node.parents) {
                            if (c.binds(y)) continue;
                            ++checks;
                            bool labels = std::find(in_r.begin(), in_r.end(), y) != in_r.end();
                            if (labels != occurs_consistent(t, y, c)) ++mismatches;
                        }
                    }
                }
            }
        }
        std::ostringstream s;
        s << checks << " membership checks, " << mismatches << " mismatches";
        return Verdict{mismatches == 0 && checks > 0, s.str()};
    });

    criterion(7, "three-way inference agreement", 60, [] {
        std::vector<Network> nets;
        for (const auto& name : testing::fixture_names()) nets.push_back(testing::fixture(name));
        std::mt19937_64 rng(77);
        for (int i = 0; i < 20; ++i) {
            RandomNetworkOptions o;
            o.variables = 5 + static_cast<std::size_t>(i % 4);
            o.max_parents = 3;
            nets.push_back(random_loopy_network(rng, o));
        }
        double worst = 0.0;
        std::size_t queries = 0;
        for (const auto& net : nets) {
            CutsetTree cutset = build_conditional_cutset(net);
            for (const auto& target : net.variables()) {
                std::vector<Context> evidence{Context{}};
                for (const auto& v : net.variables()) {
                    if (v.name != target.name) evidence.push_back(Context{{v.name, v.values.front()}});
                }
                for (const auto& e : evidence) {
                    Query q{target.name, e};
                    auto en = query_enumerate(net, q);
                    auto ve = variable_elimination(net, q);
                    auto cs = cutset_infer(net, q, cutset);
                    for (std::size_t i = 0; i < en.posterior.size(); ++i) {
                        worst = std::max({worst, std::abs(en.posterior[i] - ve.posterior[i]),
                                          std::abs(en.posterior[i] - cs.posterior[i])});
                    }
                    ++queries;
                }
            }
        }
        std::ostringstream s;
        s << queries << " queries on " << nets.size() << " networks, max disagreement " << worst;
        return Verdict{worst <= 1e-9, s.str()};
    });

    criterion(8, "decomposition preserves the joint", 30, [] {
        std::vector<Network> nets;
        for (const auto& name : testing::fixture_names()) {
            Network net = testing::fixture(name);
            if (net.size() <= 6) nets.push_back(net);
        }
        std::mt19937_64 rng(88);
        for (int i = 0; i < 60; ++i) {
            RandomNetworkOptions o;
            o.variables = 3 + static_cast<std::size_t>(i % 4);
            o.max_parents = 3;
            nets.push_back(random_network(rng, o));
        }
        double worst = 0.0;
        for (const auto& net : nets) {
            Network d = decompose_network(net).network;
            std::vector<std::size_t> positions;
            for (const auto& v : net.variables()) positions.push_back(*d.variable_index(v.name));
            std::map<std::vector<std::size_t>, double> marginal;
            testing::for_each_assignment(d, [&](const testing::Assignment& a) {
                std::vector<std::size_t> key;
                for (auto p : positions) key.push_back(a[p]);
                marginal[key] += testing::oracle_joint(d, a);
            });
            testing::for_each_assignment(net, [&](const testing::Assignment& a) {
                worst = std::max(worst, std::abs(marginal[a] - testing::oracle_joint(net, a)));
            });
        }
        std::ostringstream s;
        s << nets.size() << " networks, max pointwise gap " << worst;
        return Verdict{worst <= 1e-9, s.str()};
    });

    criterion(9, "heuristic regression on fig2", 1, [] {
        Network fig2 = testing::fixture("fig2.json");
        double d = arc_deletion_score(fig2, "A");
        auto scores = heuristic_scores(fig2);
        const HeuristicScore* best = &scores.front();
        for (const auto& s : scores) {
            if (s.ratio < best->ratio) best = &s;
        }
        std::ostringstream s;
        s.precision(12);
        s << "d'(A) = " << d << ", argmin w/d' = " << best->variable;
        return Verdict{std::abs(d - 2.5) <= 1e-9 && best->variable == "A", s.str()};
    });

    criterion(10, "clique improvement on fig2", 1, [] {
        Network fig2 = testing::fixture("fig2.json");
        double before = clique_report(fig2).max_clique_weight;
        double after = clique_report(decompose_network(fig2).network).max_clique_weight;
        std::ostringstream s;
        s << "max clique weight " << before << " -> " << after;
        return Verdict{before == 5.0 && after < 5.0, s.str()};
    });

    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
