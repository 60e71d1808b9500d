#include "csibn/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <functional>

#include <CLI11.hpp>
#include <json.hpp>

#include "csibn/csi.hpp"
#include "csibn/cutset.hpp"
#include "csibn/inference.hpp"
#include "csibn/network_io.hpp"
#include "csibn/transform.hpp"

namespace csibn::cli {

namespace {

using ordered_json = nlohmann::ordered_json;

// Error categories; the code is printed as a stable `error[code]:` prefix.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string join(const std::vector<std::string>& xs, const char* sep = ",") {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) s += sep;
        s += xs[i];
    }
    return s;
}

ordered_json document(const std::string& command) {
    ordered_json j = ordered_json::object();
    j["schema_version"] = 1;
    j["command"] = command;
    return j;
}

ordered_json context_json(const Context& c) {
    ordered_json j = ordered_json::object();
    for (const auto& v : c.variables()) j[v] = *c.value_of(v);
    return j;
}

ordered_json tree_json(const CptTree& t) {
    ordered_json j = ordered_json::object();
    if (t.is_leaf()) {
        j["leaf"] = t.distribution();
        return j;
    }
    j["test"] = t.test();
    ordered_json b = ordered_json::object();
    for (const auto& br : t.branches()) b[br.value] = tree_json(br.subtree);
    j["branches"] = std::move(b);
    return j;
}

void print_tree(std::ostream& out, const CptTree& t, int depth) {
    std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
    if (t.is_leaf()) {
        std::vector<std::string> ps;
        for (double p : t.distribution()) ps.push_back(num(p));
        out << pad << "[" << join(ps, ", ") << "]\n";
        return;
    }
    for (const auto& br : t.branches()) {
        if (br.subtree.is_leaf()) {
            std::vector<std::string> ps;
            for (double p : br.subtree.distribution()) ps.push_back(num(p));
            out << pad << t.test() << "=" << br.value << ": [" << join(ps, ", ") << "]\n";
        } else {
            out << pad << t.test() << "=" << br.value << ":\n";
            print_tree(out, br.subtree, depth + 1);
        }
    }
}

ordered_json cutset_json(const CutsetTree& t) {
    if (t.is_empty_leaf()) return nullptr;
    ordered_json j = ordered_json::object();
    j["test"] = t.test();
    ordered_json arcs = ordered_json::array();
    for (const auto& a : t.arcs()) {
        ordered_json ja = ordered_json::object();
        ja["values"] = a.values;
        ja["child"] = cutset_json(a.child);
        arcs.push_back(std::move(ja));
    }
    j["arcs"] = std::move(arcs);
    return j;
}

void print_cutset(std::ostream& out, const CutsetTree& t, int depth) {
    std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
    if (t.is_empty_leaf()) {
        out << pad << "(empty)\n";
        return;
    }
    for (const auto& a : t.arcs()) {
        out << pad << t.test() << " in {" << join(a.values) << "}";
        if (a.child.is_empty_leaf()) {
            out << " -> (empty)\n";
        } else {
            out << "\n";
            print_cutset(out, a.child, depth + 1);
        }
    }
}

ordered_json clique_json(const CliqueReport& r) {
    ordered_json j = ordered_json::object();
    j["max_clique_weight"] = r.max_clique_weight;
    j["total_table_size"] = r.total_table_size;
    j["elimination_order"] = r.elimination_order;
    j["cliques"] = r.cliques;
    return j;
}

void print_cliques(std::ostream& out, const std::string& label, const CliqueReport& r) {
    out << label << ": max clique weight " << num(r.max_clique_weight) << ", total table size "
        << num(r.total_table_size) << ", " << r.cliques.size() << " cliques\n";
    for (const auto& c : r.cliques) out << "  {" << join(c) << "}\n";
}

Network load(const std::string& path) {
    std::ifstream probe(path);
    if (!probe) throw IoError("cannot open " + path);
    return load_network(path);
}

void emit(std::ostream& out, const ordered_json& j) { out << j.dump(2) << "\n"; }

struct Options {
    std::string network;
    bool json = false;
    std::string node, context, evidence, target, method = "enum", xs, ys, zs, output, over;
    bool count_evals = false;
};

int cmd_validate(const Options& o, std::ostream& out) {
    std::ifstream probe(o.network);
    if (!probe) throw IoError("cannot open " + o.network);
    Network net = load_network_unchecked(o.network);
    auto violations = validate(net);
    if (o.json) {
        ordered_json j = document("validate");
        j["valid"] = violations.empty();
        ordered_json vs = ordered_json::array();
        for (const auto& v : violations) vs.push_back({{"code", v.code}, {"message", v.message}});
        j["violations"] = std::move(vs);
        emit(out, j);
    } else if (violations.empty()) {
        out << "valid\n";
    } else {
        out << "invalid\n";
        for (const auto& v : violations) out << "[" << v.code << "] " << v.message << "\n";
    }
    return violations.empty() ? kExitOk : kExitDomainError;
}

void render_inference(std::ostream& out, const Options& o, const Network& net, const Query& q,
                      const InferenceResult& r, const std::string& command, const std::string& method) {
    const Variable& t = net.variable(q.target);
    if (o.json) {
        ordered_json j = document(command);
        j["target"] = q.target;
        j["evidence"] = context_json(q.evidence);
        j["method"] = method;
        ordered_json post = ordered_json::object();
        for (std::size_t i = 0; i < t.values.size(); ++i) post[t.values[i]] = r.posterior[i];
        j["posterior"] = std::move(post);
        j["evidence_probability"] = r.evidence_probability;
        if (o.count_evals) j["evaluations"] = r.evaluations;
        emit(out, j);
        return;
    }
    out << "target: " << q.target << "\n";
    out << "evidence: " << (q.evidence.empty() ? "(none)" : q.evidence.to_string()) << "\n";
    out << "method: " << method << "\n";
    for (std::size_t i = 0; i < t.values.size(); ++i) {
        out << "P(" << q.target << "=" << t.values[i] << " | e) = " << num(r.posterior[i]) << "\n";
    }
    out << "P(e) = " << num(r.evidence_probability) << "\n";
    if (o.count_evals) out << "evaluations: " << r.evaluations << "\n";
}

CutsetTree pick_cutset(const Network& net, const Options& o) {
    if (o.over.empty()) return build_conditional_cutset(net);
    return order_cutset(net, parse_variable_list(o.over, net));
}

int cmd_infer(const Options& o, std::ostream& out, const std::string& command) {
    Network net = load(o.network);
    if (!net.find_variable(o.target)) throw SemanticError("unknown query variable: " + o.target);
    Query q{o.target, parse_context(o.evidence, net)};
    InferenceResult r;
    std::string method = command == "query" ? "enum" : o.method;
    if (method == "enum") {
        r = query_enumerate(net, q);
    } else if (method == "ve") {
        r = variable_elimination(net, q);
    } else {
        r = cutset_infer(net, q, pick_cutset(net, o));
    }
    render_inference(out, o, net, q, r, command, method);
    return kExitOk;
}

int cmd_vacuous(const Options& o, std::ostream& out) {
    Network net = load(o.network);
    net.node(o.node);
    Context c = parse_context(o.context, net);
    auto vac = vacuous_parents(net, o.node, c);
    if (o.json) {
        ordered_json j = document("vacuous");
        j["node"] = o.node;
        j["context"] = context_json(c);
        j["vacuous"] = vac;
        emit(out, j);
    } else {
        for (const auto& v : vac) out << v << "\n";
        if (vac.empty()) out << "(none)\n";
    }
    return kExitOk;
}

int cmd_reduce(const Options& o, std::ostream& out) {
    Network net = load(o.network);
    const Node& node = net.node(o.node);
    Context c = parse_context(o.context, net).restricted_to(node.parents);
    CptTree reduced = reduce_tree(cpt_as_tree(net, node), c);
    if (o.json) {
        ordered_json j = document("reduce");
        j["node"] = o.node;
        j["context"] = context_json(c);
        j["size"] = tree_size(reduced);
        j["tree"] = tree_json(reduced);
        emit(out, j);
    } else {
        out << "size: " << tree_size(reduced) << "\n";
        print_tree(out, reduced, 0);
    }
    return kExitOk;
}

int cmd_sep(const Options& o, std::ostream& out, bool csi) {
    Network net = load(o.network);
    auto xs = parse_variable_list(o.xs, net);
    auto ys = parse_variable_list(o.ys, net);
    auto zs = parse_variable_list(o.zs, net);
    if (xs.empty() || ys.empty()) throw UsageError("-X and -Y must name at least one variable each");
    Context c = csi ? parse_context(o.context, net) : Context{};
    bool sep = false;
    try {
        sep = csi ? csi_separated(net, xs, ys, zs, c) : d_separated(net, xs, ys, zs);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    if (o.json) {
        ordered_json j = document(csi ? "csisep" : "dsep");
        j["X"] = xs;
        j["Y"] = ys;
        j["Z"] = zs;
        if (csi) j["context"] = context_json(c);
        j["separated"] = sep;
        emit(out, j);
    } else {
        out << (sep ? "separated" : "not separated") << "\n";
    }
    return kExitOk;
}

int cmd_decompose(const Options& o, std::ostream& out) {
    Network net = load(o.network);
    Decomposition d = decompose_network(net);
    if (!o.output.empty()) {
        std::ofstream f(o.output, std::ios::binary);
        if (!f) throw IoError("cannot write " + o.output);
        f << serialize_network(d.network);
    }
    if (o.json) {
        ordered_json j = document("decompose");
        ordered_json reports = ordered_json::array();
        for (const auto& r : d.reports) {
            ordered_json jr = ordered_json::object();
            jr["original"] = r.original;
            jr["entries_before"] = r.entries_before;
            jr["table_entries_before"] = r.table_entries_before;
            jr["entries_after"] = r.entries_after;
            jr["multiplexers"] = r.multiplexers;
            ordered_json cs = ordered_json::array();
            for (const auto& c : r.conditionals) {
                cs.push_back({{"name", c.name}, {"parents", c.parents}, {"entries", c.entries}});
            }
            jr["conditionals"] = std::move(cs);
            reports.push_back(std::move(jr));
        }
        j["reports"] = std::move(reports);
        if (o.output.empty()) j["network"] = ordered_json::parse(serialize_network(d.network));
        emit(out, j);
        return kExitOk;
    }
    if (d.reports.empty()) out << "nothing to decompose\n";
    for (const auto& r : d.reports) {
        out << r.original << ": " << r.table_entries_before << " table entries, " << r.entries_before
            << " tree leaves -> " << r.entries_after << " entries in " << r.conditionals.size()
            << " conditional nodes\n";
        for (const auto& c : r.conditionals) {
            out << "  " << c.name << " parents {" << join(c.parents) << "} entries " << c.entries << "\n";
        }
        out << "  multiplexers: " << join(r.multiplexers, ", ") << "\n";
    }
    if (o.output.empty()) out << serialize_network(d.network);
    return kExitOk;
}

int cmd_cliques(const Options& o, std::ostream& out) {
    Network net = load(o.network);
    CliqueReport before = clique_report(net);
    CliqueReport after = clique_report(decompose_network(net).network);
    if (o.json) {
        ordered_json j = document("cliques");
        j["before"] = clique_json(before);
        j["after"] = clique_json(after);
        emit(out, j);
    } else {
        print_cliques(out, "before", before);
        print_cliques(out, "after", after);
    }
    return kExitOk;
}

int cmd_cutset(const Options& o, std::ostream& out) {
    Network net = load(o.network);
    CutsetTree t = pick_cutset(net, o);
    auto contexts = branch_contexts(t);
    std::size_t flat = flat_cutset_size(net, t);
    if (o.json) {
        ordered_json j = document("cutset");
        j["tree"] = cutset_json(t);
        j["branches"] = contexts.size();
        j["flat_branches"] = flat;
        ordered_json cs = ordered_json::array();
        for (const auto& c : contexts) cs.push_back(context_json(c));
        j["contexts"] = std::move(cs);
        emit(out, j);
    } else {
        print_cutset(out, t, 0);
        out << "branches: " << contexts.size() << "\n";
        out << "flat: " << flat << "\n";
    }
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Exact inference and context-specific independence for tree-CPT Bayesian networks", "csibn"};
    app.require_subcommand(1);
    Options o;
    std::string chosen;

    auto add = [&](const std::string& name, const std::string& help) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("network", o.network, "network JSON file")->required();
        sub->add_flag("--json", o.json, "machine-readable output");
        sub->callback([&chosen, name] { chosen = name; });
        return sub;
    };
    add("validate", "check network invariants");
    auto* query = add("query", "posterior by enumeration");
    query->add_option("-q,--query", o.target, "query variable")->required();
    query->add_option("-e,--evidence", o.evidence, "evidence Var=value,...");
    auto* infer = add("infer", "posterior with a chosen method");
    infer->add_option("-q,--query", o.target, "query variable")->required();
    infer->add_option("-e,--evidence", o.evidence, "evidence Var=value,...");
    infer->add_option("--method", o.method, "enum, ve or cutset")
        ->check(CLI::IsMember({"enum", "ve", "cutset"}));
    infer->add_flag("--count-evals", o.count_evals, "report the number of network evaluations");
    infer->add_option("--cutset", o.over, "order this standard cutset instead of the greedy construction");
    auto* vacuous = add("vacuous", "parents of a node made vacuous by a context");
    vacuous->add_option("-x,--node", o.node, "node")->required();
    vacuous->add_option("-c,--context", o.context, "context Var=value,...");
    auto* reduce = add("reduce", "CPT tree of a node reduced by a context");
    reduce->add_option("-x,--node", o.node, "node")->required();
    reduce->add_option("-c,--context", o.context, "context Var=value,...");
    for (auto [name, csi] : {std::pair{"dsep", false}, std::pair{"csisep", true}}) {
        auto* sub = add(name, csi ? "CSI-separation in a context" : "d-separation");
        sub->add_option("-X", o.xs, "variables")->required();
        sub->add_option("-Y", o.ys, "variables")->required();
        sub->add_option("-Z", o.zs, "separating variables");
        if (csi) sub->add_option("-c,--context", o.context, "context Var=value,...");
    }
    auto* decompose = add("decompose", "multiplexer decomposition of non-full CPT trees");
    decompose->add_option("-o,--output", o.output, "write the transformed network here");
    add("cliques", "clique metrics before and after decomposition");
    auto* cutset = add("cutset", "conditional cutset and its branch count");
    cutset->add_option("--over", o.over, "order this standard cutset instead of the greedy construction");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error[usage]: " << e.what() << "\n";
        return kExitUsageError;
    }

    try {
        if (chosen == "validate") return cmd_validate(o, out);
        if (chosen == "query" || chosen == "infer") return cmd_infer(o, out, chosen);
        if (chosen == "vacuous") return cmd_vacuous(o, out);
        if (chosen == "reduce") return cmd_reduce(o, out);
        if (chosen == "dsep") return cmd_sep(o, out, false);
        if (chosen == "csisep") return cmd_sep(o, out, true);
        if (chosen == "decompose") return cmd_decompose(o, out);
        if (chosen == "cliques") return cmd_cliques(o, out);
        if (chosen == "cutset") return cmd_cutset(o, out);
        err << "error[usage]: no subcommand\n";
        return kExitUsageError;
    } catch (const UsageError& e) {
        err << "error[usage]: " << e.what() << "\n";
        return kExitUsageError;
    } catch (const IoError& e) {
        err << "error[io]: " << e.what() << "\n";
        return kExitUsageError;
    } catch (const ParseError& e) {
        err << "error[parse]: " << e.what() << " (at offset " << e.position() << ")\n";
        return kExitUsageError;
    } catch (const ImpossibleEvidence& e) {
        err << "error[impossible-evidence]: " << e.what() << "\n";
        return kExitDomainError;
    } catch (const SemanticError& e) {
        err << "error[invalid]: " << e.what() << "\n";
        return kExitDomainError;
    } catch (const std::out_of_range& e) {
        err << "error[unknown-name]: " << e.what() << "\n";
        return kExitDomainError;
    } catch (const std::invalid_argument& e) {
        err << "error[domain]: " << e.what() << "\n";
        return kExitDomainError;
    }
}

}  // namespace csibn::cli
