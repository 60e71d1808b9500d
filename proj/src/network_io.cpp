#include "csibn/network_io.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace csibn {

namespace {

using ordered_json = nlohmann::ordered_json;

[[noreturn]] void malformed(const std::string& what) { throw SemanticError("malformed document: " + what); }

const ordered_json& require(const ordered_json& obj, const char* key, const std::string& where) {
    if (!obj.is_object()) malformed(where + " must be an object");
    auto it = obj.find(key);
    if (it == obj.end()) malformed(where + " is missing \"" + key + "\"");
    return *it;
}

std::string read_string(const ordered_json& j, const std::string& where) {
    if (!j.is_string()) malformed(where + " must be a string");
    return j.get<std::string>();
}

std::vector<std::string> read_strings(const ordered_json& j, const std::string& where) {
    if (!j.is_array()) malformed(where + " must be an array of strings");
    std::vector<std::string> out;
    for (const auto& e : j) out.push_back(read_string(e, where));
    return out;
}

Distribution read_distribution(const ordered_json& j, const std::string& where) {
    if (!j.is_array()) malformed(where + " must be an array of numbers");
    Distribution d;
    for (const auto& e : j) {
        if (!e.is_number()) malformed(where + " must contain only numbers");
        d.push_back(e.get<double>());
    }
    return d;
}

CptTree read_tree(const ordered_json& j, const std::vector<Variable>& variables, const std::string& where) {
    if (!j.is_object()) malformed(where + " must be an object");
    if (j.contains("leaf")) return CptTree::leaf(read_distribution(j["leaf"], where + ".leaf"));
    std::string test = read_string(require(j, "test", where), where + ".test");
    const auto& branches = require(j, "branches", where);
    if (!branches.is_object()) malformed(where + ".branches must be an object");

    std::vector<CptBranch> out;
    for (const auto& [value, sub] : branches.items()) {
        out.push_back({value, read_tree(sub, variables, where + ".branches." + value)});
    }
    // Canonicalize to declared value order when the labels line up exactly.
    for (const auto& v : variables) {
        if (v.name != test || v.values.size() != out.size()) continue;
        std::vector<CptBranch> ordered;
        for (const auto& value : v.values) {
            auto it = std::find_if(out.begin(), out.end(), [&](const CptBranch& b) { return b.value == value; });
            if (it == out.end()) break;
            ordered.push_back(std::move(*it));
        }
        if (ordered.size() == out.size()) out = std::move(ordered);
        break;
    }
    if (out.empty()) malformed(where + ".branches must not be empty");
    return CptTree::node(std::move(test), std::move(out));
}

Cpt read_cpt(const ordered_json& j, const std::vector<Variable>& variables, const std::string& where) {
    std::string kind = read_string(require(j, "kind", where), where + ".kind");
    if (kind == "table") {
        const auto& rows = require(j, "rows", where);
        if (!rows.is_array()) malformed(where + ".rows must be an array");
        CptTable table;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            table.rows.push_back(read_distribution(rows[i], where + ".rows[" + std::to_string(i) + "]"));
        }
        return table;
    }
    if (kind == "tree") return read_tree(require(j, "root", where), variables, where + ".root");
    malformed(where + ".kind must be \"table\" or \"tree\", got \"" + kind + "\"");
}

ordered_json write_tree(const CptTree& t) {
    ordered_json j = ordered_json::object();
    if (t.is_leaf()) {
        j["leaf"] = t.distribution();
        return j;
    }
    j["test"] = t.test();
    ordered_json branches = ordered_json::object();
    for (const auto& b : t.branches()) branches[b.value] = write_tree(b.subtree);
    j["branches"] = std::move(branches);
    return j;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

}  // namespace

Network parse_network_unchecked(std::string_view text) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(text.begin(), text.end());
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("syntax error: ") + e.what(), e.byte);
    }
    const auto& vars = require(doc, "variables", "document");
    const auto& nodes = require(doc, "nodes", "document");
    if (!vars.is_array()) malformed("\"variables\" must be an array");
    if (!nodes.is_array()) malformed("\"nodes\" must be an array");

    std::vector<Variable> variables;
    for (std::size_t i = 0; i < vars.size(); ++i) {
        std::string where = "variables[" + std::to_string(i) + "]";
        variables.push_back({read_string(require(vars[i], "name", where), where + ".name"),
                             read_strings(require(vars[i], "values", where), where + ".values")});
    }
    std::vector<Node> out_nodes;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        std::string where = "nodes[" + std::to_string(i) + "]";
        const auto& n = nodes[i];
        Node node;
        node.var = read_string(require(n, "var", where), where + ".var");
        node.parents = read_strings(require(n, "parents", where), where + ".parents");
        if (auto it = n.find("deterministic"); it != n.end()) {
            if (!it->is_boolean()) malformed(where + ".deterministic must be a boolean");
            node.deterministic = it->get<bool>();
        }
        node.cpt = read_cpt(require(n, "cpt", where), variables, where + ".cpt");
        out_nodes.push_back(std::move(node));
    }
    return Network(std::move(variables), std::move(out_nodes));
}

Network parse_network(std::string_view text) {
    Network net = parse_network_unchecked(text);
    auto violations = validate(net);
    if (!violations.empty()) {
        std::string msg = "invalid network:";
        for (const auto& v : violations) msg += " [" + v.code + "] " + v.message + ";";
        msg.pop_back();
        throw SemanticError(msg);
    }
    return net;
}

std::string serialize_network(const Network& net) {
    ordered_json doc = ordered_json::object();
    ordered_json vars = ordered_json::array();
    for (const auto& v : net.variables()) {
        ordered_json jv = ordered_json::object();
        jv["name"] = v.name;
        jv["values"] = v.values;
        vars.push_back(std::move(jv));
    }
    ordered_json nodes = ordered_json::array();
    for (const auto& n : net.nodes()) {
        ordered_json jn = ordered_json::object();
        jn["var"] = n.var;
        jn["parents"] = n.parents;
        if (n.deterministic) jn["deterministic"] = true;
        ordered_json cpt = ordered_json::object();
        if (const auto* table = std::get_if<CptTable>(&n.cpt)) {
            cpt["kind"] = "table";
            cpt["rows"] = table->rows;
        } else {
            cpt["kind"] = "tree";
            cpt["root"] = write_tree(std::get<CptTree>(n.cpt));
        }
        jn["cpt"] = std::move(cpt);
        nodes.push_back(std::move(jn));
    }
    doc["variables"] = std::move(vars);
    doc["nodes"] = std::move(nodes);
    return doc.dump(2) + "\n";
}

Network load_network(const std::string& path) { return parse_network(slurp(path)); }
Network load_network_unchecked(const std::string& path) { return parse_network_unchecked(slurp(path)); }

Context parse_context(std::string_view text, const Network& net) {
    Context ctx;
    std::size_t offset = 0;
    if (trim(text).empty()) return ctx;
    while (offset <= text.size()) {
        std::size_t comma = text.find(',', offset);
        if (comma == std::string_view::npos) comma = text.size();
        std::string_view item = text.substr(offset, comma - offset);
        std::size_t eq = item.find('=');
        if (eq == std::string_view::npos) throw ParseError("expected Var=value in context", offset);
        std::string var(trim(item.substr(0, eq)));
        std::string value(trim(item.substr(eq + 1)));
        if (var.empty() || value.empty()) throw ParseError("empty variable or value in context", offset);
        const Variable* v = net.find_variable(var);
        if (!v) throw SemanticError("unknown variable in context: " + var);
        if (!v->value_index(value)) throw SemanticError("unknown value " + value + " for variable " + var);
        if (ctx.binds(var)) throw SemanticError("variable bound twice in context: " + var);
        ctx.bind(std::move(var), std::move(value));
        offset = comma + 1;
    }
    return ctx;
}

std::vector<std::string> parse_variable_list(std::string_view text, const Network& net) {
    std::vector<std::string> out;
    if (trim(text).empty()) return out;
    std::size_t offset = 0;
    while (offset <= text.size()) {
        std::size_t comma = text.find(',', offset);
        if (comma == std::string_view::npos) comma = text.size();
        std::string name(trim(text.substr(offset, comma - offset)));
        if (name.empty()) throw ParseError("empty variable name in list", offset);
        if (!net.find_variable(name)) throw SemanticError("unknown variable: " + name);
        if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(std::move(name));
        offset = comma + 1;
    }
    return out;
}

}  // namespace csibn
