#include <algorithm>
#include <set>

#include "graphsync/literal.hpp"
#include "safepipe/graphsync/graph.hpp"

namespace safepipe::graphsync {

using nlohmann::json;

namespace {

const char* kindName(NodeKind kind) {
    switch (kind) {
    case NodeKind::Function: return "function";
    case NodeKind::Method: return "method";
    case NodeKind::Expression: return "expression";
    }
    return "function";
}

json portJson(const PortRef& p) { return json{{"node", p.node}, {"port", p.port}}; }

json nodeJson(const GraphNode& n) {
    json out = {{"id", n.id},
                {"processName", n.processName},
                {"kind", kindName(n.kind)},
                {"index", n.index},
                {"literals", json::object()},
                {"lambdaSources", n.lambdaSources},
                {"expressions", n.expressions},
                {"results", n.results}};
    for (const auto& [port, literal] : n.literals) out["literals"][port] = literalToJson(literal);
    if (n.receiverVar) out["receiverVar"] = *n.receiverVar;
    if (n.arguments) {
        out["arguments"] = json::array();
        for (const auto& a : *n.arguments) out["arguments"].push_back({{"port", a.port}, {"named", a.named}});
    }
    if (n.assignees) out["assignees"] = *n.assignees;
    if (n.kind == NodeKind::Expression) out["source"] = n.source;
    return out;
}

class Decoder {
public:
    DecodeResult run(std::string_view text) {
        DecodeResult result;
        json root = json::parse(text, nullptr, false);
        if (root.is_discarded()) return fail("document is not valid JSON");
        if (!root.is_object()) return fail("document must be a JSON object");
        if (!root.contains("version")) return fail("missing `version`");
        if (!root["version"].is_number_integer() || root["version"].get<int>() != kGraphVersion)
            return fail("unsupported graph version " + root["version"].dump() + "; expected " +
                        std::to_string(kGraphVersion));
        GraphDoc doc;
        if (!string(root, "pipelineName", doc.pipelineName)) return failed();
        for (const char* key : {"nodes", "edges", "outputs"})
            if (!root.contains(key) || !root[key].is_array()) return fail(std::string("`") + key + "` must be an array");
        for (const auto& n : root["nodes"]) {
            auto node = decodeNode(n);
            if (!node) return failed();
            doc.nodes.push_back(std::move(*node));
        }
        for (const auto& e : root["edges"]) {
            GraphEdge edge;
            if (!e.is_object() || !port(e, "from", edge.from) || !port(e, "to", edge.to) ||
                !string(e, "varName", edge.varName))
                return error_.empty() ? fail("malformed edge") : failed();
            doc.edges.push_back(std::move(edge));
        }
        for (const auto& o : root["outputs"]) {
            DanglingOutput output;
            if (!o.is_object() || !port(o, "from", output.from) || !string(o, "varName", output.varName))
                return error_.empty() ? fail("malformed output") : failed();
            doc.outputs.push_back(std::move(output));
        }
        if (!validate(doc)) return failed();
        result.doc = std::move(doc);
        return result;
    }

private:
    DecodeResult fail(std::string message) {
        error_ = std::move(message);
        return failed();
    }
    DecodeResult failed() {
        DecodeResult r;
        r.diagnostics.push_back(makeDiagnostic("E074", "malformed graph document: " + error_, SourceSpan{"<graph>", 1, 1, 1, 1}));
        return r;
    }
    bool reject(std::string message) {
        error_ = std::move(message);
        return false;
    }

    bool string(const json& object, const char* key, std::string& out) {
        if (!object.contains(key) || !object[key].is_string()) return reject(std::string("`") + key + "` must be a string");
        out = object[key].get<std::string>();
        return true;
    }

    bool port(const json& object, const char* key, PortRef& out) {
        if (!object.contains(key) || !object[key].is_object()) return reject(std::string("`") + key + "` must be an object");
        return string(object[key], "node", out.node) && string(object[key], "port", out.port);
    }

    bool stringMap(const json& object, const char* key, std::map<std::string, std::string>& out) {
        if (!object.contains(key)) return true;
        if (!object[key].is_object()) return reject(std::string("`") + key + "` must be an object");
        for (const auto& [k, v] : object[key].items()) {
            if (!v.is_string()) return reject(std::string("`") + key + "." + k + "` must be a string");
            out[k] = v.get<std::string>();
        }
        return true;
    }

    std::optional<GraphNode> decodeNode(const json& n) {
        GraphNode node;
        std::string kind;
        if (!n.is_object()) return reject("node must be an object"), std::nullopt;
        if (!string(n, "id", node.id) || !string(n, "kind", kind)) return std::nullopt;
        if (n.contains("processName") && !string(n, "processName", node.processName)) return std::nullopt;
        if (kind == "function") node.kind = NodeKind::Function;
        else if (kind == "method") node.kind = NodeKind::Method;
        else if (kind == "expression") node.kind = NodeKind::Expression;
        else return reject("unknown node kind `" + kind + "`"), std::nullopt;
        if (!n.contains("index") || !n["index"].is_number_integer())
            return reject("node `" + node.id + "` needs an integer `index`"), std::nullopt;
        node.index = n["index"].get<int>();
        if (n.contains("receiverVar")) {
            std::string var;
            if (!string(n, "receiverVar", var)) return std::nullopt;
            node.receiverVar = var;
        }
        if (n.contains("literals")) {
            if (!n["literals"].is_object()) return reject("`literals` must be an object"), std::nullopt;
            for (const auto& [k, v] : n["literals"].items()) {
                auto literal = literalFromJson(v);
                if (!literal) return reject("literal `" + k + "` of node `" + node.id + "` is not a constant"), std::nullopt;
                node.literals[k] = std::move(*literal);
            }
        }
        if (!stringMap(n, "lambdaSources", node.lambdaSources) || !stringMap(n, "expressions", node.expressions))
            return std::nullopt;
        if (n.contains("arguments")) {
            if (!n["arguments"].is_array()) return reject("`arguments` must be an array"), std::nullopt;
            std::vector<ArgumentSlot> slots;
            for (const auto& a : n["arguments"]) {
                ArgumentSlot slot;
                if (!a.is_object() || !string(a, "port", slot.port)) return reject("malformed argument slot"), std::nullopt;
                if (a.contains("named")) {
                    if (!a["named"].is_boolean()) return reject("`named` must be a boolean"), std::nullopt;
                    slot.named = a["named"].get<bool>();
                }
                slots.push_back(std::move(slot));
            }
            node.arguments = std::move(slots);
        }
        if (n.contains("results")) {
            if (!n["results"].is_array()) return reject("`results` must be an array"), std::nullopt;
            for (const auto& r : n["results"]) {
                if (!r.is_string()) return reject("result ports must be strings"), std::nullopt;
                node.results.push_back(r.get<std::string>());
            }
        }
        if (n.contains("assignees")) {
            if (!n["assignees"].is_number_integer() || n["assignees"].get<int>() < 0)
                return reject("`assignees` must be a non-negative integer"), std::nullopt;
            node.assignees = n["assignees"].get<int>();
        }
        if (node.kind == NodeKind::Expression) {
            if (!string(n, "source", node.source)) return std::nullopt;
        } else if (node.processName.empty()) {
            return reject("node `" + node.id + "` needs a `processName`"), std::nullopt;
        }
        return node;
    }

    bool validate(const GraphDoc& doc) {
        std::map<std::string, const GraphNode*> nodes;
        std::vector<int> indices;
        for (const auto& n : doc.nodes) {
            if (n.id.empty()) return reject("node ids must not be empty");
            if (!nodes.emplace(n.id, &n).second) return reject("duplicate node id `" + n.id + "`");
            indices.push_back(n.index);
        }
        std::sort(indices.begin(), indices.end());
        for (std::size_t i = 0; i < indices.size(); ++i)
            if (indices[i] != static_cast<int>(i)) return reject("node indices must be a permutation of 0.." + std::to_string(indices.size() - 1));

        auto hasResult = [&](const PortRef& p) {
            const GraphNode* n = nodes.at(p.node);
            return n->results.empty() || std::find(n->results.begin(), n->results.end(), p.port) != n->results.end();
        };
        std::map<std::string, PortRef> sources;
        std::map<std::pair<std::string, std::string>, std::string> names;
        auto bind = [&](const std::string& var, const PortRef& from) {
            if (var.empty()) return reject("variable names must not be empty");
            auto [it, inserted] = sources.emplace(var, from);
            if (!inserted && !(it->second == from)) return reject("variable `" + var + "` comes from two different ports");
            auto [nameIt, fresh] = names.emplace(std::make_pair(from.node, from.port), var);
            if (!fresh && nameIt->second != var) return reject("port " + from.node + "." + from.port + " carries two variable names");
            return true;
        };

        std::set<std::pair<std::string, std::string>> fed;
        for (const auto& e : doc.edges) {
            if (nodes.count(e.from.node) == 0 || nodes.count(e.to.node) == 0)
                return reject("edge `" + e.varName + "` refers to an unknown node");
            if (!hasResult(e.from)) return reject("edge `" + e.varName + "` starts at unknown port `" + e.from.port + "`");
            const GraphNode* target = nodes.at(e.to.node);
            if (e.to.port == kReceiverPort) {
                if (target->kind != NodeKind::Method) return reject("only method nodes have a receiver port");
            } else if (target->arguments) {
                const auto& args = *target->arguments;
                if (std::none_of(args.begin(), args.end(), [&](const ArgumentSlot& a) { return a.port == e.to.port; }))
                    return reject("edge `" + e.varName + "` ends at unknown port `" + e.to.port + "`");
            }
            if (!fed.emplace(e.to.node, e.to.port).second)
                return reject("port " + e.to.node + "." + e.to.port + " has more than one incoming edge");
            if (!bind(e.varName, e.from)) return false;
        }
        std::set<std::pair<std::string, std::string>> consumed;
        for (const auto& e : doc.edges) consumed.emplace(e.from.node, e.from.port);
        for (const auto& o : doc.outputs) {
            if (nodes.count(o.from.node) == 0) return reject("output `" + o.varName + "` refers to an unknown node");
            if (!hasResult(o.from)) return reject("output `" + o.varName + "` starts at unknown port `" + o.from.port + "`");
            if (consumed.count({o.from.node, o.from.port}) != 0)
                return reject("output `" + o.varName + "` is consumed by an edge");
            if (!bind(o.varName, o.from)) return false;
        }
        for (const auto& n : doc.nodes) {
            std::set<std::string> inputs;
            auto claim = [&](const std::string& port) {
                if (fed.count({n.id, port}) != 0 || !inputs.insert(port).second)
                    return reject("port " + n.id + "." + port + " has more than one input");
                return true;
            };
            for (const auto& [port, v] : n.literals)
                if (!claim(port)) return false;
            for (const auto& [port, v] : n.lambdaSources)
                if (!claim(port)) return false;
            for (const auto& [port, v] : n.expressions)
                if (!claim(port)) return false;
        }
        return true;
    }

    std::string error_;
};

} // namespace

std::string encodeGraph(const GraphDoc& doc) {
    json root = {{"version", doc.version},
                 {"pipelineName", doc.pipelineName},
                 {"nodes", json::array()},
                 {"edges", json::array()},
                 {"outputs", json::array()}};
    for (const auto& n : doc.nodes) root["nodes"].push_back(nodeJson(n));
    for (const auto& e : doc.edges)
        root["edges"].push_back({{"from", portJson(e.from)}, {"to", portJson(e.to)}, {"varName", e.varName}});
    for (const auto& o : doc.outputs) root["outputs"].push_back({{"from", portJson(o.from)}, {"varName", o.varName}});
    return root.dump(-1, ' ', false, json::error_handler_t::replace);
}

DecodeResult decodeGraph(std::string_view text) { return Decoder().run(text); }

} // namespace safepipe::graphsync
