#include <algorithm>
#include <queue>
#include <set>

#include "graphsync/literal.hpp"
#include "safepipe/graphsync/graph.hpp"
#include "safepipe/syntax/parser.hpp"

namespace safepipe::graphsync {

using namespace syntax;
using semantics::FunctionSymbol;
using semantics::Type;

namespace {

const SourceSpan kGraphSpan{"<graph>", 1, 1, 1, 1};

/// Signature of a node after looking at its receiver type.
struct Process {
    const FunctionSymbol* fn = nullptr;
    semantics::Substitution bindings;
    bool constructor = false;
};

class Rebuilder {
public:
    Rebuilder(const GraphDoc& doc, const semantics::SymbolTable& symbols) : doc_(doc), symbols_(symbols) {}

    PipelineResult run() {
        PipelineResult result;
        for (const auto& n : doc_.nodes) nodes_[n.id] = &n;
        for (const auto& e : doc_.edges) {
            names_[{e.from.node, e.from.port}] = e.varName;
            incoming_[{e.to.node, e.to.port}] = &e;
        }
        for (const auto& o : doc_.outputs) names_[{o.from.node, o.from.port}] = o.varName;

        checkProcesses();
        auto order = topologicalOrder();
        if (!diagnostics_.empty() || !order) {
            result.diagnostics = std::move(diagnostics_);
            return result;
        }
        PipelineDecl decl;
        decl.name = doc_.pipelineName;
        int unused = 0;
        for (const GraphNode* n : *order) {
            auto s = statement(*n, unused);
            if (s) decl.body.push_back(std::move(*s));
        }
        if (!diagnostics_.empty()) {
            result.diagnostics = std::move(diagnostics_);
            return result;
        }
        result.pipeline = std::move(decl);
        return result;
    }

private:
    void report(const char* code, std::string message) { diagnostics_.push_back(makeDiagnostic(code, std::move(message), kGraphSpan)); }

    bool anyClassHasMethod(const std::string& method) const {
        return std::any_of(symbols_.classes.begin(), symbols_.classes.end(),
                           [&](const auto& c) { return c.second.methods.count(method) != 0; });
    }

    void checkProcesses() {
        for (const auto& n : doc_.nodes) {
            if (n.kind == NodeKind::Function && symbols_.findFunction(n.processName) == nullptr &&
                symbols_.findClass(n.processName) == nullptr)
                report("E073", "node `" + n.id + "` uses unknown process `" + n.processName + "`");
            if (n.kind == NodeKind::Method && !anyClassHasMethod(n.processName))
                report("E073", "node `" + n.id + "` uses unknown method `" + n.processName + "`");
        }
    }

    std::optional<std::vector<const GraphNode*>> topologicalOrder() {
        std::map<std::string, int> indegree;
        std::map<std::string, std::vector<std::string>> successors;
        for (const auto& n : doc_.nodes) indegree[n.id] = 0;
        for (const auto& e : doc_.edges) {
            ++indegree[e.to.node];
            successors[e.from.node].push_back(e.to.node);
        }
        using Key = std::pair<int, std::string>;
        std::priority_queue<Key, std::vector<Key>, std::greater<>> ready;
        for (const auto& n : doc_.nodes)
            if (indegree[n.id] == 0) ready.emplace(n.index, n.id);
        std::vector<const GraphNode*> order;
        while (!ready.empty()) {
            const std::string id = ready.top().second;
            ready.pop();
            order.push_back(nodes_.at(id));
            for (const auto& next : successors[id])
                if (--indegree[next] == 0) ready.emplace(nodes_.at(next)->index, next);
        }
        if (order.size() == doc_.nodes.size()) return order;
        std::string cycle;
        for (const auto& [id, degree] : indegree)
            if (degree > 0) cycle += (cycle.empty() ? "" : ", ") + id;
        report("E071", "the graph contains a cycle through nodes " + cycle);
        return std::nullopt;
    }

    std::optional<Type> portType(const std::string& node, const std::string& port) const {
        auto it = resultTypes_.find({node, port});
        if (it == resultTypes_.end()) return std::nullopt;
        return it->second;
    }

    Process process(const GraphNode& n) const {
        Process p;
        if (n.kind == NodeKind::Function) {
            p.fn = symbols_.findFunction(n.processName);
            p.constructor = p.fn == nullptr && symbols_.findClass(n.processName) != nullptr;
            return p;
        }
        if (n.kind != NodeKind::Method) return p;
        auto edge = incoming_.find({n.id, kReceiverPort});
        if (edge != incoming_.end()) {
            auto type = portType(edge->second->from.node, edge->second->from.port);
            const auto* cls = type ? type->as<semantics::ClassType>() : nullptr;
            if (cls != nullptr) {
                if (auto found = symbols_.findMember(*cls, n.processName)) {
                    auto m = found->owner->methods.find(n.processName);
                    if (m != found->owner->methods.end()) {
                        p.fn = &m->second;
                        p.bindings = found->bindings;
                    }
                }
                return p;
            }
        }
        for (const auto& [name, cls] : symbols_.classes) {
            auto m = cls.methods.find(n.processName);
            if (m != cls.methods.end()) {
                p.fn = &m->second;
                break;
            }
        }
        return p;
    }

    static std::optional<Type> concrete(const Type& t, const semantics::Substitution& bindings) {
        Type s = semantics::substitute(t, bindings);
        if (semantics::mentionsTypeVar(s)) return std::nullopt;
        return s;
    }

    std::optional<Expression> parse(const std::string& source, const std::string& what) {
        auto r = parseExpressionSource(source, "<graph>");
        if (!r.diagnostics.empty() || !r.expression) {
            report("E074", "cannot parse " + what + ": " +
                               (r.diagnostics.empty() ? std::string("empty") : r.diagnostics.front().message));
            return std::nullopt;
        }
        return std::move(r.expression);
    }

    /// Expression feeding `port`, or nullopt if the port has no input.
    std::optional<Expression> input(const GraphNode& n, const std::string& port, const Process& p) {
        const std::string where = "input `" + port + "` of node `" + n.id + "`";
        if (auto edge = incoming_.find({n.id, port}); edge != incoming_.end()) {
            checkEdge(n, port, *edge->second, p);
            Expression e;
            e.node = Reference{edge->second->varName};
            return e;
        }
        if (auto it = n.literals.find(port); it != n.literals.end()) return fromLiteral(it->second);
        if (auto it = n.lambdaSources.find(port); it != n.lambdaSources.end()) return parse(it->second, where);
        if (auto it = n.expressions.find(port); it != n.expressions.end()) return parse(it->second, where);
        return std::nullopt;
    }

    void checkEdge(const GraphNode& n, const std::string& port, const GraphEdge& edge, const Process& p) {
        if (p.fn == nullptr || port == kReceiverPort) return;
        auto index = p.fn->paramIndex(port);
        if (!index) {
            report("E072", "edge `" + edge.varName + "` ends at `" + port + "`, which is not a parameter of `" +
                               n.processName + "`");
            return;
        }
        auto source = portType(edge.from.node, edge.from.port);
        auto target = concrete(p.fn->paramTypes[*index], p.bindings);
        if (!source || !target) return;
        if (!semantics::isSubtype(*source, semantics::unrefined(*target), symbols_.types))
            report("E072", "edge `" + edge.varName + "` carries " + semantics::toString(*source) + " but port `" +
                               port + "` of `" + n.processName + "` expects " + semantics::toString(*target));
    }

    /// Argument slots for nodes made in the editor: inputs in parameter
    /// order, positional until the first gap.
    std::vector<ArgumentSlot> deriveSlots(const GraphNode& n, const Process& p) const {
        std::set<std::string> ports;
        for (const auto& [key, edge] : incoming_)
            if (key.first == n.id && key.second != kReceiverPort) ports.insert(key.second);
        for (const auto& [port, v] : n.literals) ports.insert(port);
        for (const auto& [port, v] : n.lambdaSources) ports.insert(port);
        for (const auto& [port, v] : n.expressions)
            if (port != kReceiverPort) ports.insert(port);
        std::vector<ArgumentSlot> slots;
        bool gap = false;
        if (p.fn != nullptr) {
            for (const auto& param : p.fn->decl.params) {
                if (ports.erase(param.name) == 0) {
                    gap = true;
                    continue;
                }
                slots.push_back({param.name, gap});
            }
        }
        for (const auto& port : ports) slots.push_back({port, true});
        return slots;
    }

    std::vector<std::string> resultPorts(const GraphNode& n, const Process& p) const {
        if (!n.results.empty()) return n.results;
        if (p.constructor) return {"instance"};
        std::vector<std::string> out;
        if (p.fn != nullptr)
            for (const auto& r : p.fn->decl.results) out.push_back(r.name);
        if (n.kind == NodeKind::Expression) out.emplace_back(kValuePort);
        return out;
    }

    std::optional<Statement> statement(const GraphNode& n, int& unused) {
        const Process p = process(n);
        std::optional<Expression> rhs;
        if (n.kind == NodeKind::Expression) {
            rhs = parse(n.source, "source of node `" + n.id + "`");
        } else {
            Call call;
            if (n.kind == NodeKind::Function) {
                Expression callee;
                callee.node = Reference{n.processName};
                call.callee = std::move(callee);
            } else {
                std::optional<Expression> receiver = input(n, kReceiverPort, p);
                if (!receiver && n.receiverVar) {
                    receiver.emplace();
                    receiver->node = Reference{*n.receiverVar};
                }
                if (!receiver) {
                    report("E074", "method node `" + n.id + "` has no receiver");
                    return std::nullopt;
                }
                Expression callee;
                callee.node = MemberAccess{std::move(*receiver), n.processName};
                call.callee = std::move(callee);
            }
            for (const auto& slot : n.arguments ? *n.arguments : deriveSlots(n, p)) {
                auto value = input(n, slot.port, p);
                if (!value) {
                    report("E074", "argument `" + slot.port + "` of node `" + n.id + "` has no input");
                    return std::nullopt;
                }
                Argument a;
                if (slot.named) a.name = slot.port;
                a.value = std::move(*value);
                call.args.push_back(std::move(a));
            }
            rhs.emplace();
            rhs->node = std::move(call);
        }
        if (!rhs) return std::nullopt;

        const std::vector<std::string> ports = resultPorts(n, p);
        recordResultTypes(n, p, ports);
        int count = n.assignees.value_or(static_cast<int>(ports.size()));
        for (std::size_t r = 0; r < ports.size(); ++r)
            if (names_.count({n.id, ports[r]}) != 0) count = std::max(count, static_cast<int>(r) + 1);

        Statement s;
        if (count == 0) {
            s.node = ExpressionStatement{std::move(*rhs)};
            return s;
        }
        Assignment a;
        for (int r = 0; r < count; ++r) {
            Assignee target;
            const std::string port = static_cast<std::size_t>(r) < ports.size() ? ports[static_cast<std::size_t>(r)] : "";
            if (auto it = names_.find({n.id, port}); it != names_.end()) target.name = it->second;
            else if (!n.assignees) target.name = "unused" + std::to_string(++unused);
            a.assignees.push_back(std::move(target));
        }
        a.rhs = std::move(*rhs);
        s.node = std::move(a);
        return s;
    }

    void recordResultTypes(const GraphNode& n, const Process& p, const std::vector<std::string>& ports) {
        if (p.constructor) {
            const auto* shape = symbols_.types.findClass(n.processName);
            if (shape != nullptr && shape->typeParams.empty() && !ports.empty())
                resultTypes_[{n.id, ports[0]}] = semantics::classType(n.processName);
            return;
        }
        if (p.fn == nullptr) return;
        for (std::size_t r = 0; r < ports.size() && r < p.fn->resultTypes.size(); ++r)
            if (auto t = concrete(p.fn->resultTypes[r], p.bindings)) resultTypes_[{n.id, ports[r]}] = *t;
    }

    const GraphDoc& doc_;
    const semantics::SymbolTable& symbols_;
    std::map<std::string, const GraphNode*> nodes_;
    std::map<std::pair<std::string, std::string>, std::string> names_;
    std::map<std::pair<std::string, std::string>, const GraphEdge*> incoming_;
    std::map<std::pair<std::string, std::string>, Type> resultTypes_;
    Diagnostics diagnostics_;
};

} // namespace

PipelineResult fromGraph(const GraphDoc& doc, const semantics::SymbolTable& symbols) {
    return Rebuilder(doc, symbols).run();
}

} // namespace safepipe::graphsync
