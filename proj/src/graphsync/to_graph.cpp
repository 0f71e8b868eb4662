#include <set>

#include "graphsync/literal.hpp"
#include "safepipe/graphsync/graph.hpp"
#include "safepipe/syntax/formatter.hpp"

namespace safepipe::graphsync {

using namespace syntax;

const GraphNode* GraphDoc::findNode(const std::string& id) const {
    for (const auto& n : nodes)
        if (n.id == id) return &n;
    return nullptr;
}

namespace {

class GraphBuilder {
public:
    GraphBuilder(const semantics::PipelineAnalysis& pipeline, const semantics::SymbolTable& symbols)
        : pipeline_(pipeline), symbols_(symbols) {}

    GraphDoc run() {
        const PipelineDecl& decl = *pipeline_.pipeline;
        doc_.pipelineName = decl.name;
        for (std::size_t i = 0; i < decl.body.size(); ++i) statement(decl.body[i], static_cast<int>(i));
        for (const auto& [var, from] : producers_) {
            if (used_.count(var) == 0) dangling_.emplace(std::make_pair(order_.at(var), var), DanglingOutput{from, var});
        }
        for (auto& [key, output] : dangling_) doc_.outputs.push_back(std::move(output));
        return std::move(doc_);
    }

private:
    void statement(const Statement& s, int index) {
        GraphNode node;
        node.id = "n" + std::to_string(index);
        node.index = index;
        const auto* assignment = std::get_if<Assignment>(&s.node);
        const int count = assignment != nullptr ? static_cast<int>(assignment->assignees.size()) : 0;
        node.assignees = count;

        std::vector<GraphEdge> edges;
        if (!callNode(s.expression(), count, node, edges)) {
            GraphNode plain;
            plain.id = node.id;
            plain.index = index;
            plain.assignees = count;
            plain.kind = NodeKind::Expression;
            plain.source = formatExpression(s.expression());
            for (int r = 0; r < std::max(count, 1); ++r)
                plain.results.push_back(r == 0 ? std::string(kValuePort) : kValuePort + std::to_string(r));
            node = std::move(plain);
            edges.clear();
        }
        for (auto& e : edges) {
            used_.insert(e.varName);
            doc_.edges.push_back(std::move(e));
        }
        if (assignment != nullptr) {
            for (std::size_t r = 0; r < assignment->assignees.size(); ++r) {
                const auto& target = assignment->assignees[r];
                if (target.isWildcard()) continue;
                producers_[*target.name] = PortRef{node.id, node.results[r]};
                order_[*target.name] = index * 1000 + static_cast<int>(r);
                used_.erase(*target.name);
            }
        }
        doc_.nodes.push_back(std::move(node));
    }

    /// Input of a port: an edge from a top-level variable, a literal, a
    /// lambda or formatted source.
    void input(GraphNode& node, const std::string& port, const Expression& value, std::vector<GraphEdge>& edges) {
        if (const auto* ref = value.as<Reference>(); ref != nullptr && producers_.count(ref->name) != 0) {
            edges.push_back({producers_.at(ref->name), {node.id, port}, ref->name});
            return;
        }
        if (auto literal = toLiteral(value)) {
            node.literals[port] = std::move(*literal);
            return;
        }
        if (value.as<Lambda>() != nullptr) {
            node.lambdaSources[port] = formatExpression(value);
            return;
        }
        node.expressions[port] = formatExpression(value);
    }

    bool callNode(const Expression& rhs, int count, GraphNode& node, std::vector<GraphEdge>& edges) {
        const auto* call = rhs.as<Call>();
        const semantics::CallSite* site = call != nullptr ? pipeline_.callAt(&rhs) : nullptr;
        if (site == nullptr || site->rejected) return false;

        const semantics::FunctionSymbol* fn = nullptr;
        switch (site->kind) {
        case semantics::CallKind::Function:
            if (call->callee->as<Reference>() == nullptr) return false;
            fn = symbols_.findFunction(site->function);
            if (fn == nullptr) return false;
            node.kind = NodeKind::Function;
            break;
        case semantics::CallKind::Constructor:
            if (call->callee->as<Reference>() == nullptr) return false;
            node.kind = NodeKind::Function;
            node.results = {"instance"};
            break;
        case semantics::CallKind::Method: {
            fn = symbols_.findMethod(site->className, site->function);
            const auto* access = call->callee->as<MemberAccess>();
            if (fn == nullptr || access == nullptr) return false;
            node.kind = NodeKind::Method;
            if (const auto* ref = access->receiver->as<Reference>(); ref != nullptr && producers_.count(ref->name) != 0)
                node.receiverVar = ref->name;
            input(node, kReceiverPort, *access->receiver, edges);
            break;
        }
        case semantics::CallKind::Value: return false;
        }
        node.processName = site->function;
        if (fn != nullptr)
            for (const auto& r : fn->decl.results) node.results.push_back(r.name);
        if (count > static_cast<int>(node.results.size())) return false;

        std::vector<ArgumentSlot> slots;
        for (const Argument& a : call->args) {
            std::optional<std::size_t> param;
            for (std::size_t j = 0; j < site->args.size(); ++j)
                if (site->args[j] == &*a.value) param = j;
            if (!param || fn == nullptr || *param >= fn->decl.params.size()) return false;
            const std::string& port = fn->decl.params[*param].name;
            slots.push_back({port, a.name.has_value()});
            input(node, port, *a.value, edges);
        }
        node.arguments = std::move(slots);
        return true;
    }

    const semantics::PipelineAnalysis& pipeline_;
    const semantics::SymbolTable& symbols_;
    GraphDoc doc_;
    std::map<std::string, PortRef> producers_;
    std::map<std::string, int> order_;
    std::set<std::string> used_;
    std::map<std::pair<int, std::string>, DanglingOutput> dangling_;
};

} // namespace

GraphDoc toGraph(const semantics::PipelineAnalysis& pipeline, const semantics::SymbolTable& symbols) {
    return GraphBuilder(pipeline, symbols).run();
}

} // namespace safepipe::graphsync
