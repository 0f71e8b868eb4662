#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "safepipe/diagnostic.hpp"
#include "safepipe/semantics/analysis.hpp"
#include "safepipe/syntax/ast.hpp"

namespace safepipe::graphsync {

inline constexpr int kGraphVersion = 1;

/// Port that feeds the receiver of a method node.
inline constexpr const char* kReceiverPort = "this";
/// Single result port of an expression node.
inline constexpr const char* kValuePort = "value";

enum class NodeKind { Function, Method, Expression };

/// Hidden literal input: a constant, possibly negated, or a list of them.
struct Literal {
    std::variant<std::int64_t, double, std::string, bool, std::vector<Literal>> value;
    bool operator==(const Literal&) const = default;
};

struct ArgumentSlot {
    std::string port;
    bool named = false;
    bool operator==(const ArgumentSlot&) const = default;
};

struct GraphNode {
    std::string id;
    /// Function, class (constructor) or method name; empty for expression nodes.
    std::string processName;
    NodeKind kind = NodeKind::Function;
    std::optional<std::string> receiverVar;
    int index = 0;
    std::map<std::string, Literal> literals;
    std::map<std::string, std::string> lambdaSources;
    /// Inputs that are neither edges, literals nor lambdas (nested calls,
    /// global references), as formatted source text.
    std::map<std::string, std::string> expressions;
    /// Argument order as written; absent for nodes created in the editor.
    std::optional<std::vector<ArgumentSlot>> arguments;
    /// Result ports in declaration order.
    std::vector<std::string> results;
    /// Number of assignees in the statement (0 for an expression
    /// statement); absent for nodes created in the editor.
    std::optional<int> assignees;
    /// Whole right-hand side of an expression node.
    std::string source;
    bool operator==(const GraphNode&) const = default;
};

struct PortRef {
    std::string node;
    std::string port;
    bool operator==(const PortRef&) const = default;
};

struct GraphEdge {
    PortRef from;
    PortRef to;
    std::string varName;
    bool operator==(const GraphEdge&) const = default;
};

struct DanglingOutput {
    PortRef from;
    std::string varName;
    bool operator==(const DanglingOutput&) const = default;
};

struct GraphDoc {
    int version = kGraphVersion;
    std::string pipelineName;
    std::vector<GraphNode> nodes;
    std::vector<GraphEdge> edges;
    std::vector<DanglingOutput> outputs;
    bool operator==(const GraphDoc&) const = default;

    [[nodiscard]] const GraphNode* findNode(const std::string& id) const;
};

/// One node per top-level statement. Resolved calls become function or
/// method nodes; anything else becomes an expression node holding its
/// source. Arguments that are top-level variables become edges.
GraphDoc toGraph(const semantics::PipelineAnalysis& pipeline, const semantics::SymbolTable& symbols);

struct PipelineResult {
    std::optional<syntax::PipelineDecl> pipeline;
    Diagnostics diagnostics; ///< E071-E073, plus syntax errors in embedded sources
};

/// Rebuilds the pipeline: statements in topological order with ties broken
/// by node index, then id.
PipelineResult fromGraph(const GraphDoc& doc, const semantics::SymbolTable& symbols);

/// Canonical JSON: sorted keys, no insignificant whitespace.
std::string encodeGraph(const GraphDoc& doc);

struct DecodeResult {
    std::optional<GraphDoc> doc;
    Diagnostics diagnostics; ///< E074
};

/// Parses and validates the structural invariants. Cycles are left to
/// `fromGraph` (E071).
DecodeResult decodeGraph(std::string_view json);

} // namespace safepipe::graphsync
