#pragma once

/// Abstract syntax for pipeline files (`.sdspipe`) and stub files
/// (`.sdsstub`). The AST is the hub every other view translates to and from:
/// the checkers, the formatter, the Python emitter, and the dataflow graph.
///
/// Node equality is structural. Every node derives from `Located`, whose
/// comparison ignores the span, so `a == b` on two trees means "same program"
/// regardless of where either was parsed from.

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "safepipe/box.hpp"
#include "safepipe/source_span.hpp"

namespace safepipe::syntax {

struct Located {
    SourceSpan span;
    friend bool operator==(const Located&, const Located&) { return true; }
};

//===----------------------------------------------------------------------===//
// Types and constants (stub language)
//===----------------------------------------------------------------------===//

/// Compile-time constant appearing in stubs: defaults and refinement bounds.
using Constant = std::variant<std::int64_t, double, std::string, bool>;

enum class Comparator { Less, LessEq, Greater, GreaterEq, Equal, NotEqual };

struct TypeRef;

struct NamedTypeRef {
    std::string name;
    std::vector<TypeRef> args;
    bool operator==(const NamedTypeRef&) const = default;
};

struct UnionTypeRef {
    std::vector<TypeRef> members;
    bool operator==(const UnionTypeRef&) const = default;
};

struct FunctionTypeRef {
    std::vector<TypeRef> params;
    std::vector<TypeRef> results;
    bool operator==(const FunctionTypeRef&) const = default;
};

struct Constraint : Located {
    Comparator op = Comparator::Equal;
    Constant value;
    bool operator==(const Constraint&) const = default;
};

struct RefinedTypeRef {
    Box<TypeRef> base;
    std::vector<Constraint> constraints;
    bool operator==(const RefinedTypeRef&) const = default;
};

struct TypeRef : Located {
    std::variant<NamedTypeRef, UnionTypeRef, FunctionTypeRef, RefinedTypeRef> node;
    bool operator==(const TypeRef&) const = default;
};

//===----------------------------------------------------------------------===//
// Pipeline language
//===----------------------------------------------------------------------===//

struct Expression;
struct Statement;

struct IntLit {
    std::int64_t value = 0;
    bool operator==(const IntLit&) const = default;
};
struct FloatLit {
    double value = 0.0;
    bool operator==(const FloatLit&) const = default;
};
struct StringLit {
    std::string value;
    bool operator==(const StringLit&) const = default;
};
struct BoolLit {
    bool value = false;
    bool operator==(const BoolLit&) const = default;
};
struct ListLit {
    std::vector<Expression> elements;
    bool operator==(const ListLit&) const = default;
};
struct Reference {
    std::string name;
    bool operator==(const Reference&) const = default;
};
struct MemberAccess {
    Box<Expression> receiver;
    std::string member;
    bool operator==(const MemberAccess&) const = default;
};

struct Argument : Located {
    std::optional<std::string> name; ///< set for `name = value` arguments
    Box<Expression> value;
    bool operator==(const Argument&) const = default;
};

struct Call {
    Box<Expression> callee;
    std::vector<Argument> args;
    bool operator==(const Call&) const = default;
};

struct LambdaParam : Located {
    std::string name;
    std::optional<TypeRef> type;
    bool operator==(const LambdaParam&) const = default;
};

struct Lambda {
    std::vector<LambdaParam> params;
    std::vector<Statement> body;
    bool operator==(const Lambda&) const = default;
};

struct Negation {
    Box<Expression> operand;
    bool operator==(const Negation&) const = default;
};

struct Expression : Located {
    std::variant<IntLit, FloatLit, StringLit, BoolLit, ListLit, Reference, MemberAccess, Call, Lambda,
                 Negation>
        node;
    bool operator==(const Expression&) const = default;

    template <class T>
    [[nodiscard]] const T* as() const {
        return std::get_if<T>(&node);
    }
};

/// One target of an assignment; an empty name is the `_` wildcard.
struct Assignee : Located {
    std::optional<std::string> name;
    bool operator==(const Assignee&) const = default;
    [[nodiscard]] bool isWildcard() const { return !name.has_value(); }
};

struct Assignment {
    std::vector<Assignee> assignees;
    Expression rhs;
    bool operator==(const Assignment&) const = default;
};

struct ExpressionStatement {
    Expression expr;
    bool operator==(const ExpressionStatement&) const = default;
};

struct Statement : Located {
    std::variant<Assignment, ExpressionStatement> node;
    bool operator==(const Statement&) const = default;

    /// The right-hand side of an assignment or the expression of an
    /// expression statement.
    [[nodiscard]] const Expression& expression() const {
        if (const auto* a = std::get_if<Assignment>(&node)) return a->rhs;
        return std::get<ExpressionStatement>(node).expr;
    }
};

struct PipelineDecl : Located {
    std::string name;
    std::vector<Statement> body;
    bool operator==(const PipelineDecl&) const = default;
};

//===----------------------------------------------------------------------===//
// Stub language
//===----------------------------------------------------------------------===//

struct Annotation : Located {
    std::string name;
    std::optional<std::string> argument;
    bool operator==(const Annotation&) const = default;
};

struct TypeParam : Located {
    std::string name;
    std::optional<TypeRef> bound;
    bool operator==(const TypeParam&) const = default;
};

struct Parameter : Located {
    std::string name;
    TypeRef type;
    std::optional<Constant> defaultValue;
    bool operator==(const Parameter&) const = default;
};

struct Result : Located {
    std::string name;
    TypeRef type;
    bool operator==(const Result&) const = default;
};

/// Column name in a schema clause: either a string literal or the name of a
/// parameter whose call-site argument supplies the value.
struct NameArg : Located {
    bool isLiteral = true;
    std::string text;
    bool operator==(const NameArg&) const = default;
};

enum class EffectKind { Add, Remove, Rename, Retype, Keep, Drop };

/// `.add(n: T)`, `.remove(n)`, `.rename(a, b)`, `.retype(n, T)`, `.keep(ns)`, `.drop(ns)`
struct EffectOp : Located {
    EffectKind kind = EffectKind::Keep;
    std::vector<NameArg> names;
    std::optional<TypeRef> type;
    bool operator==(const EffectOp&) const = default;
};

struct SchemaExpr : Located {
    bool external = false;  ///< `external(param)` loads a dataset by key
    std::string source;     ///< parameter (or `this`) the schema starts from
    std::vector<EffectOp> ops;
    bool operator==(const SchemaExpr&) const = default;
};

struct SchemaAssignment : Located {
    std::string target; ///< result name
    SchemaExpr value;
    bool operator==(const SchemaAssignment&) const = default;
};

struct SchemaClause : Located {
    std::vector<SchemaAssignment> assignments;
    bool operator==(const SchemaClause&) const = default;
};

struct RequireClause : Located {
    std::string table;
    NameArg column;
    std::optional<TypeRef> type;
    bool operator==(const RequireClause&) const = default;
};

struct FunDecl : Located {
    std::vector<Annotation> annotations;
    std::string name;
    std::vector<TypeParam> typeParams;
    std::vector<Parameter> params;
    std::vector<Result> results;
    std::vector<SchemaClause> schemaClauses;
    std::vector<RequireClause> requireClauses;
    bool operator==(const FunDecl&) const = default;
};

struct AttrDecl : Located {
    std::string name;
    TypeRef type;
    bool operator==(const AttrDecl&) const = default;
};

struct ProtocolRegex;

struct ProtoToken {
    std::string method;
    bool operator==(const ProtoToken&) const = default;
};
struct ProtoAny {
    bool operator==(const ProtoAny&) const = default;
};
struct ProtoSeq {
    std::vector<ProtocolRegex> items;
    bool operator==(const ProtoSeq&) const = default;
};
struct ProtoAlt {
    std::vector<ProtocolRegex> options;
    bool operator==(const ProtoAlt&) const = default;
};
enum class RepeatKind { Star, Plus, Opt };
struct ProtoRepeat {
    RepeatKind kind = RepeatKind::Star;
    Box<ProtocolRegex> inner;
    bool operator==(const ProtoRepeat&) const = default;
};

/// Behavior protocol: a regular expression over method names. The parser
/// produces a canonical shape: a `ProtoSeq` always has zero or at least two
/// items and a `ProtoAlt` at least two options.
struct ProtocolRegex : Located {
    std::variant<ProtoToken, ProtoAny, ProtoSeq, ProtoAlt, ProtoRepeat> node;
    bool operator==(const ProtocolRegex&) const = default;
};

struct ClassDecl : Located {
    std::vector<Annotation> annotations;
    std::string name;
    std::vector<TypeParam> typeParams;
    std::optional<TypeRef> superType;
    std::vector<AttrDecl> attributes;
    std::vector<FunDecl> methods;
    std::optional<ProtocolRegex> protocol;
    bool operator==(const ClassDecl&) const = default;
};

struct EnumDecl : Located {
    std::string name;
    std::vector<std::string> variants;
    bool operator==(const EnumDecl&) const = default;
};

using Declaration = std::variant<FunDecl, ClassDecl, EnumDecl>;

const std::string& declarationName(const Declaration& decl);
const SourceSpan& declarationSpan(const Declaration& decl);

struct StubFile {
    std::string path;
    std::optional<std::string> pythonModule;
    std::vector<Declaration> declarations;
    bool operator==(const StubFile& other) const {
        return pythonModule == other.pythonModule && declarations == other.declarations;
    }
};

struct PipelineFile {
    std::string path;
    std::vector<PipelineDecl> pipelines;
    bool operator==(const PipelineFile& other) const { return pipelines == other.pipelines; }
};

/// Everything loaded for one compilation: all pipelines and all stubs.
struct Program {
    std::vector<PipelineFile> pipelineFiles;
    std::vector<StubFile> stubFiles;
};

/// Annotation argument lookup, e.g. `annotationArgument(decl.annotations, "PythonName")`.
std::optional<std::string> annotationArgument(const std::vector<Annotation>& annotations,
                                              std::string_view name);
bool hasAnnotation(const std::vector<Annotation>& annotations, std::string_view name);

} // namespace safepipe::syntax
