#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "safepipe/diagnostic.hpp"
#include "safepipe/semantics/constant.hpp"
#include "safepipe/semantics/types.hpp"
#include "safepipe/syntax/ast.hpp"

namespace safepipe::semantics {

/// A global function or a method, with its signature translated to types.
struct FunctionSymbol {
    syntax::FunDecl decl;
    std::string pythonModule;
    std::optional<std::string> owner; ///< declaring class for methods
    std::vector<std::string> typeParams;
    std::map<std::string, Type> typeParamBounds;
    std::vector<Type> paramTypes;
    std::vector<Type> resultTypes;

    [[nodiscard]] std::optional<std::size_t> paramIndex(const std::string& name) const;
    [[nodiscard]] std::string pythonName() const; ///< `@PythonName`, else the snake_case name
};

struct ClassSymbol {
    syntax::ClassDecl decl;
    std::string pythonModule;
    bool tabular = false; ///< annotated `@Tabular` (not inherited; see SymbolTable::isTabular)
    std::map<std::string, FunctionSymbol> methods;
    std::map<std::string, Type> attributes;
};

struct EnumSymbol {
    syntax::EnumDecl decl;
    std::string pythonModule;
};

/// Global declarations from all loaded stub files. Built once per
/// compilation and read-only afterwards.
struct SymbolTable {
    TypeContext types;
    std::map<std::string, FunctionSymbol> functions;
    std::map<std::string, ClassSymbol> classes;
    std::map<std::string, EnumSymbol> enums;

    [[nodiscard]] const FunctionSymbol* findFunction(const std::string& name) const;
    [[nodiscard]] const ClassSymbol* findClass(const std::string& name) const;
    [[nodiscard]] const EnumSymbol* findEnum(const std::string& name) const;

    struct MemberLookup {
        const ClassSymbol* owner = nullptr;
        Substitution bindings; ///< owner's type params as seen from the receiver
    };
    /// Finds the class declaring `member` (a method or attribute) along the
    /// `sub` chain of `receiver`.
    [[nodiscard]] std::optional<MemberLookup> findMember(const ClassType& receiver, const std::string& member) const;
    [[nodiscard]] const FunctionSymbol* findMethod(const std::string& className, const std::string& method) const;

    /// A class type annotated `@Tabular`, directly or through its supertypes.
    [[nodiscard]] bool isTabular(const Type& type) const;
};

enum class CallKind { Function, Method, Constructor, Value };

/// Everything later stages need to know about one checked call.
struct CallSite {
    const syntax::Expression* expr = nullptr; ///< the Call node
    CallKind kind = CallKind::Value;
    std::string function;  ///< function or method name
    std::string className; ///< declaring class (methods) or constructed class
    const syntax::Expression* receiver = nullptr;
    /// Argument expression bound to each parameter; nullptr when defaulted.
    std::vector<const syntax::Expression*> args;
    /// Compile-time value per parameter (defaults included).
    std::vector<ConstValue> constArgs;
    std::vector<Type> resultTypes;
    bool rejected = false; ///< the type checker reported an error on this call
    std::size_t statement = 0; ///< index of the enclosing top-level statement
    bool inLambda = false;
};

struct VariableInfo {
    std::optional<Type> type; ///< nullopt when inference failed upstream
    std::size_t statement = 0;
    std::size_t resultIndex = 0;
    const syntax::Expression* definition = nullptr;
    bool soleAssignee = false; ///< only target of its assignment, so constants fold through it
    SourceSpan span;
};

/// Per-pipeline facts. Holds pointers into the analyzed Program, which must
/// outlive it.
struct PipelineAnalysis {
    const syntax::PipelineDecl* pipeline = nullptr;
    std::map<std::string, VariableInfo> variables; ///< top-level variables
    std::vector<CallSite> calls;                   ///< in evaluation order
    std::map<const syntax::Expression*, std::size_t> callIndex;
    std::map<const syntax::Expression*, Type> expressionTypes;

    [[nodiscard]] const CallSite* callAt(const syntax::Expression* call) const;
    [[nodiscard]] ConstValue constant(const syntax::Expression& expr) const;
};

struct ResolveResult {
    SymbolTable symbols;
    Diagnostics diagnostics; ///< stub validation plus E010-E012 in pipelines
};

struct TypeCheckResult {
    std::vector<PipelineAnalysis> pipelines; ///< one per pipeline, program order
    Diagnostics diagnostics;                 ///< E020-E022, E050-E052
};

/// Builds the symbol table from the stubs and resolves every name used in
/// the pipelines.
ResolveResult resolve(const syntax::Program& program);

/// Checks every call against its stub and infers variable types.
TypeCheckResult checkTypes(const syntax::Program& program, const SymbolTable& symbols);

/// Converts a stub-level type annotation. Unknown names report E010 and
/// become `Any`.
Type toType(const syntax::TypeRef& ref, const SymbolTable& symbols, const std::vector<std::string>& typeVars,
            Diagnostics* diagnostics = nullptr);

/// Type of a stub constant: Int, Float, String or Boolean.
Type constantType(const syntax::Constant& constant);

} // namespace safepipe::semantics
