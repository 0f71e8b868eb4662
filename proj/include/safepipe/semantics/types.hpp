#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "safepipe/box.hpp"
#include "safepipe/syntax/ast.hpp"

namespace safepipe::semantics {

struct Type;

/// Named class type, including the built-ins `Int`, `Float`, `String`,
/// `Boolean` and `List<T>`.
struct ClassType {
    std::string name;
    std::vector<Type> args;
    bool operator==(const ClassType&) const = default;
};

struct EnumType {
    std::string name;
    bool operator==(const EnumType&) const = default;
};

struct FunctionType {
    std::vector<Type> params;
    std::vector<Type> results;
    bool operator==(const FunctionType&) const = default;
};

/// Always built through `makeUnion`: flat, duplicate-free, sorted by
/// canonical spelling, at least two members.
struct UnionType {
    std::vector<Type> members;
    bool operator==(const UnionType&) const = default;
};

struct Bound {
    syntax::Comparator op = syntax::Comparator::Equal;
    syntax::Constant value;
    bool operator==(const Bound&) const = default;
};

/// Always built through `makeRefined`: constraints sorted and unique, never
/// empty.
struct RefinedType {
    Box<Type> base;
    std::vector<Bound> constraints;
    bool operator==(const RefinedType&) const = default;
};

struct TypeVar {
    std::string name;
    bool operator==(const TypeVar&) const = default;
};

struct AnyType {
    bool operator==(const AnyType&) const = default;
};
struct NothingType {
    bool operator==(const NothingType&) const = default;
};

struct Type {
    std::variant<ClassType, EnumType, FunctionType, UnionType, RefinedType, TypeVar, AnyType, NothingType> node;
    bool operator==(const Type&) const = default;

    template <class T>
    [[nodiscard]] const T* as() const {
        return std::get_if<T>(&node);
    }
};

Type classType(std::string name, std::vector<Type> args = {});
Type intType();
Type floatType();
Type stringType();
Type booleanType();
Type listType(Type element);
Type anyType();
Type nothingType();
Type typeVar(std::string name);
Type functionType(std::vector<Type> params, std::vector<Type> results);
Type enumType(std::string name);
Type makeUnion(std::vector<Type> members);
Type makeRefined(Type base, std::vector<Bound> constraints);

/// Canonical spelling, e.g. `union<Int, List<String>>` or
/// `Float where {it >= 0.0, it <= 1.0}`.
std::string toString(const Type& type);
std::string toString(const Bound& bound);

bool isBuiltinTypeName(const std::string& name);

/// Declared class facts the subtype relation needs.
struct ClassShape {
    std::vector<std::string> typeParams;
    std::optional<Type> superType; ///< may mention the type params
};

/// Class hierarchy. A default-constructed context knows only the built-ins.
class TypeContext {
public:
    TypeContext();

    /// Registers a class. Returns false and leaves the context unchanged if
    /// the supertype would close a cycle.
    bool addClass(const std::string& name, ClassShape shape);
    [[nodiscard]] const ClassShape* findClass(const std::string& name) const;

    /// Supertype of `type` with its type arguments substituted.
    [[nodiscard]] std::optional<Type> superOf(const ClassType& type) const;

private:
    std::map<std::string, ClassShape> classes_;
};

bool isSubtype(const Type& a, const Type& b, const TypeContext& context);

using Substitution = std::map<std::string, Type>;

/// Replaces bound type variables. Unbound ones become `Any` when
/// `eraseUnbound` is set and stay otherwise.
Type substitute(const Type& type, const Substitution& bindings, bool eraseUnbound = false);

bool mentionsTypeVar(const Type& type);

/// The base of a refined type, or the type itself.
const Type& unrefined(const Type& type);

} // namespace safepipe::semantics
