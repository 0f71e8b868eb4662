#include "safepipe/semantics/types.hpp"

#include <algorithm>

#include "safepipe/syntax/formatter.hpp"

namespace safepipe::semantics {

Type classType(std::string name, std::vector<Type> args) { return Type{ClassType{std::move(name), std::move(args)}}; }
Type intType() { return classType("Int"); }
Type floatType() { return classType("Float"); }
Type stringType() { return classType("String"); }
Type booleanType() { return classType("Boolean"); }
Type listType(Type element) { return classType("List", {std::move(element)}); }
Type anyType() { return Type{AnyType{}}; }
Type nothingType() { return Type{NothingType{}}; }
Type typeVar(std::string name) { return Type{TypeVar{std::move(name)}}; }
Type enumType(std::string name) { return Type{EnumType{std::move(name)}}; }

Type functionType(std::vector<Type> params, std::vector<Type> results) {
    return Type{FunctionType{std::move(params), std::move(results)}};
}

namespace {

void flattenInto(std::vector<Type>& out, Type t) {
    if (auto* u = std::get_if<UnionType>(&t.node)) {
        for (auto& m : u->members) flattenInto(out, std::move(m));
    } else {
        out.push_back(std::move(t));
    }
}

std::string joinTypes(const std::vector<Type>& types) {
    std::string out;
    for (std::size_t i = 0; i < types.size(); ++i) {
        if (i > 0) out += ", ";
        out += toString(types[i]);
    }
    return out;
}

bool sameLength(const std::vector<Type>& a, const std::vector<Type>& b) { return a.size() == b.size(); }

} // namespace

Type makeUnion(std::vector<Type> members) {
    std::vector<Type> flat;
    for (auto& m : members) flattenInto(flat, std::move(m));
    std::vector<std::pair<std::string, Type>> keyed;
    for (auto& m : flat) keyed.emplace_back(toString(m), std::move(m));
    std::sort(keyed.begin(), keyed.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    keyed.erase(std::unique(keyed.begin(), keyed.end(), [](const auto& x, const auto& y) { return x.first == y.first; }),
                keyed.end());
    if (keyed.empty()) return nothingType();
    if (keyed.size() == 1) return std::move(keyed.front().second);
    UnionType u;
    for (auto& [_, t] : keyed) u.members.push_back(std::move(t));
    return Type{std::move(u)};
}

Type makeRefined(Type base, std::vector<Bound> constraints) {
    if (auto* r = std::get_if<RefinedType>(&base.node)) {
        constraints.insert(constraints.end(), r->constraints.begin(), r->constraints.end());
        Type inner = *r->base;
        base = std::move(inner);
    }
    if (constraints.empty()) return base;
    auto key = [](const Bound& b) { return std::tie(b.op, b.value); };
    std::sort(constraints.begin(), constraints.end(), [&](const Bound& x, const Bound& y) { return key(x) < key(y); });
    constraints.erase(std::unique(constraints.begin(), constraints.end()), constraints.end());
    return Type{RefinedType{std::move(base), std::move(constraints)}};
}

std::string toString(const Bound& bound) {
    return "it " + syntax::formatComparator(bound.op) + " " + syntax::formatConstant(bound.value);
}

std::string toString(const Type& type) {
    return std::visit(
        [](const auto& n) -> std::string {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, ClassType>) {
                return n.args.empty() ? n.name : n.name + "<" + joinTypes(n.args) + ">";
            } else if constexpr (std::is_same_v<T, EnumType>) {
                return n.name;
            } else if constexpr (std::is_same_v<T, FunctionType>) {
                return "(" + joinTypes(n.params) + ") -> (" + joinTypes(n.results) + ")";
            } else if constexpr (std::is_same_v<T, UnionType>) {
                return "union<" + joinTypes(n.members) + ">";
            } else if constexpr (std::is_same_v<T, RefinedType>) {
                std::string out = toString(*n.base) + " where {";
                for (std::size_t i = 0; i < n.constraints.size(); ++i) {
                    if (i > 0) out += ", ";
                    out += toString(n.constraints[i]);
                }
                return out + "}";
            } else if constexpr (std::is_same_v<T, TypeVar>) {
                return n.name;
            } else if constexpr (std::is_same_v<T, AnyType>) {
                return "Any";
            } else {
                return "Nothing";
            }
        },
        type.node);
}

bool isBuiltinTypeName(const std::string& name) {
    return name == "Int" || name == "Float" || name == "String" || name == "Boolean" || name == "List" ||
           name == "Any" || name == "Nothing";
}

TypeContext::TypeContext() {
    classes_["Float"] = {};
    classes_["Int"] = ClassShape{{}, floatType()};
    classes_["String"] = {};
    classes_["Boolean"] = {};
    classes_["List"] = ClassShape{{"T"}, std::nullopt};
}

bool TypeContext::addClass(const std::string& name, ClassShape shape) {
    const Type* next = shape.superType ? &*shape.superType : nullptr;
    while (next != nullptr) {
        const auto* c = next->as<ClassType>();
        if (c == nullptr) break;
        if (c->name == name) return false;
        const ClassShape* s = findClass(c->name);
        next = s && s->superType ? &*s->superType : nullptr;
    }
    classes_[name] = std::move(shape);
    return true;
}

const ClassShape* TypeContext::findClass(const std::string& name) const {
    auto it = classes_.find(name);
    return it == classes_.end() ? nullptr : &it->second;
}

std::optional<Type> TypeContext::superOf(const ClassType& type) const {
    const ClassShape* shape = findClass(type.name);
    if (shape == nullptr || !shape->superType) return std::nullopt;
    Substitution bindings;
    for (std::size_t i = 0; i < shape->typeParams.size() && i < type.args.size(); ++i)
        bindings.emplace(shape->typeParams[i], type.args[i]);
    return substitute(*shape->superType, bindings);
}

bool isSubtype(const Type& a, const Type& b, const TypeContext& context) {
    if (a == b) return true;
    if (a.as<NothingType>() || b.as<AnyType>()) return true;
    if (const auto* u = a.as<UnionType>()) {
        return std::all_of(u->members.begin(), u->members.end(),
                           [&](const Type& m) { return isSubtype(m, b, context); });
    }
    if (const auto* u = b.as<UnionType>()) {
        return std::any_of(u->members.begin(), u->members.end(),
                           [&](const Type& m) { return isSubtype(a, m, context); });
    }
    if (a.as<AnyType>() || b.as<NothingType>()) return false;

    if (const auto* ra = a.as<RefinedType>()) {
        if (const auto* rb = b.as<RefinedType>()) {
            if (!isSubtype(*ra->base, *rb->base, context)) return false;
            return std::all_of(rb->constraints.begin(), rb->constraints.end(), [&](const Bound& c) {
                return std::find(ra->constraints.begin(), ra->constraints.end(), c) != ra->constraints.end();
            });
        }
        return isSubtype(*ra->base, b, context);
    }
    if (b.as<RefinedType>()) return false;

    if (const auto* fa = a.as<FunctionType>()) {
        const auto* fb = b.as<FunctionType>();
        if (fb == nullptr || !sameLength(fa->params, fb->params) || !sameLength(fa->results, fb->results))
            return false;
        for (std::size_t i = 0; i < fa->params.size(); ++i)
            if (!isSubtype(fb->params[i], fa->params[i], context)) return false;
        for (std::size_t i = 0; i < fa->results.size(); ++i)
            if (!isSubtype(fa->results[i], fb->results[i], context)) return false;
        return true;
    }

    if (const auto* ca = a.as<ClassType>()) {
        const auto* cb = b.as<ClassType>();
        if (cb == nullptr) return false;
        if (ca->name == cb->name) {
            if (!sameLength(ca->args, cb->args)) return false;
            for (std::size_t i = 0; i < ca->args.size(); ++i) {
                if (!isSubtype(ca->args[i], cb->args[i], context) || !isSubtype(cb->args[i], ca->args[i], context))
                    return false;
            }
            return true;
        }
        auto super = context.superOf(*ca);
        return super && isSubtype(*super, b, context);
    }
    return false;
}

Type substitute(const Type& type, const Substitution& bindings, bool eraseUnbound) {
    auto all = [&](const std::vector<Type>& ts) {
        std::vector<Type> out;
        out.reserve(ts.size());
        for (const auto& t : ts) out.push_back(substitute(t, bindings, eraseUnbound));
        return out;
    };
    return std::visit(
        [&](const auto& n) -> Type {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, ClassType>) {
                return classType(n.name, all(n.args));
            } else if constexpr (std::is_same_v<T, FunctionType>) {
                return functionType(all(n.params), all(n.results));
            } else if constexpr (std::is_same_v<T, UnionType>) {
                return makeUnion(all(n.members));
            } else if constexpr (std::is_same_v<T, RefinedType>) {
                return makeRefined(substitute(*n.base, bindings, eraseUnbound), n.constraints);
            } else if constexpr (std::is_same_v<T, TypeVar>) {
                auto it = bindings.find(n.name);
                if (it != bindings.end()) return it->second;
                return eraseUnbound ? anyType() : type;
            } else {
                return type;
            }
        },
        type.node);
}

bool mentionsTypeVar(const Type& type) {
    auto any = [](const std::vector<Type>& ts) { return std::any_of(ts.begin(), ts.end(), mentionsTypeVar); };
    return std::visit(
        [&](const auto& n) -> bool {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, ClassType>) {
                return any(n.args);
            } else if constexpr (std::is_same_v<T, FunctionType>) {
                return any(n.params) || any(n.results);
            } else if constexpr (std::is_same_v<T, UnionType>) {
                return any(n.members);
            } else if constexpr (std::is_same_v<T, RefinedType>) {
                return mentionsTypeVar(*n.base);
            } else {
                return std::is_same_v<T, TypeVar>;
            }
        },
        type.node);
}

const Type& unrefined(const Type& type) {
    if (const auto* r = type.as<RefinedType>()) return *r->base;
    return type;
}

} // namespace safepipe::semantics
