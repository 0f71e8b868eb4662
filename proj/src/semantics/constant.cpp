#include "safepipe/semantics/constant.hpp"

#include <set>

#include "safepipe/syntax/formatter.hpp"

namespace safepipe::semantics {

bool ConstList::operator==(const ConstList& other) const { return elements == other.elements; }

ConstValue fromConstant(const syntax::Constant& constant) {
    return std::visit([](const auto& v) { return ConstValue{v}; }, constant);
}

std::string toString(const ConstValue& value) {
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, NotConstant>) {
                return "<not constant>";
            } else if constexpr (std::is_same_v<T, std::int64_t>) {
                return std::to_string(v);
            } else if constexpr (std::is_same_v<T, double>) {
                return syntax::formatFloat(v);
            } else if constexpr (std::is_same_v<T, std::string>) {
                return syntax::quoteString(v);
            } else if constexpr (std::is_same_v<T, bool>) {
                return v ? "true" : "false";
            } else {
                std::string out = "[";
                for (std::size_t i = 0; i < v.elements.size(); ++i) {
                    if (i > 0) out += ", ";
                    out += toString(v.elements[i]);
                }
                return out + "]";
            }
        },
        value.value);
}

namespace {

ConstValue evalIn(const syntax::Expression& expr, const ConstEnv& env, std::set<std::string>& visiting) {
    using namespace syntax;
    return std::visit(
        [&](const auto& n) -> ConstValue {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, IntLit> || std::is_same_v<T, FloatLit> || std::is_same_v<T, StringLit> ||
                          std::is_same_v<T, BoolLit>) {
                return ConstValue{n.value};
            } else if constexpr (std::is_same_v<T, ListLit>) {
                ConstList list;
                for (const auto& e : n.elements) {
                    ConstValue v = evalIn(e, env, visiting);
                    if (!v.isConstant()) return {};
                    list.elements.push_back(std::move(v));
                }
                return ConstValue{std::move(list)};
            } else if constexpr (std::is_same_v<T, Negation>) {
                ConstValue v = evalIn(*n.operand, env, visiting);
                if (const auto* i = v.as<std::int64_t>()) {
                    if (*i == INT64_MIN) return {};
                    return ConstValue{-*i};
                }
                if (const auto* d = v.as<double>()) return ConstValue{-*d};
                return {};
            } else if constexpr (std::is_same_v<T, Reference>) {
                const Expression* def = env ? env(n.name) : nullptr;
                // Single assignment keeps the reference graph acyclic; the
                // guard only protects against malformed environments.
                if (def == nullptr || !visiting.insert(n.name).second) return {};
                ConstValue v = evalIn(*def, env, visiting);
                visiting.erase(n.name);
                return v;
            } else {
                return {};
            }
        },
        expr.node);
}

std::optional<double> numeric(const ConstValue& v) {
    if (const auto* i = v.as<std::int64_t>()) return static_cast<double>(*i);
    if (const auto* d = v.as<double>()) return *d;
    return std::nullopt;
}

template <class T>
bool compare(const T& a, syntax::Comparator op, const T& b) {
    using syntax::Comparator;
    switch (op) {
    case Comparator::Less: return a < b;
    case Comparator::LessEq: return a <= b;
    case Comparator::Greater: return a > b;
    case Comparator::GreaterEq: return a >= b;
    case Comparator::Equal: return a == b;
    case Comparator::NotEqual: return a != b;
    }
    return false;
}

bool isEquality(syntax::Comparator op) { return op == syntax::Comparator::Equal || op == syntax::Comparator::NotEqual; }

} // namespace

ConstValue evalConst(const syntax::Expression& expr, const ConstEnv& env) {
    std::set<std::string> visiting;
    return evalIn(expr, env, visiting);
}

bool satisfies(const ConstValue& value, const Bound& bound) {
    const ConstValue b = fromConstant(bound.value);
    // Exact integer comparison when both sides are Int.
    if (const auto* vi = value.as<std::int64_t>()) {
        if (const auto* bi = b.as<std::int64_t>()) return compare(*vi, bound.op, *bi);
    }
    auto vn = numeric(value);
    auto bn = numeric(b);
    if (vn && bn) return compare(*vn, bound.op, *bn);
    if (vn || bn) return false;
    if (!isEquality(bound.op)) return false;
    if (const auto* vs = value.as<std::string>()) {
        const auto* bs = b.as<std::string>();
        return bs != nullptr && compare(*vs, bound.op, *bs);
    }
    if (const auto* vb = value.as<bool>()) {
        const auto* bb = b.as<bool>();
        return bb != nullptr && compare(*vb, bound.op, *bb);
    }
    return false;
}

bool boundFitsBase(const Bound& bound, const Type& base) {
    const auto* c = base.as<ClassType>();
    if (c == nullptr || !c->args.empty()) return false;
    const bool numericBound = std::holds_alternative<std::int64_t>(bound.value) ||
                              std::holds_alternative<double>(bound.value);
    if (c->name == "Int" || c->name == "Float") return numericBound;
    if (c->name == "String") return std::holds_alternative<std::string>(bound.value) && isEquality(bound.op);
    if (c->name == "Boolean") return std::holds_alternative<bool>(bound.value) && isEquality(bound.op);
    return false;
}

} // namespace safepipe::semantics
