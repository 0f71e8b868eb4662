#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "safepipe/semantics/types.hpp"
#include "safepipe/syntax/ast.hpp"

namespace safepipe::semantics {

struct ConstValue;

struct NotConstant {
    bool operator==(const NotConstant&) const = default;
};

struct ConstList {
    std::vector<ConstValue> elements;
    bool operator==(const ConstList&) const;
};

/// Result of compile-time evaluation. `NotConstant` is a value, not an error.
struct ConstValue {
    std::variant<NotConstant, std::int64_t, double, std::string, bool, ConstList> value;
    bool operator==(const ConstValue&) const = default;

    [[nodiscard]] bool isConstant() const { return !std::holds_alternative<NotConstant>(value); }

    template <class T>
    [[nodiscard]] const T* as() const {
        return std::get_if<T>(&value);
    }
};

ConstValue fromConstant(const syntax::Constant& constant);

/// Source-like spelling: `1.5`, `"age"`, `[1, 2]`, `<not constant>`.
std::string toString(const ConstValue& value);

/// Looks up the defining expression of a single-assignee variable visible
/// for constant folding, or nullptr.
using ConstEnv = std::function<const syntax::Expression*(const std::string&)>;

/// Literals evaluate to themselves, numeric negation folds, references
/// follow variables whose sole right-hand side is constant, lists of
/// constants are constant. Calls, lambdas and member accesses never are.
ConstValue evalConst(const syntax::Expression& expr, const ConstEnv& env);

/// `value` satisfies `it <op> bound`. Numbers compare numerically across
/// Int/Float; strings and booleans support only `==` and `!=`.
bool satisfies(const ConstValue& value, const Bound& bound);

/// Whether a comparator-vs-constant bound makes sense on `base`.
bool boundFitsBase(const Bound& bound, const Type& base);

} // namespace safepipe::semantics
