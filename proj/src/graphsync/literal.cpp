#include "graphsync/literal.hpp"

#include <cmath>
#include <limits>

namespace safepipe::graphsync {

using namespace syntax;

std::optional<Literal> toLiteral(const Expression& e) {
    if (const auto* i = e.as<IntLit>()) return Literal{i->value};
    if (const auto* f = e.as<FloatLit>()) return Literal{f->value};
    if (const auto* s = e.as<StringLit>()) return Literal{s->value};
    if (const auto* b = e.as<BoolLit>()) return Literal{b->value};
    if (const auto* n = e.as<Negation>()) {
        if (const auto* i = n->operand->as<IntLit>(); i != nullptr && i->value > 0) return Literal{-i->value};
        if (const auto* f = n->operand->as<FloatLit>(); f != nullptr && f->value > 0) return Literal{-f->value};
        return std::nullopt;
    }
    if (const auto* list = e.as<ListLit>()) {
        std::vector<Literal> elements;
        for (const auto& x : list->elements) {
            auto l = toLiteral(x);
            if (!l) return std::nullopt;
            elements.push_back(std::move(*l));
        }
        return Literal{std::move(elements)};
    }
    return std::nullopt;
}

Expression fromLiteral(const Literal& literal) {
    Expression e;
    std::visit(
        [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            auto negated = [&](auto inner) {
                Expression operand;
                operand.node = inner;
                e.node = Negation{std::move(operand)};
            };
            if constexpr (std::is_same_v<T, std::int64_t>) {
                if (v < 0) negated(IntLit{-v});
                else e.node = IntLit{v};
            } else if constexpr (std::is_same_v<T, double>) {
                if (std::signbit(v)) negated(FloatLit{-v});
                else e.node = FloatLit{v};
            } else if constexpr (std::is_same_v<T, std::string>) {
                e.node = StringLit{v};
            } else if constexpr (std::is_same_v<T, bool>) {
                e.node = BoolLit{v};
            } else {
                ListLit list;
                for (const auto& x : v) list.elements.push_back(fromLiteral(x));
                e.node = std::move(list);
            }
        },
        literal.value);
    return e;
}

nlohmann::json literalToJson(const Literal& literal) {
    return std::visit(
        [](const auto& v) -> nlohmann::json {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::vector<Literal>>) {
                nlohmann::json array = nlohmann::json::array();
                for (const auto& x : v) array.push_back(literalToJson(x));
                return array;
            } else {
                return v;
            }
        },
        literal.value);
}

std::optional<Literal> literalFromJson(const nlohmann::json& json) {
    switch (json.type()) {
    case nlohmann::json::value_t::number_integer: {
        const auto v = json.get<std::int64_t>();
        if (v == std::numeric_limits<std::int64_t>::min()) return std::nullopt;
        return Literal{v};
    }
    case nlohmann::json::value_t::number_unsigned: {
        const auto v = json.get<std::uint64_t>();
        if (v > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) return std::nullopt;
        return Literal{static_cast<std::int64_t>(v)};
    }
    case nlohmann::json::value_t::number_float: {
        const double v = json.get<double>();
        if (!std::isfinite(v)) return std::nullopt;
        return Literal{v};
    }
    case nlohmann::json::value_t::string: return Literal{json.get<std::string>()};
    case nlohmann::json::value_t::boolean: return Literal{json.get<bool>()};
    case nlohmann::json::value_t::array: {
        std::vector<Literal> elements;
        for (const auto& x : json) {
            auto l = literalFromJson(x);
            if (!l) return std::nullopt;
            elements.push_back(std::move(*l));
        }
        return Literal{std::move(elements)};
    }
    default: return std::nullopt;
    }
}

} // namespace safepipe::graphsync
