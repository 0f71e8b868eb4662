#include <algorithm>
#include <set>

#include "safepipe/schema/schema.hpp"

namespace safepipe::schema {

std::string toString(ColumnType type) {
    switch (type) {
    case ColumnType::Int: return "Int";
    case ColumnType::Float: return "Float";
    case ColumnType::Bool: return "Boolean";
    case ColumnType::String: return "String";
    }
    return "String";
}

std::optional<ColumnType> columnTypeOf(const semantics::Type& type) {
    const auto* c = semantics::unrefined(type).as<semantics::ClassType>();
    if (c == nullptr || !c->args.empty()) return std::nullopt;
    if (c->name == "Int") return ColumnType::Int;
    if (c->name == "Float") return ColumnType::Float;
    if (c->name == "Boolean") return ColumnType::Bool;
    if (c->name == "String") return ColumnType::String;
    return std::nullopt;
}

ColumnType widen(ColumnType a, ColumnType b) {
    if (a == b) return a;
    const bool numeric = (a == ColumnType::Int || a == ColumnType::Float) && (b == ColumnType::Int || b == ColumnType::Float);
    return numeric ? ColumnType::Float : ColumnType::String;
}

bool satisfiesColumnType(ColumnType actual, ColumnType required) {
    return actual == required || (actual == ColumnType::Int && required == ColumnType::Float);
}

const Column* Schema::find(const std::string& name) const {
    auto it = std::find_if(columns.begin(), columns.end(), [&](const Column& c) { return c.name == name; });
    return it == columns.end() ? nullptr : &*it;
}

std::string toString(const Schema& schema) {
    std::string out = "{";
    for (std::size_t i = 0; i < schema.columns.size(); ++i) {
        if (i > 0) out += ", ";
        out += schema.columns[i].name + ": " + toString(schema.columns[i].type);
    }
    return out + "}";
}

namespace {

EffectError missing(const std::string& name) { return {"E030", "column `" + name + "` does not exist"}; }
EffectError exists(const std::string& name) { return {"E036", "column `" + name + "` already exists"}; }

Column* findMutable(Schema& schema, const std::string& name) { return const_cast<Column*>(schema.find(name)); }

} // namespace

std::variant<Schema, EffectError> applyEffects(Schema schema, const std::vector<Effect>& effects) {
    for (const auto& effect : effects) {
        std::optional<EffectError> error = std::visit(
            [&](const auto& e) -> std::optional<EffectError> {
                using T = std::decay_t<decltype(e)>;
                if constexpr (std::is_same_v<T, AddColumn>) {
                    if (schema.has(e.name)) return exists(e.name);
                    schema.columns.push_back({e.name, e.type});
                } else if constexpr (std::is_same_v<T, RemoveColumn>) {
                    if (!schema.has(e.name)) return missing(e.name);
                    std::erase_if(schema.columns, [&](const Column& c) { return c.name == e.name; });
                } else if constexpr (std::is_same_v<T, RenameColumn>) {
                    Column* c = findMutable(schema, e.from);
                    if (c == nullptr) return missing(e.from);
                    if (e.from != e.to && schema.has(e.to)) return exists(e.to);
                    c->name = e.to;
                } else if constexpr (std::is_same_v<T, RetypeColumn>) {
                    Column* c = findMutable(schema, e.name);
                    if (c == nullptr) return missing(e.name);
                    c->type = e.type;
                } else if constexpr (std::is_same_v<T, KeepColumns>) {
                    for (const auto& n : e.names)
                        if (!schema.has(n)) return missing(n);
                    const std::set<std::string> keep(e.names.begin(), e.names.end());
                    std::erase_if(schema.columns, [&](const Column& c) { return keep.count(c.name) == 0; });
                } else {
                    const std::set<std::string> drop(e.names.begin(), e.names.end());
                    std::erase_if(schema.columns, [&](const Column& c) { return drop.count(c.name) != 0; });
                }
                return std::nullopt;
            },
            effect);
        if (error) return *error;
    }
    return schema;
}

std::optional<EffectError> checkRequirement(const Schema& schema, const std::string& column,
                                            std::optional<ColumnType> required) {
    const Column* c = schema.find(column);
    if (c == nullptr) return missing(column);
    if (required && !satisfiesColumnType(c->type, *required)) {
        return EffectError{"E031", "column `" + column + "` has type " + toString(c->type) + " but " +
                                       toString(*required) + " is required"};
    }
    return std::nullopt;
}

} // namespace safepipe::schema
