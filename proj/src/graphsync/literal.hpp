#pragma once

#include <optional>

#include "json.hpp"
#include "safepipe/graphsync/graph.hpp"

namespace safepipe::graphsync {

/// Literal form of a constant argument; nullopt if `e` is anything else.
std::optional<Literal> toLiteral(const syntax::Expression& e);
syntax::Expression fromLiteral(const Literal& literal);

nlohmann::json literalToJson(const Literal& literal);
/// nullopt for JSON values that are not literals (null, objects).
std::optional<Literal> literalFromJson(const nlohmann::json& json);

} // namespace safepipe::graphsync
