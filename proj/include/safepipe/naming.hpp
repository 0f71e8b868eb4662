#pragma once

#include <string>
#include <string_view>

namespace safepipe {

/// `loadDataset` -> `load_dataset`, `HTTPServer` -> `http_server`.
std::string toSnakeCase(std::string_view name);

/// `load_dataset` -> `loadDataset`. Leading underscores are kept.
std::string toCamelCase(std::string_view name);

bool isPythonKeyword(std::string_view name);

/// `name`, with a trailing `_` when it is a Python keyword.
std::string pythonIdentifier(std::string_view name);

} // namespace safepipe
