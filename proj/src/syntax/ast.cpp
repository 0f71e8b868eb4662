#include "safepipe/syntax/ast.hpp"

#include <algorithm>

namespace safepipe::syntax {

const std::string& declarationName(const Declaration& decl) {
    return std::visit([](const auto& d) -> const std::string& { return d.name; }, decl);
}

const SourceSpan& declarationSpan(const Declaration& decl) {
    return std::visit([](const auto& d) -> const SourceSpan& { return d.span; }, decl);
}

std::optional<std::string> annotationArgument(const std::vector<Annotation>& annotations, std::string_view name) {
    auto it = std::ranges::find_if(annotations, [&](const Annotation& a) { return a.name == name; });
    if (it == annotations.end()) return std::nullopt;
    return it->argument;
}

bool hasAnnotation(const std::vector<Annotation>& annotations, std::string_view name) {
    return std::ranges::any_of(annotations, [&](const Annotation& a) { return a.name == name; });
}

} // namespace safepipe::syntax
