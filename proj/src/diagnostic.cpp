#include "safepipe/diagnostic.hpp"

#include <algorithm>
#include <array>
#include <tuple>
#include <utility>

namespace safepipe {

namespace {

struct CodeInfo {
    std::string_view code;
    std::string_view description;
};

constexpr std::array kRegistry{
    CodeInfo{"E001", "unterminated string literal"},
    CodeInfo{"E002", "illegal character"},
    CodeInfo{"E003", "unexpected token"},
    CodeInfo{"E004", "duplicate declaration"},
    CodeInfo{"E010", "unresolved reference"},
    CodeInfo{"E011", "duplicate variable assignment"},
    CodeInfo{"E012", "unknown member"},
    CodeInfo{"E020", "type mismatch"},
    CodeInfo{"E021", "non-constant argument for refined parameter"},
    CodeInfo{"E022", "refinement constraint violated"},
    CodeInfo{"E030", "column not found"},
    CodeInfo{"E031", "column has wrong type"},
    CodeInfo{"E032", "dataset file unreadable or empty"},
    CodeInfo{"E033", "duplicate column header"},
    CodeInfo{"E034", "ragged row"},
    CodeInfo{"E035", "non-constant schema-relevant argument"},
    CodeInfo{"E036", "column already exists"},
    CodeInfo{"E037", "unknown dataset key"},
    CodeInfo{"E040", "protocol violation"},
    CodeInfo{"E041", "protocol names an undeclared method"},
    CodeInfo{"E042", "protocol object rebound"},
    CodeInfo{"E050", "wrong arity or unknown parameter"},
    CodeInfo{"E051", "assignee/result count mismatch"},
    CodeInfo{"E052", "type argument unification failure"},
    CodeInfo{"E060", "internal: unresolved node"},
    CodeInfo{"E070", "construct has no graph form"},
    CodeInfo{"E071", "cycle in graph"},
    CodeInfo{"E072", "edge type incompatible with port"},
    CodeInfo{"E073", "unknown process"},
    CodeInfo{"E074", "malformed graph document"},
    CodeInfo{"E080", "unparseable def"},
    CodeInfo{"W001", "unknown schema"},
    CodeInfo{"W080", "skipped unparseable def"},
    CodeInfo{"W081", "skipped nested definition"},
};

} // namespace

Diagnostic makeDiagnostic(std::string code, std::string message, SourceSpan span) {
    Diagnostic d;
    d.severity = (!code.empty() && code.front() == 'W') ? Severity::Warning : Severity::Error;
    d.code = std::move(code);
    d.message = std::move(message);
    d.span = std::move(span);
    return d;
}

bool isRegisteredCode(std::string_view code) {
    return std::ranges::any_of(kRegistry, [&](const CodeInfo& info) { return info.code == code; });
}

std::string_view describeCode(std::string_view code) {
    for (const auto& info : kRegistry) {
        if (info.code == code) return info.description;
    }
    return {};
}

bool hasErrors(const Diagnostics& diagnostics) {
    return std::ranges::any_of(diagnostics, [](const Diagnostic& d) { return d.isError(); });
}

void sortDiagnostics(Diagnostics& diagnostics) {
    std::ranges::stable_sort(diagnostics, [](const Diagnostic& a, const Diagnostic& b) {
        return std::tie(a.span.file, a.span.startLine, a.span.startCol, a.code, a.message) <
               std::tie(b.span.file, b.span.startLine, b.span.startCol, b.code, b.message);
    });
}

std::string renderDiagnostic(const Diagnostic& d) {
    std::string out = d.span.file;
    out += ':' + std::to_string(d.span.startLine) + ':' + std::to_string(d.span.startCol) + ": ";
    out += d.isError() ? "error" : "warning";
    out += '[' + d.code + "]: " + d.message;
    return out;
}

} // namespace safepipe
