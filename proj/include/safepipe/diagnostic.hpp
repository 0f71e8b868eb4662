#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "safepipe/source_span.hpp"

namespace safepipe {

enum class Severity { Error, Warning };

/// A coded, source-located finding. Every stage of the toolchain reports
/// problems exclusively through these records.
struct Diagnostic {
    std::string code;
    Severity severity = Severity::Error;
    std::string message;
    SourceSpan span;
    std::vector<SourceSpan> relatedSpans;

    bool operator==(const Diagnostic&) const = default;

    [[nodiscard]] bool isError() const { return severity == Severity::Error; }
};

using Diagnostics = std::vector<Diagnostic>;

/// Builds a diagnostic; severity follows from the code prefix (`W` = warning).
Diagnostic makeDiagnostic(std::string code, std::string message, SourceSpan span);

/// True if `code` appears in the error-code registry.
bool isRegisteredCode(std::string_view code);

/// One-line description of a registered code, or empty.
std::string_view describeCode(std::string_view code);

bool hasErrors(const Diagnostics& diagnostics);

/// Sorts by (file, line, column, code, message); the order is total.
void sortDiagnostics(Diagnostics& diagnostics);

/// `file:line:col: error[E030]: message`
std::string renderDiagnostic(const Diagnostic& diagnostic);

inline void append(Diagnostics& into, const Diagnostics& from) {
    into.insert(into.end(), from.begin(), from.end());
}

} // namespace safepipe
