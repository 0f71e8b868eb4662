#pragma once

#include <string>
#include <tuple>

namespace safepipe {

/// A region of a source file. Lines and columns are 1-based and the end
/// position is inclusive (it names the last character of the region).
struct SourceSpan {
    std::string file;
    int startLine = 1;
    int startCol = 1;
    int endLine = 1;
    int endCol = 1;

    bool operator==(const SourceSpan&) const = default;

    [[nodiscard]] bool contains(const SourceSpan& inner) const {
        return std::tie(startLine, startCol) <= std::tie(inner.startLine, inner.startCol) &&
               std::tie(inner.endLine, inner.endCol) <= std::tie(endLine, endCol);
    }

    [[nodiscard]] static SourceSpan cover(const SourceSpan& first, const SourceSpan& last) {
        return {first.file, first.startLine, first.startCol, last.endLine, last.endCol};
    }
};

} // namespace safepipe
