#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "safepipe/diagnostic.hpp"
#include "safepipe/syntax/ast.hpp"

namespace safepipe::stubgen {

struct PyParam {
    std::string name;
    std::optional<std::string> hint;
    std::optional<std::string> defaultText;
    bool variadic = false; ///< `*args` or `**kwargs`
    bool operator==(const PyParam&) const = default;
};

struct PySignature {
    std::string module;
    std::string name;
    std::vector<PyParam> params;
    std::optional<std::string> returnHint;
    /// Text after `name :` in the docstring's Parameters section, with
    /// continuation lines joined by single spaces.
    std::map<std::string, std::string> docParams;
    /// Type part of each entry: the header text before its first comma.
    std::map<std::string, std::string> docTypes;
    int line = 1;
};

struct PyParseResult {
    std::vector<PySignature> signatures;
    Diagnostics diagnostics; ///< W080, W081, E080
    int defsFound = 0;       ///< top-level defs, including skipped ones
    int skipped = 0;
};

/// Restricted recognizer for top-level `def` statements of a Python source
/// or interface file. Nothing is imported or executed.
PyParseResult parsePySignatures(std::string_view source, const std::string& file, const std::string& module);

struct MappedType {
    syntax::TypeRef type;
    std::vector<std::string> reviewReasons; ///< one per emitted `Any`
};

/// int, float, str, bool, list[T], Optional[T], Union[...], X | Y and None;
/// everything else maps to `Any`.
MappedType mapHint(const std::optional<std::string>& hint);

struct MinedConstraints {
    std::vector<syntax::Constraint> constraints; ///< in order of appearance
    std::vector<std::string> dropped;            ///< unsatisfiable ranges
};

/// Recognizes range phrases, case-insensitively: "between X and Y",
/// "in range [X, Y]" with open or closed ends, "non-negative", "positive",
/// "at most X" and "at least X".
MinedConstraints mineConstraints(std::string_view text);

struct ReviewItem {
    std::string declaration;
    std::string reason;
    bool operator==(const ReviewItem&) const = default;
};

struct ExtractionReport {
    int parsed = 0; ///< defs found
    int skipped = 0;
    int generated = 0;
    std::vector<ReviewItem> needsReview;
};

struct StubOutput {
    std::string text;
    ExtractionReport report;
};

/// Emits one `fun` per signature, camelCased with `@PythonName` carrying the
/// original. Review items also appear as `// TODO:` lines above their
/// declaration.
StubOutput generateStubs(const std::vector<PySignature>& signatures, const std::string& moduleName);

struct StubgenResult {
    StubOutput output;
    Diagnostics diagnostics;
};

/// parsePySignatures followed by generateStubs; the report counts defs
/// skipped by either step.
StubgenResult stubgenSource(std::string_view source, const std::string& file, const std::string& moduleName);

/// `{"generated", "needsReview": [{"declaration", "reason"}], "parsed", "skipped"}`
std::string reportJson(const ExtractionReport& report);

} // namespace safepipe::stubgen
