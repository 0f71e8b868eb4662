#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "safepipe/diagnostic.hpp"
#include "safepipe/syntax/ast.hpp"
#include "safepipe/syntax/lexer.hpp"

namespace safepipe::syntax {

struct PipelineParseResult {
    PipelineFile file;
    Diagnostics diagnostics;
};

struct StubParseResult {
    StubFile file;
    Diagnostics diagnostics;
};

struct ExpressionParseResult {
    std::optional<Expression> expression;
    Diagnostics diagnostics;
};

/// Parses a pipeline file. Syntax errors are reported as E003 and the parser
/// resumes at the next statement boundary (line break, `;` or `}`).
PipelineParseResult parsePipelines(const std::vector<Token>& tokens, const std::string& file);

/// Parses a stub file. Duplicate declaration names are reported as E004.
StubParseResult parseStubs(const std::vector<Token>& tokens, const std::string& file);

/// Lex + parse conveniences. Lexer diagnostics come first.
PipelineParseResult parsePipelineSource(std::string_view source, const std::string& file);
StubParseResult parseStubSource(std::string_view source, const std::string& file);

/// Parses a single expression (used to re-embed lambda text from graphs).
ExpressionParseResult parseExpressionSource(std::string_view source, const std::string& file);

} // namespace safepipe::syntax
