#pragma once

#include <string>

#include "safepipe/syntax/ast.hpp"

namespace safepipe::syntax {

/// Canonical layout: 4-space indentation, one statement per line, single
/// spaces around `=` and `->`, no trailing whitespace, trailing newline.
/// Formatting is total on well-formed trees and parse(format(t)) == t.
std::string format(const PipelineFile& file);
std::string format(const StubFile& file);
std::string format(const PipelineDecl& pipeline);

std::string formatExpression(const Expression& expr, int indent = 0);
std::string formatType(const TypeRef& type);
std::string formatConstant(const Constant& constant);
std::string formatProtocol(const ProtocolRegex& regex);
std::string formatComparator(Comparator op);

/// Double-quoted string literal with `\"`, `\\`, `\n` and `\t` escapes.
std::string quoteString(const std::string& value);

/// Shortest round-tripping decimal form that still lexes as a float.
std::string formatFloat(double value);

} // namespace safepipe::syntax
