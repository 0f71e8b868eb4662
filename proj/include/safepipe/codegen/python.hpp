#pragma once

#include <string>

#include "safepipe/diagnostic.hpp"
#include "safepipe/semantics/analysis.hpp"

namespace safepipe::codegen {

struct PythonOutput {
    std::string text;        ///< empty when diagnostics are present
    Diagnostics diagnostics; ///< E060
};

/// Python module for one checked pipeline. Stub functions and classes are
/// imported from their `@PythonModule`; lambdas become nested functions
/// defined right before the statement that uses them.
PythonOutput emitPython(const semantics::PipelineAnalysis& pipeline, const semantics::SymbolTable& symbols);

/// `'...'` with backslash escapes.
std::string pythonString(const std::string& value);

/// File name the pipeline is written to: `<pipelineName>.py`.
std::string pythonFileName(const syntax::PipelineDecl& pipeline);

} // namespace safepipe::codegen
