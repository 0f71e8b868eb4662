#pragma once

#include "safepipe/semantics/analysis.hpp"

namespace safepipe::semantics::detail {

SymbolTable loadStubs(const std::vector<syntax::StubFile>& files, Diagnostics& diagnostics);

} // namespace safepipe::semantics::detail
