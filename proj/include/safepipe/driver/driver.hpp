#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "safepipe/diagnostic.hpp"
#include "safepipe/schema/schema.hpp"
#include "safepipe/semantics/analysis.hpp"
#include "safepipe/syntax/ast.hpp"

namespace safepipe::driver {

/// Version of every JSON document the driver produces.
inline constexpr int kFormatVersion = 1;

/// `safepipe.json`. Paths are absolute, resolved against the manifest's
/// directory.
struct Manifest {
    std::filesystem::path file;
    std::filesystem::path root;
    std::string name;
    std::vector<std::filesystem::path> stubPaths;
    std::vector<std::filesystem::path> pipelinePaths;
    std::map<std::string, std::filesystem::path> datasets;
    std::filesystem::path outDir;
};

struct ManifestResult {
    std::optional<Manifest> manifest;
    std::string error;
};

ManifestResult loadManifest(const std::filesystem::path& file);
ManifestResult parseManifest(std::string_view text, const std::filesystem::path& file);

/// Nearest `safepipe.json` in `start` or one of its ancestors.
std::optional<std::filesystem::path> findManifest(const std::filesystem::path& start);

struct SourceFile {
    std::string path; ///< as shown in diagnostics
    std::string text;
};

struct SourcesResult {
    std::vector<SourceFile> stubs;
    std::vector<SourceFile> pipelines;
    std::string error; ///< unreadable path; empty on success
};

/// Reads every `.sdsstub` and `.sdspipe` the manifest names. Directories
/// are searched recursively; files are ordered by path.
SourcesResult readSources(const Manifest& manifest);

/// Every stage's output for one set of sources. Analyses point into
/// `program`, so a Compilation is never copied.
struct Compilation {
    std::unique_ptr<syntax::Program> program;
    semantics::ResolveResult resolved;
    semantics::TypeCheckResult typed;
    std::vector<schema::Propagation> schemas; ///< per pipeline
    Diagnostics diagnostics;                   ///< all stages, sorted
    bool syntaxFailed = false;                 ///< later stages did not run

    Compilation() = default;
    Compilation(Compilation&&) = default;
    Compilation& operator=(Compilation&&) = default;

    [[nodiscard]] bool ok() const { return !hasErrors(diagnostics); }
};

/// Runs syntax, resolution, types, schema and protocol checks in that
/// order. Syntax errors stop the run.
Compilation compileSources(const std::vector<SourceFile>& stubs, const std::vector<SourceFile>& pipelines,
                           schema::DatasetRegistry& datasets);

struct CheckResult {
    Diagnostics diagnostics;
    /// Pipeline name to variable to inferred schema.
    std::map<std::string, std::map<std::string, std::optional<schema::Schema>>> schemas;
    int exitCode = 0;
    std::string error; ///< IO failure (exit code 2)
};

CheckResult summarize(const Compilation& compilation);

/// Loads the manifest's sources and checks them. Exit code 2 on IO
/// failure.
CheckResult runCheck(const Manifest& manifest);

struct CompileResult {
    CheckResult check;
    std::vector<std::filesystem::path> written;
};

/// Checks, then writes one `.py` per pipeline into the output directory.
/// Nothing is written when a check fails.
CompileResult runCompile(const Manifest& manifest);

/// Diagnostics as JSON objects: code, severity, message, file, line, col,
/// endLine, endCol.
std::string diagnosticsJson(const Diagnostics& diagnostics);

/// `{diagnostics, schemas, version}`; schemas map pipeline to variable to
/// a column list, or null where the schema is unknown.
std::string checkJson(const CheckResult& check);

} // namespace safepipe::driver
