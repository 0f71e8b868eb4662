#include "safepipe/driver/driver.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "safepipe/codegen/python.hpp"
#include "safepipe/protocol/protocol.hpp"
#include "safepipe/syntax/parser.hpp"

namespace safepipe::driver {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::optional<std::string> readText(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

std::string displayPath(const fs::path& path, const fs::path& root) {
    std::error_code ec;
    fs::path relative = fs::relative(path, root, ec);
    if (ec || relative.empty() || *relative.begin() == "..") return path.generic_string();
    return relative.generic_string();
}

/// Files with `extension` under `path`, or `path` itself if it is a file.
std::optional<std::vector<fs::path>> collect(const fs::path& path, const std::string& extension) {
    std::error_code ec;
    if (fs::is_regular_file(path, ec)) return std::vector<fs::path>{path};
    if (!fs::is_directory(path, ec)) return std::nullopt;
    std::vector<fs::path> out;
    for (auto it = fs::recursive_directory_iterator(path, ec); !ec && it != fs::recursive_directory_iterator(); it.increment(ec))
        if (it->is_regular_file() && it->path().extension() == extension) out.push_back(it->path());
    if (ec) return std::nullopt;
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace

ManifestResult parseManifest(std::string_view text, const fs::path& file) {
    ManifestResult result;
    json root = json::parse(text, nullptr, false);
    auto fail = [&](const std::string& message) {
        result.error = file.string() + ": " + message;
        return result;
    };
    if (root.is_discarded() || !root.is_object()) return fail("manifest is not a JSON object");
    Manifest m;
    m.file = fs::absolute(file).lexically_normal();
    m.root = m.file.parent_path();
    auto resolve = [&](const std::string& p) { return (m.root / p).lexically_normal(); };
    if (root.contains("name")) {
        if (!root["name"].is_string()) return fail("`name` must be a string");
        m.name = root["name"].get<std::string>();
    }
    for (auto [key, target] : {std::pair{"stubPaths", &m.stubPaths}, std::pair{"pipelinePaths", &m.pipelinePaths}}) {
        if (!root.contains(key)) continue;
        if (!root[key].is_array()) return fail(std::string("`") + key + "` must be an array of paths");
        for (const auto& p : root[key]) {
            if (!p.is_string()) return fail(std::string("`") + key + "` must be an array of paths");
            target->push_back(resolve(p.get<std::string>()));
        }
    }
    if (root.contains("datasets")) {
        if (!root["datasets"].is_object()) return fail("`datasets` must map keys to CSV paths");
        for (const auto& [key, p] : root["datasets"].items()) {
            if (!p.is_string()) return fail("dataset `" + key + "` must be a path");
            m.datasets[key] = resolve(p.get<std::string>());
        }
    }
    m.outDir = resolve("out");
    if (root.contains("outDir")) {
        if (!root["outDir"].is_string()) return fail("`outDir` must be a path");
        m.outDir = resolve(root["outDir"].get<std::string>());
    }
    result.manifest = std::move(m);
    return result;
}

ManifestResult loadManifest(const fs::path& file) {
    auto text = readText(file);
    if (!text) {
        ManifestResult r;
        r.error = "cannot read manifest " + file.string();
        return r;
    }
    return parseManifest(*text, file);
}

std::optional<fs::path> findManifest(const fs::path& start) {
    std::error_code ec;
    fs::path dir = fs::absolute(start, ec);
    if (ec) return std::nullopt;
    while (true) {
        fs::path candidate = dir / "safepipe.json";
        if (fs::is_regular_file(candidate, ec)) return candidate;
        if (!dir.has_parent_path() || dir.parent_path() == dir) return std::nullopt;
        dir = dir.parent_path();
    }
}

SourcesResult readSources(const Manifest& manifest) {
    SourcesResult result;
    auto load = [&](const std::vector<fs::path>& paths, const std::string& extension, std::vector<SourceFile>& into) {
        for (const auto& p : paths) {
            auto files = collect(p, extension);
            if (!files) {
                result.error = "cannot read " + p.string();
                return false;
            }
            for (const auto& f : *files) {
                auto text = readText(f);
                if (!text) {
                    result.error = "cannot read " + f.string();
                    return false;
                }
                into.push_back({displayPath(f, manifest.root), std::move(*text)});
            }
        }
        return true;
    };
    if (load(manifest.stubPaths, ".sdsstub", result.stubs)) load(manifest.pipelinePaths, ".sdspipe", result.pipelines);
    return result;
}

Compilation compileSources(const std::vector<SourceFile>& stubs, const std::vector<SourceFile>& pipelines,
                           schema::DatasetRegistry& datasets) {
    Compilation c;
    c.program = std::make_unique<syntax::Program>();
    for (const auto& s : stubs) {
        auto r = syntax::parseStubSource(s.text, s.path);
        append(c.diagnostics, r.diagnostics);
        c.program->stubFiles.push_back(std::move(r.file));
    }
    for (const auto& p : pipelines) {
        auto r = syntax::parsePipelineSource(p.text, p.path);
        append(c.diagnostics, r.diagnostics);
        c.program->pipelineFiles.push_back(std::move(r.file));
    }
    if (hasErrors(c.diagnostics)) {
        c.syntaxFailed = true;
        sortDiagnostics(c.diagnostics);
        return c;
    }
    c.resolved = semantics::resolve(*c.program);
    append(c.diagnostics, c.resolved.diagnostics);
    c.typed = semantics::checkTypes(*c.program, c.resolved.symbols);
    append(c.diagnostics, c.typed.diagnostics);
    for (const auto& analysis : c.typed.pipelines) {
        c.schemas.push_back(schema::propagate(analysis, c.resolved.symbols, datasets));
        append(c.diagnostics, c.schemas.back().diagnostics);
    }
    const auto automata = protocol::compileProtocols(c.resolved.symbols);
    for (const auto& analysis : c.typed.pipelines)
        append(c.diagnostics, protocol::checkProtocols(analysis, c.resolved.symbols, automata));
    sortDiagnostics(c.diagnostics);
    return c;
}

CheckResult summarize(const Compilation& compilation) {
    CheckResult r;
    r.diagnostics = compilation.diagnostics;
    for (std::size_t i = 0; i < compilation.schemas.size() && i < compilation.typed.pipelines.size(); ++i)
        r.schemas[compilation.typed.pipelines[i].pipeline->name] = compilation.schemas[i].schemas;
    r.exitCode = compilation.ok() ? 0 : 1;
    return r;
}

CheckResult runCheck(const Manifest& manifest) {
    SourcesResult sources = readSources(manifest);
    if (!sources.error.empty()) {
        CheckResult r;
        r.exitCode = 2;
        r.error = sources.error;
        return r;
    }
    schema::DatasetRegistry datasets(manifest.datasets);
    return summarize(compileSources(sources.stubs, sources.pipelines, datasets));
}

CompileResult runCompile(const Manifest& manifest) {
    CompileResult result;
    SourcesResult sources = readSources(manifest);
    if (!sources.error.empty()) {
        result.check.exitCode = 2;
        result.check.error = sources.error;
        return result;
    }
    schema::DatasetRegistry datasets(manifest.datasets);
    Compilation c = compileSources(sources.stubs, sources.pipelines, datasets);
    result.check = summarize(c);
    if (result.check.exitCode != 0) return result;

    std::vector<std::pair<fs::path, std::string>> outputs;
    for (const auto& analysis : c.typed.pipelines) {
        auto py = codegen::emitPython(analysis, c.resolved.symbols);
        append(result.check.diagnostics, py.diagnostics);
        outputs.emplace_back(manifest.outDir / codegen::pythonFileName(*analysis.pipeline), std::move(py.text));
    }
    if (hasErrors(result.check.diagnostics)) {
        result.check.exitCode = 1;
        return result;
    }
    std::error_code ec;
    if (!outputs.empty()) fs::create_directories(manifest.outDir, ec);
    for (const auto& [path, text] : outputs) {
        std::ofstream out(path, std::ios::binary);
        out << text;
        if (!out) {
            result.check.exitCode = 2;
            result.check.error = "cannot write " + path.string();
            return result;
        }
        result.written.push_back(path);
    }
    return result;
}

std::string diagnosticsJson(const Diagnostics& diagnostics) {
    json out = json::array();
    for (const auto& d : diagnostics)
        out.push_back({{"code", d.code},
                       {"severity", d.isError() ? "error" : "warning"},
                       {"message", d.message},
                       {"file", d.span.file},
                       {"line", d.span.startLine},
                       {"col", d.span.startCol},
                       {"endLine", d.span.endLine},
                       {"endCol", d.span.endCol}});
    return out.dump();
}

std::string checkJson(const CheckResult& check) {
    json out = json::object();
    for (const auto& [pipeline, vars] : check.schemas) {
        json entry = json::object();
        for (const auto& [var, s] : vars) {
            if (!s) {
                entry[var] = nullptr;
                continue;
            }
            json columns = json::array();
            for (const auto& c : s->columns) columns.push_back({{"name", c.name}, {"type", schema::toString(c.type)}});
            entry[var] = columns;
        }
        out[pipeline] = entry;
    }
    return json{{"diagnostics", json::parse(diagnosticsJson(check.diagnostics))}, {"schemas", out}, {"version", kFormatVersion}}
        .dump();
}

} // namespace safepipe::driver
