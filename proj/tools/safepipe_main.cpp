#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "safepipe/driver/driver.hpp"
#include "safepipe/driver/serve.hpp"
#include "safepipe/graphsync/graph.hpp"
#include "safepipe/stubgen/stubgen.hpp"
#include "safepipe/syntax/formatter.hpp"
#include "safepipe/syntax/parser.hpp"

namespace fs = std::filesystem;
using namespace safepipe;
using namespace safepipe::driver;

namespace {

constexpr int kOk = 0;
constexpr int kDiagnostics = 1;
constexpr int kUsage = 2;

std::optional<std::string> readFile(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

bool writeFile(const fs::path& path, const std::string& text) {
    std::error_code ec;
    if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary);
    out << text;
    return static_cast<bool>(out);
}

void printDiagnostics(const Diagnostics& diagnostics) {
    for (const auto& d : diagnostics) std::cerr << renderDiagnostic(d) << "\n";
}

/// Text to `output`, or stdout when empty.
int emit(const std::string& text, const std::string& output) {
    if (output.empty()) {
        std::cout << text;
        return kOk;
    }
    if (!writeFile(output, text)) {
        std::cerr << "safepipe: cannot write " << output << "\n";
        return kUsage;
    }
    return kOk;
}

struct Options {
    std::string manifest;
    bool json = false;
    bool write = false;
    bool checkOnly = false;
    std::vector<std::string> files;
    std::string output;
    std::string pipeline;
    std::string module;
    std::string outDir = ".";
    std::string host = "127.0.0.1";
    int port = 8080;
};

std::optional<Manifest> manifestFor(const Options& o) {
    fs::path file;
    if (!o.manifest.empty()) file = o.manifest;
    else if (const char* env = std::getenv("SAFEPIPE_MANIFEST"); env != nullptr && *env != '\0') file = env;
    else if (auto found = findManifest(fs::current_path())) file = *found;
    else {
        std::cerr << "safepipe: no safepipe.json found in this directory or its parents\n";
        return std::nullopt;
    }
    ManifestResult r = loadManifest(file);
    if (!r.manifest) {
        std::cerr << "safepipe: " << r.error << "\n";
        return std::nullopt;
    }
    return r.manifest;
}

int runCheckCommand(const Options& o) {
    auto manifest = manifestFor(o);
    if (!manifest) return kUsage;
    CheckResult r = runCheck(*manifest);
    if (!r.error.empty()) {
        std::cerr << "safepipe: " << r.error << "\n";
        return kUsage;
    }
    if (o.json) std::cout << checkJson(r) << "\n";
    else printDiagnostics(r.diagnostics);
    return r.exitCode;
}

int runFormatCommand(const Options& o) {
    std::vector<fs::path> files(o.files.begin(), o.files.end());
    if (files.empty()) {
        auto manifest = manifestFor(o);
        if (!manifest) return kUsage;
        SourcesResult sources = readSources(*manifest);
        if (!sources.error.empty()) {
            std::cerr << "safepipe: " << sources.error << "\n";
            return kUsage;
        }
        for (const auto* group : {&sources.stubs, &sources.pipelines})
            for (const auto& s : *group) files.push_back(manifest->root / s.path);
    }
    int status = kOk;
    for (const auto& file : files) {
        auto text = readFile(file);
        if (!text) {
            std::cerr << "safepipe: cannot read " << file.string() << "\n";
            return kUsage;
        }
        std::string formatted;
        Diagnostics diagnostics;
        if (file.extension() == ".sdsstub") {
            auto r = syntax::parseStubSource(*text, file.string());
            diagnostics = r.diagnostics;
            if (!hasErrors(diagnostics)) formatted = syntax::format(r.file);
        } else {
            auto r = syntax::parsePipelineSource(*text, file.string());
            diagnostics = r.diagnostics;
            if (!hasErrors(diagnostics)) formatted = syntax::format(r.file);
        }
        if (hasErrors(diagnostics)) {
            printDiagnostics(diagnostics);
            status = kDiagnostics;
            continue;
        }
        if (o.checkOnly) {
            if (formatted != *text) {
                std::cout << file.string() << "\n";
                status = kDiagnostics;
            }
        } else if (o.write) {
            if (formatted != *text && !writeFile(file, formatted)) {
                std::cerr << "safepipe: cannot write " << file.string() << "\n";
                return kUsage;
            }
        } else {
            std::cout << formatted;
        }
    }
    return status;
}

int runCompileCommand(const Options& o) {
    auto manifest = manifestFor(o);
    if (!manifest) return kUsage;
    CompileResult r = runCompile(*manifest);
    printDiagnostics(r.check.diagnostics);
    if (!r.check.error.empty()) std::cerr << "safepipe: " << r.check.error << "\n";
    for (const auto& p : r.written) std::cout << p.string() << "\n";
    return r.check.exitCode;
}

int runGraphExport(const Options& o) {
    auto manifest = manifestFor(o);
    if (!manifest) return kUsage;
    SourcesResult sources = readSources(*manifest);
    if (!sources.error.empty()) {
        std::cerr << "safepipe: " << sources.error << "\n";
        return kUsage;
    }
    schema::DatasetRegistry datasets(manifest->datasets);
    Compilation c = compileSources(sources.stubs, sources.pipelines, datasets);
    if (c.syntaxFailed) {
        printDiagnostics(c.diagnostics);
        return kDiagnostics;
    }
    for (const auto& a : c.typed.pipelines)
        if (a.pipeline->name == o.pipeline)
            return emit(graphsync::encodeGraph(graphsync::toGraph(a, c.resolved.symbols)) + "\n", o.output);
    std::cerr << "safepipe: no pipeline named " << o.pipeline << "\n";
    return kUsage;
}

int runGraphImport(const Options& o) {
    auto manifest = manifestFor(o);
    if (!manifest) return kUsage;
    auto text = readFile(o.files.at(0));
    if (!text) {
        std::cerr << "safepipe: cannot read " << o.files[0] << "\n";
        return kUsage;
    }
    auto decoded = graphsync::decodeGraph(*text);
    if (!decoded.doc) {
        printDiagnostics(decoded.diagnostics);
        return kDiagnostics;
    }
    SourcesResult sources = readSources(*manifest);
    if (!sources.error.empty()) {
        std::cerr << "safepipe: " << sources.error << "\n";
        return kUsage;
    }
    schema::DatasetRegistry datasets(manifest->datasets);
    Compilation stubs = compileSources(sources.stubs, {}, datasets);
    if (stubs.syntaxFailed) {
        printDiagnostics(stubs.diagnostics);
        return kDiagnostics;
    }
    auto rebuilt = graphsync::fromGraph(*decoded.doc, stubs.resolved.symbols);
    if (!rebuilt.pipeline) {
        printDiagnostics(rebuilt.diagnostics);
        return kDiagnostics;
    }
    syntax::PipelineFile file;
    file.pipelines.push_back(std::move(*rebuilt.pipeline));
    return emit(syntax::format(file), o.output);
}

int runStubgenCommand(const Options& o) {
    stubgen::ExtractionReport total;
    int status = kOk;
    for (const auto& name : o.files) {
        const fs::path file = name;
        auto text = readFile(file);
        if (!text) {
            std::cerr << "safepipe: cannot read " << name << "\n";
            return kUsage;
        }
        const std::string module = o.module.empty() ? file.stem().string() : o.module;
        auto r = stubgen::stubgenSource(*text, file.string(), module);
        printDiagnostics(r.diagnostics);
        if (hasErrors(r.diagnostics)) {
            status = kDiagnostics;
            continue;
        }
        const fs::path out = fs::path(o.outDir) / (file.stem().string() + ".sdsstub");
        if (!writeFile(out, r.output.text)) {
            std::cerr << "safepipe: cannot write " << out.string() << "\n";
            return kUsage;
        }
        std::cout << out.string() << "\n";
        total.parsed += r.output.report.parsed;
        total.skipped += r.output.report.skipped;
        total.generated += r.output.report.generated;
        total.needsReview.insert(total.needsReview.end(), r.output.report.needsReview.begin(),
                                 r.output.report.needsReview.end());
    }
    const fs::path report = fs::path(o.outDir) / "stubgen-report.json";
    if (!writeFile(report, stubgen::reportJson(total))) {
        std::cerr << "safepipe: cannot write " << report.string() << "\n";
        return kUsage;
    }
    return status;
}

int runServeCommand(const Options& o) {
    auto manifest = manifestFor(o);
    if (!manifest) return kUsage;
    Service service(*manifest);
    if (auto error = service.loadError(); !error.empty()) {
        std::cerr << "safepipe: " << error << "\n";
        return kUsage;
    }
    HttpServer server(service);
    const int port = server.bind(o.host, o.port);
    if (port < 0) {
        std::cerr << "safepipe: cannot listen on " << o.host << ":" << o.port << "\n";
        return kUsage;
    }
    std::cout << "listening on http://" << o.host << ":" << port << std::endl;
    return server.run() ? kOk : kUsage;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Type, schema and protocol checker for data-science pipelines"};
    app.set_version_flag("--version", "safepipe 0.1.0");
    app.require_subcommand(1);
    Options o;
    app.add_option("--manifest", o.manifest, "Path to safepipe.json (default: $SAFEPIPE_MANIFEST, then search upward)");

    int status = kOk;
    auto* check = app.add_subcommand("check", "Check every pipeline in the project");
    check->add_flag("--json", o.json, "Print diagnostics and schemas as JSON");
    check->callback([&] { status = runCheckCommand(o); });

    auto* format = app.add_subcommand("format", "Print sources in canonical layout");
    format->add_flag("--write,-w", o.write, "Rewrite files in place");
    format->add_flag("--check", o.checkOnly, "List files that are not formatted; exit 1 if any");
    format->add_option("files", o.files, "Files (default: the project's sources)");
    format->callback([&] { status = runFormatCommand(o); });

    auto* compile = app.add_subcommand("compile", "Check, then write Python for each pipeline");
    compile->callback([&] { status = runCompileCommand(o); });

    auto* graph = app.add_subcommand("graph", "Convert between pipelines and graph documents");
    graph->require_subcommand(1);
    auto* exportCmd = graph->add_subcommand("export", "Print a pipeline's graph document");
    exportCmd->add_option("pipeline", o.pipeline, "Pipeline name")->required();
    exportCmd->add_option("-o,--output", o.output, "Output file");
    exportCmd->callback([&] { status = runGraphExport(o); });
    auto* importCmd = graph->add_subcommand("import", "Print the pipeline a graph document describes");
    importCmd->add_option("file", o.files, "Graph document")->required()->expected(1);
    importCmd->add_option("-o,--output", o.output, "Output file");
    importCmd->callback([&] { status = runGraphImport(o); });

    auto* stubgenCmd = app.add_subcommand("stubgen", "Draft stubs from Python sources");
    stubgenCmd->add_option("files", o.files, "Python files")->required();
    stubgenCmd->add_option("--out", o.outDir, "Output directory");
    stubgenCmd->add_option("--module", o.module, "Python module name (default: file stem)");
    stubgenCmd->callback([&] { status = runStubgenCommand(o); });

    auto* serve = app.add_subcommand("serve", "Serve the editor endpoints on loopback");
    serve->add_option("--port", o.port, "Port (0 picks a free one)")->check(CLI::Range(0, 65535));
    serve->add_option("--host", o.host, "Address to bind");
    serve->callback([&] { status = runServeCommand(o); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }
    return status;
}
