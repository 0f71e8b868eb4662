#include "safepipe/driver/serve.hpp"

#include <atomic>

#include "httplib.h"
#include "json.hpp"
#include "safepipe/graphsync/graph.hpp"
#include "safepipe/syntax/formatter.hpp"

namespace safepipe::driver {

using nlohmann::json;

namespace {

constexpr const char* kRequestFile = "request.sdspipe";

HttpResponse reply(int status, json body) {
    body["version"] = kFormatVersion;
    return {status, body.dump()};
}

HttpResponse diagnosticReply(int status, const Diagnostics& diagnostics) {
    return reply(status, {{"diagnostics", json::parse(diagnosticsJson(diagnostics))}});
}

HttpResponse failure(const char* code, const std::string& message) {
    return diagnosticReply(400, {makeDiagnostic(code, message, SourceSpan{kRequestFile, 1, 1, 1, 1})});
}

json nameArg(const syntax::NameArg& n) { return {{"literal", n.isLiteral}, {"text", n.text}}; }

const char* effectName(syntax::EffectKind kind) {
    switch (kind) {
    case syntax::EffectKind::Add: return "add";
    case syntax::EffectKind::Remove: return "remove";
    case syntax::EffectKind::Rename: return "rename";
    case syntax::EffectKind::Retype: return "retype";
    case syntax::EffectKind::Keep: return "keep";
    case syntax::EffectKind::Drop: return "drop";
    }
    return "keep";
}

json typedName(const std::string& name, const syntax::TypeRef& type) {
    json refined = json::array();
    const syntax::TypeRef* base = &type;
    if (const auto* r = std::get_if<syntax::RefinedTypeRef>(&type.node)) {
        base = r->base.get();
        for (const auto& c : r->constraints)
            refined.push_back("it " + syntax::formatComparator(c.op) + " " + syntax::formatConstant(c.value));
    }
    return {{"name", name}, {"type", syntax::formatType(*base)}, {"refined", refined}};
}

json processJson(const semantics::FunctionSymbol& fn, const char* kind) {
    const auto& d = fn.decl;
    json params = json::array();
    for (const auto& p : d.params) {
        json entry = typedName(p.name, p.type);
        entry["optional"] = p.defaultValue.has_value();
        params.push_back(std::move(entry));
    }
    json results = json::array();
    for (const auto& r : d.results) results.push_back(typedName(r.name, r.type));
    json effects = json::array();
    for (const auto& clause : d.schemaClauses)
        for (const auto& a : clause.assignments) {
            json ops = json::array();
            for (const auto& op : a.value.ops) {
                json names = json::array();
                for (const auto& n : op.names) names.push_back(nameArg(n));
                ops.push_back({{"op", effectName(op.kind)},
                               {"names", names},
                               {"type", op.type ? json(syntax::formatType(*op.type)) : json()}});
            }
            effects.push_back(
                {{"target", a.target}, {"source", a.value.source}, {"external", a.value.external}, {"ops", ops}});
        }
    json requirements = json::array();
    for (const auto& r : d.requireClauses)
        requirements.push_back({{"table", r.table},
                            {"column", nameArg(r.column)},
                            {"type", r.type ? json(syntax::formatType(*r.type)) : json()}});
    json typeParams = json::array();
    for (const auto& t : d.typeParams) typeParams.push_back(t.name);
    json out = {{"name", d.name},
                {"kind", kind},
                {"module", fn.pythonModule},
                {"typeParams", typeParams},
                {"params", params},
                {"results", results},
                {"schemaEffects", effects},
                {"requires", requirements},
                {"protocol", nullptr}};
    if (fn.owner) out["owner"] = *fn.owner;
    return out;
}

json paletteJson(const semantics::SymbolTable& symbols) {
    json stubs = json::array();
    for (const auto& [name, fn] : symbols.functions) stubs.push_back(processJson(fn, "function"));
    for (const auto& [name, cls] : symbols.classes) {
        json typeParams = json::array();
        for (const auto& t : cls.decl.typeParams) typeParams.push_back(t.name);
        json methods = json::array();
        for (const auto& [m, _] : cls.methods) methods.push_back(m);
        json entry = {{"name", name},
                      {"kind", "class"},
                      {"module", cls.pythonModule},
                      {"typeParams", typeParams},
                      {"params", json::array()},
                      {"results", json::array({{{"name", "instance"}, {"type", name}, {"refined", json::array()}}})},
                      {"schemaEffects", json::array()},
                      {"requires", json::array()},
                      {"protocol", cls.decl.protocol ? json(syntax::formatProtocol(*cls.decl.protocol)) : json()},
                      {"superType", cls.decl.superType ? json(syntax::formatType(*cls.decl.superType)) : json()},
                      {"tabular", symbols.isTabular(semantics::classType(name))},
                      {"methods", methods}};
        stubs.push_back(std::move(entry));
        for (const auto& [m, fn] : cls.methods) stubs.push_back(processJson(fn, "method"));
    }
    for (const auto& [name, e] : symbols.enums)
        stubs.push_back({{"name", name}, {"kind", "enum"}, {"module", e.pythonModule}, {"variants", e.decl.variants}});
    return stubs;
}

/// The request body as an object with a string member `field`.
std::optional<json> requestObject(std::string_view body, const char* field) {
    json j = json::parse(body, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains(field)) return std::nullopt;
    return j;
}

} // namespace

struct Service::Snapshot {
    std::vector<SourceFile> stubs;
    std::map<std::string, std::filesystem::path> datasets;
    std::string palette;
};

Service::Service(Manifest manifest) : manifest_(std::move(manifest)) { loadError_ = reload(); }

std::string Service::loadError() const {
    std::lock_guard lock(mutex_);
    return loadError_;
}

std::shared_ptr<const Service::Snapshot> Service::snapshot() const {
    std::lock_guard lock(mutex_);
    return snapshot_;
}

std::string Service::reload() {
    SourcesResult sources = readSources(manifest_);
    if (!sources.error.empty()) return sources.error;
    auto next = std::make_shared<Snapshot>();
    next->stubs = std::move(sources.stubs);
    next->datasets = manifest_.datasets;
    schema::DatasetRegistry datasets(next->datasets);
    Compilation c = compileSources(next->stubs, {}, datasets);
    if (!c.syntaxFailed) next->palette = paletteJson(c.resolved.symbols).dump();
    else next->palette = "[]";
    std::lock_guard lock(mutex_);
    snapshot_ = std::move(next);
    loadError_.clear();
    return {};
}

HttpResponse Service::handle(std::string_view method, std::string_view path, std::string_view body) {
    try {
        if (method == "POST" && path == "/reload") {
            std::string error = reload();
            if (!error.empty()) {
                std::lock_guard lock(mutex_);
                loadError_ = error;
                return reply(400, {{"error", error}});
            }
            return reply(200, {{"stubs", json::parse(snapshot()->palette)}});
        }
        auto snap = snapshot();
        if (!snap) return reply(400, {{"error", loadError()}});
        schema::DatasetRegistry datasets(snap->datasets);

        if (method == "GET" && path == "/stubs") return reply(200, {{"stubs", json::parse(snap->palette)}});

        if (method == "POST" && path == "/check") {
            auto req = requestObject(body, "source");
            if (!req || !(*req)["source"].is_string())
                return failure("E003", "request body must be {\"source\": string}");
            CheckResult check = summarize(compileSources(snap->stubs, {{kRequestFile, (*req)["source"]}}, datasets));
            return {200, checkJson(check)};
        }

        if (method == "POST" && path == "/graph/from-text") {
            auto req = requestObject(body, "source");
            if (!req || !(*req)["source"].is_string() || (req->contains("pipeline") && !(*req)["pipeline"].is_string()))
                return failure("E003", "request body must be {\"source\": string, \"pipeline\"?: string}");
            Compilation c = compileSources(snap->stubs, {{kRequestFile, (*req)["source"]}}, datasets);
            if (c.syntaxFailed) return diagnosticReply(400, c.diagnostics);
            const semantics::PipelineAnalysis* chosen = nullptr;
            for (const auto& a : c.typed.pipelines)
                if (!req->contains("pipeline") || a.pipeline->name == (*req)["pipeline"].get<std::string>()) {
                    chosen = &a;
                    break;
                }
            if (chosen == nullptr) return failure("E003", "source has no matching pipeline");
            return {200, graphsync::encodeGraph(graphsync::toGraph(*chosen, c.resolved.symbols))};
        }

        if (method == "POST" && path == "/graph/to-text") {
            auto req = requestObject(body, "graph");
            if (!req) return failure("E074", "request body must be {\"graph\": graph document}");
            const json& graph = (*req)["graph"];
            auto decoded = graphsync::decodeGraph(graph.is_string() ? graph.get<std::string>() : graph.dump());
            if (!decoded.doc) return diagnosticReply(400, decoded.diagnostics);
            Compilation stubsOnly = compileSources(snap->stubs, {}, datasets);
            auto rebuilt = graphsync::fromGraph(*decoded.doc, stubsOnly.resolved.symbols);
            if (!rebuilt.pipeline) return diagnosticReply(400, rebuilt.diagnostics);
            syntax::PipelineFile file;
            file.pipelines.push_back(std::move(*rebuilt.pipeline));
            std::string source = syntax::format(file);
            CheckResult check = summarize(compileSources(snap->stubs, {{kRequestFile, source}}, datasets));
            return reply(200, {{"source", source}, {"diagnostics", json::parse(diagnosticsJson(check.diagnostics))}});
        }
        return reply(404, {{"error", std::string(method) + " " + std::string(path) + " is not an endpoint"}});
    } catch (const std::exception& e) {
        return failure("E060", std::string("internal error: ") + e.what());
    }
}

struct HttpServer::Impl {
    explicit Impl(Service& s) : service(s) {}
    Service& service;
    httplib::Server server;
};

HttpServer::HttpServer(Service& service) : impl_(std::make_unique<Impl>(service)) {
    auto route = [this](const httplib::Request& req, httplib::Response& res) {
        HttpResponse r = impl_->service.handle(req.method, req.path, req.body);
        res.status = r.status;
        res.set_content(r.body, "application/json");
    };
    impl_->server.Get(".*", route);
    impl_->server.Post(".*", route);
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
    if (port == 0) return impl_->server.bind_to_any_port(host);
    return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool HttpServer::run() { return impl_->server.listen_after_bind(); }

void HttpServer::stop() {
    if (impl_) impl_->server.stop();
}

void HttpServer::waitUntilReady() const { impl_->server.wait_until_ready(); }

} // namespace safepipe::driver
