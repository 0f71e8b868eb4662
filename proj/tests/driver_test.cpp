#include <gtest/gtest.h>

#include <thread>
#include <unistd.h>

#include "httplib.h"
#include "json.hpp"
#include "safepipe/driver/driver.hpp"
#include "safepipe/driver/serve.hpp"
#include "safepipe/syntax/formatter.hpp"
#include "test_support.hpp"

using namespace safepipe;
using namespace safepipe::driver;
using nlohmann::json;
using safepipe::testing::codes;
using safepipe::testing::dataPath;
using safepipe::testing::readFile;
namespace fs = std::filesystem;

namespace {

/// A manifest rooted in the demo directory with the given pipeline paths.
Manifest demoManifest(const std::vector<std::string>& pipelines, const fs::path& outDir = "out") {
    json m = {{"stubPaths", {"stubs"}}, {"pipelinePaths", pipelines}, {"datasets", {{"Titanic", "data/titanic.csv"}}},
              {"outDir", outDir.string()}};
    auto r = parseManifest(m.dump(), dataPath("demo/virtual.json"));
    EXPECT_TRUE(r.manifest) << r.error;
    return *r.manifest;
}

class TempDir {
public:
    TempDir() {
        static int counter = 0;
        path_ = fs::temp_directory_path() /
                ("safepipe_driver_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    const fs::path& path() const { return path_; }

private:
    fs::path path_;
};

void writeText(const fs::path& path, const std::string& text) {
    fs::create_directories(path.parent_path());
    std::ofstream(path, std::ios::binary) << text;
}

} // namespace

TEST(Manifest, ResolvesPathsAgainstItsDirectory) {
    auto r = loadManifest(dataPath("demo/safepipe.json"));
    ASSERT_TRUE(r.manifest) << r.error;
    const Manifest& m = *r.manifest;
    const fs::path root = fs::path(dataPath("demo")).lexically_normal();
    EXPECT_EQ(m.root, root);
    ASSERT_EQ(m.stubPaths.size(), 1u);
    EXPECT_EQ(m.stubPaths[0], root / "stubs");
    EXPECT_EQ(m.datasets.at("Titanic"), root / "data" / "titanic.csv");
    EXPECT_EQ(m.outDir, root / "out");
}

TEST(Manifest, MalformedManifestsAreRejected) {
    for (const char* text : {"", "[]", "{\"name\": 3}", "{\"stubPaths\": \"stubs\"}", "{\"pipelinePaths\": [1]}",
                             "{\"datasets\": []}", "{\"datasets\": {\"a\": 1}}", "{\"outDir\": false}"}) {
        auto r = parseManifest(text, "/tmp/safepipe.json");
        EXPECT_FALSE(r.manifest) << text;
        EXPECT_FALSE(r.error.empty()) << text;
    }
    EXPECT_FALSE(loadManifest("/nonexistent/safepipe.json").manifest);
}

TEST(Manifest, DiscoverySearchesUpward) {
    TempDir dir;
    writeText(dir.path() / "safepipe.json", "{}");
    fs::create_directories(dir.path() / "a" / "b");
    auto found = findManifest(dir.path() / "a" / "b");
    ASSERT_TRUE(found);
    EXPECT_EQ(fs::canonical(*found), fs::canonical(dir.path() / "safepipe.json"));
}

TEST(Check, CleanDemoExitsZero) {
    auto r = loadManifest(dataPath("demo/safepipe.json"));
    ASSERT_TRUE(r.manifest);
    CheckResult check = runCheck(*r.manifest);
    EXPECT_EQ(check.exitCode, 0);
    EXPECT_TRUE(check.diagnostics.empty()) << renderDiagnostic(check.diagnostics.front());
    ASSERT_TRUE(check.schemas.count("predictTitanicSurvival"));
    const auto& features = check.schemas.at("predictTitanicSurvival").at("features");
    ASSERT_TRUE(features);
    EXPECT_EQ(schema::toString(*features), "{survived: Int, pclass: Int, sex: String, age: Float, fare: Float}");
}

TEST(Check, EachSeededFaultYieldsExactlyItsCodeAndLine) {
    const json expected = json::parse(readFile(dataPath("demo/faults/expected.json")));
    ASSERT_EQ(expected.size(), 8u);
    for (const auto& [file, want] : expected.items()) {
        CheckResult check = runCheck(demoManifest({"faults/" + file}));
        EXPECT_EQ(check.exitCode, 1) << file;
        ASSERT_EQ(check.diagnostics.size(), 1u) << file;
        const Diagnostic& d = check.diagnostics[0];
        EXPECT_EQ(d.code, want["code"].get<std::string>()) << file;
        EXPECT_EQ(d.span.startLine, want["line"].get<int>()) << file;
        EXPECT_EQ(d.span.file, "faults/" + file);
    }
}

TEST(Check, UnreadableSourcesExitTwo) {
    CheckResult check = runCheck(demoManifest({"no/such/dir"}));
    EXPECT_EQ(check.exitCode, 2);
    EXPECT_NE(check.error.find("no/such/dir"), std::string::npos);
    EXPECT_TRUE(check.diagnostics.empty());
}

TEST(Check, SyntaxErrorsStopLaterStages) {
    TempDir dir;
    writeText(dir.path() / "p" / "a.sdspipe", "pipeline a {\n    x = undefinedThing()\n}\n");
    writeText(dir.path() / "p" / "b.sdspipe", "pipeline b {\n    x = = 1\n}\n");
    json m = {{"pipelinePaths", {"p"}}};
    auto r = parseManifest(m.dump(), dir.path() / "safepipe.json");
    ASSERT_TRUE(r.manifest);
    CheckResult check = runCheck(*r.manifest);
    EXPECT_EQ(check.exitCode, 1);
    ASSERT_FALSE(check.diagnostics.empty());
    for (const auto& d : check.diagnostics) {
        EXPECT_EQ(d.span.file, "p/b.sdspipe");
        EXPECT_EQ(d.code.substr(0, 3), "E00");
    }
}

TEST(Check, RepeatedRunsAreIdentical) {
    for (const char* fault : {"faults/e030.sdspipe", "faults/e040.sdspipe", "pipelines"}) {
        const std::string first = checkJson(runCheck(demoManifest({fault})));
        for (int i = 0; i < 3; ++i) EXPECT_EQ(checkJson(runCheck(demoManifest({fault}))), first);
    }
}

TEST(Check, JsonDocument) {
    json doc = json::parse(checkJson(runCheck(demoManifest({"faults/e031.sdspipe"}))));
    EXPECT_EQ(doc["version"], 1);
    ASSERT_EQ(doc["diagnostics"].size(), 1u);
    const json& d = doc["diagnostics"][0];
    EXPECT_EQ(d["code"], "E031");
    EXPECT_EQ(d["severity"], "error");
    EXPECT_EQ(d["file"], "faults/e031.sdspipe");
    EXPECT_EQ(d["line"], 4);
    EXPECT_GE(d["endCol"].get<int>(), d["col"].get<int>());
    EXPECT_TRUE(doc["schemas"]["predictTitanicSurvival"]["titanic"].is_array());
}

TEST(Compile, WritesGoldenPythonPerPipeline) {
    TempDir dir;
    CompileResult r = runCompile(demoManifest({"pipelines"}, dir.path()));
    ASSERT_EQ(r.check.exitCode, 0);
    ASSERT_EQ(r.written.size(), 2u);
    EXPECT_EQ(r.written[0], dir.path() / "predictTitanicSurvival.py");
    EXPECT_EQ(r.written[1], dir.path() / "titanicStart.py");
    EXPECT_EQ(readFile(r.written[0].string()), readFile(dataPath("codegen/golden/predict_titanic_survival.py")));
    EXPECT_EQ(readFile(r.written[1].string()), readFile(dataPath("codegen/golden/titanic_start.py")));
}

TEST(Compile, DirtyProjectWritesNothing) {
    TempDir dir;
    const fs::path out = dir.path() / "out";
    CompileResult r = runCompile(demoManifest({"pipelines/titanic_start.sdspipe", "faults/e040.sdspipe"}, out));
    EXPECT_EQ(r.check.exitCode, 1);
    EXPECT_EQ(codes(r.check.diagnostics), std::vector<std::string>{"E040"});
    EXPECT_TRUE(r.written.empty());
    EXPECT_FALSE(fs::exists(out));
}

TEST(Compile, EmptyProjectWritesNoFiles) {
    TempDir dir;
    const fs::path out = dir.path() / "out";
    CompileResult r = runCompile(demoManifest({}, out));
    EXPECT_EQ(r.check.exitCode, 0);
    EXPECT_TRUE(r.written.empty());
    EXPECT_FALSE(fs::exists(out));
}

//===----------------------------------------------------------------------===//
// Editor endpoints
//===----------------------------------------------------------------------===//

namespace {

Service demoService() { return Service(*loadManifest(dataPath("demo/safepipe.json")).manifest); }

json body(const HttpResponse& r) { return json::parse(r.body); }

std::string titanicSource() { return readFile(dataPath("demo/pipelines/titanic.sdspipe")); }

} // namespace

TEST(Serve, StubsPalette) {
    Service service = demoService();
    ASSERT_EQ(service.loadError(), "");
    HttpResponse r = service.handle("GET", "/stubs", "");
    ASSERT_EQ(r.status, 200);
    json doc = body(r);
    EXPECT_EQ(doc["version"], 1);
    std::map<std::string, json> byName;
    for (const auto& s : doc["stubs"]) byName[s.value("owner", "") + "." + s["name"].get<std::string>()] = s;

    const json& load = byName.at(".loadDataset");
    EXPECT_EQ(load["kind"], "function");
    EXPECT_EQ(load["module"], "safeds_demo.data");
    EXPECT_EQ(load["params"][0]["name"], "name");
    EXPECT_EQ(load["params"][0]["type"], "String");
    EXPECT_EQ(load["results"][0]["name"], "dataset");
    EXPECT_EQ(load["schemaEffects"][0],
              json::parse(R"({"target":"dataset","source":"name","external":true,"ops":[]})"));

    const json& split = byName.at("Table.splitRows");
    EXPECT_EQ(split["kind"], "method");
    EXPECT_EQ(split["params"][0]["type"], "Float");
    EXPECT_EQ(split["params"][0]["refined"], json::parse(R"(["it >= 0.0", "it <= 1.0"])"));
    EXPECT_EQ(split["results"].size(), 2u);

    const json& transform = byName.at("Table.transformColumn");
    EXPECT_EQ(transform["requires"][0],
              json::parse(R"({"table":"this","column":{"literal":false,"text":"name"},"type":"Float"})"));
    EXPECT_EQ(transform["schemaEffects"][0]["ops"][0],
              json::parse(R"({"op":"retype","names":[{"literal":false,"text":"name"}],"type":"Float"})"));

    const json& tree = byName.at(".DecisionTree");
    EXPECT_EQ(tree["kind"], "class");
    EXPECT_EQ(tree["protocol"], "fit predict*");
    EXPECT_EQ(tree["results"][0]["name"], "instance");
    EXPECT_EQ(byName.at(".Table")["tabular"], true);
}

TEST(Serve, CheckEndpoint) {
    Service service = demoService();
    HttpResponse ok = service.handle("POST", "/check", json{{"source", titanicSource()}}.dump());
    ASSERT_EQ(ok.status, 200);
    EXPECT_TRUE(body(ok)["diagnostics"].empty());
    EXPECT_TRUE(body(ok)["schemas"]["predictTitanicSurvival"]["scaled"].is_array());

    HttpResponse bad =
        service.handle("POST", "/check", json{{"source", readFile(dataPath("demo/faults/e040.sdspipe"))}}.dump());
    ASSERT_EQ(bad.status, 200);
    ASSERT_EQ(body(bad)["diagnostics"].size(), 1u);
    EXPECT_EQ(body(bad)["diagnostics"][0]["code"], "E040");
    EXPECT_EQ(body(bad)["diagnostics"][0]["line"], 9);
}

TEST(Serve, MalformedRequests) {
    Service service = demoService();
    for (const char* b : {"", "not json", "[]", "{}", "{\"source\": 3}"}) {
        HttpResponse r = service.handle("POST", "/check", b);
        EXPECT_EQ(r.status, 400) << b;
        EXPECT_EQ(body(r)["diagnostics"][0]["code"], "E003") << b;
        r = service.handle("POST", "/graph/from-text", b);
        EXPECT_EQ(r.status, 400) << b;
        EXPECT_EQ(body(r)["diagnostics"][0]["code"], "E003") << b;
    }
    for (const char* b : {"", "{}", "{\"graph\": 1}", "{\"graph\": {\"version\": 1}}", "{\"graph\": \"{\"}"}) {
        HttpResponse r = service.handle("POST", "/graph/to-text", b);
        EXPECT_EQ(r.status, 400) << b;
        EXPECT_EQ(body(r)["diagnostics"][0]["code"], "E074") << b;
    }
    HttpResponse syntax = service.handle("POST", "/graph/from-text", json{{"source", "pipeline p { x = = 1 }"}}.dump());
    EXPECT_EQ(syntax.status, 400);
    EXPECT_EQ(body(syntax)["diagnostics"][0]["code"].get<std::string>().substr(0, 3), "E00");

    HttpResponse missing = service.handle("GET", "/nowhere", "");
    EXPECT_EQ(missing.status, 404);
    EXPECT_EQ(body(missing)["version"], 1);
}

TEST(Serve, GraphRoundTripThroughHandlers) {
    Service service = demoService();
    for (const char* file : {"demo/pipelines/titanic.sdspipe", "demo/pipelines/titanic_start.sdspipe"}) {
        const std::string source = readFile(dataPath(file));
        HttpResponse graph = service.handle("POST", "/graph/from-text", json{{"source", source}}.dump());
        ASSERT_EQ(graph.status, 200) << graph.body;
        EXPECT_EQ(body(graph)["version"], 1);
        HttpResponse text = service.handle("POST", "/graph/to-text", json{{"graph", body(graph)}}.dump());
        ASSERT_EQ(text.status, 200) << text.body;
        EXPECT_TRUE(body(text)["diagnostics"].empty());
        auto original = syntax::parsePipelineSource(source, "a");
        auto rebuilt = syntax::parsePipelineSource(body(text)["source"].get<std::string>(), "a");
        EXPECT_EQ(syntax::format(rebuilt.file), syntax::format(original.file));
    }
}

TEST(Serve, ChoosesPipelineByName) {
    Service service = demoService();
    const std::string both = titanicSource() + readFile(dataPath("demo/pipelines/titanic_start.sdspipe"));
    HttpResponse r = service.handle("POST", "/graph/from-text", json{{"source", both}, {"pipeline", "titanicStart"}}.dump());
    ASSERT_EQ(r.status, 200);
    EXPECT_EQ(body(r)["pipelineName"], "titanicStart");
    r = service.handle("POST", "/graph/from-text", json{{"source", both}, {"pipeline", "other"}}.dump());
    EXPECT_EQ(r.status, 400);
}

TEST(Serve, GraphErrorsAreRejected) {
    Service service = demoService();
    json graph = body(service.handle("POST", "/graph/from-text", json{{"source", titanicSource()}}.dump()));
    json cyclic = graph;
    ASSERT_EQ(cyclic["nodes"][0]["processName"], "loadDataset");
    cyclic["nodes"][0]["literals"].erase("name");
    cyclic["edges"].push_back(json::parse(R"({"from":{"node":"n1","port":"result"},"to":{"node":"n0","port":"name"},
                                              "varName":"features"})"));
    HttpResponse r = service.handle("POST", "/graph/to-text", json{{"graph", cyclic}}.dump());
    ASSERT_EQ(r.status, 400) << r.body;
    EXPECT_EQ(body(r)["diagnostics"][0]["code"], "E071");

    json unknown = graph;
    unknown["nodes"][0]["processName"] = "noSuchProcess";
    r = service.handle("POST", "/graph/to-text", json{{"graph", unknown}}.dump());
    ASSERT_EQ(r.status, 400);
    EXPECT_EQ(body(r)["diagnostics"][0]["code"], "E073");
}

TEST(Serve, ReloadPicksUpNewStubs) {
    TempDir dir;
    writeText(dir.path() / "stubs" / "a.sdsstub", "fun first() -> r: Int\n");
    writeText(dir.path() / "safepipe.json", R"({"stubPaths": ["stubs"]})");
    Service service(*loadManifest(dir.path() / "safepipe.json").manifest);
    EXPECT_EQ(body(service.handle("GET", "/stubs", ""))["stubs"].size(), 1u);
    writeText(dir.path() / "stubs" / "b.sdsstub", "fun second() -> r: Int\n");
    EXPECT_EQ(body(service.handle("GET", "/stubs", ""))["stubs"].size(), 1u);
    HttpResponse r = service.handle("POST", "/reload", "");
    ASSERT_EQ(r.status, 200);
    EXPECT_EQ(body(r)["stubs"].size(), 2u);
    EXPECT_EQ(body(service.handle("GET", "/stubs", ""))["stubs"].size(), 2u);
}

TEST(Serve, LoopbackHttp) {
    Service service = demoService();
    HttpServer server(service);
    const int port = server.bind("127.0.0.1", 0);
    ASSERT_GT(port, 0);
    std::thread thread([&] { server.run(); });
    server.waitUntilReady();

    httplib::Client client("127.0.0.1", port);
    auto stubs = client.Get("/stubs");
    ASSERT_TRUE(stubs);
    EXPECT_EQ(stubs->status, 200);
    EXPECT_EQ(stubs->get_header_value("Content-Type"), "application/json");
    EXPECT_FALSE(json::parse(stubs->body)["stubs"].empty());

    const std::string source = titanicSource();
    auto graph = client.Post("/graph/from-text", json{{"source", source}}.dump(), "application/json");
    ASSERT_TRUE(graph);
    ASSERT_EQ(graph->status, 200);
    auto text = client.Post("/graph/to-text", json{{"graph", json::parse(graph->body)}}.dump(), "application/json");
    ASSERT_TRUE(text);
    ASSERT_EQ(text->status, 200);
    EXPECT_EQ(json::parse(text->body)["source"], syntax::format(syntax::parsePipelineSource(source, "a").file));

    auto bad = client.Post("/check", "{", "application/json");
    ASSERT_TRUE(bad);
    EXPECT_EQ(bad->status, 400);

    server.stop();
    thread.join();
}
