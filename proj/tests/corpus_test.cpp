#include <gtest/gtest.h>

#include "json.hpp"
#include "safepipe/driver/driver.hpp"
#include "safepipe/driver/serve.hpp"
#include "safepipe/graphsync/graph.hpp"
#include "safepipe/syntax/formatter.hpp"
#include "test_support.hpp"

using namespace safepipe;
using nlohmann::json;
using safepipe::testing::dataPath;
namespace fs = std::filesystem;

namespace {

driver::Manifest corpusManifest() {
    auto r = driver::loadManifest(dataPath("corpus/safepipe.json"));
    EXPECT_TRUE(r.manifest) << r.error;
    return *r.manifest;
}

driver::SourcesResult corpusSources() {
    auto sources = driver::readSources(corpusManifest());
    EXPECT_EQ(sources.error, "");
    return sources;
}

} // namespace

TEST(Corpus, Size) {
    auto sources = corpusSources();
    EXPECT_GE(sources.pipelines.size(), 25u);
    EXPECT_GE(sources.stubs.size(), 10u);
}

TEST(Corpus, ParseFormatParse) {
    auto sources = corpusSources();
    for (const auto& f : sources.pipelines) {
        auto first = syntax::parsePipelineSource(f.text, f.path);
        ASSERT_TRUE(first.diagnostics.empty()) << f.path;
        const std::string formatted = syntax::format(first.file);
        auto second = syntax::parsePipelineSource(formatted, f.path);
        ASSERT_TRUE(second.diagnostics.empty()) << f.path << "\n" << formatted;
        EXPECT_EQ(second.file, first.file) << f.path;
        EXPECT_EQ(syntax::format(second.file), formatted) << f.path;
    }
    for (const auto& f : sources.stubs) {
        auto first = syntax::parseStubSource(f.text, f.path);
        ASSERT_TRUE(first.diagnostics.empty()) << f.path;
        const std::string formatted = syntax::format(first.file);
        auto second = syntax::parseStubSource(formatted, f.path);
        ASSERT_TRUE(second.diagnostics.empty()) << f.path << "\n" << formatted;
        EXPECT_EQ(second.file, first.file) << f.path;
        EXPECT_EQ(syntax::format(second.file), formatted) << f.path;
    }
}

TEST(Corpus, MessyLayoutIsNormalized) {
    auto r = syntax::parsePipelineSource(
        safepipe::testing::readFile(dataPath("corpus/pipelines/03_messy_layout.sdspipe")), "m");
    EXPECT_EQ(syntax::format(r.file), "pipeline messyLayout {\n"
                                      "    sales = readCsv(\"Sales\")\n"
                                      "    units = sales.column(\"units\")\n"
                                      "    avg = units.mean()\n"
                                      "}\n");
}

TEST(Corpus, ChecksCleanExceptOneWarning) {
    driver::CheckResult check = driver::runCheck(corpusManifest());
    EXPECT_EQ(check.exitCode, 0);
    ASSERT_EQ(check.diagnostics.size(), 1u);
    EXPECT_EQ(check.diagnostics[0].code, "W001");
    EXPECT_EQ(check.diagnostics[0].span.file, "pipelines/21_discards.sdspipe");
    EXPECT_EQ(check.diagnostics[0].span.startLine, 4);
    EXPECT_EQ(driver::checkJson(driver::runCheck(corpusManifest())), driver::checkJson(check));

    const auto& chain = check.schemas.at("schemaChain");
    ASSERT_TRUE(chain.at("back"));
    EXPECT_EQ(schema::toString(*chain.at("back")), "{region: String, quantity: Float, price: Float, returned: Boolean}");
    ASSERT_TRUE(chain.at("flagged"));
    EXPECT_EQ(schema::toString(*chain.at("flagged")),
              "{region: String, quantity: Int, price: Float, returned: Boolean, checked: Boolean}");
}

TEST(Corpus, GraphRoundTrip) {
    auto sources = corpusSources();
    auto manifest = corpusManifest();
    schema::DatasetRegistry datasets(manifest.datasets);
    driver::Compilation c = driver::compileSources(sources.stubs, sources.pipelines, datasets);
    ASSERT_FALSE(c.syntaxFailed);
    ASSERT_GE(c.typed.pipelines.size(), 26u);
    for (const auto& analysis : c.typed.pipelines) {
        const std::string& name = analysis.pipeline->name;
        graphsync::GraphDoc doc = graphsync::toGraph(analysis, c.resolved.symbols);
        auto decoded = graphsync::decodeGraph(graphsync::encodeGraph(doc));
        ASSERT_TRUE(decoded.doc) << name;
        EXPECT_EQ(*decoded.doc, doc) << name;
        auto rebuilt = graphsync::fromGraph(*decoded.doc, c.resolved.symbols);
        ASSERT_TRUE(rebuilt.pipeline) << name << ": " << renderDiagnostic(rebuilt.diagnostics.at(0));
        EXPECT_EQ(*rebuilt.pipeline, *analysis.pipeline) << name << "\n" << syntax::format(*rebuilt.pipeline);
    }
}

TEST(Corpus, GraphRoundTripThroughHandlers) {
    driver::Service service(corpusManifest());
    ASSERT_EQ(service.loadError(), "");
    for (const auto& f : corpusSources().pipelines) {
        auto original = syntax::parsePipelineSource(f.text, f.path);
        for (const auto& pipeline : original.file.pipelines) {
            auto graph = service.handle("POST", "/graph/from-text", json{{"source", f.text}, {"pipeline", pipeline.name}}.dump());
            ASSERT_EQ(graph.status, 200) << f.path << graph.body;
            auto text = service.handle("POST", "/graph/to-text", json{{"graph", json::parse(graph.body)}}.dump());
            ASSERT_EQ(text.status, 200) << f.path << text.body;
            auto rebuilt = syntax::parsePipelineSource(json::parse(text.body)["source"].get<std::string>(), f.path);
            ASSERT_EQ(rebuilt.file.pipelines.size(), 1u);
            EXPECT_EQ(rebuilt.file.pipelines[0], pipeline) << f.path;
        }
    }
}
