#include <gtest/gtest.h>

#include <random>
#include <set>

#include "json.hpp"

#include "safepipe/graphsync/graph.hpp"
#include "safepipe/syntax/formatter.hpp"
#include "test_support.hpp"

using namespace safepipe;
using namespace safepipe::graphsync;
using safepipe::testing::codes;
using safepipe::testing::dataPath;
using safepipe::testing::programFrom;
using safepipe::testing::readFile;

namespace {

struct Checked {
    syntax::Program program;
    semantics::ResolveResult resolved;
    semantics::TypeCheckResult typed;

    explicit Checked(const std::vector<std::string>& pipelines) {
        program = programFrom({readFile(dataPath("demo/stubs/data.sdsstub")), readFile(dataPath("demo/stubs/ml.sdsstub")),
                               readFile(dataPath("codegen/stubs/util.sdsstub"))},
                              pipelines);
        resolved = semantics::resolve(program);
        typed = semantics::checkTypes(program, resolved.symbols);
    }

    GraphDoc graph(std::size_t i = 0) const { return toGraph(typed.pipelines.at(i), resolved.symbols); }
    const syntax::PipelineDecl& pipeline(std::size_t i = 0) const { return *typed.pipelines.at(i).pipeline; }
};

const char* const kFixtures[] = {
    "demo/pipelines/titanic.sdspipe",   "demo/pipelines/titanic_start.sdspipe", "codegen/pipelines/empty.sdspipe",
    "codegen/pipelines/lambdas.sdspipe", "codegen/pipelines/literals.sdspipe",
};

GraphDoc decodeOk(const std::string& text) {
    auto r = decodeGraph(text);
    EXPECT_TRUE(r.diagnostics.empty()) << (r.diagnostics.empty() ? "" : r.diagnostics[0].message);
    return r.doc.value_or(GraphDoc{});
}

/// Round trip through the graph and its JSON form.
void expectRoundTrip(const Checked& c, std::size_t i = 0) {
    const GraphDoc graph = c.graph(i);
    const std::string json = encodeGraph(graph);
    const GraphDoc decoded = decodeOk(json);
    EXPECT_EQ(decoded, graph);
    EXPECT_EQ(encodeGraph(decoded), json);
    auto rebuilt = fromGraph(decoded, c.resolved.symbols);
    ASSERT_TRUE(rebuilt.diagnostics.empty()) << rebuilt.diagnostics[0].code << " " << rebuilt.diagnostics[0].message;
    ASSERT_TRUE(rebuilt.pipeline.has_value());
    EXPECT_EQ(*rebuilt.pipeline, c.pipeline(i)) << syntax::format(*rebuilt.pipeline) << "\nexpected\n"
                                                << syntax::format(c.pipeline(i));
}

/// Random well-typed pipelines over the demo and codegen stubs.
class PipelineGenerator {
public:
    explicit PipelineGenerator(unsigned seed) : rng_(seed) {}

    std::string pipeline() {
        floats_.clear();
        tables_.clear();
        models_.clear();
        lists_.clear();
        next_ = 0;
        std::string body;
        const int statements = pick(9);
        for (int s = 0; s < statements; ++s) body += "    " + statement() + "\n";
        return "pipeline generated {\n" + body + "}\n";
    }

private:
    int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }
    std::string fresh() { return "v" + std::to_string(next_++); }
    std::string any(const std::vector<std::string>& names) { return names[static_cast<std::size_t>(pick(static_cast<int>(names.size())))]; }

    std::string floatOperand(int depth) {
        switch (pick(depth > 0 ? 6 : 4)) {
        case 0:
            if (!floats_.empty()) return any(floats_);
            [[fallthrough]];
        case 1: return std::to_string(pick(20)) + ".5";
        case 2: return "-" + std::to_string(pick(5)) + ".25";
        case 3: return floats_.empty() ? "1.0" : "-" + any(floats_);
        case 4: return "scale(" + floatOperand(depth - 1) + ", " + floatOperand(depth - 1) + ")";
        default: return "randomRatio()";
        }
    }

    std::string columns() {
        static const char* const kNames[] = {"age", "fare", "pclass", "sex", "survived"};
        std::string out = "[";
        const int n = pick(4);
        for (int i = 0; i < n; ++i) out += std::string(i ? ", " : "") + "\"" + kNames[pick(5)] + "\"";
        return out + "]";
    }

    std::string target(std::vector<std::string>& pool) {
        if (pick(6) == 0) return "_";
        std::string name = fresh();
        pool.push_back(name);
        return name;
    }

    std::string statement() {
        switch (pick(9)) {
        case 0: {
            std::string t = target(tables_);
            return t + " = loadDataset(\"Titanic\")";
        }
        case 1:
            if (!tables_.empty()) {
                std::string receiver = any(tables_);
                return target(tables_) + " = " + receiver + ".keepColumns(" + columns() + ")";
            }
            [[fallthrough]];
        case 2:
            if (!tables_.empty()) {
                std::string receiver = any(tables_);
                std::string args = pick(2) ? "ratio = 0.5" : "0.25";
                std::string first = target(tables_);
                return first + ", " + target(tables_) + " = " + receiver + ".splitRows(" + args + ")";
            }
            [[fallthrough]];
        case 3: {
            std::string value = floatOperand(2);
            std::string factor = floatOperand(2);
            if (pick(2)) return target(floats_) + " = scale(" + value + ", factor = " + factor + ")";
            return target(floats_) + " = scale(" + value + ", " + factor + ")";
        }
        case 4: return "logMessage(\"step " + std::to_string(pick(100)) + "\")";
        case 5: return target(models_) + " = DecisionTree()";
        case 6:
            if (!models_.empty() && !tables_.empty()) return any(models_) + ".fit(" + any(tables_) + ", \"survived\")";
            [[fallthrough]];
        case 7:
            if (!floats_.empty()) {
                std::string source = any(floats_);
                return target(floats_) + " = " + source;
            }
            [[fallthrough]];
        default: {
            std::string values = floats_.empty() ? "[1.0]" : "[" + any(floats_) + ", 2.0]";
            return target(lists_) + " = mapValues(" + values + ", (x) -> {\n        y = scale(x, 2.0)\n    })";
        }
        }
    }

    std::mt19937 rng_;
    std::vector<std::string> floats_;
    std::vector<std::string> tables_;
    std::vector<std::string> models_;
    std::vector<std::string> lists_;
    int next_ = 0;
};

} // namespace

TEST(ToGraph, TitanicStart) {
    Checked c({readFile(dataPath("demo/pipelines/titanic_start.sdspipe"))});
    const GraphDoc g = c.graph();
    EXPECT_EQ(g.pipelineName, "titanicStart");
    ASSERT_EQ(g.nodes.size(), 3U);
    EXPECT_EQ(g.nodes[0].processName, "loadDataset");
    EXPECT_EQ(g.nodes[0].kind, NodeKind::Function);
    EXPECT_EQ(g.nodes[0].literals.at("name"), Literal{std::string("Titanic")});
    EXPECT_EQ(g.nodes[1].kind, NodeKind::Method);
    EXPECT_EQ(g.nodes[1].processName, "keepColumns");
    EXPECT_EQ(g.nodes[1].receiverVar, std::optional<std::string>("titanic"));
    EXPECT_EQ(g.nodes[2].processName, "getColumn");
    ASSERT_EQ(g.edges.size(), 2U);
    EXPECT_EQ(g.edges[0], (GraphEdge{{"n0", "dataset"}, {"n1", "this"}, "titanic"}));
    EXPECT_EQ(g.edges[1], (GraphEdge{{"n1", "result"}, {"n2", "this"}, "features"}));
    ASSERT_EQ(g.outputs.size(), 1U);
    EXPECT_EQ(g.outputs[0], (DanglingOutput{{"n2", "column"}, "ages"}));
}

TEST(ToGraph, SmallCases) {
    Checked single({"pipeline one {\n    x = randomRatio()\n}"});
    EXPECT_EQ(single.graph().nodes.size(), 1U);
    EXPECT_TRUE(single.graph().edges.empty());
    EXPECT_EQ(single.graph().outputs.size(), 1U);

    Checked empty({"pipeline none {}"});
    EXPECT_TRUE(empty.graph().nodes.empty());
    EXPECT_EQ(encodeGraph(empty.graph()), R"({"edges":[],"nodes":[],"outputs":[],"pipelineName":"none","version":1})");
}

TEST(ToGraph, EdgesCountDirectReferences) {
    for (const char* fixture : kFixtures) {
        Checked c({readFile(dataPath(fixture))});
        std::set<std::string> defined;
        std::size_t expected = 0;
        for (const auto& s : c.pipeline().body) {
            const auto* call = s.expression().as<syntax::Call>();
            auto isDefined = [&](const syntax::Expression& e) {
                const auto* ref = e.as<syntax::Reference>();
                return ref != nullptr && defined.count(ref->name) != 0;
            };
            if (call != nullptr) {
                if (const auto* access = call->callee->as<syntax::MemberAccess>(); access && isDefined(*access->receiver))
                    ++expected;
                for (const auto& a : call->args)
                    if (isDefined(*a.value)) ++expected;
            }
            if (const auto* a = std::get_if<syntax::Assignment>(&s.node))
                for (const auto& t : a->assignees)
                    if (t.name) defined.insert(*t.name);
        }
        EXPECT_EQ(c.graph().edges.size(), expected) << fixture;
    }
}

TEST(GraphRoundTrip, Fixtures) {
    for (const char* fixture : kFixtures) {
        SCOPED_TRACE(fixture);
        Checked c({readFile(dataPath(fixture))});
        ASSERT_TRUE(c.typed.diagnostics.empty());
        expectRoundTrip(c);
    }
}

TEST(GraphRoundTrip, UnresolvedAndRejectedCallsBecomeExpressionNodes) {
    Checked c({R"(pipeline odd {
    a = mystery(1, 2)
    b = scale("text", 2.0)
    c = a
    scale(b, a)
})"});
    ASSERT_FALSE(c.resolved.diagnostics.empty());
    const GraphDoc g = c.graph();
    EXPECT_EQ(g.nodes[0].kind, NodeKind::Expression);
    EXPECT_EQ(g.nodes[0].source, "mystery(1, 2)");
    EXPECT_EQ(g.nodes[1].kind, NodeKind::Expression);
    EXPECT_EQ(g.nodes[2].kind, NodeKind::Expression);
    expectRoundTrip(c);
}

TEST(GraphRoundTrip, RandomPipelines) {
    PipelineGenerator generator(4242);
    int checked = 0;
    for (int i = 0; i < 300; ++i) {
        const std::string source = generator.pipeline();
        SCOPED_TRACE(source);
        Checked c({source});
        ASSERT_TRUE(c.resolved.diagnostics.empty()) << c.resolved.diagnostics[0].message;
        ASSERT_TRUE(c.typed.diagnostics.empty()) << c.typed.diagnostics[0].message;
        expectRoundTrip(c);
        ++checked;
    }
    EXPECT_EQ(checked, 300);
}

TEST(FromGraph, EditorNodesWithoutLayoutHints) {
    Checked c({"pipeline none {}"});
    const GraphDoc g = decodeOk(R"({"version":1,"pipelineName":"built","nodes":[
        {"id":"b","kind":"method","processName":"keepColumns","index":1,"literals":{"columnNames":["age"]}},
        {"id":"a","kind":"function","processName":"loadDataset","index":0,"literals":{"name":"Titanic"}},
        {"id":"c","kind":"function","processName":"scale","index":2,"literals":{"factor":2.0,"value":-1}}],
      "edges":[{"from":{"node":"a","port":"dataset"},"to":{"node":"b","port":"this"},"varName":"titanic"}],
      "outputs":[{"from":{"node":"b","port":"result"},"varName":"kept"}]})");
    auto r = fromGraph(g, c.resolved.symbols);
    ASSERT_TRUE(r.diagnostics.empty()) << r.diagnostics[0].message;
    EXPECT_EQ(syntax::format(*r.pipeline), R"(pipeline built {
    titanic = loadDataset("Titanic")
    kept = titanic.keepColumns(["age"])
    unused1 = scale(-1, 2.0)
}
)");
}

TEST(FromGraph, TiesBreakByIndexThenId) {
    Checked c({"pipeline none {}"});
    const GraphDoc g = decodeOk(R"({"version":1,"pipelineName":"p","nodes":[
        {"id":"z","kind":"function","processName":"randomRatio","index":0},
        {"id":"y","kind":"function","processName":"logMessage","index":2,"literals":{"message":"y"},"assignees":0},
        {"id":"x","kind":"function","processName":"logMessage","index":1,"literals":{"message":"x"},"assignees":0}],
      "edges":[],"outputs":[{"from":{"node":"z","port":"ratio"},"varName":"r"}]})");
    auto r = fromGraph(g, c.resolved.symbols);
    ASSERT_TRUE(r.pipeline);
    EXPECT_EQ(syntax::format(*r.pipeline), R"(pipeline p {
    r = randomRatio()
    logMessage("x")
    logMessage("y")
}
)");
}

TEST(FromGraph, CycleIsE071) {
    Checked c({"pipeline none {}"});
    const GraphDoc g = decodeOk(R"({"version":1,"pipelineName":"p","nodes":[
        {"id":"a","kind":"function","processName":"scale","index":0,"literals":{"factor":1.0}},
        {"id":"b","kind":"function","processName":"scale","index":1,"literals":{"factor":1.0}}],
      "edges":[{"from":{"node":"a","port":"scaled"},"to":{"node":"b","port":"value"},"varName":"x"},
               {"from":{"node":"b","port":"scaled"},"to":{"node":"a","port":"value"},"varName":"y"}],
      "outputs":[]})");
    auto r = fromGraph(g, c.resolved.symbols);
    EXPECT_FALSE(r.pipeline);
    EXPECT_EQ(codes(r.diagnostics), std::vector<std::string>{"E071"});
}

TEST(FromGraph, TypeMismatchedEdgeIsE072) {
    Checked c({"pipeline none {}"});
    const GraphDoc g = decodeOk(R"({"version":1,"pipelineName":"p","nodes":[
        {"id":"a","kind":"function","processName":"randomRatio","index":0},
        {"id":"b","kind":"function","processName":"loadDataset","index":1}],
      "edges":[{"from":{"node":"a","port":"ratio"},"to":{"node":"b","port":"name"},"varName":"r"}],
      "outputs":[]})");
    auto r = fromGraph(g, c.resolved.symbols);
    EXPECT_EQ(codes(r.diagnostics), std::vector<std::string>{"E072"});

    const GraphDoc unknownPort = decodeOk(R"({"version":1,"pipelineName":"p","nodes":[
        {"id":"a","kind":"function","processName":"randomRatio","index":0},
        {"id":"b","kind":"function","processName":"scale","index":1,"literals":{"factor":1.0}}],
      "edges":[{"from":{"node":"a","port":"ratio"},"to":{"node":"b","port":"nonsense"},"varName":"r"}],
      "outputs":[]})");
    EXPECT_EQ(codes(fromGraph(unknownPort, c.resolved.symbols).diagnostics), std::vector<std::string>{"E072"});
}

TEST(FromGraph, UnknownProcessIsE073) {
    Checked c({"pipeline none {}"});
    const GraphDoc g = decodeOk(R"({"version":1,"pipelineName":"p","nodes":[
        {"id":"a","kind":"function","processName":"nope","index":0},
        {"id":"b","kind":"method","processName":"nope","index":1,"receiverVar":"t"}],
      "edges":[],"outputs":[]})");
    EXPECT_EQ(codes(fromGraph(g, c.resolved.symbols).diagnostics), (std::vector<std::string>{"E073", "E073"}));
}

TEST(FromGraph, BrokenEmbeddedSourceIsE074) {
    Checked c({"pipeline none {}"});
    const GraphDoc g = decodeOk(R"({"version":1,"pipelineName":"p","nodes":[
        {"id":"a","kind":"expression","index":0,"source":"scale(1.0,","results":["value"]}],
      "edges":[],"outputs":[]})");
    EXPECT_EQ(codes(fromGraph(g, c.resolved.symbols).diagnostics), std::vector<std::string>{"E074"});
}

TEST(GraphJson, MalformedDocumentsAreE074) {
    const char* const kBad[] = {
        "",
        "not json",
        "[]",
        "{}",
        R"({"version":2,"pipelineName":"p","nodes":[],"edges":[],"outputs":[]})",
        R"({"version":"1","pipelineName":"p","nodes":[],"edges":[],"outputs":[]})",
        R"({"version":1,"nodes":[],"edges":[],"outputs":[]})",
        R"({"version":1,"pipelineName":"p","nodes":{},"edges":[],"outputs":[]})",
        R"({"version":1,"pipelineName":"p","nodes":[{"id":"a","kind":"lambda","index":0}],"edges":[],"outputs":[]})",
        R"({"version":1,"pipelineName":"p","nodes":[{"id":"a","kind":"function","index":0}],"edges":[],"outputs":[]})",
        R"({"version":1,"pipelineName":"p","nodes":[{"id":"a","kind":"function","processName":"f","index":1}],"edges":[],"outputs":[]})",
        R"({"version":1,"pipelineName":"p","nodes":[{"id":"a","kind":"function","processName":"f","index":0},
            {"id":"a","kind":"function","processName":"f","index":1}],"edges":[],"outputs":[]})",
        R"({"version":1,"pipelineName":"p","nodes":[{"id":"a","kind":"function","processName":"f","index":0}],
            "edges":[{"from":{"node":"a","port":"r"},"to":{"node":"q","port":"x"},"varName":"v"}],"outputs":[]})",
        R"({"version":1,"pipelineName":"p","nodes":[{"id":"a","kind":"function","processName":"f","index":0,"literals":{"x":null}}],
            "edges":[],"outputs":[]})",
        R"j({"version":1,"pipelineName":"p","nodes":[{"id":"a","kind":"function","processName":"f","index":0,
            "literals":{"x":1},"expressions":{"x":"g(1)"}}],"edges":[],"outputs":[]})j",
        R"({"version":1,"pipelineName":"p","nodes":[{"id":"a","kind":"function","processName":"f","index":0},
            {"id":"b","kind":"function","processName":"f","index":1,"literals":{"x":1}}],
            "edges":[{"from":{"node":"a","port":"r"},"to":{"node":"b","port":"x"},"varName":"v"}],"outputs":[]})",
        R"({"version":1,"pipelineName":"p","nodes":[{"id":"a","kind":"function","processName":"f","index":0},
            {"id":"b","kind":"function","processName":"f","index":1}],
            "edges":[{"from":{"node":"a","port":"r"},"to":{"node":"b","port":"x"},"varName":"v"},
                     {"from":{"node":"a","port":"s"},"to":{"node":"b","port":"y"},"varName":"v"}],"outputs":[]})",
        R"({"version":1,"pipelineName":"p","nodes":[{"id":"a","kind":"function","processName":"f","index":0},
            {"id":"b","kind":"function","processName":"f","index":1}],
            "edges":[{"from":{"node":"a","port":"r"},"to":{"node":"b","port":"x"},"varName":"v"}],
            "outputs":[{"from":{"node":"a","port":"r"},"varName":"v"}]})",
        R"({"version":1,"pipelineName":"p","nodes":[{"id":"a","kind":"method","processName":"f","index":0,"results":["r"]}],
            "edges":[],"outputs":[{"from":{"node":"a","port":"q"},"varName":"v"}]})",
    };
    for (const char* text : kBad) {
        auto r = decodeGraph(text);
        EXPECT_FALSE(r.doc) << text;
        EXPECT_EQ(codes(r.diagnostics), std::vector<std::string>{"E074"}) << text;
    }
}

TEST(GraphJson, CanonicalEncoding) {
    Checked c({readFile(dataPath("demo/pipelines/titanic_start.sdspipe"))});
    const std::string json = encodeGraph(c.graph());
    EXPECT_EQ(json.find(' '), std::string::npos);
    EXPECT_EQ(json.rfind(R"({"edges":[{"from":{"node":"n0","port":"dataset"},"to":{"node":"n1","port":"this"},"varName":"titanic"})", 0), 0U)
        << json;
    auto reordered = nlohmann::json::parse(json);
    EXPECT_EQ(encodeGraph(decodeOk(reordered.dump(2))), json);
}
