#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "json.hpp"

#include "safepipe/semantics/analysis.hpp"
#include "safepipe/stubgen/stubgen.hpp"
#include "safepipe/syntax/formatter.hpp"
#include "oracles/stubgen_tables.hpp"
#include "test_support.hpp"

using namespace safepipe;
using namespace safepipe::stubgen;
using safepipe::testing::codes;
using safepipe::testing::dataPath;
using safepipe::testing::readFile;
using safepipe::oracles::kMappingTable;
using safepipe::oracles::kPhraseTable;
using safepipe::oracles::PythonGenerator;

namespace {

std::string formatConstraints(const std::vector<syntax::Constraint>& cs) {
    std::string out;
    for (const auto& c : cs)
        out += (out.empty() ? "" : ", ") + std::string("it ") + syntax::formatComparator(c.op) + " " +
               syntax::formatConstant(c.value);
    return out;
}

Diagnostics reparse(const std::string& text) { return syntax::parseStubSource(text, "generated.sdsstub").diagnostics; }

Diagnostics resolveDiagnostics(const std::string& text) {
    auto parsed = syntax::parseStubSource(text, "generated.sdsstub");
    syntax::Program program;
    program.stubFiles.push_back(std::move(parsed.file));
    return semantics::resolve(program).diagnostics;
}

/// Sentences built from words that none of the range patterns use.
class SentenceGenerator {
public:
    explicit SentenceGenerator(unsigned seed) : rng_(seed) {}

    std::string sentence() {
        static const char* const kWords[] = {"the",  "value", "of",   "and",  "scaling", "0",     "1",    "1.5",
                                             "[0,",  "1]",    "(2,",  "3)",   "rows",    "ratio", "must", "be",
                                             "less", "than",  "more", "in",   "negative", "at",    "non",  "-",
                                             "Ratio", "ten",  ",",    ".",    "AND",      "rangE", "mostly", "leastwise"};
        std::string out;
        const int n = std::uniform_int_distribution<int>(0, 14)(rng_);
        for (int i = 0; i < n; ++i) {
            std::string w = kWords[std::uniform_int_distribution<int>(0, std::size(kWords) - 1)(rng_)];
            out += (i ? " " : "") + w;
        }
        return out;
    }

private:
    std::mt19937 rng_;
};

} // namespace

TEST(MapHint, Table) {
    for (const auto& row : kMappingTable) {
        MappedType m = mapHint(std::string(row.hint));
        EXPECT_EQ(syntax::formatType(m.type), row.type) << row.hint;
        EXPECT_EQ(!m.reviewReasons.empty(), row.review) << row.hint;
    }
    EXPECT_EQ(mapHint(std::string("np.ndarray")).reviewReasons, std::vector<std::string>{"unmapped hint `np.ndarray`"});
    MappedType absent = mapHint(std::nullopt);
    EXPECT_EQ(syntax::formatType(absent.type), "Any");
    EXPECT_EQ(absent.reviewReasons, std::vector<std::string>{"missing type hint"});
}

TEST(MineConstraints, PhraseTable) {
    for (const auto& row : kPhraseTable)
        EXPECT_EQ(formatConstraints(mineConstraints(row.text).constraints), row.constraints) << row.text;
    EXPECT_EQ(mineConstraints("between 5 and 1").dropped.size(), 1U);
    EXPECT_TRUE(mineConstraints("between 0 and 1").dropped.empty());
}

TEST(MineConstraints, NumbersKeepTheirKind) {
    auto mined = mineConstraints("between 0 and 1");
    ASSERT_EQ(mined.constraints.size(), 2U);
    EXPECT_EQ(mined.constraints[0].op, syntax::Comparator::GreaterEq);
    EXPECT_EQ(mined.constraints[0].value, syntax::Constant{std::int64_t{0}});
    EXPECT_EQ(mined.constraints[1].op, syntax::Comparator::LessEq);
    EXPECT_EQ(mined.constraints[1].value, syntax::Constant{std::int64_t{1}});
    EXPECT_EQ(mineConstraints("at most 0.5").constraints.at(0).value, syntax::Constant{0.5});
}

TEST(MineConstraintsProperties, SentencesWithoutPatternsYieldNothing) {
    SentenceGenerator generator(777);
    for (int i = 0; i < 2000; ++i) {
        const std::string s = generator.sentence();
        EXPECT_TRUE(mineConstraints(s).constraints.empty()) << s;
    }
}

TEST(ParsePy, Signatures) {
    auto r = parsePySignatures("def load_dataset(name: str) -> object:\n    ...\n", "a.py", "demo");
    ASSERT_EQ(r.signatures.size(), 1U);
    const PySignature& s = r.signatures[0];
    EXPECT_EQ(s.module, "demo");
    EXPECT_EQ(s.name, "load_dataset");
    EXPECT_EQ(s.params, (std::vector<PyParam>{{"name", std::string("str"), std::nullopt, false}}));
    EXPECT_EQ(s.returnHint, std::optional<std::string>("object"));
    EXPECT_TRUE(r.diagnostics.empty());
}

TEST(ParsePy, DocstringParameters) {
    auto r = parsePySignatures(R"(def split(table, ratio: float = 0.5):
    """Split.

    Parameters
    ----------
    table : Table
    ratio : float, between 0 and 1
        Share of the first part.

    Returns
    -------
    x : int
        Not a parameter.
    """
)",
                               "a.py", "demo");
    ASSERT_EQ(r.signatures.size(), 1U);
    const PySignature& s = r.signatures[0];
    EXPECT_EQ(s.docParams.at("ratio"), "float, between 0 and 1 Share of the first part.");
    EXPECT_EQ(s.docTypes.at("ratio"), "float");
    EXPECT_EQ(s.docParams.at("table"), "Table");
    EXPECT_EQ(s.docParams.count("x"), 0U);
    EXPECT_EQ(s.params[1].defaultText, std::optional<std::string>("0.5"));
}

TEST(ParsePy, Recovery) {
    auto r = parsePySignatures(R"(def good(a: int) -> int:
    return a

def broken(a: int -> int:
    return a

def bad name(): pass

def also_good(b: list[
        float],
        c: str = "x, y") -> None:
    def nested(): pass
    return None
)",
                               "a.py", "demo");
    ASSERT_EQ(r.signatures.size(), 2U);
    EXPECT_EQ(r.signatures[0].name, "good");
    EXPECT_EQ(r.signatures[1].name, "also_good");
    EXPECT_EQ(r.signatures[1].params[0].hint, std::optional<std::string>("list[ float]"));
    EXPECT_EQ(r.signatures[1].params[1].defaultText, std::optional<std::string>("\"x, y\""));
    EXPECT_EQ(codes(r.diagnostics), (std::vector<std::string>{"W080", "W080", "W081"}));
    EXPECT_EQ(r.diagnostics[0].span.startLine, 4);
    EXPECT_EQ(r.diagnostics[1].span.startLine, 7);
    EXPECT_EQ(r.diagnostics[2].span.startLine, 12);
    EXPECT_EQ(r.defsFound, 4);
    EXPECT_EQ(r.skipped, 2);
}

TEST(ParsePy, UnterminatedDocstringIsE080) {
    auto r = parsePySignatures("def f(a: int) -> int:\n    \"\"\"Never closed\n    return a\n", "a.py", "demo");
    EXPECT_EQ(codes(r.diagnostics), std::vector<std::string>{"E080"});
}

TEST(Stubgen, LoadDatasetExample) {
    auto r = stubgenSource("def load_dataset(name: str) -> object:\n    ...\n", "a.py", "demo");
    EXPECT_EQ(r.output.text, R"(@PythonModule("demo")

// TODO: result: unmapped hint `object`
@PythonName("load_dataset")
fun loadDataset(name: String) -> result: Any
)");
    EXPECT_EQ(r.output.report.needsReview, (std::vector<ReviewItem>{{"loadDataset", "result: unmapped hint `object`"}}));
}

TEST(Stubgen, RatioBetweenZeroAndOne) {
    auto r = stubgenSource(R"(def train_test_split(table, ratio: float):
    """
    Parameters
    ----------
    ratio : float, between 0 and 1
    """
)",
                           "a.py", "demo");
    EXPECT_NE(r.output.text.find("ratio: Float where {it >= 0.0, it <= 1.0}"), std::string::npos) << r.output.text;
}

TEST(Stubgen, EmptyFile) {
    auto r = stubgenSource("", "empty.py", "empty");
    EXPECT_EQ(r.output.text, "@PythonModule(\"empty\")\n");
    EXPECT_EQ(r.output.report.generated, 0);
    EXPECT_EQ(r.output.report.parsed, 0);
}

TEST(Stubgen, Fixture) {
    auto r = stubgenSource(readFile(dataPath("stubgen/ml_utils.py")), "ml_utils.py", "ml_utils");
    EXPECT_EQ(r.output.text, readFile(dataPath("stubgen/ml_utils.sdsstub")));
    EXPECT_EQ(r.output.report.parsed, 6);
    EXPECT_EQ(r.output.report.skipped, 1);
    EXPECT_EQ(r.output.report.generated, 5);
    EXPECT_EQ(codes(r.diagnostics), (std::vector<std::string>{"W081", "W080", "W081"}));
    EXPECT_TRUE(reparse(r.output.text).empty());
    EXPECT_TRUE(resolveDiagnostics(r.output.text).empty());
}

TEST(Stubgen, NamesAndCollisions) {
    auto r = stubgenSource(R"(def schema(where: int, max_iter: int = 5) -> int: pass
def load_data(x: int) -> int: pass
def loadData(x: int) -> int: pass
)",
                           "a.py", "m");
    EXPECT_NE(r.output.text.find("@PythonName(\"schema\")\nfun schema_(where_: Int, maxIter: Int = 5) -> result: Int"),
              std::string::npos)
        << r.output.text;
    EXPECT_EQ(r.output.report.generated, 2);
    EXPECT_EQ(r.output.report.skipped, 1);
    EXPECT_TRUE(reparse(r.output.text).empty());
}

TEST(Stubgen, DefaultsAgainstRanges) {
    auto r = stubgenSource(R"(def f(a: int = 0, b: float = 1, c: int = 2):
    """
    Parameters
    ----------
    a : int, positive
    b : float, at most 5
    c : int, at least 0.5
    """
)",
                           "a.py", "m");
    EXPECT_NE(r.output.text.find("fun f(a: Int = 0, b: Float where {it <= 5.0} = 1.0, c: Int = 2)"), std::string::npos)
        << r.output.text;
    EXPECT_TRUE(resolveDiagnostics(r.output.text).empty());
}

TEST(StubgenProperties, RandomFilesReparseAndAccount) {
    PythonGenerator generator(31337);
    for (int i = 0; i < 300; ++i) {
        const std::string source = generator.file();
        SCOPED_TRACE(source);
        auto r = stubgenSource(source, "gen.py", "gen");
        ASSERT_TRUE(reparse(r.output.text).empty()) << r.output.text;
        ASSERT_TRUE(resolveDiagnostics(r.output.text).empty()) << r.output.text;
        const ExtractionReport& report = r.output.report;
        EXPECT_EQ(report.generated, report.parsed - report.skipped);
        // Every declaration mentioning Any has a review entry.
        auto parsed = syntax::parseStubSource(r.output.text, "gen.sdsstub");
        for (const auto& d : parsed.file.declarations) {
            const auto& fn = std::get<syntax::FunDecl>(d);
            syntax::StubFile single;
            single.declarations.push_back(fn);
            if (syntax::format(single).find("Any") == std::string::npos) continue;
            EXPECT_TRUE(std::any_of(report.needsReview.begin(), report.needsReview.end(),
                                    [&](const ReviewItem& item) { return item.declaration == fn.name; }))
                << fn.name;
        }
    }
}

TEST(Stubgen, ReportJson) {
    auto r = stubgenSource("def f(x) -> int: pass\n", "a.py", "m");
    auto json = nlohmann::json::parse(reportJson(r.output.report));
    EXPECT_EQ(json["generated"], 1);
    EXPECT_EQ(json["needsReview"][0]["declaration"], "f");
    EXPECT_EQ(json["needsReview"][0]["reason"], "parameter `x`: missing type hint");
}
