#include <gtest/gtest.h>

#include <bitset>
#include <random>

#include "oracles/type_terms.hpp"
#include "safepipe/semantics/analysis.hpp"
#include "test_support.hpp"

using namespace safepipe;
using namespace safepipe::semantics;
using safepipe::testing::codes;
using safepipe::testing::programFrom;

namespace {

const char* kStubs = R"(
@PythonModule("demo")

@Tabular
class Table {
    fun keepColumns(names: List<String>) -> result: Table
    fun splitRows(ratio: Float where {it >= 0.0, it <= 1.0}) -> (first: Table, second: Table)
}
class Column
class Model {
    fun fit(t: Table)
    fun predict(t: Table) -> p: Column
}
class Animal
class Dog sub Animal
class Box<T> {
    attr content: T
    fun get() -> r: T
}
enum Color { Red, Green }

fun loadDataset(name: String) -> dataset: Table
fun split(ratio: Float where {it >= 0.0, it <= 1.0}) -> r: Int
fun splitRows(table: Table, ratio: Float) -> (first: Table, second: Table)
fun pair<T>(a: T, b: T) -> r: List<T>
fun bounded<T sub Animal>(a: T) -> r: T
fun apply(x: Float, f: (Float) -> (Float)) -> r: Float
fun scale(v: Float) -> r: Float
fun named(a: Int, b: Int = 2) -> r: Int
fun nothing()
fun paint(c: Color)
fun pet(a: Animal)
fun newDog() -> d: Dog
fun boxed() -> b: Box<Int>
fun label(s: String where {it != ""}) -> r: String
)";

struct Checked {
    syntax::Program program;
    ResolveResult resolved;
    TypeCheckResult typed;

    [[nodiscard]] std::vector<std::string> all() const {
        auto out = codes(resolved.diagnostics);
        auto more = codes(typed.diagnostics);
        out.insert(out.end(), more.begin(), more.end());
        return out;
    }
};

Checked check(const std::string& body, const std::string& stubs = kStubs) {
    Checked c;
    c.program = programFrom({stubs}, {"pipeline p {\n" + body + "\n}\n"});
    c.resolved = resolve(c.program);
    c.typed = checkTypes(c.program, c.resolved.symbols);
    return c;
}

Type fn(std::vector<Type> params, std::vector<Type> results) {
    return functionType(std::move(params), std::move(results));
}

} // namespace

TEST(Types, UnionCanonicalization) {
    Type a = makeUnion({intType(), stringType(), makeUnion({floatType(), intType()})});
    Type b = makeUnion({floatType(), stringType(), intType(), stringType()});
    EXPECT_EQ(a, b);
    EXPECT_EQ(toString(a), "union<Float, Int, String>");
    EXPECT_EQ(makeUnion({intType()}), intType());
    EXPECT_EQ(makeUnion({}), nothingType());
}

TEST(Types, SubtypeExamples) {
    TypeContext ctx;
    EXPECT_TRUE(isSubtype(intType(), makeUnion({intType(), stringType()}), ctx));
    EXPECT_FALSE(isSubtype(makeUnion({intType(), stringType()}), intType(), ctx));
    // Parameters are contravariant and results covariant:
    // (Float)->(Int) accepts anything an (Int) caller passes and returns a Float.
    EXPECT_TRUE(isSubtype(fn({floatType()}, {intType()}), fn({intType()}, {floatType()}), ctx));
    EXPECT_FALSE(isSubtype(fn({intType()}, {floatType()}), fn({floatType()}, {intType()}), ctx));
    EXPECT_TRUE(isSubtype(intType(), floatType(), ctx));
    EXPECT_FALSE(isSubtype(floatType(), intType(), ctx));
    EXPECT_FALSE(isSubtype(booleanType(), stringType(), ctx));
    EXPECT_TRUE(isSubtype(nothingType(), stringType(), ctx));
    EXPECT_TRUE(isSubtype(listType(intType()), anyType(), ctx));
    EXPECT_FALSE(isSubtype(listType(intType()), listType(floatType()), ctx));
}

TEST(Types, RefinedSubtyping) {
    TypeContext ctx;
    using syntax::Comparator;
    Bound lo{Comparator::GreaterEq, 0.0};
    Bound hi{Comparator::LessEq, 1.0};
    Type unit = makeRefined(floatType(), {lo, hi});
    Type nonNeg = makeRefined(floatType(), {lo});
    EXPECT_TRUE(isSubtype(unit, floatType(), ctx));
    EXPECT_TRUE(isSubtype(unit, nonNeg, ctx));
    EXPECT_FALSE(isSubtype(nonNeg, unit, ctx));
    EXPECT_FALSE(isSubtype(floatType(), nonNeg, ctx));
    EXPECT_TRUE(isSubtype(makeRefined(intType(), {lo}), nonNeg, ctx));
    EXPECT_EQ(toString(unit), "Float where {it <= 1.0, it >= 0.0}");
    EXPECT_EQ(makeRefined(floatType(), {}), floatType());
}

TEST(Types, NominalHierarchyAndInvariance) {
    TypeContext ctx;
    ASSERT_TRUE(ctx.addClass("Animal", {}));
    ASSERT_TRUE(ctx.addClass("Dog", ClassShape{{}, classType("Animal")}));
    ASSERT_TRUE(ctx.addClass("Box", ClassShape{{"T"}, std::nullopt}));
    ASSERT_TRUE(ctx.addClass("Crate", ClassShape{{"T"}, classType("Box", {typeVar("T")})}));
    EXPECT_FALSE(ctx.addClass("Animal", ClassShape{{}, classType("Dog")}));
    EXPECT_TRUE(isSubtype(classType("Dog"), classType("Animal"), ctx));
    EXPECT_FALSE(isSubtype(classType("Animal"), classType("Dog"), ctx));
    EXPECT_TRUE(isSubtype(classType("Crate", {intType()}), classType("Box", {intType()}), ctx));
    EXPECT_FALSE(isSubtype(classType("Box", {classType("Dog")}), classType("Box", {classType("Animal")}), ctx));
}

TEST(TypeLaws, RandomTermsArePreordered) {
    constexpr int kTerms = 1000;
    oracles::TypeTermGenerator gen(20240611);
    std::vector<Type> terms;
    for (int i = 0; i < kTerms; ++i) terms.push_back(gen.term(4));
    const auto& ctx = gen.context();

    std::vector<std::bitset<kTerms>> below(kTerms);
    std::size_t related = 0;
    for (int i = 0; i < kTerms; ++i) {
        EXPECT_TRUE(isSubtype(terms[i], terms[i], ctx)) << toString(terms[i]);
        for (int j = 0; j < kTerms; ++j) {
            if (isSubtype(terms[i], terms[j], ctx)) {
                below[i].set(j);
                if (i != j) ++related;
            }
        }
    }
    EXPECT_GT(related, 1000u);
    int violations = 0;
    for (int i = 0; i < kTerms; ++i) {
        for (int j = 0; j < kTerms; ++j) {
            if (!below[i].test(j)) continue;
            if ((below[j] & ~below[i]).any()) ++violations;
        }
    }
    EXPECT_EQ(violations, 0);
}

TEST(TypeLaws, UnionAbsorptionAndPermutation) {
    oracles::TypeTermGenerator gen(77);
    const auto& ctx = gen.context();
    for (int i = 0; i < 1000; ++i) {
        Type a = gen.term(3);
        Type b = gen.term(3);
        Type c = gen.term(2);
        Type ab = makeUnion({a, b});
        EXPECT_TRUE(isSubtype(a, ab, ctx));
        EXPECT_TRUE(isSubtype(b, ab, ctx));
        if (isSubtype(a, b, ctx)) {
            EXPECT_TRUE(isSubtype(ab, b, ctx)) << toString(a) << " / " << toString(b);
        }
        EXPECT_EQ(makeUnion({a, b, c}), makeUnion({c, b, a, b}));
    }
}

TEST(Const, Evaluation) {
    auto parse = [](const std::string& s) { return *syntax::parseExpressionSource(s, "e").expression; };
    ConstEnv none = [](const std::string&) -> const syntax::Expression* { return nullptr; };
    EXPECT_EQ(evalConst(parse("0.3"), none), ConstValue{0.3});
    EXPECT_EQ(evalConst(parse("-2"), none), ConstValue{std::int64_t{-2}});
    EXPECT_FALSE(evalConst(parse("loadDataset(\"x\")"), none).isConstant());
    EXPECT_FALSE(evalConst(parse("a.b"), none).isConstant());
    EXPECT_FALSE(evalConst(parse("() -> {}"), none).isConstant());
    auto list = evalConst(parse("[\"a\", \"b\"]"), none);
    ASSERT_NE(list.as<ConstList>(), nullptr);
    EXPECT_EQ(list.as<ConstList>()->elements.size(), 2u);
    EXPECT_FALSE(evalConst(parse("[\"a\", f()]"), none).isConstant());

    auto r = parse("0.3");
    ConstEnv env = [&](const std::string& n) -> const syntax::Expression* { return n == "r" ? &r : nullptr; };
    EXPECT_EQ(evalConst(parse("r"), env), ConstValue{0.3});
    EXPECT_EQ(evalConst(parse("-r"), env), ConstValue{-0.3});
}

TEST(Const, Satisfies) {
    using syntax::Comparator;
    EXPECT_TRUE(satisfies(ConstValue{1.0}, {Comparator::LessEq, 1.0}));
    EXPECT_FALSE(satisfies(ConstValue{1.5}, {Comparator::LessEq, 1.0}));
    EXPECT_TRUE(satisfies(ConstValue{std::int64_t{1}}, {Comparator::LessEq, 1.0}));
    EXPECT_TRUE(satisfies(ConstValue{std::string("a")}, {Comparator::NotEqual, std::string("")}));
    EXPECT_FALSE(satisfies(ConstValue{std::string("a")}, {Comparator::Less, std::string("b")}));
}

TEST(Resolve, BindsStubFunction) {
    auto c = check("titanic = loadDataset(\"Titanic\")");
    EXPECT_TRUE(c.all().empty());
    ASSERT_EQ(c.typed.pipelines.size(), 1u);
    const auto& pa = c.typed.pipelines[0];
    ASSERT_EQ(pa.calls.size(), 1u);
    EXPECT_EQ(pa.calls[0].kind, CallKind::Function);
    EXPECT_EQ(pa.calls[0].function, "loadDataset");
    EXPECT_EQ(toString(*pa.variables.at("titanic").type), "Table");
}

TEST(Resolve, Errors) {
    EXPECT_EQ(check("t = loadDatset(\"Titanic\")").all(), std::vector<std::string>{"E010"});
    EXPECT_EQ(check("x = newDog()\nx = newDog()").all(), std::vector<std::string>{"E011"});
    EXPECT_EQ(check("t = loadDataset(\"a\")\nt.shuffle()").all(), std::vector<std::string>{"E012"});
    EXPECT_EQ(check("paint(Color.Blue)").all(), std::vector<std::string>{"E012"});
    EXPECT_EQ(check("x = y").all(), std::vector<std::string>{"E010"});
    auto dup = check("x = newDog()\nx = newDog()");
    EXPECT_EQ(dup.resolved.diagnostics[0].span.startLine, 3);
}

TEST(Resolve, StubValidation) {
    auto stubs = [](const std::string& s) {
        auto program = programFrom({s}, {});
        return codes(resolve(program).diagnostics);
    };
    EXPECT_EQ(stubs("fun f(x: Missing)"), std::vector<std::string>{"E010"});
    EXPECT_EQ(stubs("class M { fun a() protocol a b }"), std::vector<std::string>{"E041"});
    EXPECT_EQ(stubs("fun f(x: Float where {it <= 1.0} = 2.0)"), std::vector<std::string>{"E022"});
    EXPECT_EQ(stubs("fun f(x: Int = 1.5)"), std::vector<std::string>{"E020"});
    EXPECT_EQ(stubs("fun f(x: String where {it < \"a\"})"), std::vector<std::string>{"E020"});
    EXPECT_EQ(stubs("class A sub B\nclass B sub A"), std::vector<std::string>{"E020"});
    EXPECT_EQ(stubs("fun f(t: Any) -> r: Any { schema { q = t } }"), std::vector<std::string>{"E010"});
    EXPECT_EQ(stubs("fun f(t: Any) -> r: Any { require t has column n }"), std::vector<std::string>{"E010"});
    EXPECT_EQ(stubs("class Int"), std::vector<std::string>{"E004"});
    EXPECT_TRUE(stubs(kStubs).empty());
    auto twice = programFrom({"fun f()", "fun f()"}, {});
    EXPECT_EQ(codes(resolve(twice).diagnostics), std::vector<std::string>{"E004"});
}

TEST(TypeCheck, ArgumentTypesAndRefinements) {
    auto wrongType = check("t = loadDataset(42)");
    EXPECT_EQ(wrongType.all(), std::vector<std::string>{"E020"});
    EXPECT_NE(wrongType.typed.diagnostics[0].message.find("expects String, found Int"), std::string::npos);

    auto range = check("r = split(ratio = 1.5)");
    ASSERT_EQ(range.all(), std::vector<std::string>{"E022"});
    EXPECT_EQ(range.typed.diagnostics[0].message, "1.5 violates it <= 1.0");

    EXPECT_EQ(check("r = split(ratio = scale(0.5))").all(), std::vector<std::string>{"E021"});
    EXPECT_TRUE(check("t = loadDataset(\"x\")\na, b = splitRows(t, 0.3)").all().empty());
}

TEST(TypeCheck, ConstantsFlowThroughVariables) {
    EXPECT_TRUE(check("r = 0.3\ns = r\nx = split(s)").all().empty());
    EXPECT_EQ(check("r = -0.3\nx = split(r)").all(), std::vector<std::string>{"E022"});
    EXPECT_TRUE(check("x = split(1)").all().empty());
}

TEST(TypeCheck, ConstantsStopAtLambdas) {
    auto c = check("r = 0.5\ny = apply(1.0, (v) -> {\n z = split(r)\n w = scale(v)\n})");
    EXPECT_EQ(c.all(), std::vector<std::string>{"E021"});
}

TEST(TypeCheck, Arity) {
    EXPECT_EQ(check("x = named()").all(), std::vector<std::string>{"E050"});
    EXPECT_EQ(check("x = named(1, 2, 3)").all(), std::vector<std::string>{"E050"});
    EXPECT_EQ(check("x = named(1, c = 3)").all(), std::vector<std::string>{"E050"});
    EXPECT_EQ(check("x = named(1, a = 3)").all(), std::vector<std::string>{"E050"});
    EXPECT_TRUE(check("x = named(b = 1, a = 3)").all().empty());
    EXPECT_TRUE(check("x = named(1)").all().empty());
    EXPECT_EQ(check("m = Model(1)").all(), std::vector<std::string>{"E050"});
}

TEST(TypeCheck, ResultCounts) {
    EXPECT_EQ(check("t = loadDataset(\"x\")\na = splitRows(t, 0.3)").all(), std::vector<std::string>{"E051"});
    EXPECT_EQ(check("x = nothing()").all(), std::vector<std::string>{"E051"});
    EXPECT_TRUE(check("nothing()").all().empty());
    EXPECT_TRUE(check("t = loadDataset(\"x\")\n_, b = splitRows(t, 0.3)").all().empty());
    EXPECT_EQ(check("t = loadDataset(\"x\")\npet(splitRows(t, 0.3))").all(), std::vector<std::string>{"E051"});
}

TEST(TypeCheck, GenericsAndSubtyping) {
    auto c = check("l = pair(1, 2)\nd = bounded(newDog())");
    EXPECT_TRUE(c.all().empty());
    EXPECT_EQ(toString(*c.typed.pipelines[0].variables.at("l").type), "List<Int>");
    EXPECT_EQ(toString(*c.typed.pipelines[0].variables.at("d").type), "Dog");
    EXPECT_TRUE(check("l = pair(1, 2)").all().empty());
    EXPECT_EQ(check("l = pair(1, \"a\")").all(), std::vector<std::string>{"E052"});
    EXPECT_EQ(check("d = bounded(1)").all(), std::vector<std::string>{"E052"});
    EXPECT_TRUE(check("pet(newDog())").all().empty());
    EXPECT_EQ(check("pet(1)").all(), std::vector<std::string>{"E020"});
    auto box = check("b = boxed()\nv = b.get()\nc = b.content");
    EXPECT_TRUE(box.all().empty());
    EXPECT_EQ(toString(*box.typed.pipelines[0].variables.at("v").type), "Int");
    EXPECT_EQ(toString(*box.typed.pipelines[0].variables.at("c").type), "Int");
    EXPECT_TRUE(check("paint(Color.Red)").all().empty());
    EXPECT_EQ(check("paint(1)").all(), std::vector<std::string>{"E020"});
}

TEST(TypeCheck, ListsAndLambdas) {
    EXPECT_TRUE(check("t = loadDataset(\"x\")\nk = t.keepColumns([\"a\", \"b\"])").all().empty());
    EXPECT_TRUE(check("t = loadDataset(\"x\")\nk = t.keepColumns([])").all().empty());
    EXPECT_EQ(check("t = loadDataset(\"x\")\nk = t.keepColumns([1])").all(), std::vector<std::string>{"E020"});
    EXPECT_TRUE(check("y = apply(1.0, (v) -> {\n w = scale(v)\n})").all().empty());
    EXPECT_TRUE(check("y = apply(1.0, (v: Float) -> {\n w = scale(v)\n})").all().empty());
    EXPECT_EQ(check("y = apply(1.0, (v: String) -> {\n w = scale(1.0)\n})").all(), std::vector<std::string>{"E020"});
    EXPECT_EQ(check("y = apply(1.0, (v) -> {\n w = label(\"a\")\n})").all(), std::vector<std::string>{"E020"});
    EXPECT_EQ(check("y = apply(1.0, (v) -> {\n w = scale(q)\n})").all(), std::vector<std::string>{"E010"});
    EXPECT_EQ(check("x = -\"a\"").all(), std::vector<std::string>{"E020"});
}

TEST(TypeCheck, MethodCallsRecordReceivers) {
    auto c = check("t = loadDataset(\"x\")\nm = Model()\nm.fit(t)\np = m.predict(t)");
    EXPECT_TRUE(c.all().empty());
    const auto& calls = c.typed.pipelines[0].calls;
    ASSERT_EQ(calls.size(), 4u);
    EXPECT_EQ(calls[1].kind, CallKind::Constructor);
    EXPECT_EQ(calls[2].kind, CallKind::Method);
    EXPECT_EQ(calls[2].className, "Model");
    ASSERT_NE(calls[2].receiver, nullptr);
    EXPECT_EQ(calls[2].receiver->as<syntax::Reference>()->name, "m");
    EXPECT_EQ(calls[3].statement, 3u);
}

TEST(TypeCheck, Deterministic) {
    const std::string body =
        "t = loadDataset(1)\nx = split(2.0)\ny = named()\nz = pair(1, \"a\")\nq = missing()\nt2 = loadDataset(\"a\")";
    auto a = check(body);
    auto b = check(body);
    EXPECT_EQ(a.resolved.diagnostics, b.resolved.diagnostics);
    EXPECT_EQ(a.typed.diagnostics, b.typed.diagnostics);
    EXPECT_EQ(a.all().size(), 5u);
}

TEST(TypeCheck, RefinedSoundnessOnRandomArguments) {
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> value(-0.5, 1.5);
    int accepted = 0;
    for (int i = 0; i < 300; ++i) {
        const double v = std::round(value(rng) * 100) / 100;
        std::string literal = std::to_string(v);
        std::string body;
        switch (rng() % 4) {
        case 0: body = "x = split(" + literal + ")"; break;
        case 1: body = "r = " + literal + "\nx = split(ratio = r)"; break;
        case 2: body = "r = " + literal + "\ns = r\nx = split(s)"; break;
        default: body = "x = split(scale(" + literal + "))"; break;
        }
        auto c = check(body);
        const auto& calls = c.typed.pipelines[0].calls;
        const CallSite& site = calls.back();
        const bool inRange = v >= 0.0 && v <= 1.0;
        const bool constant = body.find("scale") == std::string::npos;
        if (!site.rejected) {
            ++accepted;
            const auto* d = site.constArgs[0].as<double>();
            ASSERT_NE(d, nullptr) << body;
            EXPECT_TRUE(*d >= 0.0 && *d <= 1.0) << body;
        }
        EXPECT_EQ(site.rejected, !(inRange && constant)) << body;
    }
    EXPECT_GT(accepted, 30);
}
