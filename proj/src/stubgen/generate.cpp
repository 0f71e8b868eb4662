#include <cmath>
#include <regex>
#include <set>

#include "json.hpp"
#include "safepipe/naming.hpp"
#include "safepipe/stubgen/stubgen.hpp"
#include "safepipe/syntax/formatter.hpp"
#include "safepipe/syntax/lexer.hpp"

namespace safepipe::stubgen {

using syntax::Constant;
using syntax::TypeRef;

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
}

std::optional<Constant> pythonConstant(const std::string& text) {
    static const std::regex kInt(R"([-+]?\d+)");
    static const std::regex kFloat(R"([-+]?(?:\d+\.\d*|\.\d+|\d+)(?:[eE][-+]?\d+)?)");
    if (text == "True") return true;
    if (text == "False") return false;
    std::string digits = text;
    digits.erase(std::remove(digits.begin(), digits.end(), '_'), digits.end());
    if (std::regex_match(digits, kInt)) {
        try {
            return static_cast<std::int64_t>(std::stoll(digits));
        } catch (const std::out_of_range&) {
            return std::nullopt;
        }
    }
    if (std::regex_match(digits, kFloat)) {
        const double d = std::strtod(digits.c_str(), nullptr);
        if (std::isfinite(d)) return d;
        return std::nullopt;
    }
    if (text.size() >= 2 && (text[0] == '\'' || text[0] == '"') && text.back() == text[0]) {
        const std::string body = text.substr(1, text.size() - 2);
        if (body.find(text[0]) == std::string::npos && body.find('\\') == std::string::npos) return body;
    }
    return std::nullopt;
}

const syntax::NamedTypeRef* namedType(const TypeRef& t) { return std::get_if<syntax::NamedTypeRef>(&t.node); }

bool isNamed(const TypeRef& t, std::string_view name) {
    const auto* n = namedType(t);
    return n != nullptr && n->name == name && n->args.empty();
}

/// The default as a constant of `type`, widening Int to Float where needed.
std::optional<Constant> fitDefault(const TypeRef& type, const Constant& value, bool widen) {
    if (isNamed(type, "Any")) return value;
    if (const auto* u = std::get_if<syntax::UnionTypeRef>(&type.node)) {
        for (bool w : {false, true})
            for (const auto& m : u->members)
                if (auto v = fitDefault(m, value, w)) return v;
        return std::nullopt;
    }
    if (isNamed(type, "Int") && std::holds_alternative<std::int64_t>(value)) return value;
    if (isNamed(type, "Float")) {
        if (std::holds_alternative<double>(value)) return value;
        if (widen && std::holds_alternative<std::int64_t>(value)) return static_cast<double>(std::get<std::int64_t>(value));
    }
    if (isNamed(type, "String") && std::holds_alternative<std::string>(value)) return value;
    if (isNamed(type, "Boolean") && std::holds_alternative<bool>(value)) return value;
    return std::nullopt;
}

double numeric(const Constant& c) {
    if (const auto* i = std::get_if<std::int64_t>(&c)) return static_cast<double>(*i);
    return std::get<double>(c);
}

bool holds(const Constant& value, const syntax::Constraint& c) {
    const double v = numeric(value);
    const double b = numeric(c.value);
    switch (c.op) {
    case syntax::Comparator::Less: return v < b;
    case syntax::Comparator::LessEq: return v <= b;
    case syntax::Comparator::Greater: return v > b;
    case syntax::Comparator::GreaterEq: return v >= b;
    case syntax::Comparator::Equal: return v == b;
    case syntax::Comparator::NotEqual: return v != b;
    }
    return false;
}

/// Splits `tuple[A, B]` into its element hints; nullopt for other hints.
std::optional<std::vector<std::string>> tupleElements(const std::string& hint) {
    static const std::regex kTuple(R"(\s*(?:typing\.)?(?:tuple|Tuple)\s*\[(.*)\]\s*)");
    std::smatch m;
    if (!std::regex_match(hint, m, kTuple)) return std::nullopt;
    std::vector<std::string> out;
    const std::string inner = m.str(1);
    int depth = 0;
    std::string current;
    for (char c : inner) {
        if (c == '[' || c == '(') ++depth;
        if (c == ']' || c == ')') --depth;
        if (c == ',' && depth == 0) {
            out.push_back(trim(current));
            current.clear();
            continue;
        }
        current += c;
    }
    if (!trim(current).empty()) out.push_back(trim(current));
    return out;
}

std::string dslName(const std::string& pythonName) {
    std::string name = toCamelCase(pythonName);
    if (name.empty()) name = "_";
    if (syntax::isKeyword(name)) name += "_";
    return name;
}

syntax::Annotation pythonNameAnnotation(const std::string& name) {
    syntax::Annotation a;
    a.name = "PythonName";
    a.argument = name;
    return a;
}

class Generator {
public:
    explicit Generator(std::string module) : module_(std::move(module)) {}

    StubOutput run(const std::vector<PySignature>& signatures) {
        StubOutput out;
        out.report.parsed = static_cast<int>(signatures.size());
        if (!module_.empty()) out.text = "@PythonModule(" + syntax::quoteString(module_) + ")\n";
        std::set<std::string> names;
        for (const auto& sig : signatures) {
            review_.clear();
            syntax::FunDecl decl = function(sig);
            if (!names.insert(decl.name).second) {
                ++out.report.skipped;
                out.report.needsReview.push_back({decl.name, "skipped `" + sig.name + "`: another def maps to the same name"});
                continue;
            }
            syntax::StubFile single;
            single.declarations.emplace_back(std::move(decl));
            if (!out.text.empty()) out.text += "\n";
            for (const auto& reason : review_) {
                std::string line = reason;
                std::replace(line.begin(), line.end(), '\n', ' ');
                out.text += "// TODO: " + line + "\n";
                out.report.needsReview.push_back({std::get<syntax::FunDecl>(single.declarations[0]).name, reason});
            }
            out.text += syntax::format(single);
            ++out.report.generated;
        }
        return out;
    }

private:
    syntax::FunDecl function(const PySignature& sig) {
        syntax::FunDecl decl;
        decl.name = dslName(sig.name);
        decl.annotations.push_back(pythonNameAnnotation(sig.name));
        std::set<std::string> paramNames;
        for (const auto& p : sig.params) {
            if (p.variadic) {
                review_.push_back("variadic parameter `" + p.name + "` skipped");
                continue;
            }
            auto param = parameter(sig, p);
            while (!paramNames.insert(param.name).second) param.name += "_";
            decl.params.push_back(std::move(param));
        }
        results(sig, decl);
        return decl;
    }

    syntax::Parameter parameter(const PySignature& sig, const PyParam& p) {
        syntax::Parameter out;
        out.name = dslName(p.name);
        if (toSnakeCase(out.name) != p.name)
            review_.push_back("parameter `" + p.name + "` is emitted as `" + out.name + "`; keyword arguments will not match");

        std::optional<std::string> hint = p.hint;
        if (!hint) {
            if (auto doc = sig.docTypes.find(p.name); doc != sig.docTypes.end())
                hint = std::regex_replace(doc->second, std::regex(R"(\s+or\s+)"), " | ");
        }
        MappedType mapped = mapHint(hint);
        for (const auto& r : mapped.reviewReasons) review_.push_back("parameter `" + p.name + "`: " + r);
        TypeRef type = std::move(mapped.type);

        if (p.defaultText) {
            auto value = pythonConstant(*p.defaultText);
            std::optional<Constant> fitted = value ? fitDefault(type, *value, true) : std::nullopt;
            if (fitted) out.defaultValue = std::move(fitted);
            else
                review_.push_back("parameter `" + p.name + "`: default `" + *p.defaultText +
                                  "` has no stub form; the parameter is emitted as required");
        }

        auto doc = sig.docParams.find(p.name);
        if (doc != sig.docParams.end()) {
            MinedConstraints mined = mineConstraints(doc->second);
            for (const auto& d : mined.dropped) review_.push_back("parameter `" + p.name + "`: " + d);
            if (!mined.constraints.empty()) type = refine(p, std::move(type), std::move(mined.constraints), out.defaultValue);
        }
        out.type = std::move(type);
        return out;
    }

    TypeRef refine(const PyParam& p, TypeRef base, std::vector<syntax::Constraint> constraints,
                   const std::optional<Constant>& defaultValue) {
        const bool isInt = isNamed(base, "Int");
        if (!isInt && !isNamed(base, "Float")) {
            review_.push_back("parameter `" + p.name + "`: range phrase ignored on a non-numeric type");
            return base;
        }
        for (auto& c : constraints) {
            if (isInt) {
                const double v = numeric(c.value);
                if (std::holds_alternative<double>(c.value)) {
                    if (v != std::floor(v) || std::fabs(v) > 9.0e15) {
                        review_.push_back("parameter `" + p.name + "`: bound " + syntax::formatConstant(c.value) +
                                          " is not an integer; range dropped");
                        return base;
                    }
                    c.value = static_cast<std::int64_t>(v);
                }
            } else {
                c.value = numeric(c.value);
            }
        }
        if (defaultValue) {
            for (const auto& c : constraints) {
                if (!holds(*defaultValue, c)) {
                    review_.push_back("parameter `" + p.name + "`: default " + syntax::formatConstant(*defaultValue) +
                                      " contradicts the documented range; range dropped");
                    return base;
                }
            }
        }
        TypeRef refined;
        refined.node = syntax::RefinedTypeRef{std::move(base), std::move(constraints)};
        return refined;
    }

    void results(const PySignature& sig, syntax::FunDecl& decl) {
        if (!sig.returnHint) {
            decl.results.push_back(result("result", named("Any")));
            review_.push_back("result: missing return hint");
            return;
        }
        const std::string hint = trim(*sig.returnHint);
        if (hint == "None") return;
        auto elements = tupleElements(hint);
        if (elements && !elements->empty() &&
            std::find(elements->begin(), elements->end(), "...") == elements->end()) {
            for (std::size_t i = 0; i < elements->size(); ++i) {
                const std::string name = elements->size() == 1 ? "result" : "result" + std::to_string(i + 1);
                MappedType mapped = mapHint((*elements)[i]);
                for (const auto& r : mapped.reviewReasons) review_.push_back(name + ": " + r);
                decl.results.push_back(result(name, std::move(mapped.type)));
            }
            return;
        }
        MappedType mapped = mapHint(hint);
        for (const auto& r : mapped.reviewReasons) review_.push_back("result: " + r);
        decl.results.push_back(result("result", std::move(mapped.type)));
    }

    static TypeRef named(std::string name) {
        TypeRef t;
        t.node = syntax::NamedTypeRef{std::move(name), {}};
        return t;
    }

    static syntax::Result result(std::string name, TypeRef type) {
        syntax::Result r;
        r.name = std::move(name);
        r.type = std::move(type);
        return r;
    }

    std::string module_;
    std::vector<std::string> review_;
};

} // namespace

StubOutput generateStubs(const std::vector<PySignature>& signatures, const std::string& moduleName) {
    return Generator(moduleName).run(signatures);
}

StubgenResult stubgenSource(std::string_view source, const std::string& file, const std::string& moduleName) {
    PyParseResult parsed = parsePySignatures(source, file, moduleName);
    StubgenResult result;
    result.output = generateStubs(parsed.signatures, moduleName);
    result.output.report.parsed = parsed.defsFound;
    result.output.report.skipped += parsed.skipped;
    result.diagnostics = std::move(parsed.diagnostics);
    return result;
}

std::string reportJson(const ExtractionReport& report) {
    nlohmann::json review = nlohmann::json::array();
    for (const auto& item : report.needsReview) review.push_back({{"declaration", item.declaration}, {"reason", item.reason}});
    nlohmann::json root = {{"parsed", report.parsed},
                           {"skipped", report.skipped},
                           {"generated", report.generated},
                           {"needsReview", review}};
    return root.dump(2) + "\n";
}

} // namespace safepipe::stubgen
