#include <set>

#include "safepipe/naming.hpp"
#include "safepipe/semantics/analysis.hpp"
#include "safepipe/syntax/formatter.hpp"
#include "semantics/internal.hpp"

namespace safepipe::semantics {

using namespace syntax;

std::optional<std::size_t> FunctionSymbol::paramIndex(const std::string& name) const {
    for (std::size_t i = 0; i < decl.params.size(); ++i)
        if (decl.params[i].name == name) return i;
    return std::nullopt;
}

std::string FunctionSymbol::pythonName() const {
    return annotationArgument(decl.annotations, "PythonName").value_or(toSnakeCase(decl.name));
}

const FunctionSymbol* SymbolTable::findFunction(const std::string& name) const {
    auto it = functions.find(name);
    return it == functions.end() ? nullptr : &it->second;
}

const ClassSymbol* SymbolTable::findClass(const std::string& name) const {
    auto it = classes.find(name);
    return it == classes.end() ? nullptr : &it->second;
}

const EnumSymbol* SymbolTable::findEnum(const std::string& name) const {
    auto it = enums.find(name);
    return it == enums.end() ? nullptr : &it->second;
}

std::optional<SymbolTable::MemberLookup> SymbolTable::findMember(const ClassType& receiver,
                                                                 const std::string& member) const {
    std::optional<ClassType> current = receiver;
    while (current) {
        if (const ClassSymbol* cls = findClass(current->name)) {
            if (cls->methods.count(member) != 0 || cls->attributes.count(member) != 0) {
                MemberLookup found{cls, {}};
                for (std::size_t i = 0; i < cls->decl.typeParams.size() && i < current->args.size(); ++i)
                    found.bindings.emplace(cls->decl.typeParams[i].name, current->args[i]);
                return found;
            }
        }
        auto super = types.superOf(*current);
        current.reset();
        if (super) {
            if (const auto* c = super->as<ClassType>()) current = *c;
        }
    }
    return std::nullopt;
}

const FunctionSymbol* SymbolTable::findMethod(const std::string& className, const std::string& method) const {
    const ClassSymbol* cls = findClass(className);
    if (cls == nullptr) return nullptr;
    auto it = cls->methods.find(method);
    return it == cls->methods.end() ? nullptr : &it->second;
}

bool SymbolTable::isTabular(const Type& type) const {
    const auto* c = type.as<ClassType>();
    std::optional<ClassType> current;
    if (c != nullptr) current = *c;
    while (current) {
        if (const ClassSymbol* cls = findClass(current->name); cls != nullptr && cls->tabular) return true;
        auto super = types.superOf(*current);
        current.reset();
        if (super) {
            if (const auto* sc = super->as<ClassType>()) current = *sc;
        }
    }
    return false;
}

Type constantType(const Constant& constant) {
    return std::visit(
        [](const auto& v) -> Type {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::int64_t>) {
                return intType();
            } else if constexpr (std::is_same_v<T, double>) {
                return floatType();
            } else if constexpr (std::is_same_v<T, std::string>) {
                return stringType();
            } else {
                return booleanType();
            }
        },
        constant);
}

namespace {

std::size_t typeArity(const std::string& name, const SymbolTable& symbols) {
    if (const ClassSymbol* cls = symbols.findClass(name)) return cls->decl.typeParams.size();
    if (const ClassShape* shape = symbols.types.findClass(name)) return shape->typeParams.size();
    return 0;
}

void report(Diagnostics* out, const char* code, std::string message, const SourceSpan& span) {
    if (out != nullptr) out->push_back(makeDiagnostic(code, std::move(message), span));
}

} // namespace

Type toType(const TypeRef& ref, const SymbolTable& symbols, const std::vector<std::string>& typeVars,
            Diagnostics* diagnostics) {
    auto all = [&](const std::vector<TypeRef>& refs) {
        std::vector<Type> out;
        for (const auto& r : refs) out.push_back(toType(r, symbols, typeVars, diagnostics));
        return out;
    };
    return std::visit(
        [&](const auto& n) -> Type {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, NamedTypeRef>) {
                const bool isVar = std::find(typeVars.begin(), typeVars.end(), n.name) != typeVars.end();
                const bool isClass = symbols.findClass(n.name) != nullptr || symbols.types.findClass(n.name) != nullptr;
                if (isVar || n.name == "Any" || n.name == "Nothing" || symbols.findEnum(n.name) != nullptr) {
                    if (!n.args.empty())
                        report(diagnostics, "E020", "type `" + n.name + "` takes no type arguments", ref.span);
                    if (isVar) return typeVar(n.name);
                    if (n.name == "Any") return anyType();
                    if (n.name == "Nothing") return nothingType();
                    return enumType(n.name);
                }
                if (!isClass) {
                    report(diagnostics, "E010", "unknown type `" + n.name + "`", ref.span);
                    return anyType();
                }
                std::vector<Type> args = all(n.args);
                const std::size_t arity = typeArity(n.name, symbols);
                if (args.size() != arity) {
                    report(diagnostics, "E020",
                           "type `" + n.name + "` expects " + std::to_string(arity) + " type argument(s), found " +
                               std::to_string(args.size()),
                           ref.span);
                    args.resize(arity, anyType());
                }
                return classType(n.name, std::move(args));
            } else if constexpr (std::is_same_v<T, UnionTypeRef>) {
                return makeUnion(all(n.members));
            } else if constexpr (std::is_same_v<T, FunctionTypeRef>) {
                return functionType(all(n.params), all(n.results));
            } else {
                Type base = toType(*n.base, symbols, typeVars, diagnostics);
                std::vector<Bound> bounds;
                for (const auto& c : n.constraints) {
                    Bound b{c.op, c.value};
                    if (!boundFitsBase(b, unrefined(base))) {
                        report(diagnostics, "E020",
                               "constraint `" + toString(b) + "` does not apply to " + toString(unrefined(base)),
                               c.span);
                        continue;
                    }
                    bounds.push_back(std::move(b));
                }
                return makeRefined(std::move(base), std::move(bounds));
            }
        },
        ref.node);
}

namespace detail {

namespace {

bool isColumnType(const Type& t) {
    const auto* c = t.as<ClassType>();
    return c != nullptr && c->args.empty() &&
           (c->name == "Int" || c->name == "Float" || c->name == "String" || c->name == "Boolean");
}

class StubLoader {
public:
    StubLoader(SymbolTable& symbols, Diagnostics& diagnostics) : symbols_(symbols), diags_(diagnostics) {}

    void load(const std::vector<StubFile>& files) {
        std::vector<std::pair<const FunDecl*, std::string>> functions;
        std::map<std::string, SourceSpan> seen;
        for (const auto& file : files) {
            const std::string module = file.pythonModule.value_or("");
            for (const auto& decl : file.declarations) {
                const std::string& name = declarationName(decl);
                const SourceSpan& span = declarationSpan(decl);
                if (isBuiltinTypeName(name)) {
                    report("E004", "`" + name + "` is a built-in type and cannot be redeclared", span);
                    continue;
                }
                if (auto it = seen.find(name); it != seen.end()) {
                    Diagnostic d = makeDiagnostic("E004", "duplicate declaration `" + name + "`", span);
                    d.relatedSpans.push_back(it->second);
                    diags_.push_back(std::move(d));
                    continue;
                }
                seen.emplace(name, span);
                if (const auto* f = std::get_if<FunDecl>(&decl)) {
                    functions.emplace_back(f, module);
                } else if (const auto* c = std::get_if<ClassDecl>(&decl)) {
                    ClassSymbol sym;
                    sym.decl = *c;
                    sym.pythonModule = module;
                    sym.tabular = hasAnnotation(c->annotations, "Tabular");
                    symbols_.classes.emplace(name, std::move(sym));
                } else {
                    symbols_.enums.emplace(name, EnumSymbol{std::get<EnumDecl>(decl), module});
                }
            }
        }

        for (auto& [name, cls] : symbols_.classes) registerClass(name, cls);
        for (auto& [name, cls] : symbols_.classes) completeClass(cls);
        for (const auto& [decl, module] : functions)
            symbols_.functions.emplace(decl->name, buildFunction(*decl, module, nullptr));
    }

private:
    void report(const char* code, std::string message, const SourceSpan& span) {
        diags_.push_back(makeDiagnostic(code, std::move(message), span));
    }

    static std::vector<std::string> paramNames(const std::vector<TypeParam>& params) {
        std::vector<std::string> out;
        for (const auto& p : params) out.push_back(p.name);
        return out;
    }

    void registerClass(const std::string& name, const ClassSymbol& cls) {
        ClassShape shape{paramNames(cls.decl.typeParams), std::nullopt};
        if (cls.decl.superType) {
            Type super = toType(*cls.decl.superType, symbols_, shape.typeParams, &diags_);
            if (super.as<ClassType>() == nullptr) {
                report("E020", "supertype of `" + name + "` must be a class type, found " + toString(super),
                       cls.decl.superType->span);
            } else {
                shape.superType = std::move(super);
            }
        }
        ClassShape fallback{shape.typeParams, std::nullopt};
        if (!symbols_.types.addClass(name, std::move(shape))) {
            report("E020", "class `" + name + "` is its own supertype", cls.decl.superType->span);
            symbols_.types.addClass(name, std::move(fallback));
        }
    }

    void completeClass(ClassSymbol& cls) {
        const auto classVars = paramNames(cls.decl.typeParams);
        for (const auto& attr : cls.decl.attributes)
            cls.attributes.emplace(attr.name, toType(attr.type, symbols_, classVars, &diags_));
        for (const auto& method : cls.decl.methods)
            cls.methods.emplace(method.name, buildFunction(method, cls.pythonModule, &cls));
        if (cls.decl.protocol) checkProtocol(*cls.decl.protocol, cls);
    }

    void checkProtocol(const ProtocolRegex& regex, const ClassSymbol& cls) {
        std::visit(
            [&](const auto& n) {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, ProtoToken>) {
                    ClassType self{cls.decl.name, {}};
                    auto member = symbols_.findMember(self, n.method);
                    if (!member || member->owner->methods.count(n.method) == 0)
                        report("E041", "protocol of `" + cls.decl.name + "` names `" + n.method +
                                           "`, which is not a method of the class",
                               regex.span);
                } else if constexpr (std::is_same_v<T, ProtoSeq>) {
                    for (const auto& i : n.items) checkProtocol(i, cls);
                } else if constexpr (std::is_same_v<T, ProtoAlt>) {
                    for (const auto& o : n.options) checkProtocol(o, cls);
                } else if constexpr (std::is_same_v<T, ProtoRepeat>) {
                    checkProtocol(*n.inner, cls);
                }
            },
            regex.node);
    }

    FunctionSymbol buildFunction(const FunDecl& decl, const std::string& module, const ClassSymbol* owner) {
        FunctionSymbol fn;
        fn.decl = decl;
        fn.pythonModule = module;
        if (owner != nullptr) fn.owner = owner->decl.name;
        fn.typeParams = paramNames(decl.typeParams);
        std::vector<std::string> vars = fn.typeParams;
        if (owner != nullptr)
            for (const auto& p : owner->decl.typeParams) vars.push_back(p.name);

        for (const auto& tp : decl.typeParams)
            if (tp.bound) fn.typeParamBounds.emplace(tp.name, toType(*tp.bound, symbols_, vars, &diags_));
        for (const auto& p : decl.params) {
            fn.paramTypes.push_back(toType(p.type, symbols_, vars, &diags_));
            if (p.defaultValue) checkDefault(p, fn.paramTypes.back());
        }
        for (const auto& r : decl.results) fn.resultTypes.push_back(toType(r.type, symbols_, vars, &diags_));

        std::set<std::string> params;
        for (const auto& p : decl.params) params.insert(p.name);
        std::set<std::string> tables = params;
        if (owner != nullptr) tables.insert("this");
        std::set<std::string> results;
        for (const auto& r : decl.results) results.insert(r.name);

        for (const auto& clause : decl.schemaClauses) {
            for (const auto& a : clause.assignments) {
                if (results.count(a.target) == 0)
                    report("E010", "schema target `" + a.target + "` is not a result of `" + decl.name + "`", a.span);
                const auto& scope = a.value.external ? params : tables;
                if (scope.count(a.value.source) == 0)
                    report("E010", "unknown schema source `" + a.value.source + "`", a.value.span);
                for (const auto& op : a.value.ops) {
                    for (const auto& n : op.names) checkNameArg(n, params);
                    if (op.type) checkColumnType(*op.type, vars);
                }
            }
        }
        for (const auto& req : decl.requireClauses) {
            if (tables.count(req.table) == 0) report("E010", "unknown table `" + req.table + "` in require", req.span);
            checkNameArg(req.column, params);
            if (req.type) checkColumnType(*req.type, vars);
        }
        return fn;
    }

    void checkNameArg(const NameArg& n, const std::set<std::string>& params) {
        if (!n.isLiteral && params.count(n.text) == 0) report("E010", "unknown parameter `" + n.text + "`", n.span);
    }

    void checkColumnType(const TypeRef& ref, const std::vector<std::string>& vars) {
        Type t = toType(ref, symbols_, vars, &diags_);
        if (!isColumnType(t))
            report("E020", "column type must be Int, Float, String or Boolean, found " + toString(t), ref.span);
    }

    void checkDefault(const Parameter& p, const Type& declared) {
        const Type valueType = constantType(*p.defaultValue);
        const Type& base = unrefined(declared);
        if (!mentionsTypeVar(base) && !isSubtype(valueType, base, symbols_.types)) {
            report("E020",
                   "default value " + formatConstant(*p.defaultValue) + " of `" + p.name + "` is not a " +
                       toString(base),
                   p.span);
            return;
        }
        if (const auto* r = declared.as<RefinedType>()) {
            const ConstValue v = fromConstant(*p.defaultValue);
            for (const auto& b : r->constraints) {
                if (!satisfies(v, b)) {
                    report("E022", "default value " + toString(v) + " violates " + toString(b), p.span);
                    return;
                }
            }
        }
    }

    SymbolTable& symbols_;
    Diagnostics& diags_;
};

} // namespace

SymbolTable loadStubs(const std::vector<StubFile>& files, Diagnostics& diagnostics) {
    SymbolTable symbols;
    StubLoader(symbols, diagnostics).load(files);
    return symbols;
}

} // namespace detail

} // namespace safepipe::semantics
