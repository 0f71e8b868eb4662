#include <algorithm>
#include <set>

#include "safepipe/semantics/analysis.hpp"
#include "safepipe/syntax/formatter.hpp"
#include "semantics/internal.hpp"

namespace safepipe::semantics {

using namespace syntax;

const CallSite* PipelineAnalysis::callAt(const Expression* call) const {
    auto it = callIndex.find(call);
    return it == callIndex.end() ? nullptr : &calls[it->second];
}

ConstValue PipelineAnalysis::constant(const Expression& expr) const {
    return evalConst(expr, [this](const std::string& name) -> const Expression* {
        auto it = variables.find(name);
        if (it == variables.end() || !it->second.soleAssignee) return nullptr;
        return it->second.definition;
    });
}

namespace {

struct Scope {
    struct Entry {
        std::optional<Type> type;
        const Expression* constDef = nullptr;
        SourceSpan span;
    };
    std::map<std::string, Entry> vars;
    const Scope* parent = nullptr;

    [[nodiscard]] const Entry* find(const std::string& name) const {
        for (const Scope* s = this; s != nullptr; s = s->parent) {
            auto it = s->vars.find(name);
            if (it != s->vars.end()) return &it->second;
        }
        return nullptr;
    }

    /// Constants fold only through variables of the same scope.
    [[nodiscard]] ConstEnv constEnv() const {
        return [this](const std::string& name) -> const Expression* {
            auto it = vars.find(name);
            return it == vars.end() ? nullptr : it->second.constDef;
        };
    }
};

struct CallOutcome {
    bool known = false; ///< the callee resolved, so the result count is meaningful
    std::string callee;
    std::vector<Type> results;
};

std::string quote(const std::string& s) { return "`" + s + "`"; }

std::string calleeLabel(const Expression& callee) {
    if (const auto* r = callee.as<Reference>()) return r->name;
    if (const auto* m = callee.as<MemberAccess>()) return m->member;
    return "callee";
}

class PipelineChecker {
public:
    explicit PipelineChecker(const SymbolTable& symbols) : symbols_(symbols) {}

    Diagnostics resolution;
    Diagnostics typing;

    PipelineAnalysis run(const PipelineDecl& pipeline) {
        out_ = PipelineAnalysis{};
        out_.pipeline = &pipeline;
        Scope root;
        for (std::size_t i = 0; i < pipeline.body.size(); ++i) {
            statement_ = i;
            checkStatement(pipeline.body[i], root);
        }
        return std::move(out_);
    }

private:
    void report(const char* code, std::string message, const SourceSpan& span,
                std::vector<SourceSpan> related = {}) {
        Diagnostic d = makeDiagnostic(code, std::move(message), span);
        d.relatedSpans = std::move(related);
        const std::string_view c = code;
        (c.substr(0, 3) == "E01" ? resolution : typing).push_back(std::move(d));
    }

    void define(Scope& scope, const Assignee& target, std::optional<Type> type, const Expression* definition,
                bool sole, std::size_t resultIndex) {
        const std::string& name = *target.name;
        if (const auto* existing = scope.find(name)) {
            report("E011", "variable " + quote(name) + " is already defined", target.span, {existing->span});
            return;
        }
        scope.vars[name] = Scope::Entry{type, sole ? definition : nullptr, target.span};
        if (scope.parent == nullptr) {
            out_.variables[name] = VariableInfo{std::move(type), statement_, resultIndex, definition, sole, target.span};
        }
    }

    void checkStatement(const Statement& statement, Scope& scope) {
        if (const auto* a = std::get_if<Assignment>(&statement.node)) {
            CallOutcome outcome;
            if (const auto* call = a->rhs.as<Call>()) {
                outcome = inferCall(a->rhs, *call, scope);
            } else {
                outcome.known = true;
                if (auto t = infer(a->rhs, scope, nullptr)) outcome.results.push_back(*t);
                else outcome.known = false;
            }
            if (outcome.known && outcome.results.size() != a->assignees.size()) {
                report("E051",
                       quote(outcome.callee.empty() ? "expression" : outcome.callee) + " produces " +
                           std::to_string(outcome.results.size()) + " result(s) but " +
                           std::to_string(a->assignees.size()) + " assignee(s) are given",
                       statement.span);
            }
            const bool sole = a->assignees.size() == 1;
            for (std::size_t i = 0; i < a->assignees.size(); ++i) {
                const Assignee& target = a->assignees[i];
                if (target.isWildcard()) continue;
                std::optional<Type> type;
                if (outcome.known && i < outcome.results.size() && outcome.results.size() == a->assignees.size())
                    type = outcome.results[i];
                define(scope, target, std::move(type), &a->rhs, sole, i);
            }
        } else {
            const Expression& e = statement.expression();
            if (const auto* call = e.as<Call>()) inferCall(e, *call, scope);
            else infer(e, scope, nullptr);
        }
    }

    std::optional<Type> record(const Expression& e, std::optional<Type> t) {
        if (t) out_.expressionTypes[&e] = *t;
        return t;
    }

    std::optional<Type> infer(const Expression& e, const Scope& scope, const Type* expected) {
        return record(e, std::visit([&](const auto& n) { return inferNode(e, n, scope, expected); }, e.node));
    }

    std::optional<Type> inferNode(const Expression&, const IntLit&, const Scope&, const Type*) { return intType(); }
    std::optional<Type> inferNode(const Expression&, const FloatLit&, const Scope&, const Type*) {
        return floatType();
    }
    std::optional<Type> inferNode(const Expression&, const StringLit&, const Scope&, const Type*) {
        return stringType();
    }
    std::optional<Type> inferNode(const Expression&, const BoolLit&, const Scope&, const Type*) {
        return booleanType();
    }

    std::optional<Type> inferNode(const Expression&, const ListLit& list, const Scope& scope, const Type* expected) {
        const Type* element = nullptr;
        if (expected != nullptr) {
            if (const auto* c = unrefined(*expected).as<ClassType>(); c != nullptr && c->name == "List" &&
                                                                      c->args.size() == 1)
                element = &c->args[0];
        }
        std::vector<Type> types;
        bool complete = true;
        for (const auto& x : list.elements) {
            auto t = infer(x, scope, element);
            if (t) types.push_back(*t);
            else complete = false;
        }
        if (!complete) return std::nullopt;
        if (element != nullptr && std::all_of(types.begin(), types.end(), [&](const Type& t) {
                return isSubtype(t, *element, symbols_.types);
            }))
            return listType(*element);
        return listType(makeUnion(std::move(types)));
    }

    std::optional<Type> inferNode(const Expression& e, const Reference& ref, const Scope& scope, const Type*) {
        if (const auto* v = scope.find(ref.name)) return v->type;
        if (const FunctionSymbol* fn = symbols_.findFunction(ref.name)) return functionValue(*fn, {});
        if (const ClassSymbol* cls = symbols_.findClass(ref.name)) return functionType({}, {constructed(*cls)});
        if (symbols_.findEnum(ref.name) != nullptr) return std::nullopt;
        report("E010", "unresolved reference " + quote(ref.name), e.span);
        return std::nullopt;
    }

    std::optional<Type> inferNode(const Expression& e, const MemberAccess& m, const Scope& scope, const Type*) {
        if (const EnumSymbol* en = enumReceiver(*m.receiver, scope)) {
            const auto& variants = en->decl.variants;
            if (std::find(variants.begin(), variants.end(), m.member) == variants.end()) {
                report("E012", "enum " + quote(en->decl.name) + " has no variant " + quote(m.member), e.span);
                return std::nullopt;
            }
            return enumType(en->decl.name);
        }
        auto receiver = infer(*m.receiver, scope, nullptr);
        if (!receiver) return std::nullopt;
        const Type& rt = unrefined(*receiver);
        if (rt.as<AnyType>()) return std::nullopt;
        if (const auto* c = rt.as<ClassType>()) {
            if (auto found = symbols_.findMember(*c, m.member)) {
                if (auto it = found->owner->methods.find(m.member); it != found->owner->methods.end())
                    return functionValue(it->second, found->bindings);
                return substitute(found->owner->attributes.at(m.member), found->bindings, true);
            }
        }
        report("E012", toString(rt) + " has no member " + quote(m.member), e.span);
        return std::nullopt;
    }

    std::optional<Type> inferNode(const Expression& e, const Call& call, const Scope& scope, const Type*) {
        CallOutcome outcome = inferCall(e, call, scope);
        if (!outcome.known) return std::nullopt;
        if (outcome.results.size() != 1) {
            report("E051",
                   quote(outcome.callee) + " produces " + std::to_string(outcome.results.size()) +
                       " result(s); exactly one is needed here",
                   e.span);
            return std::nullopt;
        }
        return outcome.results.front();
    }

    std::optional<Type> inferNode(const Expression&, const Lambda& lambda, const Scope& scope, const Type* expected) {
        const FunctionType* want = expected != nullptr ? unrefined(*expected).as<FunctionType>() : nullptr;
        if (want != nullptr && want->params.size() != lambda.params.size()) want = nullptr;
        Scope inner;
        inner.parent = &scope;
        std::vector<Type> params;
        bool complete = true;
        for (std::size_t i = 0; i < lambda.params.size(); ++i) {
            const LambdaParam& p = lambda.params[i];
            std::optional<Type> t;
            if (p.type) {
                Diagnostics found;
                t = toType(*p.type, symbols_, {}, &found);
                for (auto& d : found) report(d.code.c_str(), d.message, d.span);
            } else if (want != nullptr) {
                t = want->params[i];
            }
            params.push_back(t.value_or(anyType()));
            if (const auto* existing = scope.find(p.name)) {
                report("E011", "variable " + quote(p.name) + " is already defined", p.span, {existing->span});
            } else {
                inner.vars[p.name] = Scope::Entry{t, nullptr, p.span};
            }
        }
        ++lambdaDepth_;
        for (const auto& s : lambda.body) checkStatement(s, inner);
        --lambdaDepth_;

        std::vector<Type> results;
        for (auto it = lambda.body.rbegin(); it != lambda.body.rend(); ++it) {
            const auto* a = std::get_if<Assignment>(&it->node);
            if (a == nullptr) continue;
            for (const auto& target : a->assignees) {
                if (target.isWildcard()) continue;
                auto v = inner.vars.find(*target.name);
                if (v == inner.vars.end() || !v->second.type) complete = false;
                else results.push_back(*v->second.type);
            }
            break;
        }
        if (!complete) return std::nullopt;
        return functionType(std::move(params), std::move(results));
    }

    std::optional<Type> inferNode(const Expression& e, const Negation& n, const Scope& scope, const Type*) {
        auto t = infer(*n.operand, scope, nullptr);
        if (!t) return std::nullopt;
        if (!isSubtype(*t, floatType(), symbols_.types)) {
            report("E020", "cannot negate a value of type " + toString(*t), e.span);
            return std::nullopt;
        }
        return unrefined(*t);
    }

    const EnumSymbol* enumReceiver(const Expression& receiver, const Scope& scope) const {
        const auto* r = receiver.as<Reference>();
        if (r == nullptr || scope.find(r->name) != nullptr) return nullptr;
        return symbols_.findEnum(r->name);
    }

    Type constructed(const ClassSymbol& cls) const {
        return classType(cls.decl.name, std::vector<Type>(cls.decl.typeParams.size(), anyType()));
    }

    Type functionValue(const FunctionSymbol& fn, const Substitution& bindings) const {
        std::vector<Type> params;
        std::vector<Type> results;
        for (const auto& p : fn.paramTypes) params.push_back(substitute(p, bindings, true));
        for (const auto& r : fn.resultTypes) results.push_back(substitute(r, bindings, true));
        return functionType(std::move(params), std::move(results));
    }

    void inferArgsLoosely(const Call& call, const Scope& scope) {
        for (const auto& a : call.args) infer(*a.value, scope, nullptr);
    }

    /// Syntactic first match binds a type variable; later occurrences must
    /// be subtypes of the bound argument.
    bool unify(const Type& pattern, const Type& actual, Substitution& bindings, const FunctionSymbol& fn,
               std::string& conflict) {
        if (const auto* v = pattern.as<TypeVar>()) {
            if (std::find(fn.typeParams.begin(), fn.typeParams.end(), v->name) == fn.typeParams.end()) return true;
            if (auto it = bindings.find(v->name); it != bindings.end()) {
                if (isSubtype(actual, it->second, symbols_.types)) return true;
                conflict = "type parameter " + quote(v->name) + " is bound to " + toString(it->second) +
                           " but also receives " + toString(actual);
                return false;
            }
            if (auto b = fn.typeParamBounds.find(v->name); b != fn.typeParamBounds.end()) {
                Type bound = substitute(b->second, bindings, true);
                if (!isSubtype(actual, bound, symbols_.types)) {
                    conflict = toString(actual) + " does not satisfy the bound " + quote(v->name) + " sub " +
                               toString(bound);
                    return false;
                }
            }
            bindings.emplace(v->name, actual);
            return true;
        }
        if (const auto* pc = pattern.as<ClassType>()) {
            std::optional<Type> current = actual;
            while (current) {
                const auto* ac = current->as<ClassType>();
                if (ac == nullptr) return true;
                if (ac->name == pc->name) {
                    for (std::size_t i = 0; i < pc->args.size() && i < ac->args.size(); ++i)
                        if (!unify(pc->args[i], ac->args[i], bindings, fn, conflict)) return false;
                    return true;
                }
                current = symbols_.types.superOf(*ac);
            }
            return true;
        }
        if (const auto* pf = pattern.as<FunctionType>()) {
            const auto* af = actual.as<FunctionType>();
            if (af == nullptr || af->params.size() != pf->params.size() || af->results.size() != pf->results.size())
                return true;
            for (std::size_t i = 0; i < pf->params.size(); ++i)
                if (!unify(pf->params[i], af->params[i], bindings, fn, conflict)) return false;
            for (std::size_t i = 0; i < pf->results.size(); ++i)
                if (!unify(pf->results[i], af->results[i], bindings, fn, conflict)) return false;
            return true;
        }
        if (const auto* pr = pattern.as<RefinedType>()) return unify(*pr->base, actual, bindings, fn, conflict);
        return true;
    }

    CallOutcome inferCall(const Expression& e, const Call& call, const Scope& scope) {
        CallOutcome outcome;
        outcome.callee = calleeLabel(*call.callee);
        CallSite site;
        site.expr = &e;
        site.statement = statement_;
        site.inLambda = lambdaDepth_ > 0;

        const FunctionSymbol* fn = nullptr;
        const ClassSymbol* ctor = nullptr;
        Substitution bindings;
        std::optional<Type> valueType;
        bool isValueCall = false;

        const Expression& callee = *call.callee;
        if (const auto* ref = callee.as<Reference>()) {
            if (const auto* v = scope.find(ref->name)) {
                isValueCall = true;
                valueType = v->type;
            } else if ((fn = symbols_.findFunction(ref->name))) {
                site.kind = CallKind::Function;
            } else if ((ctor = symbols_.findClass(ref->name))) {
                site.kind = CallKind::Constructor;
                site.className = ctor->decl.name;
            } else if (symbols_.findEnum(ref->name) != nullptr) {
                report("E020", "enum " + quote(ref->name) + " is not callable", callee.span);
                inferArgsLoosely(call, scope);
                return outcome;
            } else {
                report("E010", "unresolved reference " + quote(ref->name), callee.span);
                inferArgsLoosely(call, scope);
                return outcome;
            }
        } else if (const auto* m = callee.as<MemberAccess>(); m != nullptr && !enumReceiver(*m->receiver, scope)) {
            auto receiver = infer(*m->receiver, scope, nullptr);
            const auto* rc = receiver ? unrefined(*receiver).as<ClassType>() : nullptr;
            std::optional<SymbolTable::MemberLookup> found;
            if (rc != nullptr) found = symbols_.findMember(*rc, m->member);
            if (!receiver || unrefined(*receiver).as<AnyType>()) {
                inferArgsLoosely(call, scope);
                return outcome;
            }
            if (!found) {
                report("E012", toString(unrefined(*receiver)) + " has no member " + quote(m->member), callee.span);
                inferArgsLoosely(call, scope);
                return outcome;
            }
            bindings = found->bindings;
            if (auto it = found->owner->methods.find(m->member); it != found->owner->methods.end()) {
                fn = &it->second;
                site.kind = CallKind::Method;
                site.className = found->owner->decl.name;
                site.receiver = m->receiver.get();
            } else {
                isValueCall = true;
                valueType = substitute(found->owner->attributes.at(m->member), bindings, true);
            }
        } else {
            isValueCall = true;
            valueType = infer(callee, scope, nullptr);
        }

        if (isValueCall) return inferValueCall(e, call, scope, valueType, std::move(site), std::move(outcome));

        site.function = fn != nullptr ? fn->decl.name : ctor->decl.name;
        const std::vector<Parameter> noParams;
        const auto& params = fn != nullptr ? fn->decl.params : noParams;

        // Bind arguments to parameters.
        std::vector<const Argument*> bound(params.size(), nullptr);
        bool arityOk = true;
        std::size_t position = 0;
        for (const auto& arg : call.args) {
            std::optional<std::size_t> index;
            if (arg.name) {
                if (fn != nullptr) index = fn->paramIndex(*arg.name);
                if (!index) {
                    report("E050", quote(site.function) + " has no parameter named " + quote(*arg.name), arg.span);
                    arityOk = false;
                    continue;
                }
            } else {
                index = position++;
                if (*index >= params.size()) {
                    report("E050",
                           "too many arguments: " + quote(site.function) + " takes " + std::to_string(params.size()),
                           arg.span);
                    arityOk = false;
                    continue;
                }
            }
            if (bound[*index] != nullptr) {
                report("E050", "parameter " + quote(params[*index].name) + " is bound twice", arg.span);
                arityOk = false;
                continue;
            }
            bound[*index] = &arg;
        }
        for (std::size_t i = 0; i < params.size(); ++i) {
            if (bound[i] == nullptr && !params[i].defaultValue) {
                report("E050", "missing argument for parameter " + quote(params[i].name) + " of " +
                                   quote(site.function),
                       e.span);
                arityOk = false;
            }
        }

        site.args.assign(params.size(), nullptr);
        site.constArgs.assign(params.size(), ConstValue{});
        for (std::size_t i = 0; i < params.size(); ++i) {
            if (bound[i] != nullptr) site.args[i] = bound[i]->value.get();
            else if (params[i].defaultValue) site.constArgs[i] = fromConstant(*params[i].defaultValue);
        }

        if (!arityOk) {
            site.rejected = true;
            inferArgsLoosely(call, scope);
        } else if (fn != nullptr) {
            site.rejected = !checkArguments(*fn, bound, bindings, scope, site);
        }

        if (fn != nullptr) {
            for (const auto& r : fn->resultTypes) site.resultTypes.push_back(substitute(r, bindings, true));
        } else {
            site.resultTypes.push_back(constructed(*ctor));
        }
        outcome.known = true;
        outcome.callee = site.function;
        outcome.results = site.resultTypes;
        addSite(std::move(site));
        return outcome;
    }

    bool checkArguments(const FunctionSymbol& fn, const std::vector<const Argument*>& bound, Substitution& bindings,
                        const Scope& scope, CallSite& site) {
        bool ok = true;
        std::vector<std::size_t> order;
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t i = 0; i < bound.size(); ++i) {
                if (bound[i] == nullptr) continue;
                const bool isLambda = bound[i]->value->as<Lambda>() != nullptr;
                if (isLambda == (pass == 1)) order.push_back(i);
            }
        }
        for (std::size_t i : order) {
            const Argument& arg = *bound[i];
            const Expression& value = *arg.value;
            const std::string& pname = fn.decl.params[i].name;
            const Type& declared = fn.paramTypes[i];
            Type base = substitute(unrefined(declared), bindings);
            std::optional<Type> expected;
            if (value.as<Lambda>() != nullptr) expected = substitute(base, {}, true);
            else if (!mentionsTypeVar(base)) expected = base;

            auto actual = infer(value, scope, expected ? &*expected : nullptr);
            bool typeOk = true;
            if (actual) {
                std::string conflict;
                if (!unify(unrefined(declared), *actual, bindings, fn, conflict)) {
                    report("E052", "cannot infer type arguments of " + quote(fn.decl.name) + ": " + conflict,
                           arg.span);
                    typeOk = false;
                } else {
                    Type target = substitute(base, bindings, true);
                    if (!isSubtype(*actual, target, symbols_.types)) {
                        report("E020",
                               "argument " + quote(pname) + " of " + quote(fn.decl.name) + " expects " +
                                   toString(target) + ", found " + toString(*actual),
                               arg.span);
                        typeOk = false;
                    }
                }
            }
            ConstValue constant = evalConst(value, scope.constEnv());
            if (typeOk) {
                if (const auto* refined = declared.as<RefinedType>()) {
                    if (!constant.isConstant()) {
                        report("E021",
                               "argument " + quote(pname) + " of " + quote(fn.decl.name) +
                                   " must be a compile-time constant",
                               arg.span);
                        typeOk = false;
                    } else {
                        for (const auto& b : refined->constraints) {
                            if (!satisfies(constant, b)) {
                                report("E022", toString(constant) + " violates " + toString(b), arg.span);
                                typeOk = false;
                                break;
                            }
                        }
                    }
                }
            }
            site.constArgs[i] = std::move(constant);
            ok = ok && typeOk;
        }
        return ok;
    }

    CallOutcome inferValueCall(const Expression& e, const Call& call, const Scope& scope,
                               const std::optional<Type>& calleeType, CallSite site, CallOutcome outcome) {
        site.kind = CallKind::Value;
        site.function = outcome.callee;
        if (!calleeType) {
            inferArgsLoosely(call, scope);
            return outcome;
        }
        const auto* ft = unrefined(*calleeType).as<FunctionType>();
        if (ft == nullptr) {
            if (!unrefined(*calleeType).as<AnyType>())
                report("E020", quote(outcome.callee) + " of type " + toString(*calleeType) + " is not callable",
                       call.callee->span);
            inferArgsLoosely(call, scope);
            return outcome;
        }
        bool ok = true;
        for (const auto& arg : call.args) {
            if (arg.name) {
                report("E050", "named argument " + quote(*arg.name) + " passed to a function value", arg.span);
                ok = false;
            }
        }
        if (call.args.size() != ft->params.size()) {
            report("E050",
                   quote(outcome.callee) + " takes " + std::to_string(ft->params.size()) + " argument(s), found " +
                       std::to_string(call.args.size()),
                   e.span);
            ok = false;
        }
        if (!ok) {
            inferArgsLoosely(call, scope);
        } else {
            for (std::size_t i = 0; i < call.args.size(); ++i) {
                auto t = infer(*call.args[i].value, scope, &ft->params[i]);
                if (t && !isSubtype(*t, ft->params[i], symbols_.types)) {
                    report("E020",
                           "argument " + std::to_string(i + 1) + " of " + quote(outcome.callee) + " expects " +
                               toString(ft->params[i]) + ", found " + toString(*t),
                           call.args[i].span);
                    ok = false;
                }
            }
        }
        for (const auto& a : call.args) site.args.push_back(a.value.get());
        for (const auto& a : call.args) site.constArgs.push_back(evalConst(*a.value, scope.constEnv()));
        site.rejected = !ok;
        site.resultTypes = ft->results;
        outcome.known = true;
        outcome.results = ft->results;
        addSite(std::move(site));
        return outcome;
    }

    void addSite(CallSite site) {
        out_.callIndex[site.expr] = out_.calls.size();
        out_.calls.push_back(std::move(site));
    }

    const SymbolTable& symbols_;
    PipelineAnalysis out_;
    std::size_t statement_ = 0;
    int lambdaDepth_ = 0;
};

struct Walk {
    std::vector<PipelineAnalysis> pipelines;
    Diagnostics resolution;
    Diagnostics typing;
};

Walk walk(const Program& program, const SymbolTable& symbols) {
    Walk w;
    PipelineChecker checker(symbols);
    for (const auto& file : program.pipelineFiles)
        for (const auto& p : file.pipelines) w.pipelines.push_back(checker.run(p));
    w.resolution = std::move(checker.resolution);
    w.typing = std::move(checker.typing);
    return w;
}

} // namespace

ResolveResult resolve(const Program& program) {
    ResolveResult result;
    result.symbols = detail::loadStubs(program.stubFiles, result.diagnostics);
    std::map<std::string, SourceSpan> names;
    for (const auto& file : program.pipelineFiles) {
        for (const auto& p : file.pipelines) {
            auto [it, fresh] = names.emplace(p.name, p.span);
            if (!fresh) {
                Diagnostic d = makeDiagnostic("E004", "duplicate pipeline " + quote(p.name), p.span);
                d.relatedSpans.push_back(it->second);
                result.diagnostics.push_back(std::move(d));
            }
        }
    }
    append(result.diagnostics, walk(program, result.symbols).resolution);
    return result;
}

TypeCheckResult checkTypes(const Program& program, const SymbolTable& symbols) {
    Walk w = walk(program, symbols);
    return TypeCheckResult{std::move(w.pipelines), std::move(w.typing)};
}

} // namespace safepipe::semantics
