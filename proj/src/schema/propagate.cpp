#include <set>

#include "safepipe/schema/schema.hpp"

namespace safepipe::schema {

using semantics::CallKind;
using semantics::CallSite;
using semantics::ConstList;
using semantics::FunctionSymbol;
using syntax::Expression;

DatasetRegistry::DatasetRegistry(std::map<std::string, std::filesystem::path> datasets)
    : datasets_(std::move(datasets)) {}

const CsvInference* DatasetRegistry::lookup(const std::string& key) {
    auto it = datasets_.find(key);
    if (it == datasets_.end()) return nullptr;
    const auto& path = it->second;
    std::error_code ec;
    const auto modified = std::filesystem::last_write_time(path, ec);
    auto cached = cache_.find(path);
    if (cached != cache_.end() && !ec && cached->second.modified == modified) return &cached->second.inference;
    CacheEntry entry{ec ? std::filesystem::file_time_type{} : modified, inferCsvSchema(path)};
    return &(cache_[path] = std::move(entry)).inference;
}

namespace {

class Propagator {
public:
    Propagator(const semantics::PipelineAnalysis& pipeline, const semantics::SymbolTable& symbols,
               DatasetRegistry& datasets)
        : pipeline_(pipeline), symbols_(symbols), datasets_(datasets) {}

    Propagation run() {
        for (const auto& site : pipeline_.calls) {
            if (site.inLambda || site.rejected) continue;
            process(site);
        }
        for (const auto& [name, info] : pipeline_.variables) {
            if (!info.type || !symbols_.isTabular(*info.type)) continue;
            out_.schemas[name] = variableSchema(info);
        }
        return std::move(out_);
    }

private:
    std::optional<Schema> variableSchema(const semantics::VariableInfo& info) const {
        if (info.definition == nullptr) return std::nullopt;
        if (info.definition->as<syntax::Call>() != nullptr) {
            auto it = results_.find(info.definition);
            if (it == results_.end() || info.resultIndex >= it->second.size()) return std::nullopt;
            return it->second[info.resultIndex];
        }
        return schemaOf(info.definition);
    }

    std::optional<Schema> schemaOf(const Expression* e) const {
        if (e == nullptr) return std::nullopt;
        if (const auto* ref = e->as<syntax::Reference>()) {
            auto it = pipeline_.variables.find(ref->name);
            if (it == pipeline_.variables.end() || it->second.definition == e) return std::nullopt;
            return variableSchema(it->second);
        }
        if (e->as<syntax::Call>() != nullptr) {
            auto it = results_.find(e);
            if (it == results_.end() || it->second.empty()) return std::nullopt;
            return it->second.front();
        }
        return std::nullopt;
    }

    void report(const char* code, std::string message, const SourceSpan& span) {
        Diagnostic d = makeDiagnostic(code, std::move(message), span);
        if (std::find(out_.diagnostics.begin(), out_.diagnostics.end(), d) == out_.diagnostics.end())
            out_.diagnostics.push_back(std::move(d));
    }

    struct Context {
        const CallSite& site;
        const FunctionSymbol& fn;
    };

    std::optional<Schema> input(const Context& ctx, const std::string& name) const {
        if (name == "this") return schemaOf(ctx.site.receiver);
        auto index = ctx.fn.paramIndex(name);
        if (!index) return std::nullopt;
        return schemaOf(ctx.site.args[*index]);
    }

    const SourceSpan& argumentSpan(const Context& ctx, const syntax::NameArg& n) const {
        if (!n.isLiteral) {
            if (auto index = ctx.fn.paramIndex(n.text); index && ctx.site.args[*index] != nullptr)
                return ctx.site.args[*index]->span;
        }
        return ctx.site.expr->span;
    }

    /// Column names a name argument denotes, or nullopt after reporting E035.
    std::optional<std::vector<std::string>> names(const Context& ctx, const syntax::NameArg& n) {
        if (n.isLiteral) return std::vector<std::string>{n.text};
        auto index = ctx.fn.paramIndex(n.text);
        if (index) {
            const semantics::ConstValue& v = ctx.site.constArgs[*index];
            if (const auto* s = v.as<std::string>()) return std::vector<std::string>{*s};
            if (const auto* list = v.as<ConstList>()) {
                std::vector<std::string> out;
                for (const auto& e : list->elements) {
                    const auto* s = e.as<std::string>();
                    if (s == nullptr) break;
                    out.push_back(*s);
                }
                if (out.size() == list->elements.size()) return out;
            }
        }
        report("E035",
               "argument `" + n.text + "` of `" + ctx.fn.decl.name + "` must be a constant column name",
               argumentSpan(ctx, n));
        return std::nullopt;
    }

    std::optional<std::string> singleName(const Context& ctx, const syntax::NameArg& n) {
        auto all = names(ctx, n);
        if (!all) return std::nullopt;
        if (all->size() != 1) {
            report("E035", "argument `" + n.text + "` of `" + ctx.fn.decl.name + "` must be a single column name",
                   argumentSpan(ctx, n));
            return std::nullopt;
        }
        return all->front();
    }

    std::optional<ColumnType> columnType(const syntax::TypeRef& ref) const {
        return columnTypeOf(semantics::toType(ref, symbols_, {}));
    }

    void process(const CallSite& site) {
        const FunctionSymbol* fn = nullptr;
        if (site.kind == CallKind::Function) fn = symbols_.findFunction(site.function);
        else if (site.kind == CallKind::Method) fn = symbols_.findMethod(site.className, site.function);

        auto& results = results_[site.expr];
        results.assign(site.resultTypes.size(), std::nullopt);
        if (fn == nullptr) {
            if (site.kind == CallKind::Constructor && !site.resultTypes.empty() &&
                symbols_.isTabular(site.resultTypes.front()))
                report("W001", "`" + site.function + "()` creates a table of unknown schema; later schema checks are skipped",
                       site.expr->span);
            return;
        }
        const Context ctx{site, *fn};

        for (const auto& req : fn->decl.requireClauses) {
            auto columns = names(ctx, req.column);
            auto table = input(ctx, req.table);
            if (!columns || !table) continue;
            std::optional<ColumnType> required;
            if (req.type) required = columnType(*req.type);
            for (const auto& c : *columns) {
                if (auto error = checkRequirement(*table, c, required))
                    report(error->code.c_str(), error->message, argumentSpan(ctx, req.column));
            }
        }

        for (std::size_t r = 0; r < fn->decl.results.size() && r < results.size(); ++r) {
            if (!symbols_.isTabular(site.resultTypes[r])) continue;
            const syntax::SchemaAssignment* assignment = nullptr;
            for (const auto& clause : fn->decl.schemaClauses)
                for (const auto& a : clause.assignments)
                    if (a.target == fn->decl.results[r].name) assignment = &a;
            if (assignment == nullptr) {
                report("W001",
                       "result `" + fn->decl.results[r].name + "` of `" + fn->decl.name +
                           "` declares no schema; later schema checks on it are skipped",
                       site.expr->span);
                continue;
            }
            results[r] = evaluate(ctx, assignment->value);
        }
    }

    std::optional<Schema> evaluate(const Context& ctx, const syntax::SchemaExpr& expr) {
        std::optional<Schema> base;
        if (expr.external) {
            auto key = singleName(ctx, syntax::NameArg{{expr.span}, false, expr.source});
            if (!key) return std::nullopt;
            if (!datasets_.contains(*key)) {
                report("E037", "unknown dataset key `" + *key + "`", argumentSpan(ctx, {{}, false, expr.source}));
                return std::nullopt;
            }
            const CsvInference* inferred = datasets_.lookup(*key);
            for (const auto& d : inferred->diagnostics) report(d.code.c_str(), d.message, d.span);
            base = inferred->schema;
        } else {
            base = input(ctx, expr.source);
        }
        if (!base) return std::nullopt;

        std::vector<Effect> effects;
        for (const auto& op : expr.ops) {
            using syntax::EffectKind;
            switch (op.kind) {
            case EffectKind::Add:
            case EffectKind::Retype: {
                auto name = singleName(ctx, op.names.at(0));
                auto type = op.type ? columnType(*op.type) : std::nullopt;
                if (!name || !type) return std::nullopt;
                if (op.kind == EffectKind::Add) effects.emplace_back(AddColumn{*name, *type});
                else effects.emplace_back(RetypeColumn{*name, *type});
                break;
            }
            case EffectKind::Remove: {
                auto name = singleName(ctx, op.names.at(0));
                if (!name) return std::nullopt;
                effects.emplace_back(RemoveColumn{*name});
                break;
            }
            case EffectKind::Rename: {
                auto from = singleName(ctx, op.names.at(0));
                auto to = singleName(ctx, op.names.at(1));
                if (!from || !to) return std::nullopt;
                effects.emplace_back(RenameColumn{*from, *to});
                break;
            }
            case EffectKind::Keep:
            case EffectKind::Drop: {
                auto list = names(ctx, op.names.at(0));
                if (!list) return std::nullopt;
                if (op.kind == EffectKind::Keep) effects.emplace_back(KeepColumns{*list});
                else effects.emplace_back(DropColumns{*list});
                break;
            }
            }
        }
        auto applied = applyEffects(std::move(*base), effects);
        if (auto* error = std::get_if<EffectError>(&applied)) {
            report(error->code.c_str(), error->message, ctx.site.expr->span);
            return std::nullopt;
        }
        return std::get<Schema>(std::move(applied));
    }

    const semantics::PipelineAnalysis& pipeline_;
    const semantics::SymbolTable& symbols_;
    DatasetRegistry& datasets_;
    std::map<const Expression*, std::vector<std::optional<Schema>>> results_;
    Propagation out_;
};

} // namespace

Propagation propagate(const semantics::PipelineAnalysis& pipeline, const semantics::SymbolTable& symbols,
                      DatasetRegistry& datasets) {
    return Propagator(pipeline, symbols, datasets).run();
}

} // namespace safepipe::schema
