#include "safepipe/codegen/python.hpp"

#include <cstdio>
#include <set>

#include "safepipe/naming.hpp"
#include "safepipe/syntax/formatter.hpp"

namespace safepipe::codegen {

using namespace syntax;

std::string pythonString(const std::string& value) {
    std::string out = "'";
    for (const char c : value) {
        switch (c) {
        case '\\': out += "\\\\"; break;
        case '\'': out += "\\'"; break;
        case '\n': out += "\\n"; break;
        case '\r': out += "\\r"; break;
        case '\t': out += "\\t"; break;
        default:
            if (static_cast<unsigned char>(c) < 0x20 || c == 0x7f) {
                char buf[5];
                std::snprintf(buf, sizeof buf, "\\x%02x", static_cast<unsigned char>(c));
                out += buf;
            } else {
                out += c;
            }
        }
    }
    return out + "'";
}

std::string pythonFileName(const PipelineDecl& pipeline) { return pipeline.name + ".py"; }

namespace {

class Emitter {
public:
    Emitter(const semantics::PipelineAnalysis& pipeline, const semantics::SymbolTable& symbols)
        : pipeline_(pipeline), symbols_(symbols) {}

    PythonOutput run() {
        const PipelineDecl& decl = *pipeline_.pipeline;
        std::string body;
        scopes_.emplace_back();
        statements(decl.body, 1, body);
        if (decl.body.empty()) body = "    pass\n";

        PythonOutput out;
        if (!errors_.empty()) {
            out.diagnostics = std::move(errors_);
            return out;
        }
        const std::string name = pythonIdentifier(toSnakeCase(decl.name));
        std::string& text = out.text;
        text = "# Generated by safepipe. Do not edit.\n";
        if (!imports_.empty()) text += "\n";
        for (const auto& [module, names] : imports_) {
            text += "from " + module + " import ";
            bool first = true;
            for (const auto& n : names) {
                text += (first ? "" : ", ") + n;
                first = false;
            }
            text += "\n";
        }
        text += "\n\ndef " + name + "():\n" + body;
        text += "\n\nif __name__ == '__main__':\n    " + name + "()\n";
        return out;
    }

private:
    static std::string pad(int indent) { return std::string(static_cast<std::size_t>(indent) * 4, ' '); }

    void unresolved(const std::string& what, const SourceSpan& span) {
        errors_.push_back(makeDiagnostic("E060", "cannot generate Python for " + what, span));
    }

    [[nodiscard]] bool isLocal(const std::string& name) const {
        for (const auto& scope : scopes_)
            if (scope.count(name) != 0) return true;
        return false;
    }

    void statements(const std::vector<Statement>& list, int indent, std::string& out) {
        for (const auto& s : list) statement(s, indent, out);
    }

    void statement(const Statement& s, int indent, std::string& out) {
        std::string hoisted;
        const std::string value = expression(s.expression(), indent, hoisted);
        out += hoisted;
        out += pad(indent);
        if (const auto* a = std::get_if<Assignment>(&s.node)) {
            for (std::size_t i = 0; i < a->assignees.size(); ++i) {
                const auto& target = a->assignees[i];
                out += (i ? ", " : "") + (target.isWildcard() ? std::string("_") : pythonIdentifier(*target.name));
                if (!target.isWildcard()) scopes_.back().insert(*target.name);
            }
            out += " = ";
        }
        out += value + "\n";
    }

    /// Python text of `e`; lambda definitions are appended to `hoisted`.
    std::string expression(const Expression& e, int indent, std::string& hoisted) {
        return std::visit([&](const auto& n) { return node(n, e, indent, hoisted); }, e.node);
    }

    std::string node(const IntLit& n, const Expression&, int, std::string&) { return std::to_string(n.value); }
    std::string node(const FloatLit& n, const Expression&, int, std::string&) { return formatFloat(n.value); }
    std::string node(const StringLit& n, const Expression&, int, std::string&) { return pythonString(n.value); }
    std::string node(const BoolLit& n, const Expression&, int, std::string&) { return n.value ? "True" : "False"; }

    std::string node(const ListLit& n, const Expression&, int indent, std::string& hoisted) {
        std::string out = "[";
        for (std::size_t i = 0; i < n.elements.size(); ++i)
            out += (i ? ", " : "") + expression(n.elements[i], indent, hoisted);
        return out + "]";
    }

    std::string node(const Reference& n, const Expression& e, int, std::string&) {
        if (isLocal(n.name)) return pythonIdentifier(n.name);
        if (const auto* fn = symbols_.findFunction(n.name)) return imported(fn->pythonModule, fn->pythonName());
        if (const auto* cls = symbols_.findClass(n.name))
            return imported(cls->pythonModule, annotationArgument(cls->decl.annotations, "PythonName").value_or(n.name));
        if (const auto* en = symbols_.findEnum(n.name)) return imported(en->pythonModule, n.name);
        unresolved("unresolved name `" + n.name + "`", e.span);
        return n.name;
    }

    std::string node(const MemberAccess& n, const Expression&, int indent, std::string& hoisted) {
        std::string receiver = operand(*n.receiver, indent, hoisted);
        if (const auto* ref = n.receiver->as<Reference>(); ref != nullptr && !isLocal(ref->name) &&
                                                           symbols_.findEnum(ref->name) != nullptr)
            return receiver + "." + n.member;
        return receiver + "." + pythonIdentifier(toSnakeCase(n.member));
    }

    std::string node(const Call& n, const Expression& e, int indent, std::string& hoisted) {
        const semantics::CallSite* site = pipeline_.callAt(&e);
        std::string callee;
        if (site != nullptr && site->kind == semantics::CallKind::Method) {
            const semantics::FunctionSymbol* fn = symbols_.findMethod(site->className, site->function);
            const auto* access = n.callee->as<MemberAccess>();
            if (fn == nullptr || access == nullptr) {
                unresolved("method call `" + site->function + "`", e.span);
                return {};
            }
            callee = operand(*access->receiver, indent, hoisted) + "." + fn->pythonName();
        } else {
            callee = operand(*n.callee, indent, hoisted);
        }
        std::string out = callee + "(";
        for (std::size_t i = 0; i < n.args.size(); ++i) {
            const Argument& a = n.args[i];
            out += i ? ", " : "";
            if (a.name) out += pythonIdentifier(toSnakeCase(*a.name)) + "=";
            out += expression(*a.value, indent, hoisted);
        }
        return out + ")";
    }

    std::string node(const Lambda& n, const Expression&, int indent, std::string& hoisted) {
        const std::string name = "_lambda_" + std::to_string(++lambdaCount_);
        scopes_.emplace_back();
        std::string params;
        for (std::size_t i = 0; i < n.params.size(); ++i) {
            params += (i ? ", " : "") + pythonIdentifier(n.params[i].name);
            scopes_.back().insert(n.params[i].name);
        }
        std::string def = pad(indent) + "def " + name + "(" + params + "):\n";
        statements(n.body, indent + 1, def);
        std::vector<std::string> results;
        if (!n.body.empty()) {
            if (const auto* last = std::get_if<Assignment>(&n.body.back().node))
                for (const auto& a : last->assignees)
                    if (!a.isWildcard()) results.push_back(pythonIdentifier(*a.name));
        }
        if (!results.empty()) {
            def += pad(indent + 1) + "return ";
            for (std::size_t i = 0; i < results.size(); ++i) def += (i ? ", " : "") + results[i];
            def += "\n";
        } else if (n.body.empty()) {
            def += pad(indent + 1) + "pass\n";
        }
        scopes_.pop_back();
        hoisted += def;
        return name;
    }

    std::string node(const Negation& n, const Expression&, int indent, std::string& hoisted) {
        return "-" + operand(*n.operand, indent, hoisted);
    }

    /// Receivers, callees and negated operands; negations get parentheses.
    std::string operand(const Expression& e, int indent, std::string& hoisted) {
        std::string text = expression(e, indent, hoisted);
        return e.as<Negation>() != nullptr ? "(" + text + ")" : text;
    }

    std::string imported(const std::string& module, const std::string& name) {
        imports_[module].insert(name);
        return name;
    }

    const semantics::PipelineAnalysis& pipeline_;
    const semantics::SymbolTable& symbols_;
    std::vector<std::set<std::string>> scopes_;
    std::map<std::string, std::set<std::string>> imports_;
    int lambdaCount_ = 0;
    Diagnostics errors_;
};

} // namespace

PythonOutput emitPython(const semantics::PipelineAnalysis& pipeline, const semantics::SymbolTable& symbols) {
    if (pipeline.pipeline == nullptr) return {};
    return Emitter(pipeline, symbols).run();
}

} // namespace safepipe::codegen
