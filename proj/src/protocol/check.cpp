#include <algorithm>

#include "safepipe/protocol/protocol.hpp"
#include "safepipe/syntax/formatter.hpp"

namespace safepipe::protocol {

using semantics::ClassType;
using semantics::SymbolTable;

namespace {

std::vector<const semantics::ClassSymbol*> classChain(const SymbolTable& symbols, const std::string& className) {
    std::vector<const semantics::ClassSymbol*> chain;
    std::optional<ClassType> current = ClassType{className, {}};
    while (current && chain.size() < 64) {
        const auto* cls = symbols.findClass(current->name);
        if (cls == nullptr) break;
        chain.push_back(cls);
        auto super = symbols.types.superOf(*current);
        current.reset();
        if (super) {
            if (const auto* c = super->as<ClassType>()) current = *c;
        }
    }
    return chain;
}

/// Protocol class governing values of `type`, or empty.
std::string governingClass(const SymbolTable& symbols, const std::optional<semantics::Type>& type) {
    if (!type) return {};
    const auto* c = type->as<ClassType>();
    return c == nullptr ? std::string() : protocolOwner(symbols, c->name);
}

std::string joined(const std::vector<std::string>& names, const std::string& separator) {
    std::string out;
    for (const auto& n : names) out += (out.empty() ? "" : separator) + n;
    return out;
}

} // namespace

std::string protocolOwner(const SymbolTable& symbols, const std::string& className) {
    for (const auto* cls : classChain(symbols, className))
        if (cls->decl.protocol) return cls->decl.name;
    return {};
}

std::map<std::string, ProtocolAutomaton> compileProtocols(const SymbolTable& symbols) {
    std::map<std::string, ProtocolAutomaton> out;
    for (const auto& [name, cls] : symbols.classes) {
        if (!cls.decl.protocol) continue;
        std::set<std::string> methods;
        for (const auto* c : classChain(symbols, name))
            for (const auto& [m, fn] : c->methods) methods.insert(m);
        out.emplace(name, compileProtocol(*cls.decl.protocol, methods));
    }
    return out;
}

std::vector<CallWord> extractCallWords(const semantics::PipelineAnalysis& pipeline, const SymbolTable& symbols) {
    std::vector<CallWord> words;
    std::map<std::string, std::size_t> byVariable;
    std::map<const syntax::Expression*, std::size_t> byExpression;

    for (const auto& [name, info] : pipeline.variables) {
        std::string owner = governingClass(symbols, info.type);
        if (owner.empty()) continue;
        byVariable[name] = words.size();
        words.push_back({name, owner, {}});
    }

    for (const auto& site : pipeline.calls) {
        if (site.kind != semantics::CallKind::Method || site.receiver == nullptr) continue;
        const SourceSpan& span = site.expr->span;
        if (const auto* ref = site.receiver->as<syntax::Reference>()) {
            auto it = byVariable.find(ref->name);
            if (it != byVariable.end()) words[it->second].calls.push_back({site.function, span});
            continue;
        }
        if (site.inLambda) continue;
        auto type = pipeline.expressionTypes.find(site.receiver);
        if (type == pipeline.expressionTypes.end()) continue;
        std::string owner = governingClass(symbols, type->second);
        if (owner.empty()) continue;
        auto [it, inserted] = byExpression.emplace(site.receiver, words.size());
        if (inserted) words.push_back({syntax::formatExpression(*site.receiver), owner, {}});
        words[it->second].calls.push_back({site.function, span});
    }
    return words;
}

Diagnostics checkOrder(const std::vector<CallWord>& words, const std::map<std::string, ProtocolAutomaton>& automata) {
    Diagnostics out;
    for (const auto& word : words) {
        auto found = automata.find(word.className);
        if (found == automata.end()) continue;
        const ProtocolAutomaton& a = found->second;
        int state = a.start();
        std::vector<std::string> history;
        for (const auto& call : word.calls) {
            if (!a.tracks(call.method)) continue;
            const int next = a.step(state, call.method);
            if (!a.isLive(next)) {
                const auto expected = a.nextTokens(state);
                std::string message = "`" + word.object + "." + call.method + "` violates the protocol of `" +
                                      word.className + "`: ";
                if (expected.empty() && history.empty())
                    message += "no calls allowed";
                else if (expected.empty())
                    message += call.method + " after " + history.back() + " (no further calls allowed)";
                else
                    message += call.method + " before " + joined(expected, " or ") + " (next legal calls: " +
                               joined(expected, ", ") + ")";
                out.push_back(makeDiagnostic("E040", message, call.span));
                break;
            }
            history.push_back(call.method);
            state = next;
        }
    }
    return out;
}

Diagnostics checkAliasing(const semantics::PipelineAnalysis& pipeline, const SymbolTable& symbols) {
    Diagnostics out;
    for (const auto& [name, info] : pipeline.variables) {
        if (info.definition == nullptr) continue;
        const auto* ref = info.definition->as<syntax::Reference>();
        if (ref == nullptr || governingClass(symbols, info.type).empty()) continue;
        out.push_back(makeDiagnostic("E042",
                                     "`" + name + "` aliases the protocol object `" + ref->name +
                                         "`; keep using `" + ref->name + "` instead",
                                     info.span));
    }
    return out;
}

Diagnostics checkProtocols(const semantics::PipelineAnalysis& pipeline, const SymbolTable& symbols,
                           const std::map<std::string, ProtocolAutomaton>& automata) {
    Diagnostics out = checkAliasing(pipeline, symbols);
    Diagnostics order = checkOrder(extractCallWords(pipeline, symbols), automata);
    out.insert(out.end(), order.begin(), order.end());
    std::stable_sort(out.begin(), out.end(), [](const Diagnostic& a, const Diagnostic& b) {
        return std::tie(a.span.startLine, a.span.startCol) < std::tie(b.span.startLine, b.span.startCol);
    });
    return out;
}

} // namespace safepipe::protocol
