#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "safepipe/diagnostic.hpp"
#include "safepipe/semantics/analysis.hpp"
#include "safepipe/syntax/ast.hpp"

namespace safepipe::protocol {

/// Deterministic, total automaton over the tokens a protocol mentions plus
/// one extra symbol standing for every other declared method. Only `.`
/// matches that extra symbol.
class ProtocolAutomaton {
public:
    [[nodiscard]] int start() const { return 0; }
    [[nodiscard]] std::size_t stateCount() const { return accepting_.size(); }
    [[nodiscard]] const std::vector<std::string>& alphabet() const { return alphabet_; }
    [[nodiscard]] const std::set<std::string>& methods() const { return methods_; }
    [[nodiscard]] bool hasWildcard() const { return wildcard_; }

    /// Symbol index of a method; alphabet().size() for any other name.
    [[nodiscard]] std::size_t symbolOf(const std::string& method) const;
    [[nodiscard]] int step(int state, std::size_t symbol) const { return transitions_[static_cast<std::size_t>(state)][symbol]; }
    [[nodiscard]] int step(int state, const std::string& method) const { return step(state, symbolOf(method)); }
    [[nodiscard]] bool isAccepting(int state) const { return accepting_[static_cast<std::size_t>(state)]; }
    /// Some accepting state is reachable.
    [[nodiscard]] bool isLive(int state) const { return live_[static_cast<std::size_t>(state)]; }

    /// Whether calls to `method` take part in the protocol. Without `.` in
    /// the regex, unmentioned methods are unconstrained.
    [[nodiscard]] bool tracks(const std::string& method) const;

    [[nodiscard]] bool accepts(const std::vector<std::string>& word) const;
    [[nodiscard]] bool acceptsPrefix(const std::vector<std::string>& word) const;

    /// Methods that keep `state` live, sorted.
    [[nodiscard]] std::vector<std::string> nextTokens(int state) const;

private:
    friend ProtocolAutomaton compileProtocol(const syntax::ProtocolRegex& regex, const std::set<std::string>& methods);

    std::vector<std::string> alphabet_;
    std::set<std::string> methods_;
    bool wildcard_ = false;
    std::vector<std::vector<int>> transitions_;
    std::vector<bool> accepting_;
    std::vector<bool> live_;
};

/// Thompson construction followed by subset construction. `methods` are the
/// declared methods of the class; `.` matches any of them.
ProtocolAutomaton compileProtocol(const syntax::ProtocolRegex& regex, const std::set<std::string>& methods);

struct Call {
    std::string method;
    SourceSpan span;
};

/// Calls on one object in evaluation order.
struct CallWord {
    std::string object;    ///< variable name, or the receiver expression text for unbound objects
    std::string className; ///< class whose protocol governs the object
    std::vector<Call> calls;
};

/// Class declaring the protocol that governs `className` (itself or the
/// nearest supertype with a protocol); empty if none.
std::string protocolOwner(const semantics::SymbolTable& symbols, const std::string& className);

/// Automata for every class that declares a protocol.
std::map<std::string, ProtocolAutomaton> compileProtocols(const semantics::SymbolTable& symbols);

/// One word per protocol object. Calls on top-level variables inside lambda
/// bodies count at their enclosing statement; lambda-local objects are not
/// tracked.
std::vector<CallWord> extractCallWords(const semantics::PipelineAnalysis& pipeline,
                                       const semantics::SymbolTable& symbols);

/// E040 on the first call of each word that leaves the live states.
Diagnostics checkOrder(const std::vector<CallWord>& words, const std::map<std::string, ProtocolAutomaton>& automata);

/// E042 for each top-level variable that aliases a protocol object.
Diagnostics checkAliasing(const semantics::PipelineAnalysis& pipeline, const semantics::SymbolTable& symbols);

/// Aliasing and order checks for one pipeline.
Diagnostics checkProtocols(const semantics::PipelineAnalysis& pipeline, const semantics::SymbolTable& symbols,
                           const std::map<std::string, ProtocolAutomaton>& automata);

} // namespace safepipe::protocol
