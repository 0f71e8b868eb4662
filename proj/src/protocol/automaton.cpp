#include <algorithm>
#include <deque>

#include "safepipe/protocol/protocol.hpp"

namespace safepipe::protocol {

namespace {

constexpr int kEpsilon = -1;
constexpr int kAny = -2;

struct Edge {
    int label;
    int target;
};

/// Thompson NFA. Labels are symbol indices, kEpsilon or kAny.
class Nfa {
public:
    struct Fragment {
        int start;
        int end;
    };

    explicit Nfa(const std::vector<std::string>& alphabet) : alphabet_(alphabet) {}

    Fragment build(const syntax::ProtocolRegex& r) {
        return std::visit([this](const auto& n) { return build(n); }, r.node);
    }

    [[nodiscard]] const std::vector<std::vector<Edge>>& edges() const { return edges_; }

private:
    int state() {
        edges_.emplace_back();
        return static_cast<int>(edges_.size()) - 1;
    }
    void link(int from, int label, int to) { edges_[static_cast<std::size_t>(from)].push_back({label, to}); }

    Fragment symbol(int label) {
        const int s = state();
        const int e = state();
        link(s, label, e);
        return {s, e};
    }

    Fragment build(const syntax::ProtoToken& t) {
        auto it = std::lower_bound(alphabet_.begin(), alphabet_.end(), t.method);
        return symbol(static_cast<int>(it - alphabet_.begin()));
    }
    Fragment build(const syntax::ProtoAny&) { return symbol(kAny); }
    Fragment build(const syntax::ProtoSeq& seq) {
        const int s = state();
        int end = s;
        for (const auto& item : seq.items) {
            Fragment f = build(item);
            link(end, kEpsilon, f.start);
            end = f.end;
        }
        return {s, end};
    }
    Fragment build(const syntax::ProtoAlt& alt) {
        const int s = state();
        const int e = state();
        for (const auto& option : alt.options) {
            Fragment f = build(option);
            link(s, kEpsilon, f.start);
            link(f.end, kEpsilon, e);
        }
        return {s, e};
    }
    Fragment build(const syntax::ProtoRepeat& rep) {
        const int s = state();
        const int e = state();
        Fragment f = build(*rep.inner);
        link(s, kEpsilon, f.start);
        link(f.end, kEpsilon, e);
        if (rep.kind != syntax::RepeatKind::Plus) link(s, kEpsilon, e);
        if (rep.kind != syntax::RepeatKind::Opt) link(f.end, kEpsilon, f.start);
        return {s, e};
    }

    const std::vector<std::string>& alphabet_;
    std::vector<std::vector<Edge>> edges_;
};

void collectTokens(const syntax::ProtocolRegex& r, std::set<std::string>& tokens, bool& wildcard) {
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, syntax::ProtoToken>) tokens.insert(n.method);
            else if constexpr (std::is_same_v<T, syntax::ProtoAny>) wildcard = true;
            else if constexpr (std::is_same_v<T, syntax::ProtoSeq>) {
                for (const auto& i : n.items) collectTokens(i, tokens, wildcard);
            } else if constexpr (std::is_same_v<T, syntax::ProtoAlt>) {
                for (const auto& o : n.options) collectTokens(o, tokens, wildcard);
            } else {
                collectTokens(*n.inner, tokens, wildcard);
            }
        },
        r.node);
}

using StateSet = std::vector<int>;

StateSet closure(const Nfa& nfa, StateSet states) {
    std::vector<bool> seen(nfa.edges().size());
    std::vector<int> stack = states;
    for (int s : states) seen[static_cast<std::size_t>(s)] = true;
    while (!stack.empty()) {
        const int s = stack.back();
        stack.pop_back();
        for (const Edge& e : nfa.edges()[static_cast<std::size_t>(s)]) {
            if (e.label != kEpsilon || seen[static_cast<std::size_t>(e.target)]) continue;
            seen[static_cast<std::size_t>(e.target)] = true;
            states.push_back(e.target);
            stack.push_back(e.target);
        }
    }
    std::sort(states.begin(), states.end());
    return states;
}

} // namespace

ProtocolAutomaton compileProtocol(const syntax::ProtocolRegex& regex, const std::set<std::string>& methods) {
    ProtocolAutomaton a;
    std::set<std::string> tokens;
    collectTokens(regex, tokens, a.wildcard_);
    a.alphabet_.assign(tokens.begin(), tokens.end());
    a.methods_ = methods;

    Nfa nfa(a.alphabet_);
    const Nfa::Fragment whole = nfa.build(regex);
    const std::size_t symbols = a.alphabet_.size() + 1;

    std::map<StateSet, int> ids;
    std::deque<StateSet> pending;
    auto intern = [&](StateSet set) {
        auto [it, inserted] = ids.emplace(set, static_cast<int>(ids.size()));
        if (inserted) {
            a.transitions_.emplace_back(symbols, -1);
            a.accepting_.push_back(std::binary_search(set.begin(), set.end(), whole.end));
            pending.push_back(std::move(set));
        }
        return it->second;
    };
    intern(closure(nfa, {whole.start}));
    while (!pending.empty()) {
        StateSet set = std::move(pending.front());
        pending.pop_front();
        const int from = ids.at(set);
        for (std::size_t sym = 0; sym < symbols; ++sym) {
            StateSet next;
            for (int s : set)
                for (const Edge& e : nfa.edges()[static_cast<std::size_t>(s)])
                    if (e.label == kAny || e.label == static_cast<int>(sym)) next.push_back(e.target);
            std::sort(next.begin(), next.end());
            next.erase(std::unique(next.begin(), next.end()), next.end());
            const int to = intern(closure(nfa, std::move(next)));
            a.transitions_[static_cast<std::size_t>(from)][sym] = to;
        }
    }

    a.live_ = a.accepting_;
    for (bool changed = true; changed;) {
        changed = false;
        for (std::size_t s = 0; s < a.transitions_.size(); ++s) {
            if (a.live_[s]) continue;
            for (int t : a.transitions_[s]) {
                if (a.live_[static_cast<std::size_t>(t)]) {
                    a.live_[s] = true;
                    changed = true;
                    break;
                }
            }
        }
    }
    return a;
}

std::size_t ProtocolAutomaton::symbolOf(const std::string& method) const {
    auto it = std::lower_bound(alphabet_.begin(), alphabet_.end(), method);
    if (it != alphabet_.end() && *it == method) return static_cast<std::size_t>(it - alphabet_.begin());
    return alphabet_.size();
}

bool ProtocolAutomaton::tracks(const std::string& method) const {
    return symbolOf(method) < alphabet_.size() || (wildcard_ && methods_.count(method) != 0);
}

bool ProtocolAutomaton::accepts(const std::vector<std::string>& word) const {
    int s = start();
    for (const auto& m : word) s = step(s, m);
    return isAccepting(s);
}

bool ProtocolAutomaton::acceptsPrefix(const std::vector<std::string>& word) const {
    int s = start();
    if (!isLive(s)) return false;
    for (const auto& m : word) {
        s = step(s, m);
        if (!isLive(s)) return false;
    }
    return true;
}

std::vector<std::string> ProtocolAutomaton::nextTokens(int state) const {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < alphabet_.size(); ++i)
        if (isLive(step(state, i))) out.push_back(alphabet_[i]);
    if (isLive(step(state, alphabet_.size()))) {
        for (const auto& m : methods_)
            if (symbolOf(m) == alphabet_.size()) out.push_back(m);
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace safepipe::protocol
