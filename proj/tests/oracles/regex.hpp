#pragma once

#include <random>
#include <set>
#include <string>
#include <vector>

#include "safepipe/syntax/ast.hpp"

namespace safepipe::oracles {

using Word = std::vector<std::string>;

/// Backtracking matcher over the regex tree.
class NaiveMatcher {
public:
    NaiveMatcher(const Word& word, const std::set<std::string>& methods) : w_(word), methods_(methods) {}

    bool matches(const syntax::ProtocolRegex& r) { return ends(r, 0).count(w_.size()) != 0; }

    /// The word can be extended to one that matches.
    bool extendable(const syntax::ProtocolRegex& r) { return prefix(r, 0); }

private:
    using Ends = std::set<std::size_t>;

    Ends ends(const syntax::ProtocolRegex& r, std::size_t i) {
        using namespace syntax;
        if (const auto* t = std::get_if<ProtoToken>(&r.node)) {
            if (i < w_.size() && w_[i] == t->method) return {i + 1};
            return {};
        }
        if (std::holds_alternative<ProtoAny>(r.node)) {
            if (i < w_.size() && methods_.count(w_[i]) != 0) return {i + 1};
            return {};
        }
        if (const auto* seq = std::get_if<ProtoSeq>(&r.node)) {
            Ends current = {i};
            for (const auto& item : seq->items) {
                Ends next;
                for (std::size_t j : current)
                    for (std::size_t k : ends(item, j)) next.insert(k);
                current = std::move(next);
            }
            return current;
        }
        if (const auto* alt = std::get_if<ProtoAlt>(&r.node)) {
            Ends out;
            for (const auto& o : alt->options)
                for (std::size_t k : ends(o, i)) out.insert(k);
            return out;
        }
        const auto& rep = std::get<ProtoRepeat>(r.node);
        const Ends once = ends(*rep.inner, i);
        if (rep.kind == RepeatKind::Opt) {
            Ends out = once;
            out.insert(i);
            return out;
        }
        Ends out = once;
        std::vector<std::size_t> work(once.begin(), once.end());
        while (!work.empty()) {
            const std::size_t j = work.back();
            work.pop_back();
            for (std::size_t k : ends(*rep.inner, j))
                if (out.insert(k).second) work.push_back(k);
        }
        if (rep.kind == RepeatKind::Star) out.insert(i);
        return out;
    }

    /// w[i..] is a prefix of some word in L(r). Every regex here denotes a
    /// nonempty language, so running out of input is always extendable.
    bool prefix(const syntax::ProtocolRegex& r, std::size_t i) {
        using namespace syntax;
        if (i == w_.size()) return true;
        if (std::holds_alternative<ProtoToken>(r.node) || std::holds_alternative<ProtoAny>(r.node))
            return ends(r, i).count(w_.size()) != 0;
        if (const auto* seq = std::get_if<ProtoSeq>(&r.node)) return seqPrefix(seq->items, 0, i);
        if (const auto* alt = std::get_if<ProtoAlt>(&r.node)) {
            for (const auto& o : alt->options)
                if (prefix(o, i)) return true;
            return false;
        }
        const auto& rep = std::get<ProtoRepeat>(r.node);
        if (rep.kind == RepeatKind::Opt) return prefix(*rep.inner, i);
        if (prefix(*rep.inner, i)) return true;
        for (std::size_t j : ends(r, i))
            if (j > i && prefix(*rep.inner, j)) return true;
        return false;
    }

    bool seqPrefix(const std::vector<syntax::ProtocolRegex>& items, std::size_t from, std::size_t i) {
        if (i == w_.size()) return true;
        if (from == items.size()) return false;
        if (prefix(items[from], i)) return true;
        for (std::size_t j : ends(items[from], i))
            if (seqPrefix(items, from + 1, j)) return true;
        return false;
    }

    const Word& w_;
    const std::set<std::string>& methods_;
};

/// Random protocol regexes of bounded depth over the first `k` letters of
/// a, b, c, d.
class RegexGenerator {
public:
    explicit RegexGenerator(std::uint64_t seed) : rng_(seed) {}

    syntax::ProtocolRegex regex(int depth, int k) {
        using namespace syntax;
        ProtocolRegex r;
        if (depth == 0 || pick(4) == 0) {
            if (pick(10) == 0) r.node = ProtoAny{};
            else r.node = ProtoToken{std::string(1, static_cast<char>('a' + pick(k)))};
            return r;
        }
        switch (pick(3)) {
        case 0: {
            ProtoSeq seq;
            const int n = 2 + pick(2);
            for (int i = 0; i < n; ++i) seq.items.push_back(regex(depth - 1, k));
            r.node = std::move(seq);
            break;
        }
        case 1: {
            ProtoAlt alt;
            const int n = 2 + pick(2);
            for (int i = 0; i < n; ++i) alt.options.push_back(regex(depth - 1, k));
            r.node = std::move(alt);
            break;
        }
        default: {
            ProtoRepeat rep;
            rep.kind = static_cast<RepeatKind>(pick(3));
            rep.inner = regex(depth - 1, k);
            r.node = std::move(rep);
            break;
        }
        }
        return r;
    }

    int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }

private:
    std::mt19937_64 rng_;
};

/// All words over `symbols` of length at most `maxLength`, shortest first.
inline std::vector<Word> allWords(const std::vector<std::string>& symbols, std::size_t maxLength) {
    std::vector<Word> out = {{}};
    std::size_t begin = 0;
    for (std::size_t len = 1; len <= maxLength; ++len) {
        const std::size_t end = out.size();
        for (std::size_t i = begin; i < end; ++i) {
            for (const auto& s : symbols) {
                Word w = out[i];
                w.push_back(s);
                out.push_back(std::move(w));
            }
        }
        begin = end;
    }
    return out;
}

} // namespace safepipe::oracles
