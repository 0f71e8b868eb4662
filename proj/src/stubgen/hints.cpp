#include <algorithm>
#include <cctype>
#include <regex>

#include "safepipe/stubgen/stubgen.hpp"
#include "safepipe/syntax/formatter.hpp"

namespace safepipe::stubgen {

using syntax::Comparator;
using syntax::Constraint;
using syntax::TypeRef;

namespace {

TypeRef named(std::string name, std::vector<TypeRef> args = {}) {
    TypeRef t;
    t.node = syntax::NamedTypeRef{std::move(name), std::move(args)};
    return t;
}

/// Parsed hint: a dotted name with optional subscript, or a `|` union.
struct Hint {
    std::string name;
    std::vector<Hint> args;
    bool subscripted = false;
    bool isUnion = false;
};

class HintParser {
public:
    explicit HintParser(std::string_view text) : text_(text) {}

    std::optional<Hint> parse() {
        auto h = unionHint();
        skipSpace();
        if (!h || pos_ != text_.size()) return std::nullopt;
        return h;
    }

private:
    void skipSpace() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    bool accept(char c) {
        skipSpace();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    std::optional<Hint> unionHint() {
        auto first = primary();
        if (!first) return std::nullopt;
        if (!accept('|')) return first;
        Hint u;
        u.isUnion = true;
        u.args.push_back(std::move(*first));
        do {
            auto next = primary();
            if (!next) return std::nullopt;
            u.args.push_back(std::move(*next));
        } while (accept('|'));
        return u;
    }

    std::optional<Hint> primary() {
        skipSpace();
        Hint h;
        if (pos_ < text_.size() && (text_[pos_] == '\'' || text_[pos_] == '"')) {
            const char q = text_[pos_];
            const std::size_t end = text_.find(q, pos_ + 1);
            if (end == std::string_view::npos) return std::nullopt;
            h.name = std::string(text_.substr(pos_, end - pos_ + 1));
            pos_ = end + 1;
            return h;
        }
        if (text_.substr(pos_, 3) == "...") {
            pos_ += 3;
            h.name = "...";
            return h;
        }
        const std::size_t start = pos_;
        while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_' || text_[pos_] == '.'))
            ++pos_;
        if (pos_ == start || std::isdigit(static_cast<unsigned char>(text_[start])) || text_[start] == '.') return std::nullopt;
        h.name = std::string(text_.substr(start, pos_ - start));
        if (accept('[')) {
            h.subscripted = true;
            if (!accept(']')) {
                do {
                    auto arg = unionHint();
                    if (!arg) return std::nullopt;
                    h.args.push_back(std::move(*arg));
                } while (accept(','));
                if (!accept(']')) return std::nullopt;
            }
        }
        return h;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

std::string render(const Hint& h) {
    if (h.isUnion) {
        std::string out;
        for (const auto& a : h.args) out += (out.empty() ? "" : " | ") + render(a);
        return out;
    }
    std::string out = h.name;
    if (h.subscripted) {
        out += "[";
        for (std::size_t i = 0; i < h.args.size(); ++i) out += (i ? ", " : "") + render(h.args[i]);
        out += "]";
    }
    return out;
}

class Mapper {
public:
    MappedType run(const Hint& h) {
        MappedType out;
        out.type = map(h);
        out.reviewReasons = std::move(reasons_);
        return out;
    }

    TypeRef any(std::string reason) {
        reasons_.push_back(std::move(reason));
        return named("Any");
    }

private:
    static std::string base(const std::string& name) {
        return name.rfind("typing.", 0) == 0 ? name.substr(7) : name;
    }

    TypeRef unionOf(const std::vector<Hint>& members, bool withNothing) {
        std::vector<TypeRef> flat;
        auto add = [&](TypeRef t) {
            if (const auto* u = std::get_if<syntax::UnionTypeRef>(&t.node)) {
                for (const auto& m : u->members)
                    if (std::find(flat.begin(), flat.end(), m) == flat.end()) flat.push_back(m);
            } else if (std::find(flat.begin(), flat.end(), t) == flat.end()) {
                flat.push_back(std::move(t));
            }
        };
        for (const auto& m : members) add(map(m));
        if (withNothing) add(named("Nothing"));
        if (flat.size() == 1) return flat[0];
        TypeRef t;
        t.node = syntax::UnionTypeRef{std::move(flat)};
        return t;
    }

    TypeRef map(const Hint& h) {
        if (h.isUnion) return unionOf(h.args, false);
        const std::string name = base(h.name);
        if (!h.subscripted) {
            if (name == "int") return named("Int");
            if (name == "float") return named("Float");
            if (name == "str") return named("String");
            if (name == "bool") return named("Boolean");
            if (name == "None" || name == "NoneType") return named("Nothing");
            if (name == "Any") return any("hint is `Any`");
        } else {
            if ((name == "list" || name == "List") && h.args.size() == 1) return named("List", {map(h.args[0])});
            if (name == "Optional" && h.args.size() == 1) return unionOf(h.args, true);
            if (name == "Union" && !h.args.empty()) return unionOf(h.args, false);
        }
        return any("unmapped hint `" + render(h) + "`");
    }

    std::vector<std::string> reasons_;
};

/// Numbers in phrases: optional sign, digits, optional fraction and
/// exponent. A trailing period ends the sentence, not the number.
const std::string kNumber = R"(([-+]?(?:\d+(?:\.\d+)?|\.\d+)(?:[eE][-+]?\d+)?))";

syntax::Constant number(const std::string& text) {
    if (text.find_first_of(".eE") == std::string::npos) {
        try {
            return static_cast<std::int64_t>(std::stoll(text));
        } catch (const std::out_of_range&) {
        }
    }
    return std::stod(text);
}

double numeric(const syntax::Constant& c) {
    if (const auto* i = std::get_if<std::int64_t>(&c)) return static_cast<double>(*i);
    return std::get<double>(c);
}

Constraint constraint(Comparator op, syntax::Constant value) {
    Constraint c;
    c.op = op;
    c.value = std::move(value);
    return c;
}

} // namespace

MappedType mapHint(const std::optional<std::string>& hint) {
    if (!hint) {
        MappedType out;
        out.type = named("Any");
        out.reviewReasons = {"missing type hint"};
        return out;
    }
    auto parsed = HintParser(*hint).parse();
    if (!parsed) {
        MappedType out;
        out.type = named("Any");
        out.reviewReasons = {"unmapped hint `" + *hint + "`"};
        return out;
    }
    return Mapper().run(*parsed);
}

MinedConstraints mineConstraints(std::string_view text) {
    struct Match {
        std::size_t position;
        std::vector<Constraint> constraints;
    };
    std::vector<Match> matches;
    MinedConstraints out;
    const std::string s(text);
    static const auto flags = std::regex::icase | std::regex::ECMAScript;
    static const std::regex kBetween(R"(\bbetween\s+)" + kNumber + R"(\s+and\s+)" + kNumber, flags);
    static const std::regex kRange(R"(\bin\s+(?:the\s+)?range\s*([\[(])\s*)" + kNumber + R"(\s*,\s*)" + kNumber + R"(\s*([\])]))", flags);
    static const std::regex kNonNegative(R"(\bnon-negative\b)", flags);
    static const std::regex kPositive(R"(\bpositive\b)", flags);
    static const std::regex kAtMost(R"(\bat\s+most\s+)" + kNumber, flags);
    static const std::regex kAtLeast(R"(\bat\s+least\s+)" + kNumber, flags);

    auto each = [&](const std::regex& re, auto&& handle) {
        for (auto it = std::sregex_iterator(s.begin(), s.end(), re); it != std::sregex_iterator(); ++it)
            handle(*it);
    };
    auto range = [&](const std::smatch& m, const std::string& lo, const std::string& hi, bool openLo, bool openHi) {
        const auto a = number(lo);
        const auto b = number(hi);
        if (numeric(a) > numeric(b) || ((openLo || openHi) && numeric(a) == numeric(b))) {
            out.dropped.push_back("range `" + m.str(0) + "` is empty");
            return;
        }
        matches.push_back({static_cast<std::size_t>(m.position(0)),
                           {constraint(openLo ? Comparator::Greater : Comparator::GreaterEq, a),
                            constraint(openHi ? Comparator::Less : Comparator::LessEq, b)}});
    };

    each(kBetween,
         [&](const std::smatch& m) { range(m, m.str(1), m.str(2), false, false); });
    each(kRange,
         [&](const std::smatch& m) { range(m, m.str(2), m.str(3), m.str(1) == "(", m.str(4) == ")"); });
    each(kNonNegative, [&](const std::smatch& m) {
        matches.push_back({static_cast<std::size_t>(m.position(0)), {constraint(Comparator::GreaterEq, std::int64_t{0})}});
    });
    each(kPositive, [&](const std::smatch& m) {
        const std::size_t at = static_cast<std::size_t>(m.position(0));
        std::string before = s.substr(at >= 4 ? at - 4 : 0, at >= 4 ? 4 : at);
        std::transform(before.begin(), before.end(), before.begin(), [](unsigned char c) { return std::tolower(c); });
        if (before == "non-" || before == "non " || (before.size() >= 3 && before.substr(before.size() - 3) == "non"))
            return;
        matches.push_back({at, {constraint(Comparator::Greater, std::int64_t{0})}});
    });
    each(kAtMost,
         [&](const std::smatch& m) { matches.push_back({static_cast<std::size_t>(m.position(0)), {constraint(Comparator::LessEq, number(m.str(1)))}}); });
    each(kAtLeast,
         [&](const std::smatch& m) { matches.push_back({static_cast<std::size_t>(m.position(0)), {constraint(Comparator::GreaterEq, number(m.str(1)))}}); });

    std::stable_sort(matches.begin(), matches.end(), [](const Match& a, const Match& b) { return a.position < b.position; });
    for (auto& m : matches)
        for (auto& c : m.constraints) out.constraints.push_back(std::move(c));
    return out;
}

} // namespace safepipe::stubgen
