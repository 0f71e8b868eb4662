#include "safepipe/syntax/formatter.hpp"

#include <array>
#include <charconv>
#include <cmath>

namespace safepipe::syntax {

namespace {

std::string pad(int indent) { return std::string(static_cast<std::size_t>(indent) * 4, ' '); }

template <class T, class F>
std::string join(const std::vector<T>& items, std::string_view sep, F&& render) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i > 0) out += sep;
        out += render(items[i]);
    }
    return out;
}

std::string formatStatement(const Statement& s, int indent);

std::string formatStatements(const std::vector<Statement>& body, int indent) {
    std::string out;
    for (const auto& s : body) out += pad(indent) + formatStatement(s, indent) + "\n";
    return out;
}

std::string formatExpr(const Expression& e, int indent) {
    return std::visit(
        [&](const auto& n) -> std::string {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, IntLit>) {
                return std::to_string(n.value);
            } else if constexpr (std::is_same_v<T, FloatLit>) {
                return formatFloat(n.value);
            } else if constexpr (std::is_same_v<T, StringLit>) {
                return quoteString(n.value);
            } else if constexpr (std::is_same_v<T, BoolLit>) {
                return n.value ? "true" : "false";
            } else if constexpr (std::is_same_v<T, ListLit>) {
                return "[" + join(n.elements, ", ", [&](const Expression& x) { return formatExpr(x, indent); }) + "]";
            } else if constexpr (std::is_same_v<T, Reference>) {
                return n.name;
            } else if constexpr (std::is_same_v<T, MemberAccess>) {
                return formatExpr(*n.receiver, indent) + "." + n.member;
            } else if constexpr (std::is_same_v<T, Call>) {
                return formatExpr(*n.callee, indent) + "(" +
                       join(n.args, ", ",
                            [&](const Argument& a) {
                                std::string v = formatExpr(*a.value, indent);
                                return a.name ? *a.name + " = " + v : v;
                            }) +
                       ")";
            } else if constexpr (std::is_same_v<T, Lambda>) {
                std::string out = "(" + join(n.params, ", ", [](const LambdaParam& p) {
                    return p.type ? p.name + ": " + formatType(*p.type) : p.name;
                }) + ") -> {";
                if (n.body.empty()) return out + "}";
                return out + "\n" + formatStatements(n.body, indent + 1) + pad(indent) + "}";
            } else {
                static_assert(std::is_same_v<T, Negation>);
                // A suffix after a negated primary would bind to the negation,
                // so negated calls and member accesses need parentheses.
                const Expression& operand = *n.operand;
                const bool wrap = operand.as<Call>() != nullptr || operand.as<MemberAccess>() != nullptr;
                std::string inner = formatExpr(operand, indent);
                return wrap ? "-(" + inner + ")" : "-" + inner;
            }
        },
        e.node);
}

std::string formatStatement(const Statement& s, int indent) {
    if (const auto* a = std::get_if<Assignment>(&s.node)) {
        return join(a->assignees, ", ", [](const Assignee& t) { return t.name.value_or("_"); }) + " = " +
               formatExpr(a->rhs, indent);
    }
    return formatExpr(std::get<ExpressionStatement>(s.node).expr, indent);
}

enum class ProtoLevel { Alt, Seq, Atom };

std::string formatProto(const ProtocolRegex& r, ProtoLevel level) {
    return std::visit(
        [&](const auto& n) -> std::string {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, ProtoToken>) {
                return n.method;
            } else if constexpr (std::is_same_v<T, ProtoAny>) {
                return ".";
            } else if constexpr (std::is_same_v<T, ProtoSeq>) {
                if (n.items.empty()) return "()";
                std::string body =
                    join(n.items, " ", [](const ProtocolRegex& x) { return formatProto(x, ProtoLevel::Seq); });
                return level == ProtoLevel::Alt ? body : "(" + body + ")";
            } else if constexpr (std::is_same_v<T, ProtoAlt>) {
                std::string body =
                    join(n.options, " | ", [](const ProtocolRegex& x) { return formatProto(x, ProtoLevel::Alt); });
                // Options are printed at Alt level, but a nested alternation
                // must stay grouped to keep its shape.
                return "(" + body + ")";
            } else {
                static_assert(std::is_same_v<T, ProtoRepeat>);
                std::string inner = formatProto(*n.inner, ProtoLevel::Atom);
                // Sequences and alternations bring their own parentheses.
                const bool bare = !std::holds_alternative<ProtoRepeat>(n.inner->node);
                if (!bare) inner = "(" + inner + ")";
                switch (n.kind) {
                    case RepeatKind::Star: return inner + "*";
                    case RepeatKind::Plus: return inner + "+";
                    case RepeatKind::Opt: return inner + "?";
                }
                return inner;
            }
        },
        r.node);
}

std::string formatNameArg(const NameArg& n) { return n.isLiteral ? quoteString(n.text) : n.text; }

std::string formatTypeParams(const std::vector<TypeParam>& params) {
    if (params.empty()) return "";
    return "<" + join(params, ", ", [](const TypeParam& p) {
               return p.bound ? p.name + " sub " + formatType(*p.bound) : p.name;
           }) + ">";
}

std::string formatAnnotations(const std::vector<Annotation>& annotations, int indent) {
    std::string out;
    for (const auto& a : annotations) {
        out += pad(indent) + "@" + a.name;
        if (a.argument) out += "(" + quoteString(*a.argument) + ")";
        out += "\n";
    }
    return out;
}

std::string formatEffect(const EffectOp& op) {
    switch (op.kind) {
        case EffectKind::Add: return ".add(" + formatNameArg(op.names[0]) + ": " + formatType(*op.type) + ")";
        case EffectKind::Remove: return ".remove(" + formatNameArg(op.names[0]) + ")";
        case EffectKind::Rename:
            return ".rename(" + formatNameArg(op.names[0]) + ", " + formatNameArg(op.names[1]) + ")";
        case EffectKind::Retype: return ".retype(" + formatNameArg(op.names[0]) + ", " + formatType(*op.type) + ")";
        case EffectKind::Keep: return ".keep(" + formatNameArg(op.names[0]) + ")";
        case EffectKind::Drop: return ".drop(" + formatNameArg(op.names[0]) + ")";
    }
    return "";
}

std::string formatFunction(const FunDecl& f, int indent) {
    std::string out = formatAnnotations(f.annotations, indent);
    out += pad(indent) + "fun " + f.name + formatTypeParams(f.typeParams) + "(";
    out += join(f.params, ", ", [](const Parameter& p) {
        std::string s = p.name + ": " + formatType(p.type);
        if (p.defaultValue) s += " = " + formatConstant(*p.defaultValue);
        return s;
    });
    out += ")";
    auto result = [](const Result& r) { return r.name + ": " + formatType(r.type); };
    if (f.results.size() == 1) {
        out += " -> " + result(f.results.front());
    } else if (f.results.size() > 1) {
        out += " -> (" + join(f.results, ", ", result) + ")";
    }
    if (f.requireClauses.empty() && f.schemaClauses.empty()) return out + "\n";
    out += " {\n";
    for (const auto& r : f.requireClauses) {
        out += pad(indent + 1) + "require " + r.table + " has column " + formatNameArg(r.column);
        if (r.type) out += ": " + formatType(*r.type);
        out += "\n";
    }
    for (const auto& clause : f.schemaClauses) {
        if (clause.assignments.empty()) {
            out += pad(indent + 1) + "schema {}\n";
            continue;
        }
        out += pad(indent + 1) + "schema {\n";
        for (const auto& a : clause.assignments) {
            out += pad(indent + 2) + a.target + " = ";
            if (a.value.external) {
                out += "external(" + a.value.source + ")";
            } else {
                out += a.value.source;
                for (const auto& op : a.value.ops) out += formatEffect(op);
            }
            out += "\n";
        }
        out += pad(indent + 1) + "}\n";
    }
    return out + pad(indent) + "}\n";
}

std::string formatClass(const ClassDecl& c) {
    std::string out = formatAnnotations(c.annotations, 0);
    out += "class " + c.name + formatTypeParams(c.typeParams);
    if (c.superType) out += " sub " + formatType(*c.superType);
    if (c.attributes.empty() && c.methods.empty() && !c.protocol) return out + "\n";
    out += " {\n";
    for (const auto& a : c.attributes) out += pad(1) + "attr " + a.name + ": " + formatType(a.type) + "\n";
    for (const auto& m : c.methods) out += formatFunction(m, 1);
    if (c.protocol) {
        std::string regex = formatProtocol(*c.protocol);
        out += pad(1) + "protocol" + (regex.empty() ? "" : " " + regex) + "\n";
    }
    return out + "}\n";
}

std::string formatEnum(const EnumDecl& e) {
    return "enum " + e.name + " { " + join(e.variants, ", ", [](const std::string& v) { return v; }) + " }\n";
}

} // namespace

std::string quoteString(const std::string& value) {
    std::string out = "\"";
    for (char c : value) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default: out += c; break;
        }
    }
    return out + "\"";
}

std::string formatFloat(double value) {
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    std::string text(buf.data(), ptr);
    if (text.find_first_of(".e") == std::string::npos) text += ".0";
    return text;
}

std::string formatComparator(Comparator op) {
    switch (op) {
        case Comparator::Less: return "<";
        case Comparator::LessEq: return "<=";
        case Comparator::Greater: return ">";
        case Comparator::GreaterEq: return ">=";
        case Comparator::Equal: return "==";
        case Comparator::NotEqual: return "!=";
    }
    return "==";
}

std::string formatConstant(const Constant& constant) {
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::int64_t>) return std::to_string(v);
            else if constexpr (std::is_same_v<T, double>) return formatFloat(v);
            else if constexpr (std::is_same_v<T, std::string>) return quoteString(v);
            else return v ? "true" : "false";
        },
        constant);
}

std::string formatType(const TypeRef& type) {
    return std::visit(
        [](const auto& n) -> std::string {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, NamedTypeRef>) {
                if (n.args.empty()) return n.name;
                return n.name + "<" + join(n.args, ", ", [](const TypeRef& t) { return formatType(t); }) + ">";
            } else if constexpr (std::is_same_v<T, UnionTypeRef>) {
                return "union<" + join(n.members, ", ", [](const TypeRef& t) { return formatType(t); }) + ">";
            } else if constexpr (std::is_same_v<T, FunctionTypeRef>) {
                auto list = [](const std::vector<TypeRef>& ts) {
                    return join(ts, ", ", [](const TypeRef& t) { return formatType(t); });
                };
                return "(" + list(n.params) + ") -> (" + list(n.results) + ")";
            } else {
                return formatType(*n.base) + " where {" + join(n.constraints, ", ", [](const Constraint& c) {
                           return "it " + formatComparator(c.op) + " " + formatConstant(c.value);
                       }) + "}";
            }
        },
        type.node);
}

std::string formatProtocol(const ProtocolRegex& regex) {
    if (const auto* seq = std::get_if<ProtoSeq>(&regex.node); seq && seq->items.empty()) return "";
    if (const auto* alt = std::get_if<ProtoAlt>(&regex.node)) {
        return join(alt->options, " | ", [](const ProtocolRegex& x) { return formatProto(x, ProtoLevel::Alt); });
    }
    return formatProto(regex, ProtoLevel::Alt);
}

std::string formatExpression(const Expression& expr, int indent) { return formatExpr(expr, indent); }

std::string format(const PipelineDecl& p) {
    if (p.body.empty()) return "pipeline " + p.name + " {}\n";
    return "pipeline " + p.name + " {\n" + formatStatements(p.body, 1) + "}\n";
}

std::string format(const PipelineFile& file) {
    return join(file.pipelines, "\n", [](const PipelineDecl& p) { return format(p); });
}

std::string format(const StubFile& file) {
    std::string out;
    if (file.pythonModule) out += "@PythonModule(" + quoteString(*file.pythonModule) + ")\n";
    for (const auto& decl : file.declarations) {
        if (!out.empty()) out += "\n";
        out += std::visit(
            [](const auto& d) -> std::string {
                using T = std::decay_t<decltype(d)>;
                if constexpr (std::is_same_v<T, FunDecl>) return formatFunction(d, 0);
                else if constexpr (std::is_same_v<T, ClassDecl>) return formatClass(d);
                else return formatEnum(d);
            },
            decl);
    }
    return out;
}

} // namespace safepipe::syntax
