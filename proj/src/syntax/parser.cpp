#include "safepipe/syntax/parser.hpp"

#include <charconv>
#include <cmath>
#include <set>
#include <stdexcept>
#include <system_error>
#include <utility>

namespace safepipe::syntax {

namespace {

struct ParseError : std::runtime_error {
    explicit ParseError(Diagnostic d) : std::runtime_error(d.message), diagnostic(std::move(d)) {}
    Diagnostic diagnostic;
};

std::string describe(const Token& token) {
    switch (token.kind) {
        case TokenKind::Ident: return "identifier '" + token.text + "'";
        case TokenKind::Int:
        case TokenKind::Float: return "number " + token.text;
        case TokenKind::String: return "string literal";
        default: return std::string(tokenKindName(token.kind));
    }
}

class Parser {
public:
    Parser(const std::vector<Token>& tokens, std::string file) : tokens_(tokens), file_(std::move(file)) {
        if (tokens_.empty() || tokens_.back().kind != TokenKind::Eof) {
            throw std::invalid_argument("token stream must end with Eof");
        }
    }

    //===------------------------------------------------------------------===//
    // Entry points
    //===------------------------------------------------------------------===//

    PipelineParseResult parsePipelineFile() {
        PipelineParseResult result;
        result.file.path = file_;
        while (!at(TokenKind::Eof)) {
            if (!at(TokenKind::KwPipeline)) {
                report(expectedError("'pipeline'"));
                do {
                    ++pos_;
                } while (!at(TokenKind::Eof) && !at(TokenKind::KwPipeline));
                continue;
            }
            try {
                result.file.pipelines.push_back(parsePipeline());
            } catch (const ParseError& e) {
                report(e.diagnostic);
                while (!at(TokenKind::Eof) && !at(TokenKind::KwPipeline)) ++pos_;
            }
        }
        result.diagnostics = std::move(diagnostics_);
        return result;
    }

    StubParseResult parseStubFile() {
        StubParseResult result;
        result.file.path = file_;
        while (at(TokenKind::At) && peek(1).kind == TokenKind::Ident && peek(1).text == "PythonModule") {
            try {
                Annotation a = parseAnnotation();
                if (!a.argument) throw ParseError(error(a.span, "@PythonModule requires a module name"));
                result.file.pythonModule = a.argument;
            } catch (const ParseError& e) {
                report(e.diagnostic);
                syncToDeclaration(pos_);
            }
        }
        std::set<std::string> names;
        while (!at(TokenKind::Eof)) {
            const std::size_t start = pos_;
            try {
                Declaration decl = parseDeclaration();
                const auto& name = declarationName(decl);
                if (!names.insert(name).second) {
                    report(makeDiagnostic("E004", "duplicate declaration '" + name + "'", declarationSpan(decl)));
                }
                result.file.declarations.push_back(std::move(decl));
            } catch (const ParseError& e) {
                report(e.diagnostic);
                syncToDeclaration(start);
            }
        }
        result.diagnostics = std::move(diagnostics_);
        return result;
    }

    ExpressionParseResult parseStandaloneExpression() {
        ExpressionParseResult result;
        try {
            Expression e = parseExpression();
            if (!at(TokenKind::Eof)) throw ParseError(expectedError("end of input"));
            result.expression = std::move(e);
        } catch (const ParseError& e) {
            report(e.diagnostic);
        }
        result.diagnostics = std::move(diagnostics_);
        return result;
    }

private:
    //===------------------------------------------------------------------===//
    // Token helpers
    //===------------------------------------------------------------------===//

    [[nodiscard]] const Token& peek(std::size_t ahead = 0) const {
        return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
    }
    [[nodiscard]] const Token& current() const { return peek(); }
    [[nodiscard]] bool at(TokenKind kind) const { return current().kind == kind; }
    [[nodiscard]] bool atIdent(std::string_view text) const {
        return at(TokenKind::Ident) && current().text == text;
    }
    [[nodiscard]] const SourceSpan& previousSpan() const { return tokens_[pos_ == 0 ? 0 : pos_ - 1].span; }

    const Token& advance() {
        const Token& t = current();
        if (!at(TokenKind::Eof)) ++pos_;
        return t;
    }

    bool accept(TokenKind kind) {
        if (!at(kind)) return false;
        advance();
        return true;
    }

    const Token& expect(TokenKind kind, std::string_view what = {}) {
        if (!at(kind)) throw ParseError(expectedError(what.empty() ? tokenKindName(kind) : what));
        return advance();
    }

    std::string expectIdent(std::string_view what = "identifier") {
        return expect(TokenKind::Ident, what).text;
    }

    void expectContextual(std::string_view word) {
        if (!atIdent(word)) throw ParseError(expectedError("'" + std::string(word) + "'"));
        advance();
    }

    [[nodiscard]] Diagnostic expectedError(std::string_view expected) const {
        return makeDiagnostic("E003", "expected " + std::string(expected) + ", found " + describe(current()),
                              current().span);
    }

    [[nodiscard]] static Diagnostic error(const SourceSpan& span, std::string message) {
        return makeDiagnostic("E003", std::move(message), span);
    }

    void report(Diagnostic d) { diagnostics_.push_back(std::move(d)); }

    [[nodiscard]] SourceSpan spanFrom(const SourceSpan& start) const { return SourceSpan::cover(start, previousSpan()); }

    //===------------------------------------------------------------------===//
    // Pipelines and statements
    //===------------------------------------------------------------------===//

    PipelineDecl parsePipeline() {
        PipelineDecl p;
        const SourceSpan start = expect(TokenKind::KwPipeline).span;
        p.name = expectIdent("pipeline name");
        expect(TokenKind::LBrace);
        p.body = parseStatementBlock();
        expect(TokenKind::RBrace);
        p.span = spanFrom(start);
        return p;
    }

    // Statements up to (not including) the closing brace.
    std::vector<Statement> parseStatementBlock() {
        std::vector<Statement> body;
        while (!at(TokenKind::RBrace) && !at(TokenKind::Eof)) {
            if (accept(TokenKind::Semicolon)) continue;
            const std::size_t start = pos_;
            try {
                body.push_back(parseStatement());
            } catch (const ParseError& e) {
                report(e.diagnostic);
                recoverStatement(start);
            }
        }
        return body;
    }

    void recoverStatement(std::size_t start) {
        if (pos_ == start && !at(TokenKind::RBrace) && !at(TokenKind::Eof)) ++pos_;
        while (!at(TokenKind::Eof) && !at(TokenKind::RBrace) && !at(TokenKind::Semicolon) &&
               !(current().newlineBefore && pos_ > start)) {
            ++pos_;
        }
        accept(TokenKind::Semicolon);
    }

    [[nodiscard]] bool atAssignment() const {
        std::size_t i = 0;
        while (true) {
            const Token& t = peek(i);
            if (t.kind != TokenKind::Ident && t.kind != TokenKind::Underscore) return false;
            const Token& next = peek(i + 1);
            if (next.kind == TokenKind::Equals) return true;
            if (next.kind != TokenKind::Comma) return false;
            i += 2;
        }
    }

    Statement parseStatement() {
        Statement s;
        const SourceSpan start = current().span;
        if (atAssignment()) {
            Assignment a;
            do {
                Assignee target;
                target.span = current().span;
                if (accept(TokenKind::Underscore)) {
                    target.name = std::nullopt;
                } else {
                    target.name = expectIdent();
                }
                a.assignees.push_back(std::move(target));
            } while (accept(TokenKind::Comma));
            expect(TokenKind::Equals);
            a.rhs = parseExpression();
            s.node = std::move(a);
        } else {
            s.node = ExpressionStatement{parseExpression()};
        }
        s.span = spanFrom(start);
        if (!at(TokenKind::Semicolon) && !at(TokenKind::RBrace) && !at(TokenKind::Eof) && !current().newlineBefore) {
            throw ParseError(expectedError("end of statement"));
        }
        accept(TokenKind::Semicolon);
        return s;
    }

    //===------------------------------------------------------------------===//
    // Expressions
    //===------------------------------------------------------------------===//

    Expression parseExpression() {
        Expression e = parsePrimary();
        while (true) {
            if (at(TokenKind::Dot)) {
                advance();
                std::string member = expectIdent("member name");
                Expression access;
                access.span = spanFrom(e.span);
                access.node = MemberAccess{std::move(e), std::move(member)};
                e = std::move(access);
            } else if (at(TokenKind::LParen) && !current().newlineBefore) {
                advance();
                std::vector<Argument> args = parseArguments();
                expect(TokenKind::RParen);
                Expression call;
                call.span = spanFrom(e.span);
                call.node = Call{std::move(e), std::move(args)};
                e = std::move(call);
            } else {
                return e;
            }
        }
    }

    std::vector<Argument> parseArguments() {
        std::vector<Argument> args;
        if (at(TokenKind::RParen)) return args;
        bool sawNamed = false;
        do {
            Argument arg;
            const SourceSpan start = current().span;
            if (at(TokenKind::Ident) && peek(1).kind == TokenKind::Equals) {
                arg.name = advance().text;
                advance();
                sawNamed = true;
            } else if (sawNamed) {
                throw ParseError(error(current().span, "positional argument after named argument"));
            }
            arg.value = parseExpression();
            arg.span = spanFrom(start);
            args.push_back(std::move(arg));
        } while (accept(TokenKind::Comma));
        return args;
    }

    // True if the parenthesis at the cursor opens a lambda parameter list.
    [[nodiscard]] bool atLambda() const {
        int depth = 0;
        for (std::size_t i = 0;; ++i) {
            const Token& t = peek(i);
            switch (t.kind) {
                case TokenKind::LParen:
                case TokenKind::LBracket:
                case TokenKind::LBrace: ++depth; break;
                case TokenKind::RParen:
                case TokenKind::RBracket:
                case TokenKind::RBrace:
                    if (--depth == 0) return peek(i + 1).kind == TokenKind::Arrow;
                    break;
                case TokenKind::Eof: return false;
                default: break;
            }
        }
    }

    Expression parsePrimary() {
        Expression e;
        const Token& t = current();
        const SourceSpan start = t.span;
        switch (t.kind) {
            case TokenKind::Int: {
                std::int64_t value = 0;
                auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), value);
                if (ec != std::errc{}) throw ParseError(error(t.span, "integer literal out of range"));
                advance();
                e.node = IntLit{value};
                break;
            }
            case TokenKind::Float: {
                e.node = FloatLit{parseDouble(t)};
                advance();
                break;
            }
            case TokenKind::String:
                e.node = StringLit{t.text};
                advance();
                break;
            case TokenKind::KwTrue:
            case TokenKind::KwFalse:
                e.node = BoolLit{t.kind == TokenKind::KwTrue};
                advance();
                break;
            case TokenKind::LBracket: {
                advance();
                ListLit list;
                if (!at(TokenKind::RBracket)) {
                    do {
                        list.elements.push_back(parseExpression());
                    } while (accept(TokenKind::Comma));
                }
                expect(TokenKind::RBracket);
                e.node = std::move(list);
                break;
            }
            case TokenKind::Ident:
                e.node = Reference{t.text};
                advance();
                break;
            case TokenKind::LParen: {
                if (atLambda()) {
                    e.node = parseLambda();
                    break;
                }
                advance();
                Expression inner = parseExpression();
                expect(TokenKind::RParen);
                return inner;
            }
            case TokenKind::Minus: {
                advance();
                e.node = Negation{parsePrimary()};
                break;
            }
            default: throw ParseError(expectedError("expression"));
        }
        e.span = spanFrom(start);
        return e;
    }

    static double parseDouble(const Token& t) {
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), value);
        if (ec != std::errc{} || !std::isfinite(value)) {
            throw ParseError(error(t.span, "floating-point literal out of range"));
        }
        return value;
    }

    Lambda parseLambda() {
        Lambda lambda;
        expect(TokenKind::LParen);
        if (!at(TokenKind::RParen)) {
            do {
                LambdaParam p;
                const SourceSpan start = current().span;
                p.name = expectIdent("parameter name");
                if (accept(TokenKind::Colon)) p.type = parseType();
                p.span = spanFrom(start);
                lambda.params.push_back(std::move(p));
            } while (accept(TokenKind::Comma));
        }
        expect(TokenKind::RParen);
        expect(TokenKind::Arrow);
        expect(TokenKind::LBrace);
        lambda.body = parseStatementBlock();
        expect(TokenKind::RBrace);
        return lambda;
    }

    //===------------------------------------------------------------------===//
    // Types and constants
    //===------------------------------------------------------------------===//

    TypeRef parseType() {
        TypeRef type;
        const SourceSpan start = current().span;
        if (accept(TokenKind::KwUnion)) {
            expect(TokenKind::Less);
            UnionTypeRef u;
            u.members = parseTypeList(TokenKind::Greater);
            expect(TokenKind::Greater, "'>'");
            if (u.members.size() < 2) throw ParseError(error(spanFrom(start), "union needs at least two members"));
            type.node = std::move(u);
        } else if (accept(TokenKind::LParen)) {
            FunctionTypeRef f;
            if (!at(TokenKind::RParen)) f.params = parseTypeList(TokenKind::RParen);
            expect(TokenKind::RParen);
            expect(TokenKind::Arrow);
            expect(TokenKind::LParen);
            if (!at(TokenKind::RParen)) f.results = parseTypeList(TokenKind::RParen);
            expect(TokenKind::RParen);
            type.node = std::move(f);
        } else {
            NamedTypeRef n;
            n.name = expectIdent("type");
            if (accept(TokenKind::Less)) {
                n.args = parseTypeList(TokenKind::Greater);
                expect(TokenKind::Greater, "'>'");
            }
            type.node = std::move(n);
        }
        type.span = spanFrom(start);

        while (accept(TokenKind::KwWhere)) {
            expect(TokenKind::LBrace);
            RefinedTypeRef refined{std::move(type), {}};
            do {
                refined.constraints.push_back(parseConstraint());
            } while (accept(TokenKind::Comma));
            expect(TokenKind::RBrace);
            TypeRef wrapped;
            wrapped.node = std::move(refined);
            wrapped.span = spanFrom(start);
            type = std::move(wrapped);
        }
        return type;
    }

    std::vector<TypeRef> parseTypeList(TokenKind /*closer*/) {
        std::vector<TypeRef> list;
        do {
            list.push_back(parseType());
        } while (accept(TokenKind::Comma));
        return list;
    }

    Constraint parseConstraint() {
        Constraint c;
        const SourceSpan start = current().span;
        expectContextual("it");
        switch (current().kind) {
            case TokenKind::Less: c.op = Comparator::Less; break;
            case TokenKind::LessEq: c.op = Comparator::LessEq; break;
            case TokenKind::Greater: c.op = Comparator::Greater; break;
            case TokenKind::GreaterEq: c.op = Comparator::GreaterEq; break;
            case TokenKind::EqEq: c.op = Comparator::Equal; break;
            case TokenKind::NotEq: c.op = Comparator::NotEqual; break;
            default: throw ParseError(expectedError("comparison operator"));
        }
        advance();
        c.value = parseConstant();
        c.span = spanFrom(start);
        return c;
    }

    Constant parseConstant() {
        const Token& t = current();
        switch (t.kind) {
            case TokenKind::Int: {
                std::int64_t value = 0;
                auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), value);
                if (ec != std::errc{}) throw ParseError(error(t.span, "integer literal out of range"));
                advance();
                return value;
            }
            case TokenKind::Float: {
                double value = parseDouble(t);
                advance();
                return value;
            }
            case TokenKind::String: advance(); return t.text;
            case TokenKind::KwTrue: advance(); return true;
            case TokenKind::KwFalse: advance(); return false;
            case TokenKind::Minus: {
                advance();
                const SourceSpan at = current().span;
                Constant inner = parseConstant();
                if (auto* i = std::get_if<std::int64_t>(&inner)) return -*i;
                if (auto* d = std::get_if<double>(&inner)) return -*d;
                throw ParseError(error(at, "only numeric constants can be negated"));
            }
            default: throw ParseError(expectedError("constant"));
        }
    }

    //===------------------------------------------------------------------===//
    // Stub declarations
    //===------------------------------------------------------------------===//

    void syncToDeclaration(std::size_t start) {
        const std::size_t errorPos = std::max(pos_, start + 1);
        int depth = 0;
        for (pos_ = start; !at(TokenKind::Eof); ++pos_) {
            if (pos_ >= errorPos && depth <= 0 &&
                (at(TokenKind::KwFun) || at(TokenKind::KwClass) || at(TokenKind::KwEnum) || at(TokenKind::At))) {
                return;
            }
            if (at(TokenKind::LBrace)) ++depth;
            if (at(TokenKind::RBrace)) --depth;
        }
    }

    Annotation parseAnnotation() {
        Annotation a;
        const SourceSpan start = expect(TokenKind::At).span;
        a.name = expectIdent("annotation name");
        if (accept(TokenKind::LParen)) {
            a.argument = expect(TokenKind::String, "string").text;
            expect(TokenKind::RParen);
        }
        a.span = spanFrom(start);
        return a;
    }

    std::vector<Annotation> parseAnnotations() {
        std::vector<Annotation> list;
        while (at(TokenKind::At)) list.push_back(parseAnnotation());
        return list;
    }

    Declaration parseDeclaration() {
        const SourceSpan start = current().span;
        std::vector<Annotation> annotations = parseAnnotations();
        if (at(TokenKind::KwFun)) {
            FunDecl f = parseFunction(std::move(annotations), start);
            return f;
        }
        if (at(TokenKind::KwClass)) return parseClass(std::move(annotations), start);
        if (at(TokenKind::KwEnum)) {
            if (!annotations.empty()) throw ParseError(error(annotations.front().span, "enums take no annotations"));
            return parseEnum();
        }
        throw ParseError(expectedError("'fun', 'class' or 'enum'"));
    }

    std::vector<TypeParam> parseTypeParams() {
        std::vector<TypeParam> params;
        if (!accept(TokenKind::Less)) return params;
        do {
            TypeParam p;
            const SourceSpan start = current().span;
            p.name = expectIdent("type parameter");
            if (accept(TokenKind::KwSub)) p.bound = parseType();
            p.span = spanFrom(start);
            params.push_back(std::move(p));
        } while (accept(TokenKind::Comma));
        expect(TokenKind::Greater, "'>'");
        return params;
    }

    FunDecl parseFunction(std::vector<Annotation> annotations, const SourceSpan& start) {
        FunDecl f;
        f.annotations = std::move(annotations);
        expect(TokenKind::KwFun);
        f.name = expectIdent("function name");
        f.typeParams = parseTypeParams();
        expect(TokenKind::LParen);
        std::set<std::string> names;
        auto checkUnique = [&](const std::string& name, const SourceSpan& span) {
            if (!names.insert(name).second) {
                report(makeDiagnostic("E004", "duplicate parameter or result '" + name + "' in '" + f.name + "'", span));
            }
        };
        if (!at(TokenKind::RParen)) {
            do {
                Parameter p;
                const SourceSpan pstart = current().span;
                p.name = expectIdent("parameter name");
                expect(TokenKind::Colon);
                p.type = parseType();
                if (accept(TokenKind::Equals)) p.defaultValue = parseConstant();
                p.span = spanFrom(pstart);
                checkUnique(p.name, p.span);
                f.params.push_back(std::move(p));
            } while (accept(TokenKind::Comma));
        }
        expect(TokenKind::RParen);
        if (accept(TokenKind::Arrow)) {
            auto parseResult = [&] {
                Result r;
                const SourceSpan rstart = current().span;
                r.name = expectIdent("result name");
                expect(TokenKind::Colon);
                r.type = parseType();
                r.span = spanFrom(rstart);
                checkUnique(r.name, r.span);
                f.results.push_back(std::move(r));
            };
            if (accept(TokenKind::LParen)) {
                do {
                    parseResult();
                } while (accept(TokenKind::Comma));
                expect(TokenKind::RParen);
            } else {
                parseResult();
            }
        }
        if (accept(TokenKind::LBrace)) {
            while (!accept(TokenKind::RBrace)) {
                if (at(TokenKind::KwSchema)) {
                    f.schemaClauses.push_back(parseSchemaClause());
                } else if (at(TokenKind::KwRequire)) {
                    f.requireClauses.push_back(parseRequireClause());
                } else {
                    throw ParseError(expectedError("'schema', 'require' or '}'"));
                }
            }
        }
        f.span = spanFrom(start);
        return f;
    }

    NameArg parseNameArg() {
        NameArg n;
        n.span = current().span;
        if (at(TokenKind::String)) {
            n.isLiteral = true;
            n.text = advance().text;
        } else {
            n.isLiteral = false;
            n.text = expectIdent("column name or parameter");
        }
        return n;
    }

    SchemaClause parseSchemaClause() {
        SchemaClause clause;
        const SourceSpan start = expect(TokenKind::KwSchema).span;
        expect(TokenKind::LBrace);
        while (!accept(TokenKind::RBrace)) {
            SchemaAssignment a;
            const SourceSpan astart = current().span;
            a.target = expectIdent("result name");
            expect(TokenKind::Equals);
            a.value = parseSchemaExpr();
            a.span = spanFrom(astart);
            clause.assignments.push_back(std::move(a));
        }
        clause.span = spanFrom(start);
        return clause;
    }

    SchemaExpr parseSchemaExpr() {
        SchemaExpr e;
        const SourceSpan start = current().span;
        if (atIdent("external") && peek(1).kind == TokenKind::LParen) {
            advance();
            advance();
            e.external = true;
            e.source = expectIdent("parameter");
            expect(TokenKind::RParen);
            e.span = spanFrom(start);
            return e;
        }
        e.source = expectIdent("parameter");
        while (at(TokenKind::Dot)) {
            EffectOp op;
            const SourceSpan ostart = advance().span;
            const Token& name = current();
            if (name.kind != TokenKind::Ident) throw ParseError(expectedError("schema effect"));
            if (name.text == "add") op.kind = EffectKind::Add;
            else if (name.text == "remove") op.kind = EffectKind::Remove;
            else if (name.text == "rename") op.kind = EffectKind::Rename;
            else if (name.text == "retype") op.kind = EffectKind::Retype;
            else if (name.text == "keep") op.kind = EffectKind::Keep;
            else if (name.text == "drop") op.kind = EffectKind::Drop;
            else throw ParseError(expectedError("'add', 'remove', 'rename', 'retype', 'keep' or 'drop'"));
            advance();
            expect(TokenKind::LParen);
            op.names.push_back(parseNameArg());
            switch (op.kind) {
                case EffectKind::Add:
                    expect(TokenKind::Colon);
                    op.type = parseType();
                    break;
                case EffectKind::Rename:
                    expect(TokenKind::Comma);
                    op.names.push_back(parseNameArg());
                    break;
                case EffectKind::Retype:
                    expect(TokenKind::Comma);
                    op.type = parseType();
                    break;
                default: break;
            }
            expect(TokenKind::RParen);
            op.span = spanFrom(ostart);
            e.ops.push_back(std::move(op));
        }
        e.span = spanFrom(start);
        return e;
    }

    RequireClause parseRequireClause() {
        RequireClause r;
        const SourceSpan start = expect(TokenKind::KwRequire).span;
        r.table = expectIdent("table parameter");
        expectContextual("has");
        expectContextual("column");
        r.column = parseNameArg();
        if (accept(TokenKind::Colon)) r.type = parseType();
        r.span = spanFrom(start);
        return r;
    }

    ClassDecl parseClass(std::vector<Annotation> annotations, const SourceSpan& start) {
        ClassDecl c;
        c.annotations = std::move(annotations);
        expect(TokenKind::KwClass);
        c.name = expectIdent("class name");
        c.typeParams = parseTypeParams();
        if (accept(TokenKind::KwSub)) c.superType = parseType();
        if (accept(TokenKind::LBrace)) {
            std::set<std::string> members;
            while (!accept(TokenKind::RBrace)) {
                if (at(TokenKind::KwAttr)) {
                    AttrDecl a;
                    const SourceSpan astart = advance().span;
                    a.name = expectIdent("attribute name");
                    expect(TokenKind::Colon);
                    a.type = parseType();
                    a.span = spanFrom(astart);
                    if (!members.insert(a.name).second) {
                        report(makeDiagnostic("E004", "duplicate member '" + a.name + "' in class '" + c.name + "'",
                                              a.span));
                    }
                    c.attributes.push_back(std::move(a));
                } else if (at(TokenKind::KwProtocol)) {
                    const SourceSpan pstart = advance().span;
                    ProtocolRegex regex = parseProtocolAlt();
                    regex.span = spanFrom(pstart);
                    if (c.protocol) {
                        report(makeDiagnostic("E004", "class '" + c.name + "' declares more than one protocol",
                                              regex.span));
                    } else {
                        c.protocol = std::move(regex);
                    }
                } else if (at(TokenKind::At) || at(TokenKind::KwFun)) {
                    const SourceSpan fstart = current().span;
                    std::vector<Annotation> methodAnnotations = parseAnnotations();
                    FunDecl m = parseFunction(std::move(methodAnnotations), fstart);
                    if (!members.insert(m.name).second) {
                        report(makeDiagnostic("E004", "duplicate member '" + m.name + "' in class '" + c.name + "'",
                                              m.span));
                    }
                    c.methods.push_back(std::move(m));
                } else {
                    throw ParseError(expectedError("'attr', 'fun', 'protocol' or '}'"));
                }
            }
        }
        c.span = spanFrom(start);
        return c;
    }

    EnumDecl parseEnum() {
        EnumDecl e;
        const SourceSpan start = expect(TokenKind::KwEnum).span;
        e.name = expectIdent("enum name");
        expect(TokenKind::LBrace);
        std::set<std::string> seen;
        do {
            const SourceSpan vspan = current().span;
            std::string variant = expectIdent("enum variant");
            if (!seen.insert(variant).second) {
                report(makeDiagnostic("E004", "duplicate variant '" + variant + "' in enum '" + e.name + "'", vspan));
            }
            e.variants.push_back(std::move(variant));
        } while (accept(TokenKind::Comma));
        expect(TokenKind::RBrace);
        e.span = spanFrom(start);
        return e;
    }

    //===------------------------------------------------------------------===//
    // Protocols
    //===------------------------------------------------------------------===//

    [[nodiscard]] bool atProtocolAtom() const {
        return at(TokenKind::Ident) || at(TokenKind::Dot) || at(TokenKind::LParen);
    }

    ProtocolRegex parseProtocolAlt() {
        const SourceSpan start = current().span;
        std::vector<ProtocolRegex> options;
        options.push_back(parseProtocolSeq());
        while (accept(TokenKind::Pipe)) options.push_back(parseProtocolSeq());
        if (options.size() == 1) return std::move(options.front());
        ProtocolRegex r;
        r.node = ProtoAlt{std::move(options)};
        r.span = spanFrom(start);
        return r;
    }

    ProtocolRegex parseProtocolSeq() {
        const SourceSpan start = current().span;
        std::vector<ProtocolRegex> items;
        while (atProtocolAtom()) items.push_back(parseProtocolFactor());
        if (items.size() == 1) return std::move(items.front());
        ProtocolRegex r;
        r.span = items.empty() ? SourceSpan{file_, start.startLine, start.startCol, start.startLine, start.startCol}
                               : spanFrom(start);
        r.node = ProtoSeq{std::move(items)};
        return r;
    }

    ProtocolRegex parseProtocolFactor() {
        const SourceSpan start = current().span;
        ProtocolRegex atom;
        if (at(TokenKind::Ident)) {
            atom.node = ProtoToken{advance().text};
            atom.span = spanFrom(start);
        } else if (accept(TokenKind::Dot)) {
            atom.node = ProtoAny{};
            atom.span = spanFrom(start);
        } else {
            expect(TokenKind::LParen);
            atom = parseProtocolAlt();
            expect(TokenKind::RParen);
            atom.span = spanFrom(start);
        }
        std::optional<RepeatKind> repeat;
        if (accept(TokenKind::Star)) repeat = RepeatKind::Star;
        else if (accept(TokenKind::Plus)) repeat = RepeatKind::Plus;
        else if (accept(TokenKind::Question)) repeat = RepeatKind::Opt;
        if (!repeat) return atom;
        ProtocolRegex r;
        r.node = ProtoRepeat{*repeat, std::move(atom)};
        r.span = spanFrom(start);
        return r;
    }

    const std::vector<Token>& tokens_;
    std::string file_;
    std::size_t pos_ = 0;
    Diagnostics diagnostics_;
};

} // namespace

PipelineParseResult parsePipelines(const std::vector<Token>& tokens, const std::string& file) {
    return Parser(tokens, file).parsePipelineFile();
}

StubParseResult parseStubs(const std::vector<Token>& tokens, const std::string& file) {
    return Parser(tokens, file).parseStubFile();
}

PipelineParseResult parsePipelineSource(std::string_view source, const std::string& file) {
    LexResult lexed = lex(source, file);
    PipelineParseResult result = parsePipelines(lexed.tokens, file);
    result.diagnostics.insert(result.diagnostics.begin(), lexed.diagnostics.begin(), lexed.diagnostics.end());
    return result;
}

StubParseResult parseStubSource(std::string_view source, const std::string& file) {
    LexResult lexed = lex(source, file);
    StubParseResult result = parseStubs(lexed.tokens, file);
    result.diagnostics.insert(result.diagnostics.begin(), lexed.diagnostics.begin(), lexed.diagnostics.end());
    return result;
}

ExpressionParseResult parseExpressionSource(std::string_view source, const std::string& file) {
    LexResult lexed = lex(source, file);
    ExpressionParseResult result = Parser(lexed.tokens, file).parseStandaloneExpression();
    result.diagnostics.insert(result.diagnostics.begin(), lexed.diagnostics.begin(), lexed.diagnostics.end());
    return result;
}

} // namespace safepipe::syntax
