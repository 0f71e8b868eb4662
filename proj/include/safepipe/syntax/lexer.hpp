#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "safepipe/diagnostic.hpp"
#include "safepipe/source_span.hpp"

namespace safepipe::syntax {

enum class TokenKind {
    Ident,
    Int,
    Float,
    String,
    // keywords
    KwPipeline,
    KwFun,
    KwClass,
    KwEnum,
    KwAttr,
    KwProtocol,
    KwSchema,
    KwRequire,
    KwSub,
    KwUnion,
    KwWhere,
    KwTrue,
    KwFalse,
    // reserved: the pipeline language has no control flow
    KwIf,
    KwElse,
    KwWhile,
    KwFor,
    KwReturn,
    // punctuation
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Less,
    Greater,
    LessEq,
    GreaterEq,
    EqEq,
    NotEq,
    Equals,
    Comma,
    Colon,
    Semicolon,
    Dot,
    Arrow,
    Minus,
    Star,
    Plus,
    Question,
    Pipe,
    At,
    Underscore,
    Eof,
};

struct Token {
    TokenKind kind = TokenKind::Eof;
    std::string text;  ///< identifier name, decoded string value, or lexeme
    SourceSpan span;
    bool newlineBefore = false; ///< a line break separates this token from the previous one

    bool operator==(const Token&) const = default;
};

struct LexResult {
    std::vector<Token> tokens; ///< always terminated by an Eof token
    Diagnostics diagnostics;
};

/// Splits source text into tokens. Whitespace and comments (`// ...` and
/// non-nesting `/* ... */`) are dropped; line breaks are recorded on the
/// following token as `newlineBefore`.
LexResult lex(std::string_view source, const std::string& file);

std::string_view tokenKindName(TokenKind kind);

/// Words that cannot be used as identifiers.
bool isKeyword(std::string_view word);

} // namespace safepipe::syntax
