#include "safepipe/syntax/lexer.hpp"

#include <array>
#include <cctype>
#include <utility>

namespace safepipe::syntax {

namespace {

struct Keyword {
    std::string_view word;
    TokenKind kind;
};

constexpr std::array kKeywords{
    Keyword{"pipeline", TokenKind::KwPipeline}, Keyword{"fun", TokenKind::KwFun},
    Keyword{"class", TokenKind::KwClass},       Keyword{"enum", TokenKind::KwEnum},
    Keyword{"attr", TokenKind::KwAttr},         Keyword{"protocol", TokenKind::KwProtocol},
    Keyword{"schema", TokenKind::KwSchema},     Keyword{"require", TokenKind::KwRequire},
    Keyword{"sub", TokenKind::KwSub},           Keyword{"union", TokenKind::KwUnion},
    Keyword{"where", TokenKind::KwWhere},       Keyword{"true", TokenKind::KwTrue},
    Keyword{"false", TokenKind::KwFalse},       Keyword{"if", TokenKind::KwIf},
    Keyword{"else", TokenKind::KwElse},         Keyword{"while", TokenKind::KwWhile},
    Keyword{"for", TokenKind::KwFor},           Keyword{"return", TokenKind::KwReturn},
};

bool isIdentStart(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool isIdentChar(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool isDigit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

class Lexer {
public:
    Lexer(std::string_view source, const std::string& file) : src_(source), file_(file) {}

    LexResult run() {
        while (true) {
            skipTrivia();
            if (pos_ >= src_.size()) break;
            lexToken();
        }
        Token eof;
        eof.kind = TokenKind::Eof;
        eof.span = {file_, line_, col_, line_, col_};
        eof.newlineBefore = sawNewline_;
        result_.tokens.push_back(std::move(eof));
        return std::move(result_);
    }

private:
    [[nodiscard]] char peek(std::size_t ahead = 0) const {
        return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
    }

    void advance() {
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    void skipTrivia() {
        while (pos_ < src_.size()) {
            char c = peek();
            if (c == '\n') {
                sawNewline_ = true;
                advance();
            } else if (c == ' ' || c == '\t' || c == '\r') {
                advance();
            } else if (c == '/' && peek(1) == '/') {
                while (pos_ < src_.size() && peek() != '\n') advance();
            } else if (c == '/' && peek(1) == '*') {
                advance();
                advance();
                while (pos_ < src_.size() && !(peek() == '*' && peek(1) == '/')) {
                    if (peek() == '\n') sawNewline_ = true;
                    advance();
                }
                if (pos_ < src_.size()) {
                    advance();
                    advance();
                }
            } else {
                break;
            }
        }
    }

    void emit(TokenKind kind, std::string text, int startLine, int startCol) {
        Token t;
        t.kind = kind;
        t.text = std::move(text);
        t.span = {file_, startLine, startCol, lastLine_, lastCol_};
        t.newlineBefore = sawNewline_;
        sawNewline_ = false;
        result_.tokens.push_back(std::move(t));
    }

    // Consumes one character and remembers its position as the token end.
    void take() {
        lastLine_ = line_;
        lastCol_ = col_;
        advance();
    }

    void lexToken() {
        const int startLine = line_;
        const int startCol = col_;
        const char c = peek();

        if (isIdentStart(c)) {
            std::string word;
            while (pos_ < src_.size() && isIdentChar(peek())) {
                word += peek();
                take();
            }
            if (word == "_") {
                emit(TokenKind::Underscore, word, startLine, startCol);
                return;
            }
            for (const auto& kw : kKeywords) {
                if (kw.word == word) {
                    emit(kw.kind, word, startLine, startCol);
                    return;
                }
            }
            emit(TokenKind::Ident, word, startLine, startCol);
            return;
        }

        if (isDigit(c)) {
            lexNumber(startLine, startCol);
            return;
        }

        if (c == '"') {
            lexString(startLine, startCol);
            return;
        }

        auto two = [&](char second) { return peek(1) == second; };
        auto single = [&](TokenKind kind) {
            std::string text(1, peek());
            take();
            emit(kind, std::move(text), startLine, startCol);
        };
        auto dbl = [&](TokenKind kind) {
            std::string text{peek(), peek(1)};
            take();
            take();
            emit(kind, std::move(text), startLine, startCol);
        };

        switch (c) {
            case '(': single(TokenKind::LParen); return;
            case ')': single(TokenKind::RParen); return;
            case '{': single(TokenKind::LBrace); return;
            case '}': single(TokenKind::RBrace); return;
            case '[': single(TokenKind::LBracket); return;
            case ']': single(TokenKind::RBracket); return;
            case ',': single(TokenKind::Comma); return;
            case ':': single(TokenKind::Colon); return;
            case ';': single(TokenKind::Semicolon); return;
            case '.': single(TokenKind::Dot); return;
            case '*': single(TokenKind::Star); return;
            case '+': single(TokenKind::Plus); return;
            case '?': single(TokenKind::Question); return;
            case '|': single(TokenKind::Pipe); return;
            case '@': single(TokenKind::At); return;
            case '<': two('=') ? dbl(TokenKind::LessEq) : single(TokenKind::Less); return;
            case '>': two('=') ? dbl(TokenKind::GreaterEq) : single(TokenKind::Greater); return;
            case '=': two('=') ? dbl(TokenKind::EqEq) : single(TokenKind::Equals); return;
            case '-': two('>') ? dbl(TokenKind::Arrow) : single(TokenKind::Minus); return;
            case '!':
                if (two('=')) {
                    dbl(TokenKind::NotEq);
                    return;
                }
                break;
            default: break;
        }

        // Illegal character: report and skip the whole UTF-8 sequence.
        std::string bad(1, c);
        take();
        while (pos_ < src_.size() && (static_cast<unsigned char>(peek()) & 0xC0) == 0x80) {
            bad += peek();
            take();
        }
        result_.diagnostics.push_back(makeDiagnostic(
            "E002", "illegal character '" + bad + "'", {file_, startLine, startCol, lastLine_, lastCol_}));
    }

    void lexNumber(int startLine, int startCol) {
        std::string text;
        bool isFloat = false;
        while (isDigit(peek())) {
            text += peek();
            take();
        }
        if (peek() == '.' && isDigit(peek(1))) {
            isFloat = true;
            text += peek();
            take();
            while (isDigit(peek())) {
                text += peek();
                take();
            }
        }
        if ((peek() == 'e' || peek() == 'E') &&
            (isDigit(peek(1)) || ((peek(1) == '+' || peek(1) == '-') && isDigit(peek(2))))) {
            isFloat = true;
            text += peek();
            take();
            if (peek() == '+' || peek() == '-') {
                text += peek();
                take();
            }
            while (isDigit(peek())) {
                text += peek();
                take();
            }
        }
        emit(isFloat ? TokenKind::Float : TokenKind::Int, std::move(text), startLine, startCol);
    }

    void lexString(int startLine, int startCol) {
        take(); // opening quote
        std::string value;
        while (true) {
            if (pos_ >= src_.size() || peek() == '\n') {
                result_.diagnostics.push_back(makeDiagnostic(
                    "E001", "unterminated string literal", {file_, startLine, startCol, lastLine_, lastCol_}));
                return;
            }
            char c = peek();
            if (c == '"') {
                take();
                emit(TokenKind::String, std::move(value), startLine, startCol);
                return;
            }
            if (c == '\\') {
                const int escLine = line_;
                const int escCol = col_;
                take();
                char e = peek();
                switch (e) {
                    case '"': value += '"'; break;
                    case '\\': value += '\\'; break;
                    case 'n': value += '\n'; break;
                    case 't': value += '\t'; break;
                    default:
                        if (pos_ >= src_.size() || e == '\n') continue; // reported as unterminated
                        result_.diagnostics.push_back(
                            makeDiagnostic("E002", std::string("illegal escape sequence '\\") + e + "'",
                                           {file_, escLine, escCol, line_, col_}));
                        break;
                }
                take();
                continue;
            }
            value += c;
            take();
        }
    }

    std::string_view src_;
    const std::string& file_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
    int lastLine_ = 1;
    int lastCol_ = 1;
    bool sawNewline_ = false;
    LexResult result_;
};

} // namespace

LexResult lex(std::string_view source, const std::string& file) {
    return Lexer(source, file).run();
}

bool isKeyword(std::string_view word) {
    for (const auto& kw : kKeywords) {
        if (kw.word == word) return true;
    }
    return false;
}

std::string_view tokenKindName(TokenKind kind) {
    switch (kind) {
        case TokenKind::Ident: return "identifier";
        case TokenKind::Int: return "integer";
        case TokenKind::Float: return "float";
        case TokenKind::String: return "string";
        case TokenKind::KwPipeline: return "'pipeline'";
        case TokenKind::KwFun: return "'fun'";
        case TokenKind::KwClass: return "'class'";
        case TokenKind::KwEnum: return "'enum'";
        case TokenKind::KwAttr: return "'attr'";
        case TokenKind::KwProtocol: return "'protocol'";
        case TokenKind::KwSchema: return "'schema'";
        case TokenKind::KwRequire: return "'require'";
        case TokenKind::KwSub: return "'sub'";
        case TokenKind::KwUnion: return "'union'";
        case TokenKind::KwWhere: return "'where'";
        case TokenKind::KwTrue: return "'true'";
        case TokenKind::KwFalse: return "'false'";
        case TokenKind::KwIf: return "'if'";
        case TokenKind::KwElse: return "'else'";
        case TokenKind::KwWhile: return "'while'";
        case TokenKind::KwFor: return "'for'";
        case TokenKind::KwReturn: return "'return'";
        case TokenKind::LParen: return "'('";
        case TokenKind::RParen: return "')'";
        case TokenKind::LBrace: return "'{'";
        case TokenKind::RBrace: return "'}'";
        case TokenKind::LBracket: return "'['";
        case TokenKind::RBracket: return "']'";
        case TokenKind::Less: return "'<'";
        case TokenKind::Greater: return "'>'";
        case TokenKind::LessEq: return "'<='";
        case TokenKind::GreaterEq: return "'>='";
        case TokenKind::EqEq: return "'=='";
        case TokenKind::NotEq: return "'!='";
        case TokenKind::Equals: return "'='";
        case TokenKind::Comma: return "','";
        case TokenKind::Colon: return "':'";
        case TokenKind::Semicolon: return "';'";
        case TokenKind::Dot: return "'.'";
        case TokenKind::Arrow: return "'->'";
        case TokenKind::Minus: return "'-'";
        case TokenKind::Star: return "'*'";
        case TokenKind::Plus: return "'+'";
        case TokenKind::Question: return "'?'";
        case TokenKind::Pipe: return "'|'";
        case TokenKind::At: return "'@'";
        case TokenKind::Underscore: return "'_'";
        case TokenKind::Eof: return "end of input";
    }
    return "token";
}

} // namespace safepipe::syntax
