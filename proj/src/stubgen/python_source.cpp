#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

#include "safepipe/naming.hpp"
#include "safepipe/stubgen/stubgen.hpp"

namespace safepipe::stubgen {

namespace {

bool isIdentStart(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool isIdentChar(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::string collapseSpaces(std::string_view s) {
    std::string out;
    bool space = false;
    for (char c : s) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            space = true;
            continue;
        }
        if (space && !out.empty()) out += ' ';
        space = false;
        out += c;
    }
    return out;
}

/// One logical line: physical lines joined across brackets and backslashes,
/// comments removed, string literals kept verbatim.
struct LogicalLine {
    int line = 1;
    int indent = 0;
    std::string text;
    bool broken = false; ///< unbalanced brackets or an unterminated string
};

struct ScanResult {
    std::vector<LogicalLine> lines;
    std::optional<int> unterminatedString; ///< line of a triple-quoted string running to the end
};

bool startsDefinition(std::string_view rest) {
    auto keyword = [&](std::string_view k) {
        return rest.substr(0, k.size()) == k && (rest.size() == k.size() || !isIdentChar(rest[k.size()]));
    };
    return keyword("def") || keyword("async") || keyword("class") || (!rest.empty() && rest[0] == '@');
}

class Scanner {
public:
    explicit Scanner(std::string_view src) : src_(src) {}

    ScanResult run() {
        while (pos_ < src_.size()) {
            if (atLineStart_) {
                if (!beginLine()) continue;
            }
            const char c = src_[pos_];
            if (c == '#') {
                while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
                continue;
            }
            if (c == '\\' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '\n') {
                pos_ += 2;
                ++line_;
                current_.text += ' ';
                continue;
            }
            if (c == '\n') {
                ++pos_;
                ++line_;
                if (depth_ > 0) {
                    current_.text += ' ';
                    physicalStart_ = true;
                    atLineStart_ = true;
                    continue;
                }
                finish();
                continue;
            }
            if (c == '\r') {
                ++pos_;
                continue;
            }
            if (stringStart()) {
                if (!string()) return result_;
                continue;
            }
            if (c == '(' || c == '[' || c == '{') ++depth_;
            if ((c == ')' || c == ']' || c == '}') && depth_ > 0) --depth_;
            current_.text += c;
            ++pos_;
        }
        if (depth_ > 0) current_.broken = true;
        finish();
        return result_;
    }

private:
    /// Measures indentation at the start of a physical line. Returns false
    /// if the line was consumed as blank or comment-only.
    bool beginLine() {
        int indent = 0;
        std::size_t p = pos_;
        while (p < src_.size() && (src_[p] == ' ' || src_[p] == '\t' || src_[p] == '\f')) {
            indent = src_[p] == '\t' ? (indent / 8 + 1) * 8 : indent + 1;
            ++p;
        }
        const bool blank = p >= src_.size() || src_[p] == '\n' || src_[p] == '\r' || src_[p] == '#';
        if (physicalStart_) {
            // Continuation inside brackets; a new definition at column 0
            // means the previous one never closed.
            physicalStart_ = false;
            if (!blank && indent == 0 && startsDefinition(src_.substr(p))) {
                current_.broken = true;
                finish();
            } else {
                pos_ = p;
                atLineStart_ = false;
                return true;
            }
        }
        if (blank && current_.text.empty()) {
            while (p < src_.size() && src_[p] != '\n') ++p;
            if (p < src_.size()) ++p;
            ++line_;
            pos_ = p;
            return false;
        }
        pos_ = p;
        current_.indent = indent;
        current_.line = line_;
        atLineStart_ = false;
        return true;
    }

    bool stringStart() const {
        std::size_t p = pos_;
        std::size_t prefix = 0;
        while (p < src_.size() && prefix < 2 && std::string_view("rRbBuUfF").find(src_[p]) != std::string_view::npos) {
            ++p;
            ++prefix;
        }
        if (p >= src_.size() || (src_[p] != '\'' && src_[p] != '"')) return false;
        return prefix == 0 || current_.text.empty() || !isIdentChar(current_.text.back());
    }

    bool string() {
        while (src_[pos_] != '\'' && src_[pos_] != '"') current_.text += src_[pos_++];
        const char quote = src_[pos_];
        const bool triple = src_.substr(pos_, 3) == std::string(3, quote);
        const std::size_t open = triple ? 3 : 1;
        const int startLine = line_;
        current_.text.append(src_.substr(pos_, open));
        pos_ += open;
        while (pos_ < src_.size()) {
            const char c = src_[pos_];
            if (c == '\\' && pos_ + 1 < src_.size()) {
                if (src_[pos_ + 1] == '\n') ++line_;
                current_.text.append(src_.substr(pos_, 2));
                pos_ += 2;
                continue;
            }
            if (c == '\n') {
                if (!triple) {
                    current_.broken = true;
                    return true;
                }
                ++line_;
            }
            if (c == quote && (!triple || src_.substr(pos_, 3) == std::string(3, quote))) {
                current_.text.append(src_.substr(pos_, open));
                pos_ += open;
                return true;
            }
            current_.text += c;
            ++pos_;
        }
        if (triple) {
            result_.unterminatedString = startLine;
            current_.broken = true;
            finish();
            return false;
        }
        current_.broken = true;
        return true;
    }

    void finish() {
        if (!trim(current_.text).empty()) {
            current_.text = trim(current_.text);
            result_.lines.push_back(std::move(current_));
        }
        current_ = LogicalLine{};
        depth_ = 0;
        atLineStart_ = true;
        physicalStart_ = false;
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int depth_ = 0;
    bool atLineStart_ = true;
    bool physicalStart_ = false;
    LogicalLine current_;
    ScanResult result_;
};

struct Token {
    enum Kind { Name, String, Number, Op } kind = Op;
    std::string text;
    std::size_t begin = 0;
    std::size_t end = 0;
};

/// Tokens of one logical line. Returns nullopt on characters Python would
/// reject.
std::optional<std::vector<Token>> tokenize(const std::string& s) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < s.size()) {
        const char c = s[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        Token t;
        t.begin = i;
        std::size_t quote = i;
        while (quote < s.size() && quote - i < 2 && std::string_view("rRbBuUfF").find(s[quote]) != std::string_view::npos)
            ++quote;
        if (quote < s.size() && (s[quote] == '\'' || s[quote] == '"')) {
            const char q = s[quote];
            const bool triple = s.compare(quote, 3, std::string(3, q)) == 0;
            std::size_t j = quote + (triple ? 3 : 1);
            bool closed = false;
            while (j < s.size()) {
                if (s[j] == '\\') {
                    j += 2;
                    continue;
                }
                if (s[j] == q && (!triple || s.compare(j, 3, std::string(3, q)) == 0)) {
                    j += triple ? 3 : 1;
                    closed = true;
                    break;
                }
                ++j;
            }
            if (!closed) return std::nullopt;
            t.kind = Token::String;
            i = j;
        } else if (isIdentStart(c)) {
            while (i < s.size() && isIdentChar(s[i])) ++i;
            t.kind = Token::Name;
        } else if (std::isdigit(static_cast<unsigned char>(c)) || (c == '.' && i + 1 < s.size() && std::isdigit(static_cast<unsigned char>(s[i + 1])))) {
            while (i < s.size() && (isIdentChar(s[i]) || s[i] == '.' ||
                                    ((s[i] == '+' || s[i] == '-') && (s[i - 1] == 'e' || s[i - 1] == 'E'))))
                ++i;
            t.kind = Token::Number;
        } else {
            static const char* const kOps[] = {"**", "->", "...", ":=", "==", "!=", "<=", ">="};
            std::size_t len = 1;
            for (const char* op : kOps)
                if (s.compare(i, std::char_traits<char>::length(op), op) == 0) len = std::max(len, std::char_traits<char>::length(op));
            if (std::string_view("()[]{}:,=*/-+|.@<>~%&^!;").find(c) == std::string_view::npos) return std::nullopt;
            i += len;
            t.kind = Token::Op;
        }
        t.end = i;
        t.text = s.substr(t.begin, t.end - t.begin);
        out.push_back(std::move(t));
    }
    return out;
}

bool isOpen(const Token& t) { return t.kind == Token::Op && (t.text == "(" || t.text == "[" || t.text == "{"); }
bool isClose(const Token& t) { return t.kind == Token::Op && (t.text == ")" || t.text == "]" || t.text == "}"); }
bool isOp(const Token& t, std::string_view op) { return t.kind == Token::Op && t.text == op; }

/// Decodes a Python string literal; escapes other than the common ones are
/// kept as written.
std::optional<std::string> stringValue(const std::string& literal) {
    std::size_t q = 0;
    bool raw = false;
    while (q < literal.size() && literal[q] != '\'' && literal[q] != '"') {
        if (literal[q] == 'r' || literal[q] == 'R') raw = true;
        if (literal[q] == 'b' || literal[q] == 'B' || literal[q] == 'f' || literal[q] == 'F') return std::nullopt;
        ++q;
    }
    const bool triple = literal.size() >= q + 6 && literal.compare(q, 3, std::string(3, literal[q])) == 0;
    const std::size_t open = triple ? 3 : 1;
    const std::string body = literal.substr(q + open, literal.size() - q - 2 * open);
    if (raw) return body;
    std::string out;
    for (std::size_t i = 0; i < body.size(); ++i) {
        if (body[i] != '\\' || i + 1 >= body.size()) {
            out += body[i];
            continue;
        }
        const char e = body[++i];
        switch (e) {
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        case 'r': out += '\r'; break;
        case '\\': out += '\\'; break;
        case '\'': out += '\''; break;
        case '"': out += '"'; break;
        case '\n': break;
        default:
            out += '\\';
            out += e;
        }
    }
    return out;
}

std::vector<std::string> splitLines(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

int indentOf(const std::string& line) {
    int n = 0;
    for (char c : line) {
        if (c == ' ') ++n;
        else if (c == '\t') n = (n / 8 + 1) * 8;
        else break;
    }
    return n;
}

bool isBlank(const std::string& line) { return trim(line).empty(); }

bool isUnderline(const std::string& line) {
    const std::string t = trim(line);
    return t.size() >= 3 && std::all_of(t.begin(), t.end(), [](char c) { return c == '-'; });
}

/// Reads the numpydoc "Parameters" section of a docstring.
void readDocParameters(const std::string& doc, PySignature& sig) {
    const auto lines = splitLines(doc);
    std::size_t i = 0;
    while (i + 1 < lines.size() && !(trim(lines[i]) == "Parameters" && isUnderline(lines[i + 1]))) ++i;
    if (i + 1 >= lines.size()) return;
    const int base = indentOf(lines[i]);
    std::vector<std::string> current;
    std::string description;
    bool header = false;
    auto flush = [&] {
        for (const auto& name : current) sig.docParams[name] = description;
        current.clear();
        description.clear();
    };
    for (i += 2; i < lines.size(); ++i) {
        const std::string& line = lines[i];
        if (isBlank(line)) continue;
        if (i + 1 < lines.size() && isUnderline(lines[i + 1]) && indentOf(line) <= base) break;
        const int indent = indentOf(line);
        if (indent < base) break;
        if (indent > base) {
            if (current.empty()) continue;
            const std::string t = trim(line);
            description += description.empty() ? t : " " + t;
            continue;
        }
        flush();
        const std::string t = trim(line);
        const std::size_t colon = t.find(" :");
        const std::string names = trim(t.substr(0, colon == std::string::npos ? t.size() : colon));
        std::string rest = colon == std::string::npos ? "" : trim(t.substr(colon + 2));
        header = true;
        std::size_t start = 0;
        while (start <= names.size()) {
            std::size_t comma = names.find(',', start);
            std::string name = trim(names.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
            while (!name.empty() && name[0] == '*') name.erase(0, 1);
            if (!name.empty() && std::all_of(name.begin(), name.end(), isIdentChar) && isIdentStart(name[0]))
                current.push_back(name);
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        description = rest;
        const std::string type = trim(rest.substr(0, rest.find(',')));
        for (const auto& name : current)
            if (!type.empty()) sig.docTypes[name] = type;
    }
    if (header) flush();
}

/// Strips the common indentation of all lines but the first, like
/// `inspect.cleandoc`.
std::string cleanDoc(const std::string& doc) {
    auto lines = splitLines(doc);
    int common = -1;
    for (std::size_t i = 1; i < lines.size(); ++i)
        if (!isBlank(lines[i])) common = common < 0 ? indentOf(lines[i]) : std::min(common, indentOf(lines[i]));
    std::string out;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        std::string line = lines[i];
        if (i == 0) line = trim(line);
        else if (common > 0) line = line.size() > static_cast<std::size_t>(common) ? line.substr(static_cast<std::size_t>(common)) : trim(line);
        out += line + "\n";
    }
    return out;
}

class Recognizer {
public:
    Recognizer(const std::string& file, const std::string& module) : file_(file), module_(module) {}

    PyParseResult run(std::string_view source) {
        ScanResult scan = Scanner(source).run();
        const auto& lines = scan.lines;
        for (std::size_t i = 0; i < lines.size(); ++i) {
            const LogicalLine& l = lines[i];
            const std::string keyword = definitionKeyword(l.text);
            if (keyword.empty()) continue;
            if (l.indent > 0) {
                report("W081", "nested " + std::string(keyword == "class" ? "class" : "def") + " `" + definedName(l.text) +
                                   "` skipped; only top-level functions are extracted",
                       l);
                continue;
            }
            if (keyword == "class") continue;
            ++result_.defsFound;
            std::optional<std::string> docstring;
            if (i + 1 < lines.size() && lines[i + 1].indent > 0 && !lines[i + 1].broken) {
                auto tokens = tokenize(lines[i + 1].text);
                if (tokens && tokens->size() == 1 && (*tokens)[0].kind == Token::String)
                    docstring = stringValue((*tokens)[0].text);
            }
            std::string error;
            auto sig = l.broken ? std::nullopt : header(l, error);
            if (!sig) {
                ++result_.skipped;
                report("W080", "skipped unparseable def `" + definedName(l.text) + "`: " + (l.broken ? "unbalanced brackets or quotes" : error), l);
                continue;
            }
            if (docstring) readDocParameters(cleanDoc(*docstring), *sig);
            result_.signatures.push_back(std::move(*sig));
        }
        if (scan.unterminatedString) {
            SourceSpan span{file_, *scan.unterminatedString, 1, *scan.unterminatedString, 1};
            result_.diagnostics.push_back(makeDiagnostic("E080", "unterminated triple-quoted string; the rest of the file is unreadable", span));
        }
        return std::move(result_);
    }

private:
    void report(const char* code, std::string message, const LogicalLine& l) {
        SourceSpan span{file_, l.line, l.indent + 1, l.line, l.indent + 1};
        result_.diagnostics.push_back(makeDiagnostic(code, std::move(message), span));
    }

    static std::string definitionKeyword(const std::string& text) {
        auto word = [&](std::size_t at) {
            std::size_t e = at;
            while (e < text.size() && isIdentChar(text[e])) ++e;
            return text.substr(at, e - at);
        };
        const std::string first = word(0);
        if (first == "def" || first == "class") return first;
        if (first == "async") {
            std::size_t p = first.size();
            while (p < text.size() && std::isspace(static_cast<unsigned char>(text[p]))) ++p;
            if (word(p) == "def") return "def";
        }
        return "";
    }

    static std::string definedName(const std::string& text) {
        std::size_t p = text.find("def");
        if (text.rfind("class", 0) == 0) p = 5;
        else if (p != std::string::npos) p += 3;
        else return "?";
        while (p < text.size() && std::isspace(static_cast<unsigned char>(text[p]))) ++p;
        std::size_t e = p;
        while (e < text.size() && isIdentChar(text[e])) ++e;
        return e > p ? text.substr(p, e - p) : "?";
    }

    static std::string slice(const std::string& text, const std::vector<Token>& t, std::size_t from, std::size_t to) {
        if (from >= to) return "";
        return collapseSpaces(std::string_view(text).substr(t[from].begin, t[to - 1].end - t[from].begin));
    }

    std::optional<PySignature> header(const LogicalLine& l, std::string& error) const {
        auto tokens = tokenize(l.text);
        if (!tokens) return error = "unexpected character", std::nullopt;
        const auto& t = *tokens;
        std::size_t i = t[0].text == "async" ? 1 : 0;
        ++i; // def
        if (i >= t.size() || t[i].kind != Token::Name || isPythonKeyword(t[i].text))
            return error = "expected a function name", std::nullopt;
        PySignature sig;
        sig.module = module_;
        sig.name = t[i].text;
        sig.line = l.line;
        ++i;
        if (i >= t.size() || !isOp(t[i], "(")) return error = "expected `(`", std::nullopt;
        std::size_t close = i;
        int depth = 0;
        for (; close < t.size(); ++close) {
            if (isOpen(t[close])) ++depth;
            if (isClose(t[close]) && --depth == 0) break;
        }
        if (close >= t.size() || !isOp(t[close], ")")) return error = "unbalanced parameter list", std::nullopt;

        std::set<std::string> seen;
        std::size_t start = i + 1;
        depth = 0;
        for (std::size_t j = i + 1; j <= close; ++j) {
            if (j < close && isOpen(t[j])) ++depth;
            if (j < close && isClose(t[j])) --depth;
            if (j < close && (depth > 0 || !isOp(t[j], ","))) continue;
            if (start == j) {
                if (j < close) return error = "empty parameter", std::nullopt;
                break;
            }
            auto param = parameter(l.text, t, start, j, error);
            start = j + 1;
            if (!param) return std::nullopt;
            if (param->name.empty()) continue;
            if (!seen.insert(param->name).second) return error = "duplicate parameter `" + param->name + "`", std::nullopt;
            sig.params.push_back(std::move(*param));
        }

        std::size_t j = close + 1;
        if (j < t.size() && isOp(t[j], "->")) {
            std::size_t k = j + 1;
            depth = 0;
            while (k < t.size() && (depth > 0 || !isOp(t[k], ":"))) {
                if (isOpen(t[k])) ++depth;
                if (isClose(t[k])) --depth;
                ++k;
            }
            if (k == j + 1) return error = "empty return annotation", std::nullopt;
            sig.returnHint = slice(l.text, t, j + 1, k);
            j = k;
        }
        if (j >= t.size() || !isOp(t[j], ":")) return error = "expected `:`", std::nullopt;
        return sig;
    }

    static std::optional<PyParam> parameter(const std::string& text, const std::vector<Token>& t, std::size_t b,
                                            std::size_t e, std::string& error) {
        PyParam p;
        if (e - b == 1 && (isOp(t[b], "*") || isOp(t[b], "/"))) return p;
        if (isOp(t[b], "*") || isOp(t[b], "**")) {
            p.variadic = true;
            ++b;
        }
        if (b >= e || t[b].kind != Token::Name || isPythonKeyword(t[b].text)) return error = "malformed parameter", std::nullopt;
        p.name = t[b].text;
        std::size_t i = b + 1;
        std::size_t colon = e;
        std::size_t equals = e;
        int depth = 0;
        for (std::size_t j = i; j < e; ++j) {
            if (isOpen(t[j])) ++depth;
            if (isClose(t[j])) --depth;
            if (depth != 0) continue;
            if (isOp(t[j], ":") && colon == e && equals == e) colon = j;
            if (isOp(t[j], "=") && equals == e) equals = j;
        }
        if (i < e && colon != i && equals != i) return error = "malformed parameter `" + p.name + "`", std::nullopt;
        if (colon < e) {
            if (colon + 1 >= equals) return error = "empty annotation for `" + p.name + "`", std::nullopt;
            p.hint = slice(text, t, colon + 1, equals);
        }
        if (equals < e) {
            if (equals + 1 >= e || p.variadic) return error = "malformed default for `" + p.name + "`", std::nullopt;
            p.defaultText = slice(text, t, equals + 1, e);
        }
        return p;
    }

    std::string file_;
    std::string module_;
    PyParseResult result_;
};

} // namespace

PyParseResult parsePySignatures(std::string_view source, const std::string& file, const std::string& module) {
    return Recognizer(file, module).run(source);
}

} // namespace safepipe::stubgen
