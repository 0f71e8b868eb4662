#include "safepipe/naming.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace safepipe {

std::string toSnakeCase(std::string_view name) {
    auto upper = [](char c) { return std::isupper(static_cast<unsigned char>(c)) != 0; };
    auto lowerOrDigit = [](char c) {
        return std::islower(static_cast<unsigned char>(c)) != 0 || std::isdigit(static_cast<unsigned char>(c)) != 0;
    };
    std::string out;
    for (std::size_t i = 0; i < name.size(); ++i) {
        const char c = name[i];
        if (upper(c) && i > 0 && name[i - 1] != '_') {
            const bool afterLower = lowerOrDigit(name[i - 1]);
            const bool endsAcronym = upper(name[i - 1]) && i + 1 < name.size() && std::islower(static_cast<unsigned char>(name[i + 1]));
            if (afterLower || endsAcronym) out += '_';
        }
        out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return out;
}

std::string toCamelCase(std::string_view name) {
    std::string out;
    std::size_t i = 0;
    while (i < name.size() && name[i] == '_') out += name[i++];
    bool upperNext = false;
    for (; i < name.size(); ++i) {
        if (name[i] == '_') {
            upperNext = true;
            continue;
        }
        if (upperNext && out.size() > 0 && out.back() != '_') out += static_cast<char>(std::toupper(static_cast<unsigned char>(name[i])));
        else out += name[i];
        upperNext = false;
    }
    return out;
}

bool isPythonKeyword(std::string_view name) {
    static constexpr std::array<std::string_view, 35> kKeywords = {
        "False", "None",   "True",    "and",      "as",     "assert", "async", "await",  "break",
        "class", "continue", "def",   "del",      "elif",   "else",   "except", "finally", "for",
        "from",  "global", "if",      "import",   "in",     "is",     "lambda", "nonlocal", "not",
        "or",    "pass",   "raise",   "return",   "try",    "while",  "with",  "yield"};
    return std::find(kKeywords.begin(), kKeywords.end(), name) != kKeywords.end();
}

std::string pythonIdentifier(std::string_view name) {
    std::string out(name);
    if (isPythonKeyword(name)) out += '_';
    return out;
}

} // namespace safepipe
