#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "safepipe/schema/schema.hpp"

namespace safepipe::schema {

namespace {

struct Record {
    std::vector<std::string> cells;
    int line = 1;
};

bool digits(std::string_view s, std::size_t& i) {
    const std::size_t start = i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
    return i > start;
}

bool isInt(std::string_view s) {
    std::size_t i = (!s.empty() && (s[0] == '+' || s[0] == '-')) ? 1 : 0;
    return digits(s, i) && i == s.size();
}

bool isFloat(std::string_view s) {
    std::size_t i = (!s.empty() && (s[0] == '+' || s[0] == '-')) ? 1 : 0;
    const bool whole = digits(s, i);
    bool fraction = false;
    if (i < s.size() && s[i] == '.') {
        ++i;
        fraction = digits(s, i);
    }
    if (!whole && !fraction) return false;
    if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
        ++i;
        if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
        if (!digits(s, i)) return false;
    }
    return i == s.size();
}

bool isBool(std::string_view s) { return s == "true" || s == "false" || s == "True" || s == "False"; }

/// Splits records; stops once `limit` records have been read.
std::optional<std::vector<Record>> splitRecords(std::string_view text, std::size_t limit, int& failLine) {
    std::vector<Record> records;
    Record current;
    std::string field;
    bool inQuotes = false;
    bool fieldStarted = false;
    int line = 1;
    auto endField = [&] {
        current.cells.push_back(std::move(field));
        field.clear();
        fieldStarted = false;
    };
    auto endRecord = [&] {
        endField();
        const bool blank = current.cells.size() == 1 && current.cells[0].empty();
        if (!blank) records.push_back(std::move(current));
        current = Record{};
    };
    for (std::size_t i = 0; i < text.size() && records.size() < limit; ++i) {
        const char c = text[i];
        if (current.cells.empty() && field.empty() && !fieldStarted) current.line = line;
        if (inQuotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    inQuotes = false;
                }
            } else {
                if (c == '\n') ++line;
                field += c;
            }
            continue;
        }
        switch (c) {
        case '"':
            inQuotes = true;
            fieldStarted = true;
            break;
        case ',': endField(); break;
        case '\r':
            if (i + 1 < text.size() && text[i + 1] == '\n') break;
            [[fallthrough]];
        case '\n':
            endRecord();
            ++line;
            break;
        default: field += c; fieldStarted = true; break;
        }
    }
    if (inQuotes) {
        failLine = current.line;
        return std::nullopt;
    }
    if ((!field.empty() || fieldStarted || !current.cells.empty()) && records.size() < limit) endRecord();
    return records;
}

} // namespace

ColumnType classifyCells(const std::vector<std::string>& cells) {
    bool any = false;
    bool ints = true;
    bool floats = true;
    bool bools = true;
    for (const auto& c : cells) {
        if (c.empty()) continue;
        any = true;
        ints = ints && isInt(c);
        floats = floats && isFloat(c);
        bools = bools && isBool(c);
    }
    if (!any) return ColumnType::String;
    if (ints) return ColumnType::Int;
    if (floats) return ColumnType::Float;
    if (bools) return ColumnType::Bool;
    return ColumnType::String;
}

CsvInference inferCsvSchemaFromText(std::string_view text, const std::string& file) {
    CsvInference result;
    auto fail = [&](const char* code, std::string message, int line) {
        result.diagnostics.push_back(makeDiagnostic(code, std::move(message), SourceSpan{file, line, 1, line, 1}));
        return result;
    };
    int failLine = 1;
    auto records = splitRecords(text, kSampleRows + 1, failLine);
    if (!records) return fail("E032", "unterminated quoted field in " + file, failLine);
    if (records->empty()) return fail("E032", "dataset file " + file + " is empty", 1);

    const Record& header = records->front();
    std::set<std::string> names;
    for (const auto& name : header.cells) {
        if (!names.insert(name).second)
            return fail("E033", "duplicate column `" + name + "` in the header of " + file, header.line);
    }
    std::vector<std::vector<std::string>> columns(header.cells.size());
    for (std::size_t r = 1; r < records->size(); ++r) {
        const Record& row = (*records)[r];
        if (row.cells.size() != header.cells.size()) {
            return fail("E034",
                        "row has " + std::to_string(row.cells.size()) + " cells but the header has " +
                            std::to_string(header.cells.size()),
                        row.line);
        }
        for (std::size_t c = 0; c < row.cells.size(); ++c) columns[c].push_back(row.cells[c]);
    }
    Schema schema;
    for (std::size_t c = 0; c < header.cells.size(); ++c)
        schema.columns.push_back({header.cells[c], classifyCells(columns[c])});
    result.schema = std::move(schema);
    return result;
}

CsvInference inferCsvSchema(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) {
        CsvInference result;
        result.diagnostics.push_back(makeDiagnostic("E032", "cannot read dataset file " + file.string(),
                                                    SourceSpan{file.string(), 1, 1, 1, 1}));
        return result;
    }
    std::ostringstream text;
    text << in.rdbuf();
    return inferCsvSchemaFromText(text.str(), file.string());
}

} // namespace safepipe::schema
