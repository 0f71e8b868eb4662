#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "safepipe/diagnostic.hpp"
#include "safepipe/semantics/analysis.hpp"

namespace safepipe::schema {

enum class ColumnType { Int, Float, Bool, String };

/// `Int`, `Float`, `Boolean`, `String`: the stub-language spelling.
std::string toString(ColumnType type);
std::optional<ColumnType> columnTypeOf(const semantics::Type& type);

/// Least upper bound in the widening order Int < Float < String, Bool < String.
ColumnType widen(ColumnType a, ColumnType b);

/// `actual` can be used where `required` is expected (equal, or Int for Float).
bool satisfiesColumnType(ColumnType actual, ColumnType required);

struct Column {
    std::string name;
    ColumnType type = ColumnType::String;
    bool operator==(const Column&) const = default;
};

/// Ordered column signature of a tabular value. Names are unique.
struct Schema {
    std::vector<Column> columns;
    bool operator==(const Schema&) const = default;

    [[nodiscard]] const Column* find(const std::string& name) const;
    [[nodiscard]] bool has(const std::string& name) const { return find(name) != nullptr; }
};

/// `{age: Int, name: String}`
std::string toString(const Schema& schema);

//===----------------------------------------------------------------------===//
// CSV inference
//===----------------------------------------------------------------------===//

inline constexpr std::size_t kSampleRows = 1000;

struct CsvInference {
    std::optional<Schema> schema;
    Diagnostics diagnostics; ///< E032-E034
};

/// Comma-separated, `"`-quoted with doubled-quote escapes, first row header.
CsvInference inferCsvSchemaFromText(std::string_view text, const std::string& file);
CsvInference inferCsvSchema(const std::filesystem::path& file);

/// Per-column classification of nonempty cells; all-empty is String.
ColumnType classifyCells(const std::vector<std::string>& cells);

//===----------------------------------------------------------------------===//
// Effects
//===----------------------------------------------------------------------===//

struct AddColumn {
    std::string name;
    ColumnType type;
};
struct RemoveColumn {
    std::string name;
};
struct RenameColumn {
    std::string from;
    std::string to;
};
struct RetypeColumn {
    std::string name;
    ColumnType type;
};
struct KeepColumns {
    std::vector<std::string> names;
};
struct DropColumns {
    std::vector<std::string> names;
};

/// A schema effect with all names already resolved to constants.
using Effect = std::variant<AddColumn, RemoveColumn, RenameColumn, RetypeColumn, KeepColumns, DropColumns>;

struct EffectError {
    std::string code; ///< E030 or E036
    std::string message;
    bool operator==(const EffectError&) const = default;
};

/// Applies `effects` left to right. Keep preserves the input order; Drop
/// ignores names that are absent.
std::variant<Schema, EffectError> applyEffects(Schema schema, const std::vector<Effect>& effects);

/// E030 if `column` is absent, E031 if its type does not satisfy `required`.
std::optional<EffectError> checkRequirement(const Schema& schema, const std::string& column,
                                            std::optional<ColumnType> required);

//===----------------------------------------------------------------------===//
// Datasets and propagation
//===----------------------------------------------------------------------===//

/// Maps manifest dataset keys to CSV files and caches inferred schemas by
/// (path, modification time). Owned by one compilation session.
class DatasetRegistry {
public:
    DatasetRegistry() = default;
    explicit DatasetRegistry(std::map<std::string, std::filesystem::path> datasets);

    [[nodiscard]] bool contains(const std::string& key) const { return datasets_.count(key) != 0; }
    [[nodiscard]] const std::map<std::string, std::filesystem::path>& datasets() const { return datasets_; }

    /// Inference for a known key; nullptr if the key is not in the manifest.
    const CsvInference* lookup(const std::string& key);

private:
    struct CacheEntry {
        std::filesystem::file_time_type modified;
        CsvInference inference;
    };
    std::map<std::string, std::filesystem::path> datasets_;
    std::map<std::filesystem::path, CacheEntry> cache_;
};

struct Propagation {
    /// Top-level tabular variables; nullopt marks an unknown schema.
    std::map<std::string, std::optional<Schema>> schemas;
    Diagnostics diagnostics; ///< E030-E037 and W001
};

Propagation propagate(const semantics::PipelineAnalysis& pipeline, const semantics::SymbolTable& symbols,
                      DatasetRegistry& datasets);

} // namespace safepipe::schema
