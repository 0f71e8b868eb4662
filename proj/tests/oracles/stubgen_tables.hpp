#pragma once

#include <random>
#include <set>
#include <string>

namespace safepipe::oracles {

struct MappingRow {
    const char* hint;
    const char* type;
    bool review;
};

/// The hint mapping table, one row per entry plus compositions.
inline const MappingRow kMappingTable[] = {
    {"int", "Int", false},
    {"float", "Float", false},
    {"str", "String", false},
    {"bool", "Boolean", false},
    {"list[int]", "List<Int>", false},
    {"list[list[str]]", "List<List<String>>", false},
    {"List[float]", "List<Float>", false},
    {"typing.List[bool]", "List<Boolean>", false},
    {"Optional[int]", "union<Int, Nothing>", false},
    {"typing.Optional[str]", "union<String, Nothing>", false},
    {"int | None", "union<Int, Nothing>", false},
    {"int | str", "union<Int, String>", false},
    {"int | str | None", "union<Int, String, Nothing>", false},
    {"Optional[int | None]", "union<Int, Nothing>", false},
    {"Union[int, float]", "union<Int, Float>", false},
    {"None", "Nothing", false},
    {"np.ndarray", "Any", true},
    {"object", "Any", true},
    {"Any", "Any", true},
    {"dict[str, int]", "Any", true},
    {"list", "Any", true},
    {"list[np.ndarray]", "List<Any>", true},
    {"'Table'", "Any", true},
    {"int |", "Any", true},
};

struct PhraseRow {
    const char* text;
    const char* constraints; ///< formatted, comma separated
};

inline const PhraseRow kPhraseTable[] = {
    {"between 0 and 1", "it >= 0, it <= 1"},
    {"Ratio, Between 0.25 AND 0.75 inclusive", "it >= 0.25, it <= 0.75"},
    {"in range [0, 1]", "it >= 0, it <= 1"},
    {"in range (0, 1)", "it > 0, it < 1"},
    {"in range [0, 1)", "it >= 0, it < 1"},
    {"in the range (-1.5, 2]", "it > -1.5, it <= 2"},
    {"non-negative", "it >= 0"},
    {"Must be positive.", "it > 0"},
    {"non-positive values are rejected", ""},
    {"at most 10", "it <= 10"},
    {"at least 1e-3", "it >= 0.001"},
    {"at least 2. Larger values are slower.", "it >= 2"},
    {"positive, at most 100", "it > 0, it <= 100"},
    {"a helpful knob", ""},
    {"between 5 and 1", ""},
    {"in range (1, 1]", ""},
};

/// Random Python files: defs with hints, defaults and documented ranges,
/// plus the occasional broken def, nested def or class.
class PythonGenerator {
public:
    explicit PythonGenerator(unsigned seed) : rng_(seed) {}

    std::string file() {
        std::string out = "import numpy as np\n\n";
        const int defs = pick(7);
        for (int i = 0; i < defs; ++i) out += definition() + "\n";
        return out;
    }

private:
    int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }
    template <class T, std::size_t N>
    const T& any(const T (&items)[N]) {
        return items[pick(static_cast<int>(N))];
    }

    std::string name() {
        static const char* const kWords[] = {"load", "data", "x", "ratio", "schema", "fit", "value2", "n", "split",
                                             "protocol", "where", "union", "table", "max", "iter", "Model", "_private"};
        std::string n = any(kWords);
        for (int i = pick(3); i > 0; --i) n += std::string("_") + any(kWords);
        return n;
    }

    std::string definition() {
        static const char* const kHints[] = {"int",  "float", "str",   "bool",          "list[float]", "Optional[int]",
                                             "int | None", "np.ndarray", "dict[str, int]", "Union[int, str]", "object"};
        static const char* const kDefaults[] = {"1", "-2", "0.5", "'text'", "True", "None", "[]", "1_000", "1e-3"};
        static const char* const kReturns[] = {"int", "None", "tuple[int, str]", "tuple[float, ...]", "Tuple[bool]", "list[str]"};
        static const char* const kPhrases[] = {"between 0 and 1",  "positive", "non-negative", "at most 7",
                                               "in range (0, 10]", "a free-form remark", "at least 0.5",
                                               "between 3 and 2",  "at least -4"};
        if (pick(12) == 0) return "def broken_" + std::to_string(pick(100)) + "(x: int -> int:\n    pass\n";
        if (pick(12) == 0) return "class Thing:\n    def method(self):\n        pass\n";

        std::string header = "def " + name() + "(";
        std::string doc = "    \"\"\"Summary.\n\n    Parameters\n    ----------\n";
        std::set<std::string> used;
        bool defaulted = false;
        const int params = pick(5);
        for (int i = 0; i < params; ++i) {
            std::string p = name();
            if (!used.insert(p).second) continue;
            std::string text = p;
            if (pick(4) != 0) text += ": " + std::string(any(kHints));
            if (defaulted || pick(3) == 0) {
                text += " = " + std::string(any(kDefaults));
                defaulted = true;
            }
            header += (i ? ", " : "") + text;
            if (pick(2) == 0) doc += "    " + p + " : float, " + any(kPhrases) + "\n        More words.\n";
        }
        if (pick(5) == 0) header += std::string(params ? ", " : "") + "*args";
        header += ")";
        if (pick(4) != 0) header += " -> " + std::string(any(kReturns));
        std::string body = header + ":\n" + doc + "    \"\"\"\n";
        if (pick(4) == 0) body += "    def inner():\n        pass\n";
        return body + "    return None\n";
    }

    std::mt19937 rng_;
};

} // namespace safepipe::oracles
