#pragma once

#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "rpa/driver.hpp"
#include "rpa/metrics.hpp"
#include "rpa/poles.hpp"

namespace rpa {

// Matrices travel as {"rows": r, "cols": c, "data": [row-major doubles]}.
nlohmann::json matrix_to_json(const Matrix& M);
Matrix matrix_from_json(const nlohmann::json& j, const std::string& what);

// System file: {"A": matrix, "B": matrix}.
SystemPair system_from_json(const nlohmann::json& j);

// Pole file: either a bare array of entries, or {"poles": [...],
// "conjugate_pairs": bool}. An entry is a number, [re, im], [re, im, mult],
// or {"re": , "im": , "mult": } with im and mult optional.
struct PoleFile {
    std::vector<RawPole> entries;
    bool conjugate_pairs = false;
};
PoleFile poles_from_json(const nlohmann::json& j);

nlohmann::json report_to_json(const RobustnessReport& rep);
nlohmann::json result_to_json(const AssignmentResult& res, const RobustnessReport* rep);

// File helpers; read errors and parse errors surface as InvalidInput.
nlohmann::json load_json(const std::string& path);
void save_text(const std::string& path, const std::string& text);

}  // namespace rpa
