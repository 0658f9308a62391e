#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "musielak/errors.hpp"
#include "musielak/grid.hpp"
#include "musielak/phi_core.hpp"

namespace musielak::io {

using nlohmann::json;

/// Unreadable or malformed input. what() is "file:line:col: message" when a
/// position is known.
class InputError : public Error {
 public:
  using Error::Error;
};

json read_json(const std::filesystem::path& path);
/// Same, from memory; `name` labels the diagnostics.
json parse_json(const std::string& text, const std::string& name = "<input>");

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

/// Comma separated, one header line, numeric cells. Blank lines and lines
/// starting with '#' are skipped.
CsvTable read_csv(const std::filesystem::path& path);
CsvTable parse_csv(const std::string& text, const std::string& name = "<input>");

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);
void write_json(const std::filesystem::path& path, const json& j);

/// Grid function as CSV: columns x[,y[,z]],u, one row per node in linear
/// index order (first axis fastest). The reader rebuilds the tensor grid
/// from the coordinates and checks every row against it.
void write_grid_function(const std::filesystem::path& path, const GridFunction& u);
GridFunction read_grid_function(const std::filesystem::path& path);

// ---- JSON schema helpers; all throw InputError with the JSON path ----

/// {"N": 3, "p": 2 | [...], "q": ..., "mu": ..., "lipschitz": L}
ExponentField field_from_json(const json& j);
/// {"dim": 2, "n": 129, "box": "unit" | "centered", "half_width": 1}
GridDomain grid_from_json(const json& j);

double get_number(const json& j, const std::string& key, const std::string& where);
double get_number(const json& j, const std::string& key, const std::string& where, double fallback);
std::vector<double> get_numbers(const json& j, const std::string& key, const std::string& where);
std::string get_string(const json& j, const std::string& key, const std::string& where,
                       const std::string& fallback);

}  // namespace musielak::io
