#include "musielak/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace musielak::io {

namespace {

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path.string() + ": cannot open");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string where_at(const std::string& name, const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') ++line, col = 1;
    else ++col;
  }
  return name + ":" + std::to_string(line) + ":" + std::to_string(col);
}

std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

json parse_json(const std::string& text, const std::string& name) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // nlohmann reports the 1-based byte just past the failure
    const std::size_t byte = e.byte > 0 ? e.byte - 1 : 0;
    std::string msg = e.what();
    const auto p = msg.find(": ");
    if (p != std::string::npos) msg = msg.substr(p + 2);
    throw InputError(where_at(name, text, byte) + ": " + msg);
  }
}

json read_json(const std::filesystem::path& path) { return parse_json(slurp(path), path.string()); }

CsvTable parse_csv(const std::string& text, const std::string& name) {
  CsvTable t;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos || line[0] == '#') continue;
    std::vector<std::pair<std::string, std::size_t>> cells;  // text, column
    std::size_t start = 0;
    while (true) {
      const std::size_t c = line.find(',', start);
      std::string cell = line.substr(start, c == std::string::npos ? std::string::npos : c - start);
      const std::size_t lead = cell.find_first_not_of(" \t");
      const std::size_t trail = cell.find_last_not_of(" \t");
      cells.emplace_back(lead == std::string::npos ? "" : cell.substr(lead, trail - lead + 1),
                         start + (lead == std::string::npos ? 0 : lead) + 1);
      if (c == std::string::npos) break;
      start = c + 1;
    }
    const std::string at = name + ":" + std::to_string(lineno) + ":";
    if (t.header.empty()) {
      for (auto& [s, col] : cells) {
        if (s.empty()) throw InputError(at + std::to_string(col) + ": empty header cell");
        t.header.push_back(s);
      }
      continue;
    }
    if (cells.size() != t.header.size())
      throw InputError(at + "1: expected " + std::to_string(t.header.size()) + " cells, found " +
                       std::to_string(cells.size()));
    std::vector<double> row;
    for (auto& [s, col] : cells) {
      double v = 0;
      const char* b = s.data();
      const char* e = s.data() + s.size();
      auto r = std::from_chars(b, e, v);
      if (s.empty() || r.ec != std::errc() || r.ptr != e)
        throw InputError(at + std::to_string(col) + ": not a number: '" + s + "'");
      row.push_back(v);
    }
    t.rows.push_back(std::move(row));
  }
  if (t.header.empty()) throw InputError(name + ":1:1: missing CSV header");
  return t;
}

CsvTable read_csv(const std::filesystem::path& path) { return parse_csv(slurp(path), path.string()); }

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path);
  if (!out) throw InputError(path.string() + ": cannot write");
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << fmt17(r[i]);
    out << '\n';
  }
}

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw InputError(path.string() + ": cannot write");
  out << j.dump(2) << '\n';
}

void write_grid_function(const std::filesystem::path& path, const GridFunction& u) {
  static const char* names[] = {"x", "y", "z"};
  const GridDomain& d = u.domain();
  std::vector<std::string> header;
  for (std::size_t a = 0; a < d.dim(); ++a) header.push_back(names[a]);
  header.push_back("u");
  std::vector<std::vector<double>> rows;
  rows.reserve(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto x = d.coordinates(i);
    std::vector<double> r(x.begin(), x.begin() + d.dim());
    r.push_back(u[i]);
    rows.push_back(std::move(r));
  }
  write_csv(path, header, rows);
}

GridFunction read_grid_function(const std::filesystem::path& path) {
  const CsvTable t = read_csv(path);
  const std::string name = path.string();
  const std::size_t dim = t.header.size() - 1;
  if (dim < 1 || dim > GridDomain::kMaxDim || t.header.back() != "u")
    throw InputError(name + ":1:1: expected header x[,y[,z]],u");
  std::vector<std::size_t> shape(dim);
  std::vector<double> lo(dim), hi(dim);
  for (std::size_t a = 0; a < dim; ++a) {
    std::vector<double> c;
    for (const auto& r : t.rows) c.push_back(r[a]);
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
    if (c.size() < 2) throw InputError(name + ": axis " + t.header[a] + " needs at least 2 nodes");
    shape[a] = c.size();
    lo[a] = c.front();
    hi[a] = c.back();
  }
  std::size_t total = 1;
  for (auto s : shape) total *= s;
  if (total != t.rows.size())
    throw InputError(name + ": " + std::to_string(t.rows.size()) + " rows do not form a tensor grid");
  auto d = std::make_shared<GridDomain>(shape, lo, hi);
  std::vector<double> v(d->size());
  for (std::size_t i = 0; i < d->size(); ++i) {
    const auto x = d->coordinates(i);
    for (std::size_t a = 0; a < dim; ++a)
      if (std::abs(t.rows[i][a] - x[a]) > 1e-9 * d->spacing()[a])
        throw InputError(name + ": data row " + std::to_string(i + 1) +
                         " is off the uniform grid or out of order (first axis varies fastest)");
    v[i] = t.rows[i][dim];
    if (!std::isfinite(v[i])) throw InputError(name + ": data row " + std::to_string(i + 1) + ": u not finite");
  }
  return GridFunction(d, std::move(v));
}

double get_number(const json& j, const std::string& key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw InputError(where + ": missing number '" + key + "'");
  if (!j[key].is_number()) throw InputError(where + "." + key + ": expected a number");
  return j[key].get<double>();
}

double get_number(const json& j, const std::string& key, const std::string& where, double fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  return get_number(j, key, where);
}

std::vector<double> get_numbers(const json& j, const std::string& key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw InputError(where + ": missing '" + key + "'");
  const json& v = j[key];
  if (v.is_number()) return {v.get<double>()};
  if (!v.is_array() || v.empty()) throw InputError(where + "." + key + ": expected a number or a non-empty array");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number())
      throw InputError(where + "." + key + "[" + std::to_string(i) + "]: expected a number");
    out.push_back(v[i].get<double>());
  }
  return out;
}

std::string get_string(const json& j, const std::string& key, const std::string& where,
                       const std::string& fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  if (!j[key].is_string()) throw InputError(where + "." + key + ": expected a string");
  return j[key].get<std::string>();
}

ExponentField field_from_json(const json& j) {
  const std::string w = "field";
  if (!j.is_object()) throw InputError("field: expected an object");
  const double N = get_number(j, "N", w);
  if (N != std::floor(N) || N < 1 || N > 1000) throw InputError("field.N: expected a positive integer");
  std::optional<double> lip;
  if (j.contains("lipschitz")) lip = get_number(j, "lipschitz", w);
  try {
    return ExponentField(static_cast<int>(N), get_numbers(j, "p", w), get_numbers(j, "q", w),
                         j.contains("mu") ? get_numbers(j, "mu", w) : std::vector<double>{1.0}, lip);
  } catch (const DimensionError& e) {
    throw InputError(std::string("field: ") + e.what());
  }
}

GridDomain grid_from_json(const json& j) {
  const std::string w = "grid";
  if (!j.is_object()) throw InputError("grid: expected an object");
  const double dim = get_number(j, "dim", w), n = get_number(j, "n", w);
  if (dim != std::floor(dim) || dim < 1 || dim > GridDomain::kMaxDim)
    throw InputError("grid.dim: expected 1, 2 or 3");
  if (n != std::floor(n) || n < 2 || n > 1e7) throw InputError("grid.n: expected an integer >= 2");
  const std::string box = get_string(j, "box", w, "unit");
  if (box == "unit") return GridDomain::unit_box(std::size_t(dim), std::size_t(n));
  if (box == "centered")
    return GridDomain::centered_box(std::size_t(dim), std::size_t(n), get_number(j, "half_width", w, 1.0));
  throw InputError("grid.box: expected 'unit' or 'centered'");
}

}  // namespace musielak::io
