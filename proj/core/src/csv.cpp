#include "qjump/csv.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qjump::csv {

std::string format_double(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

std::string format_int(long long value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%lld", value);
  return buffer;
}

void write(const std::filesystem::path& path, const Table& table) {
  std::ofstream out(path, std::ios::binary);  // '\n' endings on every platform
  if (!out) {
    throw std::runtime_error("csv: cannot open for writing: " + path.string());
  }
  auto emit_row = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i > 0) out << ',';
      out << cells[i];
    }
    out << '\n';
  };
  emit_row(table.header);
  for (const auto& row : table.rows) emit_row(row);
  if (!out) {
    throw std::runtime_error("csv: write failed: " + path.string());
  }
}

Table read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("csv: cannot open for reading: " + path.string());
  }
  Table table;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream stream(line);
    while (std::getline(stream, cell, ',')) cells.push_back(cell);
    if (line.empty()) continue;
    if (first) {
      table.header = std::move(cells);
      first = false;
    } else {
      table.rows.push_back(std::move(cells));
    }
  }
  return table;
}

namespace {

bool parse_number(const std::string& text, double& value) {
  const char* begin = text.c_str();
  char* end = nullptr;
  value = std::strtod(begin, &end);
  return end == begin + text.size() && !text.empty();
}

bool cells_match(const std::string& a, const std::string& b,
                 const ToleranceProfile& tolerances, std::string& detail) {
  if (a == b) return true;
  double lhs = 0.0;
  double rhs = 0.0;
  if (!parse_number(a, lhs) || !parse_number(b, rhs)) {
    detail = "non-numeric cells differ ('" + a + "' vs '" + b + "')";
    return false;
  }
  if (std::isnan(lhs) && std::isnan(rhs)) return true;
  const double bound = tolerances.abs_tol + tolerances.rel_tol * std::abs(rhs);
  if (std::abs(lhs - rhs) <= bound) return true;
  detail = "values differ: " + a + " vs " + b + " (allowed " +
           format_double(bound) + ")";
  return false;
}

}  // namespace

CompareResult compare_directories(const std::filesystem::path& candidate_dir,
                                  const std::filesystem::path& golden_dir,
                                  const ToleranceProfile& tolerances) {
  namespace fs = std::filesystem;
  CompareResult result;

  std::vector<fs::path> golden_files;
  for (const auto& entry : fs::directory_iterator(golden_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".csv") {
      golden_files.push_back(entry.path().filename());
    }
  }
  std::sort(golden_files.begin(), golden_files.end());
  if (golden_files.empty()) {
    return CompareResult{false, "no csv files in golden dir " + golden_dir.string()};
  }

  std::string missing;
  for (const auto& name : golden_files) {
    if (!fs::exists(candidate_dir / name)) missing += " " + name.string();
  }
  if (!missing.empty()) {
    return CompareResult{false, "missing files:" + missing};
  }

  for (const auto& name : golden_files) {
    const Table golden = read(golden_dir / name);
    const Table candidate = read(candidate_dir / name);
    if (golden.header != candidate.header) {
      return CompareResult{false, name.string() + ": header mismatch"};
    }
    if (golden.rows.size() != candidate.rows.size()) {
      return CompareResult{false, name.string() + ": row count " +
                                      std::to_string(candidate.rows.size()) +
                                      " != " + std::to_string(golden.rows.size())};
    }
    for (std::size_t r = 0; r < golden.rows.size(); ++r) {
      if (golden.rows[r].size() != candidate.rows[r].size()) {
        return CompareResult{
            false, name.string() + ": row " + std::to_string(r + 2) +
                       " column count mismatch"};
      }
      for (std::size_t c = 0; c < golden.rows[r].size(); ++c) {
        std::string detail;
        if (!cells_match(candidate.rows[r][c], golden.rows[r][c], tolerances,
                         detail)) {
          const std::string column =
              c < golden.header.size() ? golden.header[c] : std::to_string(c + 1);
          return CompareResult{
              false, name.string() + ": row " + std::to_string(r + 2) +
                         ", column '" + column + "': " + detail};
        }
      }
    }
  }
  result.message = "compared " + std::to_string(golden_files.size()) + " file(s)";
  return result;
}

}  // namespace qjump::csv
