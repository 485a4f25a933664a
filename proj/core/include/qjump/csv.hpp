// csv.hpp — Locale-independent CSV emission and numeric comparison. Output is
// byte-stable: '.' decimal separator, '\n' line endings, UTF-8, doubles with
// 17 significant digits.

#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace qjump::csv {

// One formatted cell; use the helpers so every writer agrees on formatting.
std::string format_double(double value);
std::string format_int(long long value);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

void write(const std::filesystem::path& path, const Table& table);

Table read(const std::filesystem::path& path);

struct ToleranceProfile {
  double abs_tol = 1e-12;
  double rel_tol = 1e-9;
};

struct CompareResult {
  bool pass = true;
  std::string message;  // first divergence: file, row, column
};

// Numeric cell-by-cell comparison of every *.csv present in `golden_dir`
// against the same name in `candidate_dir`. Missing files fail with a
// listing. A pair of cells passes when |a − b| ≤ abs_tol + rel_tol·|b| or the
// cells are byte-identical (covers non-numeric cells).
CompareResult compare_directories(const std::filesystem::path& candidate_dir,
                                  const std::filesystem::path& golden_dir,
                                  const ToleranceProfile& tolerances);

}  // namespace qjump::csv
