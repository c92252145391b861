#pragma once

#include <string>
#include <vector>

#include <varinf/measures.hpp>

namespace varinf {

/// Numeric CSV table with a named header row.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

/// Shortest decimal form that round-trips the double exactly.
std::string format_double(double value);

CsvTable read_csv(const std::string& path);
void write_csv(const std::string& path, const CsvTable& table);

/// Columns x1..xn, weight.
void save_measure_csv(const std::string& path, const DiscreteMeasure& measure);
/// Columns x1..xn, weight, m11..mnn (row-major).
void save_varifold_csv(const std::string& path, const DiscreteVarifold& varifold);

/// Reads any of the three layouts, told apart by their headers:
/// x1..xn (unit weights 1/N), x1..xn,weight, and x1..xn,weight,m11..mnn.
/// Point-only and weighted files yield zero matrices.
DiscreteVarifold load_varifold_csv(const std::string& path);

/// Writes `text` to `path`, throwing IoError with the path on failure.
void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace varinf
