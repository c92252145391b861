#include <varinf/io.hpp>

#include <charconv>
#include <fstream>
#include <sstream>

#include <varinf/errors.hpp>

namespace varinf {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream row(line);
  std::string field;
  while (std::getline(row, field, ',')) {
    const auto first = field.find_first_not_of(" \t\r");
    const auto last = field.find_last_not_of(" \t\r");
    out.push_back(first == std::string::npos ? "" : field.substr(first, last - first + 1));
  }
  return out;
}

std::vector<std::string> coordinate_names(int n) {
  std::vector<std::string> names;
  for (int k = 1; k <= n; ++k) names.push_back("x" + std::to_string(k));
  return names;
}

}  // namespace

std::string format_double(double value) {
  char buffer[32];
  const auto result = std::to_chars(buffer, buffer + sizeof buffer, value);
  return std::string(buffer, result.ptr);
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r" || line[0] == '#') continue;
    auto fields = split_fields(line);
    if (table.header.empty()) {
      table.header = std::move(fields);
      continue;
    }
    if (fields.size() != table.header.size())
      throw IoError(path + ":" + std::to_string(line_no) + ": expected " + std::to_string(table.header.size()) +
                    " fields");
    std::vector<double> row;
    row.reserve(fields.size());
    for (const auto& f : fields) {
      double v = 0.0;
      const auto res = std::from_chars(f.data(), f.data() + f.size(), v);
      if (res.ec != std::errc() || res.ptr != f.data() + f.size())
        throw IoError(path + ":" + std::to_string(line_no) + ": not a number: '" + f + "'");
      row.push_back(v);
    }
    table.rows.push_back(std::move(row));
  }
  if (table.header.empty()) throw IoError("'" + path + "' has no header row");
  return table;
}

void write_csv(const std::string& path, const CsvTable& table) {
  std::ostringstream out;
  for (std::size_t k = 0; k < table.header.size(); ++k) out << (k ? "," : "") << table.header[k];
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t k = 0; k < row.size(); ++k) out << (k ? "," : "") << format_double(row[k]);
    out << '\n';
  }
  write_text_file(path, out.str());
}

void save_measure_csv(const std::string& path, const DiscreteMeasure& measure) {
  CsvTable table;
  table.header = coordinate_names(measure.dim());
  table.header.push_back("weight");
  for (std::size_t i = 0; i < measure.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    std::vector<double> row(measure.points.col(k).data(), measure.points.col(k).data() + measure.dim());
    row.push_back(measure.weights[k]);
    table.rows.push_back(std::move(row));
  }
  write_csv(path, table);
}

void save_varifold_csv(const std::string& path, const DiscreteVarifold& varifold) {
  const int n = varifold.dim();
  CsvTable table;
  table.header = coordinate_names(n);
  table.header.push_back("weight");
  for (int r = 1; r <= n; ++r)
    for (int c = 1; c <= n; ++c) table.header.push_back("m" + std::to_string(r) + std::to_string(c));
  for (std::size_t i = 0; i < varifold.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    std::vector<double> row(varifold.points.col(k).data(), varifold.points.col(k).data() + n);
    row.push_back(varifold.weights[k]);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) row.push_back(varifold.matrices[i](r, c));
    table.rows.push_back(std::move(row));
  }
  write_csv(path, table);
}

DiscreteVarifold load_varifold_csv(const std::string& path) {
  const CsvTable table = read_csv(path);
  int n = 0;
  while (n < static_cast<int>(table.header.size()) && table.header[static_cast<std::size_t>(n)] == "x" + std::to_string(n + 1))
    ++n;
  if (n == 0) throw IoError("'" + path + "': header must start with x1");
  const auto cols = table.header.size();
  const bool weighted = cols > static_cast<std::size_t>(n) && table.header[static_cast<std::size_t>(n)] == "weight";
  const bool with_matrices = weighted && cols == static_cast<std::size_t>(n + 1 + n * n);
  if (cols != static_cast<std::size_t>(n) && !(weighted && (cols == static_cast<std::size_t>(n + 1) || with_matrices)))
    throw IoError("'" + path + "': unrecognized column layout");

  const auto m = static_cast<Eigen::Index>(table.rows.size());
  DiscreteVarifold out;
  out.points.resize(n, m);
  out.weights.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto& row = table.rows[static_cast<std::size_t>(i)];
    for (int k = 0; k < n; ++k) out.points(k, i) = row[static_cast<std::size_t>(k)];
    out.weights[i] = weighted ? row[static_cast<std::size_t>(n)] : 1.0 / static_cast<double>(m);
    Matrix a = Matrix::Zero(n, n);
    if (with_matrices)
      for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) a(r, c) = row[static_cast<std::size_t>(n + 1 + r * n + c)];
    out.matrices.push_back(std::move(a));
  }
  return out;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw IoError("write to '" + path + "' failed");
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace varinf
