#include "imcgrmf/csv_io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <stdexcept>

namespace imcgrmf::csv {

namespace {

std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r'; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  return out;
}

}  // namespace

std::string format_double(double value) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc{}) throw std::runtime_error("failed to format double");
  return std::string(buf.data(), end);
}

double parse_double(std::string_view token, std::string_view context) {
  token = trim(token);
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (token.empty() || ec != std::errc{} || ptr != token.data() + token.size()) {
    throw std::invalid_argument(std::string(context) + ": non-numeric cell '" + std::string(token) + "'");
  }
  return value;
}

long long parse_integer(std::string_view token, std::string_view context) {
  token = trim(token);
  long long value = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (token.empty() || ec != std::errc{} || ptr != token.data() + token.size()) {
    throw std::invalid_argument(std::string(context) + ": non-integer cell '" + std::string(token) + "'");
  }
  return value;
}

std::vector<std::string_view> split_line(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(trim(line.substr(start)));
      break;
    }
    cells.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return cells;
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  return lines;
}

Eigen::MatrixXd read_matrix(const std::filesystem::path& path) {
  const auto lines = read_lines(path);
  std::vector<std::vector<double>> rows;
  rows.reserve(lines.size());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) {
      // a single trailing blank line is tolerated
      if (i + 1 == lines.size()) break;
      throw std::invalid_argument(path.string() + ":" + std::to_string(i + 1) + ": empty row");
    }
    const auto context = path.string() + ":" + std::to_string(i + 1);
    std::vector<double> row;
    for (auto cell : split_line(lines[i])) row.push_back(parse_double(cell, context));
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw std::invalid_argument(context + ": expected " + std::to_string(rows.front().size()) +
                                  " columns, found " + std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    rows.empty() ? 0 : static_cast<Eigen::Index>(rows.front().size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
  return m;
}

void write_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& matrix) {
  auto out = open_for_write(path);
  for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
    for (Eigen::Index j = 0; j < matrix.cols(); ++j) {
      if (j) out << ',';
      out << format_double(matrix(i, j));
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

std::vector<long long> read_integer_column(const std::filesystem::path& path) {
  const auto lines = read_lines(path);
  std::vector<long long> values;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) {
      if (i + 1 == lines.size()) break;
      throw std::invalid_argument(path.string() + ":" + std::to_string(i + 1) + ": empty row");
    }
    values.push_back(parse_integer(lines[i], path.string() + ":" + std::to_string(i + 1)));
  }
  return values;
}

void write_integer_column(const std::filesystem::path& path, const std::vector<long long>& values) {
  auto out = open_for_write(path);
  for (auto v : values) out << v << '\n';
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

}  // namespace imcgrmf::csv
