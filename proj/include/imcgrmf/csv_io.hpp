#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace imcgrmf::csv {

// Shortest decimal text that parses back to the identical double.
std::string format_double(double value);

// Parses a full token as a double; throws std::invalid_argument naming `context` otherwise.
double parse_double(std::string_view token, std::string_view context);
long long parse_integer(std::string_view token, std::string_view context);

// Splits one CSV line on commas, trimming surrounding whitespace from each cell.
std::vector<std::string_view> split_line(std::string_view line);

// Reads every line of a text file, stripping a trailing '\r'. Empty lines are kept.
std::vector<std::string> read_lines(const std::filesystem::path& path);

// Headerless numeric matrix. Blank lines are rejected; ragged rows are rejected.
Eigen::MatrixXd read_matrix(const std::filesystem::path& path);
void write_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& matrix);

std::vector<long long> read_integer_column(const std::filesystem::path& path);
void write_integer_column(const std::filesystem::path& path, const std::vector<long long>& values);

}  // namespace imcgrmf::csv
