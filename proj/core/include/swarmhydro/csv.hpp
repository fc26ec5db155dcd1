#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace swarmhydro {

/// 17 significant digits, '.' decimal point, locale independent.
std::string format_double(double value);

class CsvWriter {
 public:
  explicit CsvWriter(const std::vector<std::string>& header);
  void row(std::span<const double> values);
  const std::string& str() const noexcept { return text_; }

 private:
  std::size_t columns_;
  std::string text_;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  /// Index of a named column; throws ValidationError naming the column if absent.
  std::size_t column(const std::string& name) const;
};

CsvTable read_csv(const std::filesystem::path& path);

/// Writes to a sibling temporary file and renames it over the target.
void write_atomic(const std::filesystem::path& path, const std::string& content);

std::string read_file(const std::filesystem::path& path);

}  // namespace swarmhydro
