#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace tullock::io {

/// Formats with 10 significant digits (the fixed precision of every emitted
/// artifact, so outputs are diff-able).
std::string format_number(double v);

/// Snaps a double to its 10-significant-digit decimal value, for JSON
/// summaries that should match the CSV precision.
double snap_number(double v);

/// Atomic text write: temp file in the same directory, then rename.
void write_text_atomic(const std::filesystem::path& path, const std::string& text);

/// Minimal CSV builder with a fixed header row.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  void row(const std::vector<double>& values);
  void write(const std::filesystem::path& path) const;
  const std::string& text() const { return body_; }

 private:
  std::size_t columns_;
  std::string body_;
};

}  // namespace tullock::io
