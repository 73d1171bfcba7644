#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace radneumann {

/// Shortest decimal text that parses back to the same double.
std::string format_real(double x);

/// Writes through a sibling temporary file and renames it into place, so a
/// reader never observes a half-written file.
void write_file_atomically(const std::filesystem::path& path,
                           const std::function<void(std::ostream&)>& writer);

/// Rows of a comma-separated file; blank lines and lines starting with '#'
/// are skipped, as is a first row that does not parse as numbers.
std::vector<std::vector<double>> read_numeric_csv(std::istream& is, std::size_t columns);

}  // namespace radneumann
