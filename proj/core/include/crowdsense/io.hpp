#pragma once

// File formats used by the command-line tool.
//
// Matrix CSV: comma separated, one row per line, '.' decimal separator,
// optional header line, shortest round-trip decimal form. An empty cell is
// an unobserved entry.
// Mask CSV: 0/1 cells with the matrix's shape.
// Edge list: "i j" per line, 0-based, '#' starts a comment.
// Run report: JSON object (see RunReport).

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "crowdsense/consensus.hpp"
#include "crowdsense/matrix.hpp"

namespace crowdsense {

// Shortest decimal string that parses back to exactly `v`.
std::string format_double(double v);
// Throws ValidationError on anything that is not a complete finite number.
double parse_double(const std::string& text);

struct CsvMatrix {
  Matrix values;  // unobserved cells hold 0
  Mask observed;
};

void write_matrix_csv(std::ostream& out, const Matrix& m,
                      const std::optional<Mask>& observed = std::nullopt,
                      bool header = false);
void write_matrix_csv(const std::filesystem::path& path, const Matrix& m,
                      const std::optional<Mask>& observed = std::nullopt,
                      bool header = false);

CsvMatrix read_matrix_csv(std::istream& in, bool header = false);
CsvMatrix read_matrix_csv(const std::filesystem::path& path, bool header = false);

void write_mask_csv(const std::filesystem::path& path, const Mask& mask);
Mask read_mask_csv(const std::filesystem::path& path);

// Agent count is max index + 1 unless given.
Topology parse_edge_list(std::istream& in, std::optional<std::size_t> agents = std::nullopt);
Topology read_edge_list(const std::filesystem::path& path,
                        std::optional<std::size_t> agents = std::nullopt);
void write_edge_list(std::ostream& out, const Topology& topology);

std::string library_version();

struct RunReport {
  std::string command;
  std::map<std::string, std::string> parameters;
  std::map<std::string, double> metrics;
  bool converged = true;
  std::uint64_t seed = 0;
  std::string library_version = crowdsense::library_version();
  // Per-round series such as residual histories.
  std::map<std::string, std::vector<double>> histories;

  friend bool operator==(const RunReport&, const RunReport&) = default;
};

std::string to_json(const RunReport& report);
// Throws ValidationError on malformed input or a missing version field.
RunReport report_from_json(const std::string& text);

void write_report(const std::filesystem::path& path, const RunReport& report);
RunReport read_report(const std::filesystem::path& path);

}  // namespace crowdsense
