#include "crowdsense/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "crowdsense/errors.hpp"
#include "json.hpp"

#ifndef CROWDSENSE_VERSION_STRING
#define CROWDSENSE_VERSION_STRING "0.0.0"
#endif

namespace crowdsense {

namespace {

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  if (line.empty()) cells.emplace_back();
  return cells;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path.string() + "' for reading");
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open '" + path.string() + "' for writing");
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const char* first = t.data();
  const char* last = t.data() + t.size();
  if (!t.empty() && *first == '+') ++first;
  const auto res = std::from_chars(first, last, v);
  if (t.empty() || res.ec != std::errc() || res.ptr != last || !std::isfinite(v)) {
    throw ValidationError("not a finite number: '" + text + "'");
  }
  return v;
}

void write_matrix_csv(std::ostream& out, const Matrix& m, const std::optional<Mask>& observed,
                      bool header) {
  if (observed && (observed->rows() != static_cast<std::size_t>(m.rows()) ||
                   observed->cols() != static_cast<std::size_t>(m.cols()))) {
    throw DimensionError("mask shape does not match the matrix being written");
  }
  if (header) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << (j ? "," : "") << "c" << j;
    out << '\n';
  }
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      if (!observed || observed->contains(static_cast<std::size_t>(i), static_cast<std::size_t>(j))) {
        out << format_double(m(i, j));
      }
    }
    out << '\n';
  }
}

void write_matrix_csv(const std::filesystem::path& path, const Matrix& m,
                      const std::optional<Mask>& observed, bool header) {
  auto out = open_out(path);
  write_matrix_csv(out, m, observed, header);
}

CsvMatrix read_matrix_csv(std::istream& in, bool header) {
  std::vector<std::vector<std::string>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (header && line_no == 1) continue;
    if (trim(line).empty()) continue;
    rows.push_back(split_commas(line));
    if (rows.size() > 1 && rows.back().size() != rows.front().size()) {
      throw ValidationError("CSV line " + std::to_string(line_no) + " has " +
                            std::to_string(rows.back().size()) + " cells, expected " +
                            std::to_string(rows.front().size()));
    }
  }
  if (rows.empty()) throw ValidationError("CSV input contains no data rows");

  const auto r = rows.size();
  const auto c = rows.front().size();
  CsvMatrix out{Matrix::Zero(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)),
                Mask(r, c)};
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < c; ++j) {
      const std::string cell = trim(rows[i][j]);
      if (cell.empty()) continue;
      try {
        out.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = parse_double(cell);
      } catch (const ValidationError& e) {
        throw ValidationError("CSV row " + std::to_string(i + 1) + ", column " +
                              std::to_string(j + 1) + ": " + e.what());
      }
      out.observed.insert(i, j);
    }
  }
  return out;
}

CsvMatrix read_matrix_csv(const std::filesystem::path& path, bool header) {
  auto in = open_in(path);
  return read_matrix_csv(in, header);
}

void write_mask_csv(const std::filesystem::path& path, const Mask& mask) {
  auto out = open_out(path);
  for (std::size_t i = 0; i < mask.rows(); ++i) {
    for (std::size_t j = 0; j < mask.cols(); ++j) {
      if (j) out << ',';
      out << (mask.contains(i, j) ? '1' : '0');
    }
    out << '\n';
  }
}

Mask read_mask_csv(const std::filesystem::path& path) {
  const CsvMatrix raw = read_matrix_csv(path);
  if (!raw.observed.is_full()) throw ValidationError("mask CSV has empty cells");
  Mask mask(static_cast<std::size_t>(raw.values.rows()),
            static_cast<std::size_t>(raw.values.cols()));
  for (Eigen::Index i = 0; i < raw.values.rows(); ++i) {
    for (Eigen::Index j = 0; j < raw.values.cols(); ++j) {
      const double v = raw.values(i, j);
      if (v == 1.0) {
        mask.insert(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      } else if (v != 0.0) {
        throw ValidationError("mask CSV cells must be 0 or 1");
      }
    }
  }
  return mask;
}

Topology parse_edge_list(std::istream& in, std::optional<std::size_t> agents) {
  std::vector<Topology::Edge> edges;
  std::size_t max_index = 0;
  bool any = false;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ss(line);
    long long a = 0, b = 0;
    if (!(ss >> a)) {
      if (!trim(line).empty()) {
        throw ValidationError("edge list line " + std::to_string(line_no) + ": expected 'i j'");
      }
      continue;
    }
    std::string extra;
    if (!(ss >> b) || (ss >> extra) || a < 0 || b < 0) {
      throw ValidationError("edge list line " + std::to_string(line_no) +
                            ": expected two nonnegative indices");
    }
    edges.emplace_back(static_cast<std::size_t>(a), static_cast<std::size_t>(b));
    max_index = std::max({max_index, edges.back().first, edges.back().second});
    any = true;
  }
  if (!agents && !any) throw ValidationError("edge list is empty and no agent count was given");
  return Topology(agents.value_or(max_index + 1), edges);
}

Topology read_edge_list(const std::filesystem::path& path, std::optional<std::size_t> agents) {
  auto in = open_in(path);
  return parse_edge_list(in, agents);
}

void write_edge_list(std::ostream& out, const Topology& topology) {
  out << "# " << topology.agent_count() << " agents\n";
  for (auto [i, j] : topology.edges()) out << i << ' ' << j << '\n';
}

std::string library_version() { return CROWDSENSE_VERSION_STRING; }

std::string to_json(const RunReport& report) {
  nlohmann::ordered_json j;
  j["command"] = report.command;
  j["library_version"] = report.library_version;
  j["seed"] = report.seed;
  j["converged"] = report.converged;
  j["parameters"] = report.parameters;
  j["metrics"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : report.metrics) {
    if (!std::isfinite(v)) throw ValidationError("metric '" + k + "' is not finite");
    j["metrics"][k] = v;
  }
  j["histories"] = report.histories;
  return j.dump(2) + "\n";
}

RunReport report_from_json(const std::string& text) {
  RunReport r;
  try {
    const auto j = nlohmann::json::parse(text);
    if (!j.contains("library_version")) throw ValidationError("report has no library_version");
    r.command = j.at("command").get<std::string>();
    r.library_version = j.at("library_version").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.converged = j.value("converged", true);
    r.parameters = j.value("parameters", std::map<std::string, std::string>{});
    r.metrics = j.value("metrics", std::map<std::string, double>{});
    r.histories = j.value("histories", std::map<std::string, std::vector<double>>{});
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed report: ") + e.what());
  }
  return r;
}

void write_report(const std::filesystem::path& path, const RunReport& report) {
  auto out = open_out(path);
  out << to_json(report);
}

RunReport read_report(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return report_from_json(ss.str());
}

}  // namespace crowdsense
