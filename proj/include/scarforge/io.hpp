#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "scarforge/basis.hpp"

namespace scarforge {

inline constexpr const char* kToolVersion = "0.1.0";

/// Raised when an output file cannot be written.
class OutputError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// Every parameter that influences the numbers of a run, as text.
using ConfigMap = std::map<std::string, std::string>;

/// FNV-1a over the sorted "key=value\n" lines.
std::uint64_t config_hash(const ConfigMap& config);
std::string hex(std::uint64_t value);

struct RunMetadata {
  std::string command;
  std::string model;
  int length = 0;
  ConfigMap config;
  /// Result scalars (e.g. mean r) appended after the run fields.
  std::vector<std::pair<std::string, std::string>> summary;

  std::uint64_t hash() const { return config_hash(config); }
  /// Ordered key/value pairs written at the top of every output.
  std::vector<std::pair<std::string, std::string>> fields() const;
};

/// 12 significant digits, shortest form ("%.12g").
std::string format_number(double v);

using Cell = std::variant<double, long long, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

/// "# key=value" metadata lines, then the column header and the rows.
void write_csv(const std::string& path, const RunMetadata& meta, const Table& table);
std::string to_csv(const RunMetadata& meta, const Table& table);

/// {"meta": {...}, "data": payload}.
void write_json(const std::string& path, const RunMetadata& meta, const nlohmann::json& payload);

struct PlotSeries {
  std::string name;
  std::vector<double> x, y;
  std::vector<bool> highlight;  // scatter only: drawn as crosses
};

enum class PlotKind { Line, Scatter };

/// Self-contained SVG with axes, tick labels and a legend.
void write_svg(const std::string& path, const RunMetadata& meta, PlotKind kind, const std::string& x_label,
               const std::string& y_label, const std::vector<PlotSeries>& series);

/// Format from the extension: ".svg" renders, anything else is CSV.
bool wants_svg(const std::string& path);

}  // namespace scarforge
