#include "scarforge/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace scarforge {

namespace {

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw OutputError("cannot write output file " + path);
  return out;
}

std::string cell_text(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return format_number(*d);
  if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
  const auto& s = std::get<std::string>(c);
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return q + "\"";
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// Round step (1, 2 or 5 times a power of ten) giving about `n` ticks.
double tick_step(double span, int n) {
  if (!(span > 0.0)) return 1.0;
  const double raw = span / n;
  const double p = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0}) {
    if (raw <= m * p) return m * p;
  }
  return 10.0 * p;
}

}  // namespace

std::uint64_t config_hash(const ConfigMap& config) {
  std::uint64_t h = 14695981039346656037ULL;
  for (const auto& [k, v] : config) {
    for (char c : k + "=" + v + "\n") {
      h ^= static_cast<unsigned char>(c);
      h *= 1099511628211ULL;
    }
  }
  return h;
}

std::string hex(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

std::vector<std::pair<std::string, std::string>> RunMetadata::fields() const {
  std::vector<std::pair<std::string, std::string>> out{{"tool", std::string("scarforge ") + kToolVersion},
                                                       {"command", command},
                                                       {"model", model},
                                                       {"L", std::to_string(length)},
                                                       {"config_hash", hex(hash())}};
  out.insert(out.end(), summary.begin(), summary.end());
  return out;
}

std::string format_number(double v) {
  if (v == 0.0) return "0";  // folds -0
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string to_csv(const RunMetadata& meta, const Table& table) {
  std::ostringstream os;
  for (const auto& [k, v] : meta.fields()) os << "# " << k << '=' << v << '\n';
  for (std::size_t i = 0; i < table.columns.size(); ++i) os << (i ? "," : "") << table.columns[i];
  os << '\n';
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size()) throw ConfigError("CSV row width does not match the header");
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << cell_text(row[i]);
    os << '\n';
  }
  return os.str();
}

void write_csv(const std::string& path, const RunMetadata& meta, const Table& table) {
  const auto text = to_csv(meta, table);
  auto out = open_output(path);
  out << text;
  if (!out) throw OutputError("failed writing " + path);
}

void write_json(const std::string& path, const RunMetadata& meta, const nlohmann::json& payload) {
  nlohmann::json m = nlohmann::json::object();
  for (const auto& [k, v] : meta.fields()) m[k] = v;
  m["config"] = meta.config;
  auto out = open_output(path);
  out << nlohmann::json{{"meta", m}, {"data", payload}}.dump(2) << '\n';
  if (!out) throw OutputError("failed writing " + path);
}

bool wants_svg(const std::string& path) {
  return path.size() >= 4 && path.compare(path.size() - 4, 4, ".svg") == 0;
}

void write_svg(const std::string& path, const RunMetadata& meta, PlotKind kind, const std::string& x_label,
               const std::string& y_label, const std::vector<PlotSeries>& series) {
  constexpr double W = 720, H = 480, left = 80, right = 160, top = 30, bottom = 60;
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& s : series) {
    for (double v : s.x) x0 = std::min(x0, v), x1 = std::max(x1, v);
    for (double v : s.y) y0 = std::min(y0, v), y1 = std::max(y1, v);
  }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y1 = y0 + 1;
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad;
  y1 += pad;
  const auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * (W - left - right); };
  const auto py = [&](double y) { return H - bottom - (y - y0) / (y1 - y0) * (H - top - bottom); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n<!--\n";
  for (const auto& [k, v] : meta.fields()) os << k << '=' << xml_escape(v) << '\n';
  os << "-->\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<g stroke=\"black\" fill=\"none\"><rect x=\"" << left << "\" y=\"" << top << "\" width=\""
     << W - left - right << "\" height=\"" << H - top - bottom << "\"/></g>\n";
  os << "<g font-family=\"sans-serif\" font-size=\"11\">\n";
  const double xs = tick_step(x1 - x0, 6), ys = tick_step(y1 - y0, 6);
  for (double t = std::ceil(x0 / xs) * xs; t <= x1 + 1e-9 * xs; t += xs) {
    os << "<text x=\"" << px(t) << "\" y=\"" << H - bottom + 16 << "\" text-anchor=\"middle\">"
       << format_number(std::abs(t) < 1e-12 * xs ? 0.0 : t) << "</text>\n";
  }
  for (double t = std::ceil(y0 / ys) * ys; t <= y1 + 1e-9 * ys; t += ys) {
    os << "<text x=\"" << left - 6 << "\" y=\"" << py(t) + 4 << "\" text-anchor=\"end\">"
       << format_number(std::abs(t) < 1e-12 * ys ? 0.0 : t) << "</text>\n";
  }
  os << "<text x=\"" << (left + W - right) / 2 << "\" y=\"" << H - 18 << "\" text-anchor=\"middle\">"
     << xml_escape(x_label) << "</text>\n";
  os << "<text transform=\"translate(18," << (top + H - bottom) / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
     << xml_escape(y_label) << "</text>\n</g>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = colors[k % std::size(colors)];
    if (kind == PlotKind::Line) {
      os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.2\" points=\"";
      for (std::size_t i = 0; i < s.x.size(); ++i) os << format_number(px(s.x[i])) << ',' << format_number(py(s.y[i])) << ' ';
      os << "\"/>\n";
    } else {
      os << "<g fill=\"" << color << "\" stroke=\"black\">\n";
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        const double cx = px(s.x[i]), cy = py(s.y[i]);
        if (i < s.highlight.size() && s.highlight[i]) {
          os << "<path d=\"M" << cx - 5 << ' ' << cy - 5 << "L" << cx + 5 << ' ' << cy + 5 << "M" << cx - 5 << ' '
             << cy + 5 << "L" << cx + 5 << ' ' << cy - 5 << "\" stroke-width=\"2\"/>\n";
        } else {
          os << "<circle cx=\"" << format_number(cx) << "\" cy=\"" << format_number(cy)
             << "\" r=\"2\" stroke=\"none\"/>\n";
        }
      }
      os << "</g>\n";
    }
    const double ly = top + 16 + 18 * double(k);
    os << "<rect x=\"" << W - right + 12 << "\" y=\"" << ly - 9 << "\" width=\"12\" height=\"10\" fill=\"" << color
       << "\"/><text x=\"" << W - right + 30 << "\" y=\"" << ly << "\" font-family=\"sans-serif\" font-size=\"11\">"
       << xml_escape(s.name) << "</text>\n";
  }
  os << "</svg>\n";
  auto out = open_output(path);
  out << os.str();
  if (!out) throw OutputError("failed writing " + path);
}

}  // namespace scarforge
