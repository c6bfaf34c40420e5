#include "swir/curve_io.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "swir/error.hpp"

namespace swir::metrics {

namespace {

struct Row {
  std::string method;
  double x = 0.0;
  double y = 0.0;
  std::size_t line = 0;
};

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_number(const std::string& text, std::size_t line) {
  const std::string s = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw LineError(Errc::CorruptLine, line, "not a number: '" + s + "'");
  }
  return value;
}

std::vector<Row> read_rows(std::istream& in, const std::string& x_name, const std::string& y_name) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw LineError(Errc::CorruptLine, 1, "missing header row");
  ++line_no;
  const auto header = split(line);
  if (header.size() != 3 || trim(header[0]) != "method" || trim(header[1]) != x_name ||
      trim(header[2]) != y_name) {
    throw LineError(Errc::CorruptLine, line_no, "expected header 'method," + x_name + "," + y_name + "'");
  }
  std::vector<Row> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split(line);
    if (cells.size() != 3) {
      throw LineError(Errc::CorruptLine, line_no,
                      "expected 3 columns, found " + std::to_string(cells.size()));
    }
    rows.push_back({trim(cells[0]), parse_number(cells[1], line_no), parse_number(cells[2], line_no), line_no});
  }
  return rows;
}

template <typename Point, typename MakePoint>
std::vector<std::pair<std::string, std::vector<Point>>> group(const std::vector<Row>& rows, MakePoint make) {
  std::vector<std::pair<std::string, std::vector<Point>>> groups;
  std::map<std::string, std::size_t> index;
  for (const auto& r : rows) {
    auto [it, inserted] = index.try_emplace(r.method, groups.size());
    if (inserted) groups.emplace_back(r.method, std::vector<Point>{});
    groups[it->second].second.push_back(make(r));
  }
  return groups;
}

}  // namespace

std::vector<EfficiencyCurve> read_efficiency_curves(std::istream& in) {
  const auto rows = read_rows(in, "tokens", "accuracy");
  std::vector<EfficiencyCurve> curves;
  for (auto& [method, points] :
       group<CurvePoint>(rows, [](const Row& r) { return CurvePoint{r.x, r.y}; })) {
    curves.emplace_back(method, std::move(points));
  }
  return curves;
}

std::vector<EfficiencyCurve> read_efficiency_curves(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::InvalidArgument, "cannot open " + path.string());
  return read_efficiency_curves(in);
}

void write_efficiency_curves(std::ostream& out, const std::vector<EfficiencyCurve>& curves) {
  out << "method,tokens,accuracy\n";
  out << std::setprecision(17);
  for (const auto& c : curves) {
    for (const auto& p : c.points()) out << c.method() << ',' << p.tokens << ',' << p.accuracy << '\n';
  }
}

std::vector<PassAtKCurve> read_pass_at_k_curves(std::istream& in) {
  const auto rows = read_rows(in, "k", "pass_at_k");
  for (const auto& r : rows) {
    if (!(r.x >= 1.0) || r.x != static_cast<double>(static_cast<std::size_t>(r.x))) {
      throw LineError(Errc::CorruptLine, r.line, "k must be a positive integer");
    }
  }
  std::vector<PassAtKCurve> curves;
  for (auto& [method, points] : group<std::pair<std::size_t, double>>(rows, [](const Row& r) {
         return std::pair<std::size_t, double>{static_cast<std::size_t>(r.x), r.y};
       })) {
    curves.push_back({method, std::move(points)});
  }
  return curves;
}

void write_pass_at_k_curves(std::ostream& out, const std::vector<PassAtKCurve>& curves) {
  out << "method,k,pass_at_k\n";
  out << std::setprecision(17);
  for (const auto& c : curves) {
    for (const auto& [k, v] : c.points) out << c.method << ',' << k << ',' << v << '\n';
  }
}

}  // namespace swir::metrics
