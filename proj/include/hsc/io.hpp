#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "hsc/bounds.hpp"
#include "hsc/coupling.hpp"
#include "hsc/geometry.hpp"
#include "hsc/percolation.hpp"

namespace hsc::io {

inline constexpr std::string_view sweep_schema = "# hsc-sweep v1";
inline constexpr std::string_view sweep_header =
    "dimension,radius,intensity,box_side,replicas,statistic,value,std_error";
inline constexpr std::string_view bounds_schema = "# hsc-bounds v1";
inline constexpr std::string_view bounds_header = "dimension,quantity,kind,lower,upper,source";
inline constexpr std::string_view samples_schema = "# hsc-samples v1";

/// Shortest decimal text that parses back to the same double.
inline std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
  if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw std::invalid_argument("not a number: '" + std::string(s) + "'");
  return v;
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    out.emplace_back(s.substr(start, pos == std::string_view::npos ? s.npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline std::vector<double> parse_list(std::string_view s) {
  std::vector<double> out;
  if (s.empty()) return out;
  for (const auto& t : split(s, ',')) out.push_back(parse_double(t));
  return out;
}

/// Points written as "x,y;x,y;..." (coordinates separated by commas,
/// points by semicolons). Empty text is the empty configuration.
template <std::size_t D>
Configuration<D> parse_points(std::string_view s) {
  std::vector<Point<D>> pts;
  if (s.empty()) return {};
  for (const auto& tok : split(s, ';')) {
    if (tok.empty()) continue;
    const auto c = parse_list(tok);
    if (c.size() != D) throw std::invalid_argument("point '" + tok + "' has wrong dimension");
    Point<D> p;
    std::copy(c.begin(), c.end(), p.begin());
    pts.push_back(p);
  }
  return Configuration<D>(std::move(pts));
}

inline void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << sweep_schema << '\n' << sweep_header << '\n';
  for (const auto& r : rows)
    os << r.dimension << ',' << format_double(r.radius) << ',' << format_double(r.intensity) << ','
       << format_double(r.box_side) << ',' << r.replicas << ',' << r.statistic << ','
       << format_double(r.value) << ',' << format_double(r.std_error) << '\n';
}

inline std::vector<SweepRow> read_sweep_csv(std::istream& is) {
  std::vector<SweepRow> rows;
  std::string line;
  bool header_seen = false;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (!header_seen) {
      if (line != sweep_header) throw std::invalid_argument("unexpected sweep header: " + line);
      header_seen = true;
      continue;
    }
    const auto f = split(line, ',');
    if (f.size() != 8) throw std::invalid_argument("malformed sweep row: " + line);
    SweepRow r;
    r.dimension = static_cast<std::size_t>(std::stoull(f[0]));
    r.radius = parse_double(f[1]);
    r.intensity = parse_double(f[2]);
    r.box_side = parse_double(f[3]);
    r.replicas = static_cast<std::size_t>(std::stoull(f[4]));
    r.statistic = f[5];
    r.value = parse_double(f[6]);
    r.std_error = parse_double(f[7]);
    rows.push_back(r);
  }
  return rows;
}

inline void write_bounds_csv(std::ostream& os, const std::vector<BoundsRow>& rows) {
  os << bounds_schema << '\n' << bounds_header << '\n';
  const auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
  for (const auto& r : rows)
    os << r.dimension << ',' << r.quantity << ',' << to_string(r.kind) << ',' << opt(r.lower) << ','
       << opt(r.upper) << ',' << r.source << '\n';
}

inline std::vector<BoundsRow> read_bounds_csv(std::istream& is) {
  std::vector<BoundsRow> rows;
  std::string line;
  bool header_seen = false;
  while (std::getline(is, line)) {
    if (line.empty() || line.front() == '#') continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    const auto f = split(line, ',');
    if (f.size() != 6) throw std::invalid_argument("malformed bounds row: " + line);
    BoundsRow r;
    r.dimension = static_cast<std::size_t>(std::stoull(f[0]));
    r.quantity = f[1];
    if (f[2] == "bound") r.kind = BoundKind::bound;
    else if (f[2] == "exact") r.kind = BoundKind::exact;
    else if (f[2] == "limit") r.kind = BoundKind::limit;
    else r.kind = BoundKind::conjecture;
    if (!f[3].empty()) r.lower = parse_double(f[3]);
    if (!f[4].empty()) r.upper = parse_double(f[4]);
    r.source = f[5];
    rows.push_back(r);
  }
  return rows;
}

/// Aligned plain-text table with 4 significant digits.
inline void write_bounds_text(std::ostream& os, const std::vector<BoundsRow>& rows) {
  const auto fmt = [](const std::optional<double>& v) -> std::string {
    if (!v) return "-";
    if (std::isinf(*v)) return "inf";
    std::ostringstream s;
    s.precision(4);
    s << *v;
    return s.str();
  };
  char line[256];
  std::snprintf(line, sizeof line, "%-4s %-44s %-11s %-10s %-10s %s\n", "d", "quantity", "kind",
                "lower", "upper", "source");
  os << line;
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%-4zu %-44s %-11s %-10s %-10s %s\n", r.dimension,
                  r.quantity.c_str(), to_string(r.kind), fmt(r.lower).c_str(),
                  fmt(r.upper).c_str(), r.source.c_str());
    os << line;
  }
}

template <std::size_t D>
nlohmann::json points_json(const Configuration<D>& c) {
  nlohmann::json a = nlohmann::json::array();
  for (const auto& p : c) a.push_back(std::vector<double>(p.begin(), p.end()));
  return a;
}

template <std::size_t D>
Configuration<D> points_from_json(const nlohmann::json& a) {
  std::vector<Point<D>> pts;
  for (const auto& e : a) {
    const auto v = e.get<std::vector<double>>();
    if (v.size() != D) throw std::invalid_argument("sample point has wrong dimension");
    Point<D> p;
    std::copy(v.begin(), v.end(), p.begin());
    pts.push_back(p);
  }
  return Configuration<D>(std::move(pts));
}

/// One line-delimited sample record.
template <std::size_t D>
struct SampleRecord {
  std::uint64_t replica = 0;
  std::uint64_t seed = 0;
  Configuration<D> points1, points2, points3;

  friend bool operator==(const SampleRecord&, const SampleRecord&) = default;
};

inline void write_samples_header(std::ostream& os, std::size_t dim) {
  os << samples_schema << " dim=" << dim << '\n';
}

template <std::size_t D>
void write_sample(std::ostream& os, const SampleRecord<D>& r) {
  nlohmann::json j;
  j["replica"] = r.replica;
  j["seed"] = r.seed;
  j["points1"] = points_json(r.points1);
  j["points2"] = points_json(r.points2);
  j["points3"] = points_json(r.points3);
  os << j.dump() << '\n';
}

template <std::size_t D>
std::vector<SampleRecord<D>> read_samples(std::istream& is) {
  std::vector<SampleRecord<D>> out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line.front() == '#') continue;
    const auto j = nlohmann::json::parse(line);
    SampleRecord<D> r;
    r.replica = j.at("replica").get<std::uint64_t>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.points1 = points_from_json<D>(j.at("points1"));
    r.points2 = points_from_json<D>(j.at("points2"));
    r.points3 = points_from_json<D>(j.at("points3"));
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace hsc::io
