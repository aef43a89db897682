#pragma once

#include "descon/verify.hpp"

#include <json.hpp>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace descon {

inline constexpr const char* kTrajectoryCsvHeader =
    "trajectory_id,kind,k,t_seconds,x_m,vx_mps,y_m,vy_mps";

namespace detail {
inline std::string trim_csv(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}
}  // namespace detail

inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

struct LabeledTrajectory {
  long id = 0;
  std::string kind;
  Matrix states;  // (N+1) x 4, (x, vx, y, vy)
};

inline void write_trajectory_csv(std::ostream& out,
                                 const std::vector<LabeledTrajectory>& trajectories, double dt) {
  out << kTrajectoryCsvHeader << '\n';
  for (const auto& t : trajectories) {
    for (Eigen::Index k = 0; k < t.states.rows(); ++k) {
      out << t.id << ',' << t.kind << ',' << k << ','
          << format_number(static_cast<double>(k) * dt) << ',' << format_number(t.states(k, 0))
          << ',' << format_number(t.states(k, 1)) << ',' << format_number(t.states(k, 2)) << ','
          << format_number(t.states(k, 3)) << '\n';
    }
  }
}

struct TrajectorySample {
  long id = 0;
  std::string kind;
  int k = 0;
  double t = 0, x = 0, vx = 0, y = 0, vy = 0;
};

inline std::vector<TrajectorySample> read_trajectory_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || detail::trim_csv(line) != kTrajectoryCsvHeader)
    throw std::runtime_error("trajectory csv: missing or unexpected header");
  std::vector<TrajectorySample> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim_csv(line).empty()) continue;
    std::array<std::string, 8> fields;
    std::size_t field = 0;
    std::string cur;
    for (char ch : line) {
      if (ch == ',') {
        if (field >= fields.size())
          throw std::runtime_error("trajectory csv: too many fields on line " +
                                   std::to_string(line_no));
        fields[field++] = cur;
        cur.clear();
      } else {
        cur += ch;
      }
    }
    if (field != fields.size() - 1)
      throw std::runtime_error("trajectory csv: wrong field count on line " +
                               std::to_string(line_no));
    fields[field] = detail::trim_csv(cur);
    try {
      TrajectorySample s;
      s.id = std::stol(fields[0]);
      s.kind = fields[1];
      s.k = std::stoi(fields[2]);
      s.t = std::stod(fields[3]);
      s.x = std::stod(fields[4]);
      s.vx = std::stod(fields[5]);
      s.y = std::stod(fields[6]);
      s.vy = std::stod(fields[7]);
      rows.push_back(std::move(s));
    } catch (const std::exception&) {
      throw std::runtime_error("trajectory csv: malformed value on line " +
                               std::to_string(line_no));
    }
  }
  return rows;
}

namespace detail {

struct SvgMapper {
  double min_x = 0, max_x = 1, min_y = 0, max_y = 1;
  double width = 800, height = 600, margin = 60;

  double px(double x) const {
    return margin + (x - min_x) / (max_x - min_x) * (width - 2 * margin);
  }
  double py(double y) const {
    return height - margin - (y - min_y) / (max_y - min_y) * (height - 2 * margin);
  }
};

inline void expand_degenerate(double& lo, double& hi) {
  if (hi - lo < 1e-9) {
    lo -= 1.0;
    hi += 1.0;
  }
  const double pad = 0.05 * (hi - lo);
  lo -= pad;
  hi += pad;
}

struct SvgSeries {
  std::string kind;
  long id = 0;
  std::vector<std::array<double, 2>> points;
};

template <typename XOf, typename YOf>
std::vector<SvgSeries> collect_series(const std::vector<TrajectorySample>& rows, XOf x_of,
                                      YOf y_of) {
  std::map<std::pair<std::string, long>, std::size_t> index;
  std::vector<SvgSeries> series;
  for (const auto& r : rows) {
    const auto key = std::make_pair(r.kind, r.id);
    auto it = index.find(key);
    if (it == index.end()) {
      it = index.emplace(key, series.size()).first;
      series.push_back({r.kind, r.id, {}});
    }
    series[it->second].points.push_back({x_of(r), y_of(r)});
  }
  return series;
}

inline void write_svg(std::ostream& out, const std::vector<SvgSeries>& series,
                      std::optional<std::array<double, 2>> marker, const std::string& x_label,
                      const std::string& y_label) {
  SvgMapper map;
  bool any = false;
  for (const auto& s : series)
    for (const auto& p : s.points) {
      if (!any) {
        map.min_x = map.max_x = p[0];
        map.min_y = map.max_y = p[1];
        any = true;
      }
      map.min_x = std::min(map.min_x, p[0]);
      map.max_x = std::max(map.max_x, p[0]);
      map.min_y = std::min(map.min_y, p[1]);
      map.max_y = std::max(map.max_y, p[1]);
    }
  if (marker) {
    if (!any) {
      map.min_x = map.max_x = (*marker)[0];
      map.min_y = map.max_y = (*marker)[1];
      any = true;
    }
    map.min_x = std::min(map.min_x, (*marker)[0]);
    map.max_x = std::max(map.max_x, (*marker)[0]);
    map.min_y = std::min(map.min_y, (*marker)[1]);
    map.max_y = std::max(map.max_y, (*marker)[1]);
  }
  expand_degenerate(map.min_x, map.max_x);
  expand_degenerate(map.min_y, map.max_y);

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << map.width << "\" height=\""
      << map.height << "\" viewBox=\"0 0 " << map.width << " " << map.height << "\">\n";
  out << "  <rect x=\"" << map.margin << "\" y=\"" << map.margin << "\" width=\""
      << map.width - 2 * map.margin << "\" height=\"" << map.height - 2 * map.margin
      << "\" fill=\"none\" stroke=\"#333333\"/>\n";
  out << "  <text x=\"" << map.width / 2 << "\" y=\"" << map.height - map.margin / 3
      << "\" text-anchor=\"middle\" font-size=\"14\">" << x_label << "</text>\n";
  out << "  <text x=\"" << map.margin / 3 << "\" y=\"" << map.height / 2
      << "\" text-anchor=\"middle\" font-size=\"14\" transform=\"rotate(-90 " << map.margin / 3
      << " " << map.height / 2 << ")\">" << y_label << "</text>\n";
  for (const auto& s : series) {
    const char* color = s.kind == "relaxed" ? "#d62728" : "#1f77b4";
    out << "  <polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1\" points=\"";
    for (std::size_t i = 0; i < s.points.size(); ++i) {
      if (i) out << ' ';
      out << format_number(map.px(s.points[i][0])) << ',' << format_number(map.py(s.points[i][1]));
    }
    out << "\"/>\n";
  }
  if (marker)
    out << "  <circle cx=\"" << format_number(map.px((*marker)[0])) << "\" cy=\""
        << format_number(map.py((*marker)[1])) << "\" r=\"5\" fill=\"#2ca02c\"/>\n";
  out << "</svg>\n";
}

}  // namespace detail

/// Position-plane figure: one polyline per (kind, trajectory id).
inline void write_xy_svg(std::ostream& out, const std::vector<TrajectorySample>& rows,
                         std::optional<std::array<double, 2>> destination) {
  const auto series = detail::collect_series(
      rows, [](const TrajectorySample& r) { return r.x; },
      [](const TrajectorySample& r) { return r.y; });
  detail::write_svg(out, series, destination, "x [m]", "y [m]");
}

/// Velocity-component-vs-time figure.
inline void write_velocity_svg(std::ostream& out, const std::vector<TrajectorySample>& rows,
                               bool eastward) {
  const auto series = detail::collect_series(
      rows, [](const TrajectorySample& r) { return r.t; },
      [eastward](const TrajectorySample& r) { return eastward ? r.vx : r.vy; });
  detail::write_svg(out, series, std::nullopt, "t [s]",
                    eastward ? "vx [m/s]" : "vy [m/s]");
}

inline nlohmann::json report_json(const VerificationReport& r) {
  return nlohmann::json{{"proposition", r.proposition},
                        {"scenario", r.scenario},
                        {"tolerance", r.tolerance},
                        {"margins", r.margins},
                        {"pass", r.pass}};
}

inline void write_report(const std::filesystem::path& file, const VerificationReport& r) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot open report file " + file.string());
  out << report_json(r).dump(2) << '\n';
  if (!out) throw std::runtime_error("cannot write report file " + file.string());
}

}  // namespace descon
