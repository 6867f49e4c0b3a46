#include "noisybench/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "noisybench/errors.hpp"
#include "json_util.hpp"

namespace noisybench::plot {

namespace {

// matplotlib's default categorical palette; planners cycle through it in
// name order so a planner keeps its color across runs.
const char* const kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
                                "#bcbd22", "#17becf"};
constexpr int kPaletteSize = 10;

struct Series {
  std::string planner;
  std::vector<double> mean;
  std::vector<double> lo;
  std::vector<double> hi;
};

std::string coord(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

void write_svg(const std::filesystem::path& path, const std::string& target,
               const std::vector<Series>& series, std::size_t length,
               const RenderOptions& options) {
  const double w = options.width;
  const double h = options.height;
  const double left = 78.0, right = w - 190.0, top = 46.0, bottom = h - 58.0;

  double y_lo = series.front().lo.front();
  double y_hi = y_lo;
  for (const Series& s : series) {
    for (double v : s.lo) y_lo = std::min(y_lo, v);
    for (double v : s.hi) y_hi = std::max(y_hi, v);
  }
  if (y_hi == y_lo) {
    y_lo -= 1.0;
    y_hi += 1.0;
  }

  const auto sx = [&](double iter) {
    return length == 1 ? (left + right) / 2.0
                       : left + (iter - 1.0) / (static_cast<double>(length) - 1.0) *
                                    (right - left);
  };
  const auto sy = [&](double v) {
    return bottom - (v - y_lo) / (y_hi - y_lo) * (bottom - top);
  };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << options.width
      << ' ' << options.height << "\" font-family=\"sans-serif\">\n";
  svg << "  <rect width=\"" << options.width << "\" height=\"" << options.height
      << "\" fill=\"white\"/>\n";
  svg << "  <text x=\"" << coord((left + right) / 2.0)
      << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" << escape_xml(target)
      << "</text>\n";

  // Gridlines and tick labels, five per axis.
  for (int i = 0; i <= 4; ++i) {
    const double f = i / 4.0;
    const double gx = left + f * (right - left);
    const double gy = bottom - f * (bottom - top);
    const double iter = 1.0 + f * (static_cast<double>(length) - 1.0);
    const double val = y_lo + f * (y_hi - y_lo);
    svg << "  <line x1=\"" << coord(gx) << "\" y1=\"" << coord(top) << "\" x2=\""
        << coord(gx) << "\" y2=\"" << coord(bottom)
        << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    svg << "  <line x1=\"" << coord(left) << "\" y1=\"" << coord(gy) << "\" x2=\""
        << coord(right) << "\" y2=\"" << coord(gy)
        << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    svg << "  <text x=\"" << coord(gx) << "\" y=\"" << coord(bottom + 20.0)
        << "\" text-anchor=\"middle\" font-size=\"12\">"
        << tick_label(std::round(iter)) << "</text>\n";
    svg << "  <text x=\"" << coord(left - 8.0) << "\" y=\"" << coord(gy + 4.0)
        << "\" text-anchor=\"end\" font-size=\"12\">" << tick_label(val)
        << "</text>\n";
  }
  svg << "  <text x=\"" << coord((left + right) / 2.0) << "\" y=\""
      << coord(h - 16.0)
      << "\" text-anchor=\"middle\" font-size=\"13\">iteration</text>\n";
  svg << "  <text x=\"20\" y=\"" << coord((top + bottom) / 2.0)
      << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 20 "
      << coord((top + bottom) / 2.0) << ")\">best value so far</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const Series& s = series[k];
    const char* color = kPalette[k % kPaletteSize];

    svg << "  <polygon fill=\"" << color << "\" fill-opacity=\"0.18\" stroke=\"none\" points=\"";
    for (std::size_t i = 0; i < length; ++i) {
      svg << coord(sx(static_cast<double>(i + 1))) << ',' << coord(sy(s.hi[i])) << ' ';
    }
    for (std::size_t i = length; i-- > 0;) {
      svg << coord(sx(static_cast<double>(i + 1))) << ',' << coord(sy(s.lo[i]));
      if (i != 0) svg << ' ';
    }
    svg << "\"/>\n";

    svg << "  <polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.6\" points=\"";
    for (std::size_t i = 0; i < length; ++i) {
      if (i != 0) svg << ' ';
      svg << coord(sx(static_cast<double>(i + 1))) << ',' << coord(sy(s.mean[i]));
    }
    svg << "\"/>\n";

    const double ly = top + 8.0 + 20.0 * static_cast<double>(k);
    svg << "  <line x1=\"" << coord(right + 12.0) << "\" y1=\"" << coord(ly)
        << "\" x2=\"" << coord(right + 36.0) << "\" y2=\"" << coord(ly)
        << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    svg << "  <text x=\"" << coord(right + 42.0) << "\" y=\"" << coord(ly + 4.0)
        << "\" font-size=\"12\">" << escape_xml(s.planner) << "</text>\n";
  }
  svg << "</svg>\n";

  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << svg.str();
}

void write_csv(const std::filesystem::path& path, const std::vector<Series>& series,
               std::size_t length) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << "iteration";
  for (const Series& s : series) {
    out << ',' << s.planner << "/mean," << s.planner << "/min," << s.planner << "/max";
  }
  out << '\n';
  for (std::size_t i = 0; i < length; ++i) {
    out << (i + 1);
    for (const Series& s : series) {
      out << ',' << detail::format_double(s.mean[i]) << ','
          << detail::format_double(s.lo[i]) << ',' << detail::format_double(s.hi[i]);
    }
    out << '\n';
  }
}

std::string sanitize_filename(const std::string& id) {
  std::string out = id;
  for (char& c : out) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '_' || c == '.' || c == '-';
    if (!ok) c = '-';
  }
  return out;
}

}  // namespace

std::vector<RenderedTarget> render(const Database& db, const std::filesystem::path& dir,
                                   const RenderOptions& options) {
  if (db.campaigns().empty()) throw ValidationError("database holds no campaigns");
  if (options.width < 320 || options.height < 240) {
    throw ConfigError("plot size is too small to lay out");
  }

  // target -> planner -> completed best-so-far traces, in database order so
  // repeated renders agree byte for byte.
  std::map<std::string, std::map<std::string, std::vector<std::vector<double>>>> grouped;
  for (const Campaign& c : db.campaigns()) {
    if (!c.error().empty() || c.observations().empty()) continue;
    grouped[c.surface_id()][c.planner_name()].push_back(best_so_far(c));
  }
  if (grouped.empty()) {
    throw ValidationError("database holds no completed campaigns to plot");
  }

  std::filesystem::create_directories(dir);
  std::vector<RenderedTarget> rendered;
  for (const auto& [target, by_planner] : grouped) {
    std::size_t length = SIZE_MAX;
    for (const auto& [planner, traces] : by_planner) {
      for (const auto& t : traces) length = std::min(length, t.size());
    }

    std::vector<Series> series;
    for (const auto& [planner, traces] : by_planner) {
      Series s;
      s.planner = planner;
      s.mean.assign(length, 0.0);
      s.lo.assign(length, traces.front()[0]);
      s.hi.assign(length, traces.front()[0]);
      for (std::size_t i = 0; i < length; ++i) {
        double total = 0.0;
        double lo = traces.front()[i];
        double hi = traces.front()[i];
        for (const auto& t : traces) {
          total += t[i];
          lo = std::min(lo, t[i]);
          hi = std::max(hi, t[i]);
        }
        s.mean[i] = total / static_cast<double>(traces.size());
        s.lo[i] = lo;
        s.hi[i] = hi;
      }
      series.push_back(std::move(s));
    }

    RenderedTarget out;
    out.target = target;
    out.svg = dir / (sanitize_filename(target) + ".svg");
    out.csv = dir / (sanitize_filename(target) + ".csv");
    write_svg(out.svg, target, series, length, options);
    write_csv(out.csv, series, length);
    rendered.push_back(std::move(out));
  }
  return rendered;
}

}  // namespace noisybench::plot
