#pragma once

// Point clouds of (source, lambda) pairs: CSV export and a static two-panel
// SVG scatter plot.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "jointspec/bcl_model.hpp"
#include "jointspec/error.hpp"
#include "jointspec/rational_symbols.hpp"

namespace jointspec {

struct CloudRow {
  CPoint source;
  CPoint lambda;
  double residual = 0.0;
};

struct Cloud {
  std::size_t source_dim = 1;
  std::size_t dim = 0;
  std::vector<CloudRow> rows;
};

inline Cloud to_cloud(const VarietySample& s) {
  Cloud c{1, s.d, {}};
  c.rows.reserve(s.points.size());
  for (const auto& p : s.points) {
    CPoint z(1);
    z(0) = p.z;
    c.rows.push_back({std::move(z), p.lambda, p.residual});
  }
  return c;
}

inline Cloud to_cloud(const UnionSample& s) {
  Cloud c{s.source_dim, s.dim, {}};
  c.rows.reserve(s.points.size());
  for (const auto& p : s.points) c.rows.push_back({p.source, p.lambda, p.residual});
  return c;
}

namespace cloud_detail {

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string fmt_short(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

inline std::ofstream open(const std::string& file) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw InputError("cannot write " + file);
  return out;
}

}  // namespace cloud_detail

/// Columns re_z, im_z (re_z1, im_z1, ... for several source variables), re_l1, im_l1, ..., residual.
inline void write_cloud_csv(const Cloud& c, const std::string& file) {
  using cloud_detail::fmt;
  auto out = cloud_detail::open(file);
  if (c.source_dim == 1) {
    out << "re_z,im_z";
  } else {
    for (std::size_t i = 1; i <= c.source_dim; ++i) out << (i > 1 ? "," : "") << "re_z" << i << ",im_z" << i;
  }
  for (std::size_t j = 1; j <= c.dim; ++j) out << ",re_l" << j << ",im_l" << j;
  out << ",residual\n";
  for (const auto& r : c.rows) {
    for (Eigen::Index i = 0; i < r.source.size(); ++i) {
      out << (i > 0 ? "," : "") << fmt(r.source(i).real()) << ',' << fmt(r.source(i).imag());
    }
    for (Eigen::Index j = 0; j < r.lambda.size(); ++j) {
      out << ',' << fmt(r.lambda(j).real()) << ',' << fmt(r.lambda(j).imag());
    }
    out << ',' << fmt(r.residual) << '\n';
  }
}

struct SvgPanel {
  std::string x_label;
  std::string y_label;
  std::vector<std::pair<double, double>> points;
};

/// Panels (Re l1, Re l2) and (|l1|, |l2|); a one-coordinate cloud shows (Re l, Im l) and (|z|, |l|).
inline std::vector<SvgPanel> cloud_panels(const Cloud& c) {
  std::vector<SvgPanel> panels;
  if (c.dim >= 2) {
    panels.push_back({"Re l1", "Re l2", {}});
    panels.push_back({"|l1|", "|l2|", {}});
    for (const auto& r : c.rows) {
      panels[0].points.emplace_back(r.lambda(0).real(), r.lambda(1).real());
      panels[1].points.emplace_back(std::abs(r.lambda(0)), std::abs(r.lambda(1)));
    }
  } else if (c.dim == 1) {
    panels.push_back({"Re l", "Im l", {}});
    panels.push_back({"|z|", "|l|", {}});
    for (const auto& r : c.rows) {
      panels[0].points.emplace_back(r.lambda(0).real(), r.lambda(0).imag());
      panels[1].points.emplace_back(r.source.norm(), std::abs(r.lambda(0)));
    }
  }
  return panels;
}

/// Static SVG with one square panel per projection. At most max_points points per
/// panel are drawn, taken at a fixed stride.
inline void write_cloud_svg(const Cloud& c, const std::string& file, std::size_t max_points = 20'000) {
  using cloud_detail::fmt_short;
  const auto panels = cloud_panels(c);
  constexpr double size = 360.0, margin = 40.0;
  const double width = static_cast<double>(std::max<std::size_t>(panels.size(), 1)) * (size + 2 * margin);
  auto out = cloud_detail::open(file);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt_short(width) << "\" height=\""
      << fmt_short(size + 2 * margin) << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  for (std::size_t k = 0; k < panels.size(); ++k) {
    const auto& p = panels[k];
    double lo_x = std::numeric_limits<double>::infinity(), hi_x = -lo_x, lo_y = lo_x, hi_y = -lo_x;
    for (const auto& [x, y] : p.points) {
      lo_x = std::min(lo_x, x), hi_x = std::max(hi_x, x);
      lo_y = std::min(lo_y, y), hi_y = std::max(hi_y, y);
    }
    if (p.points.empty()) lo_x = lo_y = -1.0, hi_x = hi_y = 1.0;
    const double span = std::max({hi_x - lo_x, hi_y - lo_y, 1e-9}) * 1.05;
    const double cx = 0.5 * (lo_x + hi_x), cy = 0.5 * (lo_y + hi_y);
    const double ox = static_cast<double>(k) * (size + 2 * margin) + margin;
    auto sx = [&](double x) { return ox + (x - cx) / span * size + size / 2; };
    auto sy = [&](double y) { return margin + size / 2 - (y - cy) / span * size; };
    out << "<g>\n<rect x=\"" << fmt_short(ox) << "\" y=\"" << fmt_short(margin) << "\" width=\"" << fmt_short(size)
        << "\" height=\"" << fmt_short(size) << "\" fill=\"none\" stroke=\"black\"/>\n";
    out << "<text x=\"" << fmt_short(ox + size / 2) << "\" y=\"" << fmt_short(margin + size + 28)
        << "\" text-anchor=\"middle\">" << p.x_label << "  [" << fmt_short(cx - span / 2) << ", "
        << fmt_short(cx + span / 2) << "]</text>\n";
    out << "<text x=\"" << fmt_short(ox - 8) << "\" y=\"" << fmt_short(margin + size / 2) << "\" text-anchor=\"middle\""
        << " transform=\"rotate(-90 " << fmt_short(ox - 8) << ' ' << fmt_short(margin + size / 2) << ")\">"
        << p.y_label << "  [" << fmt_short(cy - span / 2) << ", " << fmt_short(cy + span / 2) << "]</text>\n";
    const std::size_t stride = std::max<std::size_t>(1, (p.points.size() + max_points - 1) / max_points);
    for (std::size_t i = 0; i < p.points.size(); i += stride) {
      out << "<circle cx=\"" << fmt_short(sx(p.points[i].first)) << "\" cy=\"" << fmt_short(sy(p.points[i].second))
          << "\" r=\"1.2\" fill=\"steelblue\"/>\n";
    }
    out << "</g>\n";
  }
  out << "</svg>\n";
}

}  // namespace jointspec
