#include "ifta/render.hpp"

#include <cmath>
#include <sstream>

#include "ifta/geometry.hpp"

namespace ifta {

const std::vector<std::string>& cohort_palette() {
  static const std::vector<std::string> palette = {
      "#d62728",  // red
      "#1f77b4",  // blue
      "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
  };
  return palette;
}

std::string cohort_color(int cohort_id) {
  if (cohort_id < 0) return "#888888";
  return cohort_palette()[cohort_id % cohort_palette().size()];
}

std::string render_frame_svg(std::span<const LinkRow> links, int frame,
                             double width, double height,
                             std::span<const SensitiveLocation> locations) {
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"0 0 "
     << fmt_double(width) << " " << fmt_double(height) << "\">\n";
  os << "<rect x=\"0\" y=\"0\" width=\"" << fmt_double(width) << "\" height=\""
     << fmt_double(height) << "\" fill=\"white\" stroke=\"black\"/>\n";

  for (const auto& loc : locations)
    os << "<circle cx=\"" << fmt_double(loc.x) << "\" cy=\"" << fmt_double(loc.y)
       << "\" r=\"" << fmt_double(loc.radius)
       << "\" fill=\"none\" stroke=\"#444444\" stroke-dasharray=\"4 2\"/>\n";

  for (const auto& l : links) {
    if (l.frame != frame) continue;
    const std::string color = cohort_color(l.cohort_id);
    os << "<line x1=\"" << fmt_double(l.from_x) << "\" y1=\""
       << fmt_double(l.from_y) << "\" x2=\"" << fmt_double(l.to_x)
       << "\" y2=\"" << fmt_double(l.to_y) << "\" stroke=\"" << color
       << "\" stroke-width=\"1\"/>\n";
    // Arrow head: two short strokes off the tip.
    const double ang = std::atan2(l.to_y - l.from_y, l.to_x - l.from_x);
    const double hl = 2.5;
    for (const double off : {2.6, -2.6}) {
      const double hx = l.to_x - hl * std::cos(ang + off);
      const double hy = l.to_y - hl * std::sin(ang + off);
      os << "<line x1=\"" << fmt_double(l.to_x) << "\" y1=\""
         << fmt_double(l.to_y) << "\" x2=\"" << fmt_double(hx) << "\" y2=\""
         << fmt_double(hy) << "\" stroke=\"" << color
         << "\" stroke-width=\"1\"/>\n";
    }
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace ifta
