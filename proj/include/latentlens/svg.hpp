#ifndef LATENTLENS_SVG_HPP
#define LATENTLENS_SVG_HPP

#include <array>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "latentlens/corpus.hpp"
#include "latentlens/errors.hpp"
#include "latentlens/interpret.hpp"
#include "latentlens/projection.hpp"

namespace latentlens {

// Fixed figure contract: 1000x800 canvas, 60 px margin, 4 px points,
// arrows anchored at the point-cloud centroid with length 25% of the
// smaller canvas axis.
struct FigureSpec {
  double width = 1000.0;
  double height = 800.0;
  double margin = 60.0;
  double point_radius = 4.0;
  double arrow_fraction = 0.25;
};

inline const std::array<const char*, 5>& category_palette() {
  static const std::array<const char*, 5> palette = {
      "#808080", "#e6a817", "#cc3311", "#117733", "#4477aa"};
  return palette;
}

inline std::string render_svg(const Projection2D& proj,
                              const std::map<std::string, Emotion>& emotions,
                              const std::vector<GradientArrow>& arrows,
                              const FigureSpec& spec = {}) {
  if (proj.ids.empty()) throw TooFewPoints("empty projection");

  double min_x = proj.points[0][0], max_x = min_x;
  double min_y = proj.points[0][1], max_y = min_y;
  for (const auto& p : proj.points) {
    min_x = std::min(min_x, p[0]);
    max_x = std::max(max_x, p[0]);
    min_y = std::min(min_y, p[1]);
    max_y = std::max(max_y, p[1]);
  }
  const double span_x = max_x > min_x ? max_x - min_x : 1.0;
  const double span_y = max_y > min_y ? max_y - min_y : 1.0;
  const double plot_w = spec.width - 2.0 * spec.margin;
  const double plot_h = spec.height - 2.0 * spec.margin;
  auto to_screen_x = [&](double x) {
    return spec.margin + (x - min_x) / span_x * plot_w;
  };
  auto to_screen_y = [&](double y) {  // y grows upward in data space
    return spec.height - spec.margin - (y - min_y) / span_y * plot_h;
  };
  auto fmt = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return std::string(buf);
  };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
         fmt(spec.width) + "\" height=\"" + fmt(spec.height) + "\">\n";
  svg += "<defs><marker id=\"arrowhead\" markerWidth=\"10\" markerHeight=\"8\" "
         "refX=\"9\" refY=\"4\" orient=\"auto\">"
         "<polygon points=\"0 0, 10 4, 0 8\" fill=\"#222222\"/></marker></defs>\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"" + fmt(spec.width) + "\" height=\"" +
         fmt(spec.height) + "\" fill=\"#ffffff\"/>\n";

  std::set<std::size_t> present;
  double cx = 0.0, cy = 0.0;
  for (std::size_t i = 0; i < proj.ids.size(); ++i) {
    const double sx = to_screen_x(proj.points[i][0]);
    const double sy = to_screen_y(proj.points[i][1]);
    cx += sx;
    cy += sy;
    std::size_t cat = std::size_t(Emotion::neutral);
    auto it = emotions.find(proj.ids[i]);
    if (it != emotions.end()) cat = std::size_t(it->second);
    present.insert(cat);
    svg += "<circle cx=\"" + fmt(sx) + "\" cy=\"" + fmt(sy) + "\" r=\"" +
           fmt(spec.point_radius) + "\" fill=\"" + category_palette()[cat] +
           "\" fill-opacity=\"0.8\"/>\n";
  }
  cx /= double(proj.ids.size());
  cy /= double(proj.ids.size());

  const double arrow_len =
      spec.arrow_fraction * std::min(spec.width, spec.height);
  for (const auto& arrow : arrows) {
    const double ex = cx + arrow_len * arrow.dx;
    const double ey = cy - arrow_len * arrow.dy;  // y flipped on screen
    svg += "<line x1=\"" + fmt(cx) + "\" y1=\"" + fmt(cy) + "\" x2=\"" + fmt(ex) +
           "\" y2=\"" + fmt(ey) +
           "\" stroke=\"#222222\" stroke-width=\"2\" marker-end=\"url(#arrowhead)\"/>\n";
    char rbuf[16];
    std::snprintf(rbuf, sizeof(rbuf), "%.2f", arrow.r);
    svg += "<text x=\"" + fmt(ex + 6.0) + "\" y=\"" + fmt(ey) +
           "\" font-family=\"sans-serif\" font-size=\"14\" fill=\"#222222\">" +
           arrow.feature_name + " (r=" + rbuf + ")</text>\n";
  }

  double legend_y = spec.margin;
  for (std::size_t cat = 0; cat < 5; ++cat) {
    if (!present.count(cat)) continue;
    svg += "<g class=\"legend-entry\"><rect x=\"" + fmt(spec.width - spec.margin - 140.0) +
           "\" y=\"" + fmt(legend_y) + "\" width=\"12\" height=\"12\" fill=\"" +
           category_palette()[cat] + "\"/><text x=\"" +
           fmt(spec.width - spec.margin - 122.0) + "\" y=\"" + fmt(legend_y + 11.0) +
           "\" font-family=\"sans-serif\" font-size=\"14\">" +
           kEmotionNames[cat] + "</text></g>\n";
    legend_y += 20.0;
  }

  svg += "</svg>\n";
  return svg;
}

}  // namespace latentlens

#endif
