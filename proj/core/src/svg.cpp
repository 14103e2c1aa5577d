#include "contestlab/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace contestlab {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

const char* region_fill(NashId id) {
  switch (id) {
    case NashId::NE1: return "#f7f7f7";
    case NashId::NE2: return "#ececf7";
    case NashId::NE3: return "#e0e0f0";
    case NashId::NE4: return "#f0e0d8";
    case NashId::NE5: return "#edd2c2";
    case NashId::NE6: return "#e8c4ac";
    case NashId::NE7: return "#e3b696";
  }
  return "#ffffff";
}

}  // namespace

void write_sweep_svg(const SweepResult& sweep, std::ostream& out,
                     const std::string& title) {
  const double W = 900, H = 520;
  const double L = 70, R = 30, T = 50, B = 60;
  const double plot_w = W - L - R, plot_h = H - T - B;

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W
      << "\" height=\"" << H << "\" viewBox=\"0 0 " << W << " " << H
      << "\">\n";
  out << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
  out << "<text x=\"" << W / 2 << "\" y=\"28\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"18\">" << title << "</text>\n";

  if (sweep.rows.empty()) {
    out << "</svg>\n";
    return;
  }

  double xmin = std::log10(sweep.rows.front().c_s);
  double xmax = std::log10(sweep.rows.back().c_s);
  if (xmax <= xmin) xmax = xmin + 1.0;
  double ymin = 0.0, ymax = 0.0;
  for (const SweepRow& r : sweep.rows) {
    ymax = std::max({ymax, r.utility_high, r.utility_low});
    ymin = std::min({ymin, r.utility_high, r.utility_low});
  }
  if (ymax <= ymin) ymax = ymin + 1.0;
  double ypad = 0.05 * (ymax - ymin);
  ymin -= ypad;
  ymax += ypad;

  auto sx = [&](double cs) {
    return L + (std::log10(cs) - xmin) / (xmax - xmin) * plot_w;
  };
  auto sy = [&](double u) { return T + (ymax - u) / (ymax - ymin) * plot_h; };

  // region shading: contiguous runs of the same label
  std::size_t i = 0;
  while (i < sweep.rows.size()) {
    std::size_t j = i;
    while (j + 1 < sweep.rows.size() &&
           sweep.rows[j + 1].label == sweep.rows[i].label)
      ++j;
    double x0 = sx(sweep.rows[i].c_s), x1 = sx(sweep.rows[j].c_s);
    out << "<rect x=\"" << fmt(x0) << "\" y=\"" << fmt(T) << "\" width=\""
        << fmt(std::max(1.0, x1 - x0)) << "\" height=\"" << fmt(plot_h)
        << "\" fill=\"" << region_fill(sweep.rows[i].label) << "\"/>\n";
    out << "<text x=\"" << fmt((x0 + x1) / 2) << "\" y=\"" << fmt(T + 18)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"12\">"
        << to_string(sweep.rows[i].label) << "</text>\n";
    i = j + 1;
  }

  auto polyline = [&](auto value, const char* color, const char* name,
                      double legend_y) {
    out << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.5\" points=\"";
    for (const SweepRow& r : sweep.rows)
      out << fmt(sx(r.c_s)) << ',' << fmt(sy(value(r))) << ' ';
    out << "\"/>\n";
    out << "<line x1=\"" << W - 190 << "\" y1=\"" << legend_y << "\" x2=\""
        << W - 160 << "\" y2=\"" << legend_y << "\" stroke=\"" << color
        << "\" stroke-width=\"1.5\"/>\n";
    out << "<text x=\"" << W - 152 << "\" y=\"" << legend_y + 4
        << "\" font-family=\"sans-serif\" font-size=\"12\">" << name
        << "</text>\n";
  };
  polyline([](const SweepRow& r) { return r.utility_high; }, "#b03a2e",
           "high type", T + 40);
  polyline([](const SweepRow& r) { return r.utility_low; }, "#1f618d",
           "low type", T + 58);

  // axes
  out << "<line x1=\"" << L << "\" y1=\"" << T + plot_h << "\" x2=\"" << W - R
      << "\" y2=\"" << T + plot_h << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\""
      << T + plot_h << "\" stroke=\"black\"/>\n";
  for (int e = int(std::ceil(xmin)); e <= int(std::floor(xmax)); ++e) {
    double x = L + (e - xmin) / (xmax - xmin) * plot_w;
    out << "<line x1=\"" << fmt(x) << "\" y1=\"" << T + plot_h << "\" x2=\""
        << fmt(x) << "\" y2=\"" << T + plot_h + 5 << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << fmt(x) << "\" y=\"" << T + plot_h + 20
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"11\">1e" << e << "</text>\n";
  }
  for (int k = 0; k <= 4; ++k) {
    double u = ymin + k * (ymax - ymin) / 4;
    double y = sy(u);
    out << "<line x1=\"" << L - 5 << "\" y1=\"" << fmt(y) << "\" x2=\"" << L
        << "\" y2=\"" << fmt(y) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << L - 8 << "\" y=\"" << fmt(y + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
           "font-size=\"11\">" << fmt(u) << "</text>\n";
  }
  out << "<text x=\"" << L + plot_w / 2 << "\" y=\"" << H - 15
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"13\">cost of sabotage</text>\n";
  out << "<text x=\"18\" y=\"" << T + plot_h / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"13\" transform=\"rotate(-90 18 " << T + plot_h / 2
      << ")\">expected utility</text>\n";
  out << "</svg>\n";
}

}  // namespace contestlab
