#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace dysonlab::cli {

namespace {

constexpr double kWidth = 640, kHeight = 420, kLeft = 70, kRight = 150, kTop = 40, kBottom = 50;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out += c;
  }
  return out;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void settle() {
    if (!(lo <= hi)) lo = 0.0, hi = 1.0;
    if (lo == hi) lo -= 0.5, hi += 0.5;
  }
};

}  // namespace

SvgChart::SvgChart(std::string title, std::string x_label, std::string y_label)
    : title_(std::move(title)), x_label_(std::move(x_label)), y_label_(std::move(y_label)) {}

void SvgChart::line(const std::vector<double>& x, const std::vector<double>& y, const std::string& colour,
                    const std::string& label) {
  series_.push_back({x, y, {}, colour, label, Series::kLine});
}

void SvgChart::band(const std::vector<double>& x, const std::vector<double>& lo, const std::vector<double>& hi,
                    const std::string& colour) {
  series_.push_back({x, lo, hi, colour, "", Series::kBand});
}

void SvgChart::heatmap(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& values,
                       const std::string& colour) {
  heat_.push_back({x, y, values, colour});
}

std::string SvgChart::render() const {
  auto ty = [&](double v) { return log_y_ ? (v > 0.0 ? std::log10(v) : std::nan("")) : v; };
  Range rx, ry;
  for (const auto& s : series_) {
    for (double v : s.x) rx.add(v);
    for (double v : s.y) ry.add(ty(v));
    for (double v : s.y2) ry.add(ty(v));
  }
  for (const auto& h : heat_) {
    for (double v : h.x) rx.add(v);
    for (double v : h.y) ry.add(v);
  }
  rx.settle();
  ry.settle();
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto px = [&](double v) { return kLeft + (v - rx.lo) / (rx.hi - rx.lo) * pw; };
  auto py = [&](double v) { return kTop + ph - (ty(v) - ry.lo) / (ry.hi - ry.lo) * ph; };
  auto py_raw = [&](double v) { return kTop + ph - (v - ry.lo) / (ry.hi - ry.lo) * ph; };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << num(kLeft) << "\" y=\"20\" font-size=\"13\">" << escape(title_) << "</text>\n";

  for (const auto& h : heat_) {
    Range rv;
    for (double v : h.v) rv.add(v);
    rv.settle();
    const double cw = h.x.size() > 1 ? pw / static_cast<double>(h.x.size()) : pw;
    const double ch = h.y.size() > 1 ? ph / static_cast<double>(h.y.size()) : ph;
    for (std::size_t i = 0; i < h.x.size(); ++i) {
      for (std::size_t j = 0; j < h.y.size(); ++j) {
        const double v = h.v[i * h.y.size() + j];
        const double opacity = std::isfinite(v) ? (v - rv.lo) / (rv.hi - rv.lo) : 0.0;
        o << "<rect x=\"" << num(px(h.x[i]) - 0.5 * cw) << "\" y=\"" << num(py_raw(h.y[j]) - 0.5 * ch)
          << "\" width=\"" << num(cw) << "\" height=\"" << num(ch) << "\" fill=\"" << h.colour
          << "\" fill-opacity=\"" << num(opacity) << "\"/>\n";
      }
    }
    o << "<text x=\"" << num(kWidth - kRight + 10) << "\" y=\"" << num(kTop + 12) << "\">max " << tick(rv.hi)
      << "</text>\n";
  }

  for (const auto& s : series_) {
    if (s.kind != Series::kBand) continue;
    o << "<polygon fill=\"" << s.colour << "\" fill-opacity=\"0.2\" stroke=\"none\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) o << num(px(s.x[i])) << "," << num(py(s.y2[i])) << " ";
    for (std::size_t i = s.x.size(); i-- > 0;) o << num(px(s.x[i])) << "," << num(py(s.y[i])) << " ";
    o << "\"/>\n";
  }
  int legend = 0;
  for (const auto& s : series_) {
    if (s.kind != Series::kLine) continue;
    o << "<polyline fill=\"none\" stroke=\"" << s.colour << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      const double yv = py(s.y[i]);
      if (std::isfinite(yv)) o << num(px(s.x[i])) << "," << num(yv) << " ";
    }
    o << "\"/>\n";
    if (!s.label.empty()) {
      const double ly = kTop + 14.0 * legend++;
      o << "<line x1=\"" << num(kWidth - kRight + 10) << "\" y1=\"" << num(ly) << "\" x2=\""
        << num(kWidth - kRight + 30) << "\" y2=\"" << num(ly) << "\" stroke=\"" << s.colour << "\"/>\n";
      o << "<text x=\"" << num(kWidth - kRight + 34) << "\" y=\"" << num(ly + 4) << "\">" << escape(s.label)
        << "</text>\n";
    }
  }

  // Axes and ticks.
  o << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(kTop + ph) << "\" x2=\"" << num(kLeft + pw) << "\" y2=\""
    << num(kTop + ph) << "\" stroke=\"black\"/>\n";
  o << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(kTop) << "\" x2=\"" << num(kLeft) << "\" y2=\""
    << num(kTop + ph) << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double vx = rx.lo + (rx.hi - rx.lo) * k / 4.0;
    const double vy = ry.lo + (ry.hi - ry.lo) * k / 4.0;
    o << "<text x=\"" << num(px(vx)) << "\" y=\"" << num(kTop + ph + 15) << "\" text-anchor=\"middle\">" << tick(vx)
      << "</text>\n";
    o << "<text x=\"" << num(kLeft - 5) << "\" y=\"" << num(py_raw(vy) + 4) << "\" text-anchor=\"end\">"
      << (log_y_ ? "1e" + tick(vy) : tick(vy)) << "</text>\n";
  }
  o << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << num(kHeight - 12) << "\" text-anchor=\"middle\">"
    << escape(x_label_) << "</text>\n";
  o << "<text x=\"15\" y=\"" << num(kTop + ph / 2) << "\" transform=\"rotate(-90 15 " << num(kTop + ph / 2)
    << ")\" text-anchor=\"middle\">" << escape(y_label_) << "</text>\n";
  o << "</svg>\n";
  return o.str();
}

}  // namespace dysonlab::cli
