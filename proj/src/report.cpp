#include "horoflow/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "horoflow/error.hpp"

namespace horo {

std::string formatNumber(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

CsvTable::CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

void CsvTable::comment(const std::string& line) { comments_.push_back(line); }

void CsvTable::row(const std::vector<double>& cells) {
  std::vector<std::string> s;
  for (double x : cells) s.push_back(formatNumber(x));
  row(s);
}

void CsvTable::row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_.size()) throw ValidationError("CSV row width does not match the header");
  std::string line;
  for (std::size_t k = 0; k < cells.size(); ++k) {
    if (k) line += ',';
    line += cells[k];
  }
  rows_.push_back(std::move(line));
}

std::string CsvTable::str() const {
  std::string out;
  for (const std::string& c : comments_) out += "# " + c + "\n";
  for (std::size_t k = 0; k < columns_.size(); ++k) out += (k ? "," : "") + columns_[k];
  out += "\n";
  for (const std::string& r : rows_) out += r + "\n";
  return out;
}

namespace {

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string header(double w, double h) {
  return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
         "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + fmt(w) + "\" height=\"" + fmt(h) +
         "\" viewBox=\"0 0 " + fmt(w) + " " + fmt(h) + "\" font-family=\"sans-serif\" font-size=\"12\">\n"
         "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

// Round tick values covering [lo, hi].
std::vector<double> ticks(double lo, double hi) {
  double span = hi - lo;
  if (!(span > 0)) return {lo};
  double base = std::pow(10.0, std::floor(std::log10(span / 5.0))), step = base;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    step = m * base;
    if (span / step <= 8) break;
  }
  std::vector<double> out;
  for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * span; t += step) out.push_back(std::abs(t) < 1e-12 * span ? 0.0 : t);
  return out;
}

std::string tickLabel(double v, bool log) {
  if (log) return "1e" + formatNumber(std::round(v));
  std::ostringstream o;
  o << v;
  return o.str();
}

}  // namespace

std::string svgPlot(const PlotSpec& spec) {
  std::size_t longest = 0;
  for (const PlotSeries& s : spec.series) longest = std::max(longest, s.label.size());
  for (const auto& [label, v] : spec.levels) longest = std::max(longest, label.size());
  // Legend column sized for roughly 7 px per character.
  const double R = std::max(160.0, 48.0 + 7.0 * static_cast<double>(longest));
  const double W = 480 + R, H = 420, L = 70, T = 40, B = 50;
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  auto tx = [&](double x) { return spec.logX ? std::log10(x) : x; };
  auto ok = [&](double x, double y) { return std::isfinite(tx(x)) && std::isfinite(y); };
  for (const PlotSeries& s : spec.series)
    for (std::size_t k = 0; k < s.x.size() && k < s.y.size(); ++k)
      if (ok(s.x[k], s.y[k])) {
        x0 = std::min(x0, tx(s.x[k]));
        x1 = std::max(x1, tx(s.x[k]));
        y0 = std::min(y0, s.y[k]);
        y1 = std::max(y1, s.y[k]);
      }
  for (const auto& [label, v] : spec.levels)
    if (std::isfinite(v)) {
      y0 = std::min(y0, v);
      y1 = std::max(y1, v);
    }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 == x0) x0 -= 0.5, x1 += 0.5;
  if (y1 == y0) y0 -= 0.5, y1 += 0.5;
  if (spec.yMin < spec.yMax) {
    y0 = spec.yMin;
    y1 = spec.yMax;
  } else {
    double pad = 0.05 * (y1 - y0);
    y0 -= pad;
    y1 += pad;
  }
  auto px = [&](double x) { return L + (tx(x) - x0) / (x1 - x0) * (W - L - R); };
  auto pxRaw = [&](double v) { return L + (v - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };

  std::string out = header(W, H);
  out += "<text x=\"" + fmt(W / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" + escape(spec.title) +
         "</text>\n";
  out += "<rect x=\"" + fmt(L) + "\" y=\"" + fmt(T) + "\" width=\"" + fmt(W - L - R) + "\" height=\"" +
         fmt(H - T - B) + "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double t : ticks(x0, x1)) {
    out += "<line x1=\"" + fmt(pxRaw(t)) + "\" y1=\"" + fmt(H - B) + "\" x2=\"" + fmt(pxRaw(t)) + "\" y2=\"" +
           fmt(H - B + 5) + "\" stroke=\"black\"/>\n";
    out += "<text x=\"" + fmt(pxRaw(t)) + "\" y=\"" + fmt(H - B + 18) + "\" text-anchor=\"middle\">" +
           escape(tickLabel(t, spec.logX)) + "</text>\n";
  }
  for (double t : ticks(y0, y1)) {
    out += "<line x1=\"" + fmt(L - 5) + "\" y1=\"" + fmt(py(t)) + "\" x2=\"" + fmt(L) + "\" y2=\"" + fmt(py(t)) +
           "\" stroke=\"black\"/>\n";
    out += "<text x=\"" + fmt(L - 8) + "\" y=\"" + fmt(py(t) + 4) + "\" text-anchor=\"end\">" +
           escape(tickLabel(t, false)) + "</text>\n";
  }
  out += "<text x=\"" + fmt(L + (W - L - R) / 2) + "\" y=\"" + fmt(H - 12) + "\" text-anchor=\"middle\">" +
         escape(spec.xLabel) + "</text>\n";
  out += "<text x=\"16\" y=\"" + fmt(T + (H - T - B) / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
         fmt(T + (H - T - B) / 2) + ")\">" + escape(spec.yLabel) + "</text>\n";

  double legendY = T + 10;
  for (const auto& [label, v] : spec.levels) {
    if (!std::isfinite(v)) continue;
    out += "<line x1=\"" + fmt(L) + "\" y1=\"" + fmt(py(v)) + "\" x2=\"" + fmt(W - R) + "\" y2=\"" + fmt(py(v)) +
           "\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n";
    out += "<text x=\"" + fmt(W - R + 8) + "\" y=\"" + fmt(legendY + 4) + "\" fill=\"gray\">" + escape(label) +
           "</text>\n";
    legendY += 18;
  }
  for (std::size_t i = 0; i < spec.series.size(); ++i) {
    const PlotSeries& s = spec.series[i];
    const char* color = kColors[i % 6];
    std::string pts;
    for (std::size_t k = 0; k < s.x.size() && k < s.y.size(); ++k)
      if (ok(s.x[k], s.y[k])) pts += fmt(px(s.x[k])) + "," + fmt(py(s.y[k])) + " ";
    if (!pts.empty()) pts.pop_back();
    if (s.line)
      out += std::string("<polyline fill=\"none\" stroke=\"") + color + "\" stroke-width=\"1.5\"" +
             (s.dashed ? " stroke-dasharray=\"6 3\"" : "") + " points=\"" + pts + "\"/>\n";
    if (s.markers)
      for (std::size_t k = 0; k < s.x.size() && k < s.y.size(); ++k)
        if (ok(s.x[k], s.y[k]))
          out += "<circle cx=\"" + fmt(px(s.x[k])) + "\" cy=\"" + fmt(py(s.y[k])) + "\" r=\"2.5\" fill=\"" + color +
                 "\"/>\n";
    out += "<line x1=\"" + fmt(W - R + 8) + "\" y1=\"" + fmt(legendY) + "\" x2=\"" + fmt(W - R + 28) + "\" y2=\"" +
           fmt(legendY) + "\" stroke=\"" + color + "\" stroke-width=\"1.5\"/>\n";
    out += "<text x=\"" + fmt(W - R + 32) + "\" y=\"" + fmt(legendY + 4) + "\">" + escape(s.label) + "</text>\n";
    legendY += 18;
  }
  out += "</svg>\n";
  return out;
}

std::string svgDisc(const DiscFigure& fig) {
  const double W = 480, H = 500, cx = 240, cy = 260, r = 200;
  auto X = [&](double theta, double rad) { return cx + rad * std::cos(theta); };
  auto Y = [&](double theta, double rad) { return cy - rad * std::sin(theta); };
  std::string out = header(W, H);
  out += "<text x=\"" + fmt(W / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" + escape(fig.title) +
         "</text>\n";
  out += "<circle cx=\"" + fmt(cx) + "\" cy=\"" + fmt(cy) + "\" r=\"" + fmt(r) +
         "\" fill=\"none\" stroke=\"#bbbbbb\"/>\n";
  for (const cplx& z : fig.points)
    out += "<circle cx=\"" + fmt(cx + r * z.real()) + "\" cy=\"" + fmt(cy - r * z.imag()) +
           "\" r=\"0.8\" fill=\"#1f77b4\" fill-opacity=\"0.5\"/>\n";
  for (const Arc& a : fig.arcs) {
    double a0 = a.start, a1 = a.start + a.length;
    if (a.length * r < 0.6) {
      // Too short for an arc path; a tick keeps it visible.
      double m = 0.5 * (a0 + a1);
      out += "<line x1=\"" + fmt(X(m, r - 3)) + "\" y1=\"" + fmt(Y(m, r - 3)) + "\" x2=\"" + fmt(X(m, r + 3)) +
             "\" y2=\"" + fmt(Y(m, r + 3)) + "\" stroke=\"black\" stroke-width=\"0.6\"/>\n";
      continue;
    }
    int large = a.length > kPi ? 1 : 0;
    out += "<path d=\"M " + fmt(X(a0, r)) + " " + fmt(Y(a0, r)) + " A " + fmt(r) + " " + fmt(r) + " 0 " +
           std::to_string(large) + " 0 " + fmt(X(a1, r)) + " " + fmt(Y(a1, r)) +
           "\" fill=\"none\" stroke=\"black\" stroke-width=\"3\"/>\n";
  }
  for (const DiscMark& m : fig.marks) {
    out += "<circle cx=\"" + fmt(X(m.angle, r)) + "\" cy=\"" + fmt(Y(m.angle, r)) + "\" r=\"4\" " +
           (m.hollow ? "fill=\"white\" stroke=\"#d62728\" stroke-width=\"1.5\"" : "fill=\"#d62728\"") + "/>\n";
    if (m.label.empty()) continue;
    out += "<text x=\"" + fmt(X(m.angle, r + 18)) + "\" y=\"" + fmt(Y(m.angle, r + 18) + 4) +
           "\" text-anchor=\"middle\" fill=\"#d62728\">" + escape(m.label) + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace horo
