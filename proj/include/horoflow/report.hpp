#pragma once

// Text artifacts: CSV tables and SVG 1.1 figures. Output depends only on
// the inputs, so reruns are byte-identical.

#include <string>
#include <utility>
#include <vector>

#include "horoflow/boundary.hpp"

namespace horo {

// Shortest decimal that reads back to the same double; "nan", "inf", "-inf"
// otherwise.
std::string formatNumber(double x);

class CsvTable {
public:
  explicit CsvTable(std::vector<std::string> columns);
  // Lines starting with '#' ahead of the header.
  void comment(const std::string& line);
  void row(const std::vector<double>& cells);
  void row(const std::vector<std::string>& cells);
  std::string str() const;

private:
  std::vector<std::string> comments_, columns_, rows_;
};

struct PlotSeries {
  std::string label;
  std::vector<double> x, y;
  bool dashed = false;
  bool markers = false;
  bool line = true;
};

struct PlotSpec {
  std::string title, xLabel, yLabel;
  bool logX = false;
  // Fixed y range when yMin < yMax; otherwise fitted to the data.
  double yMin = 0.0, yMax = 0.0;
  std::vector<PlotSeries> series;
  std::vector<std::pair<std::string, double>> levels;  // labelled horizontal lines
};

// Line chart; non-finite points are skipped.
std::string svgPlot(const PlotSpec& spec);

struct DiscMark {
  double angle = 0.0;
  std::string label;
  bool hollow = false;
};

struct DiscFigure {
  std::string title;
  std::vector<Arc> arcs;       // drawn on the circle
  std::vector<DiscMark> marks;  // labelled boundary angles
  std::vector<cplx> points;                       // disc coordinates, |z| < 1
};

// Unit disc with a highlighted arc set (the limit set cover), marks and a
// point cloud (e.g. a horocycle trace projected to the disc).
std::string svgDisc(const DiscFigure& fig);

}  // namespace horo
