#include "sweep_chart.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "aqtlab/io.hpp"

namespace aqtlab::cli {

namespace {

constexpr double kWidth = 640;
constexpr double kHeight = 400;
constexpr double kLeft = 60;
constexpr double kRight = 20;
constexpr double kTop = 30;
constexpr double kBottom = 50;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
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

double to_double(const Rational& q) {
  return static_cast<double>(q.numerator()) / static_cast<double>(q.denominator());
}

}  // namespace

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "n,B,sigma,protocol,peak_load,proof_bound\n";
  for (const auto& r : rows) {
    out << r.n << "," << r.burst << "," << to_string(r.sigma) << "," << r.protocol << "," << r.peak_load << ","
        << to_string(r.proof_bound) << "\n";
  }
}

std::vector<SweepRow> read_sweep_csv(std::istream& in) {
  std::vector<SweepRow> rows;
  std::string line;
  std::size_t number = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!header) {
      if (line != "n,B,sigma,protocol,peak_load,proof_bound") {
        throw ParseError("expected sweep header n,B,sigma,protocol,peak_load,proof_bound", number);
      }
      header = true;
      continue;
    }
    std::vector<std::string> f;
    std::string field;
    std::istringstream fields(line);
    while (std::getline(fields, field, ',')) f.push_back(field);
    if (f.size() != 6) throw ParseError("expected 6 fields", number);
    try {
      SweepRow r;
      std::size_t used = 0;
      r.n = std::stoi(f[0], &used);
      if (used != f[0].size()) throw std::invalid_argument(f[0]);
      r.burst = std::stoi(f[1], &used);
      if (used != f[1].size()) throw std::invalid_argument(f[1]);
      r.sigma = parse_rational(f[2]);
      r.protocol = f[3];
      r.peak_load = std::stoll(f[4], &used);
      if (used != f[4].size()) throw std::invalid_argument(f[4]);
      r.proof_bound = parse_rational(f[5]);
      if (r.n < 1 || r.protocol.empty()) throw std::invalid_argument("n/protocol");
      rows.push_back(std::move(r));
    } catch (const std::exception& e) {
      throw ParseError(std::string("bad sweep row: ") + e.what(), number);
    }
  }
  if (!header) throw ParseError("empty sweep file");
  return rows;
}

std::string render_sweep_svg(const std::vector<SweepRow>& rows) {
  std::vector<std::string> order;
  std::map<std::string, std::vector<const SweepRow*>> series;
  std::map<int, double> bound;
  double x_min = 0, x_max = 1, y_max = 1;
  bool first = true;
  for (const auto& r : rows) {
    if (!series.count(r.protocol)) order.push_back(r.protocol);
    series[r.protocol].push_back(&r);
    const double x = std::log2(static_cast<double>(r.n));
    const double b = to_double(r.proof_bound);
    bound[r.n] = std::max(bound[r.n], b);
    if (first) {
      x_min = x_max = x;
      first = false;
    }
    x_min = std::min(x_min, x);
    x_max = std::max(x_max, x);
    y_max = std::max({y_max, static_cast<double>(r.peak_load), b});
  }
  if (x_max - x_min < 1) x_max = x_min + 1;
  y_max = std::ceil(y_max * 1.05);

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - x_min) / (x_max - x_min) * plot_w; };
  auto py = [&](double y) { return kTop + plot_h - y / y_max * plot_h; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(kWidth) << "\" height=\"" << num(kHeight)
      << "\" viewBox=\"0 0 " << num(kWidth) << " " << num(kHeight) << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<g class=\"axes\" stroke=\"black\" stroke-width=\"1\">\n";
  svg << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(kTop + plot_h) << "\" x2=\"" << num(kLeft + plot_w)
      << "\" y2=\"" << num(kTop + plot_h) << "\"/>\n";
  svg << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(kTop) << "\" x2=\"" << num(kLeft) << "\" y2=\""
      << num(kTop + plot_h) << "\"/>\n";
  svg << "</g>\n";

  svg << "<g class=\"ticks\" font-family=\"sans-serif\" font-size=\"11\">\n";
  for (int t = static_cast<int>(std::ceil(x_min)); t <= static_cast<int>(std::floor(x_max)); ++t) {
    svg << "<text x=\"" << num(px(t)) << "\" y=\"" << num(kTop + plot_h + 16) << "\" text-anchor=\"middle\">"
        << t << "</text>\n";
  }
  const int y_step = std::max(1, static_cast<int>(y_max / 8));
  for (int t = 0; t <= static_cast<int>(y_max); t += y_step) {
    svg << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(py(t) + 4) << "\" text-anchor=\"end\">" << t
        << "</text>\n";
  }
  svg << "<text x=\"" << num(kLeft + plot_w / 2) << "\" y=\"" << num(kHeight - 10)
      << "\" text-anchor=\"middle\">log2 n</text>\n";
  svg << "<text x=\"14\" y=\"" << num(kTop + plot_h / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
      << num(kTop + plot_h / 2) << ")\">peak load</text>\n";
  svg << "</g>\n";

  if (!bound.empty()) {
    svg << "<path class=\"bound\" fill=\"none\" stroke=\"gray\" stroke-dasharray=\"6 4\" d=\"";
    bool move = true;
    for (const auto& [n, b] : bound) {
      svg << (move ? "M" : " L") << num(px(std::log2(static_cast<double>(n)))) << " " << num(py(b));
      move = false;
    }
    svg << "\"/>\n";
  }

  for (std::size_t s = 0; s < order.size(); ++s) {
    const auto& name = order[s];
    const char* color = kPalette[s % std::size(kPalette)];
    auto points = series[name];
    std::stable_sort(points.begin(), points.end(), [](const SweepRow* a, const SweepRow* b) { return a->n < b->n; });
    svg << "<g data-protocol=\"" << escape(name) << "\">\n";
    svg << "<polyline class=\"series\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (std::size_t k = 0; k < points.size(); ++k) {
      svg << (k ? " " : "") << num(px(std::log2(static_cast<double>(points[k]->n)))) << ","
          << num(py(static_cast<double>(points[k]->peak_load)));
    }
    svg << "\"/>\n";
    for (const auto* p : points) {
      svg << "<circle class=\"point\" cx=\"" << num(px(std::log2(static_cast<double>(p->n)))) << "\" cy=\""
          << num(py(static_cast<double>(p->peak_load))) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    }
    svg << "<text x=\"" << num(kLeft + 10) << "\" y=\"" << num(kTop + 14 + 14 * static_cast<double>(s))
        << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"" << color << "\">" << escape(name)
        << "</text>\n";
    svg << "</g>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace aqtlab::cli
