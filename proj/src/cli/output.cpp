#include "output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "kamlab/error.hpp"

namespace kamlab::cli::detail {

namespace fs = std::filesystem;

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string short_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

const char* kColours[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

}  // namespace

Csv::Csv(std::vector<std::string> header) : width_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) text_ += (i ? "," : "") + header[i];
  text_ += "\n";
}

void Csv::row(const std::vector<std::string>& cells) {
  if (cells.size() != width_) throw Error(ErrorKind::invalid_argument, "csv row width mismatch");
  for (std::size_t i = 0; i < cells.size(); ++i) text_ += (i ? "," : "") + cells[i];
  text_ += "\n";
}

void write_atomic(const fs::path& dir, const std::string& name, const std::string& content) {
  fs::create_directories(dir);
  const fs::path target = dir / name;
  const fs::path tmp = dir / ("." + name + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw fs::filesystem_error("cannot write", tmp, std::make_error_code(std::errc::io_error));
    out << content;
    out.flush();
    if (!out) throw fs::filesystem_error("write failed", tmp, std::make_error_code(std::errc::io_error));
  }
  fs::rename(tmp, target);
}

std::string svg_plot(const PlotSpec& spec) {
  const double W = 640, H = 420, L = 70, R = 20, T = 40, B = 50;
  auto tx = [&](double v) { return spec.log_x ? std::log10(v) : v; };
  auto ty = [&](double v) { return spec.log_y ? std::log10(v) : v; };
  auto ok = [](double v) { return std::isfinite(v); };

  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : spec.series) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      const double a = tx(s.x[i]), b = ty(s.y[i]);
      if (!ok(a) || !ok(b)) continue;
      x0 = std::min(x0, a), x1 = std::max(x1, a), y0 = std::min(y0, b), y1 = std::max(y1, b);
    }
  }
  if (!ok(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 - x0 <= 0) x0 -= 0.5, x1 += 0.5;
  if (y1 - y0 <= 0) y0 -= 0.5, y1 += 0.5;
  const double px = (x1 - x0) * 0.03, py = (y1 - y0) * 0.05;
  x0 -= px, x1 += px, y0 -= py, y1 += py;
  auto sx = [&](double a) { return L + (a - x0) / (x1 - x0) * (W - L - R); };
  auto sy = [&](double b) { return H - B - (b - y0) / (y1 - y0) * (H - T - B); };

  std::string o;
  o += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"420\" viewBox=\"0 0 640 420\" "
       "font-family=\"sans-serif\" font-size=\"11\">\n";
  o += "<rect width=\"640\" height=\"420\" fill=\"white\"/>\n";
  o += "<text x=\"320\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" + escape(spec.title) + "</text>\n";
  o += "<rect x=\"" + short_num(L) + "\" y=\"" + short_num(T) + "\" width=\"" + short_num(W - L - R) + "\" height=\"" +
       short_num(H - T - B) + "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double a = x0 + (x1 - x0) * i / 4, b = y0 + (y1 - y0) * i / 4;
    const std::string la = spec.log_x ? "1e" + short_num(a) : short_num(a);
    const std::string lb = spec.log_y ? "1e" + short_num(b) : short_num(b);
    o += "<text x=\"" + short_num(sx(a)) + "\" y=\"" + short_num(H - B + 16) + "\" text-anchor=\"middle\">" + la + "</text>\n";
    o += "<text x=\"" + short_num(L - 6) + "\" y=\"" + short_num(sy(b) + 4) + "\" text-anchor=\"end\">" + lb + "</text>\n";
  }
  o += "<text x=\"" + short_num((L + W - R) / 2) + "\" y=\"" + short_num(H - 12) + "\" text-anchor=\"middle\">" +
       escape(spec.xlabel) + "</text>\n";
  o += "<text x=\"16\" y=\"" + short_num((T + H - B) / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
       short_num((T + H - B) / 2) + ")\">" + escape(spec.ylabel) + "</text>\n";

  for (std::size_t k = 0; k < spec.series.size(); ++k) {
    const auto& s = spec.series[k];
    const char* col = kColours[k % 8];
    std::string pts;
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      const double a = tx(s.x[i]), b = ty(s.y[i]);
      if (!ok(a) || !ok(b)) continue;
      if (s.scatter) {
        o += "<circle cx=\"" + short_num(sx(a)) + "\" cy=\"" + short_num(sy(b)) + "\" r=\"0.8\" fill=\"" + col + "\"/>\n";
      } else {
        pts += short_num(sx(a)) + "," + short_num(sy(b)) + " ";
      }
    }
    if (!s.scatter && !pts.empty()) {
      o += "<polyline fill=\"none\" stroke=\"" + std::string(col) + "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
    }
    if (!s.label.empty() && spec.series.size() <= 8) {
      const double ly = T + 14 + 14 * static_cast<double>(k);
      o += "<text x=\"" + short_num(W - R - 6) + "\" y=\"" + short_num(ly) + "\" text-anchor=\"end\" fill=\"" + col + "\">" +
           escape(s.label) + "</text>\n";
    }
  }
  o += "</svg>\n";
  return o;
}

}  // namespace kamlab::cli::detail
