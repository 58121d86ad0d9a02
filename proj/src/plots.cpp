#include "phasesync/plots.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <vector>

#include "phasesync/harness.hpp"

namespace phasesync {

namespace {

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string fmt2(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

constexpr int kWidth = 640;
constexpr int kHeight = 440;
constexpr double kLeft = 70, kRight = 610, kTop = 40, kBottom = 390;

class Svg {
 public:
  Svg() {
    body_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
          << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n"
          << "<rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight
          << "\" fill=\"white\"/>\n";
  }
  void rect(double x, double y, double w, double h, const std::string& fill,
            const std::string& stroke = "none") {
    body_ << "<rect x=\"" << fmt2(x) << "\" y=\"" << fmt2(y) << "\" width=\"" << fmt2(w)
          << "\" height=\"" << fmt2(h) << "\" fill=\"" << fill << "\" stroke=\"" << stroke
          << "\"/>\n";
  }
  void line(double x1, double y1, double x2, double y2, const std::string& stroke,
            double width = 1.0) {
    body_ << "<line x1=\"" << fmt2(x1) << "\" y1=\"" << fmt2(y1) << "\" x2=\"" << fmt2(x2)
          << "\" y2=\"" << fmt2(y2) << "\" stroke=\"" << stroke << "\" stroke-width=\""
          << fmt2(width) << "\"/>\n";
  }
  void circle(double x, double y, double r, const std::string& fill) {
    body_ << "<circle cx=\"" << fmt2(x) << "\" cy=\"" << fmt2(y) << "\" r=\"" << fmt2(r)
          << "\" fill=\"" << fill << "\"/>\n";
  }
  void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& stroke) {
    if (pts.size() < 2) return;
    body_ << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& [x, y] : pts) body_ << fmt2(x) << "," << fmt2(y) << " ";
    body_ << "\"/>\n";
  }
  void text(double x, double y, const std::string& s, const std::string& anchor = "start",
            int size = 12, const std::string& fill = "black") {
    body_ << "<text x=\"" << fmt2(x) << "\" y=\"" << fmt2(y) << "\" font-family=\"monospace\""
          << " font-size=\"" << size << "\" text-anchor=\"" << anchor << "\" fill=\"" << fill
          << "\">" << s << "</text>\n";
  }
  void save(const std::string& path) {
    body_ << "</svg>\n";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << body_.str();
  }

 private:
  std::ostringstream body_;
};

void axes_frame(Svg& svg, const std::string& title, const std::string& xlabel,
                const std::string& ylabel) {
  svg.rect(kLeft, kTop, kRight - kLeft, kBottom - kTop, "none", "black");
  svg.text((kLeft + kRight) / 2, kTop - 14, title, "middle", 14);
  svg.text((kLeft + kRight) / 2, kBottom + 36, xlabel, "middle");
  svg.text(16, (kTop + kBottom) / 2, ylabel, "middle");
}

void warning_banner(Svg& svg, const std::string& msg) {
  svg.rect(kLeft, (kTop + kBottom) / 2 - 16, kRight - kLeft, 32, "rgb(255,243,205)", "black");
  svg.text((kLeft + kRight) / 2, (kTop + kBottom) / 2 + 4, msg, "middle", 13);
}

struct LinMap {
  double lo = 0.0, hi = 1.0, a = 0.0, b = 1.0;  // [lo,hi] -> [a,b]
  double operator()(double v) const {
    if (hi == lo) return (a + b) / 2;
    return a + (v - lo) / (hi - lo) * (b - a);
  }
};

void x_ticks(Svg& svg, const LinMap& mx, bool log_axis) {
  for (int i = 0; i <= 4; ++i) {
    const double t = mx.lo + (mx.hi - mx.lo) * i / 4.0;
    const double px = mx(t);
    svg.line(px, kBottom, px, kBottom + 5, "black");
    svg.text(px, kBottom + 18, fmt(log_axis ? std::exp(t) : t), "middle", 11);
  }
}

void y_ticks(Svg& svg, const LinMap& my, bool log_axis) {
  for (int i = 0; i <= 4; ++i) {
    const double t = my.lo + (my.hi - my.lo) * i / 4.0;
    const double py = my(t);
    svg.line(kLeft - 5, py, kLeft, py, "black");
    svg.text(kLeft - 8, py + 4, fmt(log_axis ? std::exp(t) : t), "end", 11);
  }
}

const char* kSeriesColors[] = {"rgb(31,119,180)", "rgb(214,39,40)",  "rgb(44,160,44)",
                               "rgb(148,103,189)", "rgb(255,127,14)", "rgb(23,190,207)"};

std::string rgb(const Rgb& c) {
  std::ostringstream os;
  os << "rgb(" << c.r << "," << c.g << "," << c.b << ")";
  return os.str();
}

std::vector<const TrialRecord*> gpm_or_first(const std::vector<TrialRecord>& recs) {
  bool has_gpm = false;
  for (const auto& r : recs)
    if (r.estimator == Estimator::gpm) has_gpm = true;
  const Estimator pick = has_gpm ? Estimator::gpm : (recs.empty() ? Estimator::gpm : recs[0].estimator);
  std::vector<const TrialRecord*> out;
  for (const auto& r : recs)
    if (r.estimator == pick) out.push_back(&r);
  return out;
}

void plot_heatmap(const std::vector<TrialRecord>& recs, const std::string& path) {
  Svg svg;
  axes_frame(svg, "certificate success rate", "sigma / sqrt(n/log n)", "n");
  const auto rows = gpm_or_first(recs);
  if (rows.empty()) {
    warning_banner(svg, "no records");
    svg.save(path);
    return;
  }
  std::set<std::size_t> nset;
  std::set<double> sset;
  for (const auto* r : rows) {
    nset.insert(r->n);
    sset.insert(r->sigma_rel);
  }
  const std::vector<std::size_t> ns(nset.begin(), nset.end());
  const std::vector<double> sigmas(sset.begin(), sset.end());
  std::map<std::pair<std::size_t, std::size_t>, std::pair<double, double>> agg;  // (ok, total)
  for (const auto* r : rows) {
    const std::size_t i = std::lower_bound(ns.begin(), ns.end(), r->n) - ns.begin();
    const std::size_t j = std::lower_bound(sigmas.begin(), sigmas.end(), r->sigma_rel) - sigmas.begin();
    auto& cell = agg[{i, j}];
    cell.first += r->cert_rank_ok ? 1.0 : 0.0;
    cell.second += 1.0;
  }
  const double cw = (kRight - kLeft) / static_cast<double>(sigmas.size());
  const double ch = (kBottom - kTop) / static_cast<double>(ns.size());
  for (const auto& [key, val] : agg) {
    const auto [i, j] = key;
    const double rate = val.second > 0 ? val.first / val.second : std::nan("");
    const double x = kLeft + cw * static_cast<double>(j);
    const double y = kBottom - ch * static_cast<double>(i + 1);
    svg.rect(x, y, cw, ch, rgb(heat_color(rate)), "white");
    const std::string label = fmt2(rate);
    svg.text(x + cw / 2, y + ch / 2 + 4, label, "middle", 11, rate > 0.6 ? "white" : "black");
  }
  for (std::size_t j = 0; j < sigmas.size(); ++j)
    svg.text(kLeft + cw * (j + 0.5), kBottom + 18, fmt(sigmas[j]), "middle", 11);
  for (std::size_t i = 0; i < ns.size(); ++i)
    svg.text(kLeft - 8, kBottom - ch * (i + 0.5) + 4, std::to_string(ns[i]), "end", 11);
  svg.save(path);
}

void plot_l2_scaling(const std::vector<TrialRecord>& recs, const std::string& path) {
  Svg svg;
  axes_frame(svg, "median l2 error vs sigma (log-log)", "sigma", "median d2(x,z)");
  const auto rows = gpm_or_first(recs);
  // (n, sigma) -> errors
  std::map<std::pair<std::size_t, double>, std::vector<double>> cells;
  for (const auto* r : rows)
    if (r->sigma > 0.0 && std::isfinite(r->l2_err) && r->l2_err > 0.0)
      cells[{r->n, r->sigma}].push_back(r->l2_err);
  if (cells.empty()) {
    warning_banner(svg, "no positive-sigma records");
    svg.save(path);
    return;
  }
  std::map<std::size_t, std::vector<std::pair<double, double>>> series;  // n -> (sigma, med)
  double lx0 = 1e300, lx1 = -1e300, ly0 = 1e300, ly1 = -1e300;
  for (auto& [key, errs] : cells) {
    const double med = median(errs);
    if (!(med > 0.0)) continue;
    series[key.first].emplace_back(key.second, med);
    lx0 = std::min(lx0, std::log(key.second));
    lx1 = std::max(lx1, std::log(key.second));
    ly0 = std::min(ly0, std::log(med));
    ly1 = std::max(ly1, std::log(med));
  }
  if (series.empty()) {
    warning_banner(svg, "no positive medians");
    svg.save(path);
    return;
  }
  if (lx1 - lx0 < 1e-12) { lx0 -= 0.5; lx1 += 0.5; }
  if (ly1 - ly0 < 1e-12) { ly0 -= 0.5; ly1 += 0.5; }
  const LinMap mx{lx0, lx1, kLeft + 8, kRight - 8};
  const LinMap my{ly0, ly1, kBottom - 8, kTop + 8};
  x_ticks(svg, mx, true);
  y_ticks(svg, my, true);
  int si = 0;
  double legend_y = kTop + 16;
  for (auto& [n, pts] : series) {
    std::sort(pts.begin(), pts.end());
    const std::string color = kSeriesColors[si % 6];
    std::vector<std::pair<double, double>> px;
    std::vector<double> xs, ys;
    for (const auto& [s, m] : pts) {
      px.emplace_back(mx(std::log(s)), my(std::log(m)));
      xs.push_back(s);
      ys.push_back(m);
    }
    svg.polyline(px, color);
    for (const auto& [x, y] : px) svg.circle(x, y, 3, color);
    std::string label = "n=" + std::to_string(n);
    if (xs.size() >= 2) label += " slope=" + fmt(loglog_slope(xs, ys));
    svg.text(kLeft + 14, legend_y, label, "start", 12, color);
    legend_y += 16;
    ++si;
  }
  svg.save(path);
}

void plot_linf_ratio(const std::vector<TrialRecord>& recs, const std::string& path) {
  Svg svg;
  axes_frame(svg, "linf error / (sigma sqrt(log n / n))", "n", "median ratio");
  const auto rows = gpm_or_first(recs);
  std::map<std::pair<double, std::size_t>, std::vector<double>> cells;  // (sigma_rel, n) -> ratios
  for (const auto* r : rows) {
    if (!(r->sigma > 0.0) || !std::isfinite(r->linf_err)) continue;
    const double scale = r->sigma * std::sqrt(std::log(static_cast<double>(r->n)) /
                                              static_cast<double>(r->n));
    cells[{r->sigma_rel, r->n}].push_back(r->linf_err / scale);
  }
  if (cells.empty()) {
    warning_banner(svg, "no positive-sigma records");
    svg.save(path);
    return;
  }
  std::map<double, std::vector<std::pair<double, double>>> series;  // sigma_rel -> (n, med)
  double x0 = 1e300, x1 = -1e300, y0 = 0.0, y1 = -1e300;
  for (auto& [key, ratios] : cells) {
    const double med = median(ratios);
    series[key.first].emplace_back(static_cast<double>(key.second), med);
    x0 = std::min(x0, static_cast<double>(key.second));
    x1 = std::max(x1, static_cast<double>(key.second));
    y1 = std::max(y1, med);
  }
  if (x1 - x0 < 1e-12) { x0 -= 1.0; x1 += 1.0; }
  if (y1 <= 0.0) y1 = 1.0;
  const LinMap mx{x0, x1, kLeft + 8, kRight - 8};
  const LinMap my{y0, y1 * 1.1, kBottom - 8, kTop + 8};
  x_ticks(svg, mx, false);
  y_ticks(svg, my, false);
  int si = 0;
  double legend_y = kTop + 16;
  for (auto& [srel, pts] : series) {
    std::sort(pts.begin(), pts.end());
    const std::string color = kSeriesColors[si % 6];
    std::vector<std::pair<double, double>> px;
    for (const auto& [n, m] : pts) px.emplace_back(mx(n), my(m));
    svg.polyline(px, color);
    for (const auto& [x, y] : px) svg.circle(x, y, 3, color);
    svg.text(kLeft + 14, legend_y, "sigma_rel=" + fmt(srel), "start", 12, color);
    legend_y += 16;
    ++si;
  }
  svg.save(path);
}

void plot_contraction_hist(const std::vector<TrialRecord>& recs, const std::string& path) {
  Svg svg;
  axes_frame(svg, "per-trial max contraction ratio", "ratio", "trials");
  std::vector<double> vals;
  for (const auto& r : recs)
    if (r.estimator == Estimator::gpm && std::isfinite(r.contraction_max))
      vals.push_back(r.contraction_max);
  if (vals.empty()) {
    warning_banner(svg, "no contraction data");
    svg.save(path);
    return;
  }
  const double vmax = std::max(1.0, *std::max_element(vals.begin(), vals.end()));
  constexpr int kBins = 20;
  std::vector<int> bins(kBins, 0);
  for (double v : vals) {
    int b = static_cast<int>(v / vmax * kBins);
    b = std::clamp(b, 0, kBins - 1);
    ++bins[b];
  }
  const int peak = *std::max_element(bins.begin(), bins.end());
  const double bw = (kRight - kLeft) / static_cast<double>(kBins);
  for (int b = 0; b < kBins; ++b) {
    const double h = peak > 0 ? (kBottom - kTop - 10) * bins[b] / static_cast<double>(peak) : 0.0;
    svg.rect(kLeft + b * bw + 1, kBottom - h, bw - 2, h, "rgb(31,119,180)");
  }
  for (int i = 0; i <= 4; ++i) {
    const double t = vmax * i / 4.0;
    const double px = kLeft + (kRight - kLeft) * i / 4.0;
    svg.line(px, kBottom, px, kBottom + 5, "black");
    svg.text(px, kBottom + 18, fmt(t), "middle", 11);
  }
  svg.text(kLeft - 8, kTop + 12, std::to_string(peak), "end", 11);
  svg.save(path);
}

}  // namespace

Rgb heat_color(double rate) {
  if (std::isnan(rate)) return Rgb{200, 200, 200};
  const double t = std::clamp(rate, 0.0, 1.0);
  auto lerp = [t](int a, int b) { return static_cast<int>(std::lround(a + (b - a) * t)); };
  return Rgb{lerp(255, 8), lerp(255, 48), lerp(255, 107)};
}

void emit_plots(const std::string& records_csv_path, const std::string& out_dir) {
  const std::vector<TrialRecord> recs = read_records_csv(records_csv_path);
  namespace fs = std::filesystem;
  const fs::path dir(out_dir);
  plot_heatmap(recs, (dir / "success_heatmap.svg").string());
  plot_l2_scaling(recs, (dir / "l2_scaling.svg").string());
  plot_linf_ratio(recs, (dir / "linf_ratio.svg").string());
  plot_contraction_hist(recs, (dir / "contraction_hist.svg").string());
}

}  // namespace phasesync
