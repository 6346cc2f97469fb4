#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "moran/errors.hpp"
#include "moran/io.hpp"

namespace moran {

namespace {
constexpr const char* kModule = "io";
constexpr double kWidth = 640.0, kHeight = 480.0;
constexpr double kLeft = 80.0, kRight = 20.0, kTop = 40.0, kBottom = 60.0;

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

struct Range {
  double lo, hi;
  double map(double v, double a, double b) const { return a + (v - lo) / (hi - lo) * (b - a); }
};

Range padded(double lo, double hi, double share) {
  if (hi - lo <= 0.0) {
    const double pad = lo == 0.0 ? 1.0 : 0.1 * std::abs(lo);
    return {lo - pad, hi + pad};
  }
  const double pad = share * (hi - lo);
  return {lo - pad, hi + pad};
}
}  // namespace

bool PlotSpec::has_band() const noexcept {
  return !series.empty() && std::all_of(series.begin(), series.end(), [](const Point& p) {
    return p.lo95.has_value() && p.hi95.has_value();
  });
}

PlotSpec plot_qr(const QrFit& fit, int pnum, char par) {
  if (fit.per_tau.empty()) throw InputError(kModule, "quantile fit has no tau values");
  PlotSpec spec;
  spec.pnum = pnum;
  spec.par = par;
  if (par == 'b') {
    const int k = static_cast<int>(fit.per_tau.front().b.size());
    if (pnum < 1 || pnum > k) {
      throw InputError(kModule, "pnum " + std::to_string(pnum) + " is out of range 1.." + std::to_string(k));
    }
    spec.label = fit.per_tau.front().b[static_cast<std::size_t>(pnum - 1)].name;
  } else if (par == 's') {
    if (pnum != 1 && pnum != 2) throw InputError(kModule, "with par = s, pnum must be 1 or 2");
    spec.label = pnum == 1 ? "shrink_sf_SE" : "shrink_sf_alpha";
  } else {
    throw InputError(kModule, std::string("par must be 'b' or 's', got '") + par + "'");
  }

  for (const auto& f : fit.per_tau) {
    PlotSpec::Point pt;
    pt.tau = f.tau;
    const auto idx = static_cast<std::size_t>(pnum - 1);
    if (par == 'b') {
      pt.estimate = f.b[idx].estimate;
    } else {
      pt.estimate = pnum == 1 ? f.s.sigma_gamma : f.s.alpha;
    }
    if (f.boot) {
      const BootRow& row = par == 'b' ? f.boot->b[idx] : f.boot->s[idx];
      pt.lo95 = row.lo95;
      pt.hi95 = row.hi95;
    }
    if (!spec.series.empty() && !(pt.tau > spec.series.back().tau)) {
      throw InputError(kModule, "tau values must be strictly increasing");
    }
    spec.series.push_back(pt);
  }
  return spec;
}

std::string plot_csv(const PlotSpec& spec) {
  std::string out = "tau,estimate,lo95,hi95\n";
  for (const auto& p : spec.series) {
    out += format_number(p.tau) + "," + format_number(p.estimate) + ",";
    out += (p.lo95 ? format_number(*p.lo95) : std::string()) + ",";
    out += (p.hi95 ? format_number(*p.hi95) : std::string()) + "\n";
  }
  return out;
}

std::string render_svg(const PlotSpec& spec) {
  const bool band = spec.has_band();
  double ylo = INFINITY, yhi = -INFINITY;
  for (const auto& p : spec.series) {
    ylo = std::min(ylo, band ? *p.lo95 : p.estimate);
    yhi = std::max(yhi, band ? *p.hi95 : p.estimate);
  }
  const Range xr = padded(spec.series.front().tau, spec.series.back().tau, 0.05);
  const Range yr = padded(ylo, yhi, 0.08);
  const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
  auto px = [&](double tau) { return fmt("%.2f", xr.map(tau, x0, x1)); };
  auto py = [&](double v) { return fmt("%.2f", yr.map(v, y0, y1)); };

  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"640\" height=\"480\" viewBox=\"0 0 640 480\">\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"640\" height=\"480\" fill=\"white\"/>\n";
  svg += "<text x=\"320\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">" +
         escape_xml(spec.label) + "</text>\n";

  if (band) {
    std::string pts;
    for (const auto& p : spec.series) pts += px(p.tau) + "," + py(*p.hi95) + " ";
    for (auto it = spec.series.rbegin(); it != spec.series.rend(); ++it) pts += px(it->tau) + "," + py(*it->lo95) + " ";
    pts.pop_back();
    svg += "<polygon class=\"band\" points=\"" + pts + "\" fill=\"#c8c8c8\" stroke=\"none\"/>\n";
  }

  // Axes with ticks at the tau grid and at the quartiles of the estimates.
  svg += "<g stroke=\"black\" stroke-width=\"1\" fill=\"none\">\n";
  svg += "<line x1=\"" + fmt("%.2f", x0) + "\" y1=\"" + fmt("%.2f", y0) + "\" x2=\"" + fmt("%.2f", x1) + "\" y2=\"" + fmt("%.2f", y0) + "\"/>\n";
  svg += "<line x1=\"" + fmt("%.2f", x0) + "\" y1=\"" + fmt("%.2f", y0) + "\" x2=\"" + fmt("%.2f", x0) + "\" y2=\"" + fmt("%.2f", y1) + "\"/>\n";
  svg += "</g>\n";
  svg += "<g font-family=\"sans-serif\" font-size=\"11\">\n";
  for (const auto& p : spec.series) {
    svg += "<line x1=\"" + px(p.tau) + "\" y1=\"" + fmt("%.2f", y0) + "\" x2=\"" + px(p.tau) + "\" y2=\"" + fmt("%.2f", y0 + 5) + "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + px(p.tau) + "\" y=\"" + fmt("%.2f", y0 + 18) + "\" text-anchor=\"middle\">" + fmt("%.3g", p.tau) + "</text>\n";
  }
  std::vector<double> est;
  for (const auto& p : spec.series) est.push_back(p.estimate);
  std::sort(est.begin(), est.end());
  std::vector<double> ticks;
  for (double prob : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    const double t = quantile_type7(est, prob);
    if (ticks.empty() || std::abs(t - ticks.back()) > 1e-12 * (1.0 + std::abs(t))) ticks.push_back(t);
  }
  for (double t : ticks) {
    svg += "<line x1=\"" + fmt("%.2f", x0 - 5) + "\" y1=\"" + py(t) + "\" x2=\"" + fmt("%.2f", x0) + "\" y2=\"" + py(t) + "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + fmt("%.2f", x0 - 8) + "\" y=\"" + py(t) + "\" text-anchor=\"end\" dominant-baseline=\"middle\">" + fmt("%.4g", t) + "</text>\n";
  }
  svg += "<text x=\"320\" y=\"" + fmt("%.2f", kHeight - 16) + "\" text-anchor=\"middle\">tau</text>\n";
  svg += "</g>\n";

  std::string line;
  for (const auto& p : spec.series) line += px(p.tau) + "," + py(p.estimate) + " ";
  line.pop_back();
  svg += "<polyline class=\"estimate\" points=\"" + line + "\" fill=\"none\" stroke=\"black\" stroke-width=\"2\"/>\n";
  for (const auto& p : spec.series)
    svg += "<circle cx=\"" + px(p.tau) + "\" cy=\"" + py(p.estimate) + "\" r=\"2.5\" fill=\"black\"/>\n";
  svg += "</svg>\n";
  return svg;
}

}  // namespace moran
