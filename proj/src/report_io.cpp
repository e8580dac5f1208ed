#include "actq/report_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>

namespace actq {

namespace {

std::string fmt_real(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_short(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

void sort_report(std::vector<DifficultyReport>& rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    if (a.record_name != b.record_name) return a.record_name < b.record_name;
    return static_cast<int>(a.transform) < static_cast<int>(b.transform);
  });
}

std::string bits_label(int bits_act, int bits_wt) {
  return "a" + std::to_string(bits_act) + "w" + std::to_string(bits_wt);
}

void write_report_csv(std::span<const DifficultyReport> rows, std::ostream& out) {
  out << kReportColumns << '\n';
  for (const auto& r : rows) {
    out << csv_field(r.record_name) << ',' << to_string(r.transform) << ','
        << bits_label(r.bits_act, r.bits_wt) << ',' << fmt_real(r.layer_error) << ','
        << fmt_real(r.act_difficulty) << ',' << fmt_real(r.wt_difficulty) << ','
        << fmt_real(r.act_kurtosis) << ',' << fmt_real(r.wt_kurtosis) << ','
        << fmt_real(r.act_max_abs) << ',' << r.effective_bins_min << '\n';
  }
}

void write_magnitude_chart_svg(const std::string& title, std::span<const MagnitudeSeries> series,
                               std::ostream& out) {
  constexpr double kWidth = 720, kHeight = 420;
  constexpr double kLeft = 70, kRight = 150, kTop = 40, kBottom = 50;
  constexpr const char* kColors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"};
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;

  // Log axis over the positive range of all series.
  double lo = INFINITY, hi = 0.0;
  std::size_t longest = 1;
  for (const auto& s : series) {
    longest = std::max(longest, s.magnitudes.size());
    for (double v : s.magnitudes) {
      if (v > 0.0) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
  }
  if (!(hi > 0.0)) {
    lo = 0.1;
    hi = 1.0;
  }
  const double log_lo = std::floor(std::log10(lo));
  const double log_hi = std::max(std::ceil(std::log10(hi)), log_lo + 1.0);
  auto y_of = [&](double v) {
    const double lv = std::log10(std::max(v, std::pow(10.0, log_lo)));
    return kTop + plot_h * (1.0 - (lv - log_lo) / (log_hi - log_lo));
  };
  auto x_of = [&](std::size_t i) {
    return kLeft + (longest > 1 ? plot_w * static_cast<double>(i) / static_cast<double>(longest - 1) : 0.0);
  };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"14\">"
      << xml_escape(title) << "</text>\n";
  out << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << plot_w << "\" height=\"" << plot_h
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double e = log_lo; e <= log_hi; e += 1.0) {
    const double y = kTop + plot_h * (1.0 - (e - log_lo) / (log_hi - log_lo));
    out << "<line x1=\"" << kLeft << "\" y1=\"" << y << "\" x2=\"" << kLeft + plot_w << "\" y2=\"" << y
        << "\" stroke=\"#ddd\"/>\n";
    out << "<text x=\"" << kLeft - 6 << "\" y=\"" << y + 4
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">1e" << e << "</text>\n";
  }
  out << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 12
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">channel (sorted by magnitude)</text>\n";
  out << "<text x=\"16\" y=\"" << kTop + plot_h / 2 << "\" transform=\"rotate(-90 16 " << kTop + plot_h / 2
      << ")\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">channel magnitude</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    auto mags = series[k].magnitudes;
    std::sort(mags.begin(), mags.end(), std::greater<>());
    const char* color = kColors[k % std::size(kColors)];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < mags.size(); ++i) {
      out << (i ? " " : "") << fmt_short(x_of(i)) << ',' << fmt_short(y_of(mags[i]));
    }
    out << "\"/>\n";
    const double ly = kTop + 16.0 * static_cast<double>(k + 1);
    out << "<line x1=\"" << kLeft + plot_w + 10 << "\" y1=\"" << ly << "\" x2=\"" << kLeft + plot_w + 30
        << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << kLeft + plot_w + 36 << "\" y=\"" << ly + 4
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << xml_escape(series[k].label) << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace actq
