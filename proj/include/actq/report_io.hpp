#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "actq/metrics.hpp"

namespace actq {

inline constexpr const char* kReportColumns =
    "record,transform,bits,layer_error,act_difficulty,wt_difficulty,act_kurtosis,wt_kurtosis,"
    "act_max_abs,effective_bins_min";

/// Sorts rows by record name, then by transform in the order none, smooth,
/// rotate, smooth-rotate.
void sort_report(std::vector<DifficultyReport>& rows);

/// Header plus one line per row. Reals use 17 significant digits so the
/// output round-trips and is byte-stable.
void write_report_csv(std::span<const DifficultyReport> rows, std::ostream& out);

/// "a4w4" style bit-width label.
std::string bits_label(int bits_act, int bits_wt);

/// One series of a sorted-channel-magnitude chart.
struct MagnitudeSeries {
  std::string label;
  std::vector<double> magnitudes;  // any order; sorted descending when drawn
};

/// Standalone SVG line chart of sorted channel magnitudes on a log10 axis.
void write_magnitude_chart_svg(const std::string& title, std::span<const MagnitudeSeries> series,
                               std::ostream& out);

}  // namespace actq
