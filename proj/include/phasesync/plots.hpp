#pragma once

#include <string>

namespace phasesync {

struct Rgb {
  int r = 0, g = 0, b = 0;
};

// White-to-dark-blue ramp for success rates; every channel is monotone
// nonincreasing in the rate. NaN maps to gray.
Rgb heat_color(double rate);

// Reads records.csv and writes the standard plot set into out_dir:
//   success_heatmap.svg   cert success rate over (n, sigma/sqrt(n/log n))
//   l2_scaling.svg        median l2 error vs sigma, log-log, slope annotated
//   linf_ratio.svg        median linf/(sigma sqrt(log n / n)) vs n
//   contraction_hist.svg  histogram of per-trial max contraction ratios
// Output bytes are a pure function of the records file.
void emit_plots(const std::string& records_csv_path, const std::string& out_dir);

}  // namespace phasesync
