#pragma once

#include <optional>
#include <span>
#include <vector>

namespace podfv {

/// Reference and reduced-model samples on a common time grid.
struct SignalPair {
  std::vector<double> times;
  std::vector<double> hf;
  std::vector<double> rom;

  void validate() const;
};

/// Linear interpolation of (t_src, x_src) onto t_dst; values outside the
/// source range take the nearest end value.
std::vector<double> resample_linear(std::span<const double> t_src, std::span<const double> x_src,
                                    std::span<const double> t_dst);

/// Weighted absolute percentage error, 100/n * sum |hf - rom| / mean(|hf|).
double wape(const SignalPair& pair);

/// WAPE of both signals after subtracting the mean of the reference signal.
double wape_shifted_drag(const SignalPair& pair);

/// Frequency of the periodogram maximum after mean removal and a Hann taper.
/// Resolution is 1/(n * dt).
double psd_peak_frequency(std::span<const double> signal, double sample_dt);

/// Mean period between upward mean-crossings; needs at least `min_crossings`
/// crossings.
std::optional<double> zero_crossing_period(std::span<const double> signal, double sample_dt, int min_crossings = 3);

/// St = f D / U.
double strouhal(double frequency, double velocity, double diameter);

}  // namespace podfv
