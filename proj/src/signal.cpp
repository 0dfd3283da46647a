#include "podfv/signal.hpp"

#include "podfv/error.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <mutex>
#include <numeric>

namespace podfv {

namespace {
// FFTW planning is not thread-safe.
std::mutex fftw_planner_mutex;
}  // namespace

void SignalPair::validate() const {
  if (hf.size() != rom.size() || hf.size() != times.size())
    throw DimensionMismatch("signal pair has unequal lengths");
  if (hf.size() < 2) throw InvalidArgument("signal pair needs at least two samples");
}

std::vector<double> resample_linear(std::span<const double> t_src, std::span<const double> x_src,
                                    std::span<const double> t_dst) {
  if (t_src.size() != x_src.size() || t_src.empty()) throw DimensionMismatch("resample: bad source series");
  std::vector<double> out;
  out.reserve(t_dst.size());
  for (double t : t_dst) {
    if (t <= t_src.front()) {
      out.push_back(x_src.front());
      continue;
    }
    if (t >= t_src.back()) {
      out.push_back(x_src.back());
      continue;
    }
    const auto it = std::upper_bound(t_src.begin(), t_src.end(), t);
    const auto i = static_cast<std::size_t>(it - t_src.begin());
    const double a = (t - t_src[i - 1]) / (t_src[i] - t_src[i - 1]);
    out.push_back((1.0 - a) * x_src[i - 1] + a * x_src[i]);
  }
  return out;
}

double wape(const SignalPair& pair) {
  pair.validate();
  const auto n = static_cast<double>(pair.hf.size());
  double mean_abs = 0.0;
  for (double x : pair.hf) mean_abs += std::abs(x);
  mean_abs /= n;
  if (!(mean_abs > 0.0)) throw InvalidArgument("WAPE denominator mean(|hf|) is zero; use the shifted variant");
  double acc = 0.0;
  for (std::size_t i = 0; i < pair.hf.size(); ++i) acc += std::abs(pair.hf[i] - pair.rom[i]);
  return 100.0 * acc / (n * mean_abs);
}

double wape_shifted_drag(const SignalPair& pair) {
  pair.validate();
  const double mean = std::accumulate(pair.hf.begin(), pair.hf.end(), 0.0) / static_cast<double>(pair.hf.size());
  SignalPair shifted = pair;
  for (double& x : shifted.hf) x -= mean;
  for (double& x : shifted.rom) x -= mean;
  double mean_abs = 0.0;
  for (double x : shifted.hf) mean_abs += std::abs(x);
  // Relative threshold: a constant signal leaves only rounding noise.
  double scale = 0.0;
  for (double x : pair.hf) scale = std::max(scale, std::abs(x));
  if (mean_abs / static_cast<double>(shifted.hf.size()) <= 1e-14 * std::max(scale, 1e-300))
    throw InvalidArgument("shifted drag WAPE undefined: the reference drag has no fluctuation about its mean");
  return wape(shifted);
}

double psd_peak_frequency(std::span<const double> signal, double sample_dt) {
  const auto n = static_cast<int>(signal.size());
  if (n < 4) throw InvalidArgument("PSD needs at least four samples");
  if (!(sample_dt > 0.0)) throw InvalidArgument("sample spacing must be positive");
  const double mean = std::accumulate(signal.begin(), signal.end(), 0.0) / n;
  const auto [lo, hi] = std::minmax_element(signal.begin(), signal.end());
  if (*hi - *lo <= 1e-14 * std::max(std::abs(*hi), 1e-300) || *hi == *lo)
    throw InvalidArgument("PSD peak undefined for a constant signal");

  double* in = fftw_alloc_real(static_cast<std::size_t>(n));
  fftw_complex* out = fftw_alloc_complex(static_cast<std::size_t>(n / 2 + 1));
  fftw_plan plan = nullptr;
  {
    std::lock_guard lock(fftw_planner_mutex);
    plan = fftw_plan_dft_r2c_1d(n, in, out, FFTW_ESTIMATE);
  }
  for (int i = 0; i < n; ++i) {
    const double w = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / (n - 1));
    in[i] = w * (signal[static_cast<std::size_t>(i)] - mean);
  }
  fftw_execute(plan);
  int best = 1;
  double best_power = -1.0;
  for (int k = 1; k <= n / 2; ++k) {
    const double power = out[k][0] * out[k][0] + out[k][1] * out[k][1];
    if (power > best_power) {
      best_power = power;
      best = k;
    }
  }
  {
    std::lock_guard lock(fftw_planner_mutex);
    fftw_destroy_plan(plan);
  }
  fftw_free(in);
  fftw_free(out);
  return best / (n * sample_dt);
}

std::optional<double> zero_crossing_period(std::span<const double> signal, double sample_dt, int min_crossings) {
  if (signal.size() < 3) return std::nullopt;
  const double mean = std::accumulate(signal.begin(), signal.end(), 0.0) / static_cast<double>(signal.size());
  std::vector<double> crossings;
  for (std::size_t i = 1; i < signal.size(); ++i) {
    const double a = signal[i - 1] - mean;
    const double b = signal[i] - mean;
    if (a < 0.0 && b >= 0.0) crossings.push_back((static_cast<double>(i) - 1.0 + a / (a - b)) * sample_dt);
  }
  if (static_cast<int>(crossings.size()) < std::max(min_crossings, 2)) return std::nullopt;
  return (crossings.back() - crossings.front()) / static_cast<double>(crossings.size() - 1);
}

double strouhal(double frequency, double velocity, double diameter) {
  if (!(velocity > 0.0) || !(diameter > 0.0)) throw InvalidArgument("Strouhal number needs U > 0 and D > 0");
  return frequency * diameter / velocity;
}

}  // namespace podfv
