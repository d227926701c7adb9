#include "smm/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace smm {

std::vector<double> difference_quotient(const std::vector<double>& signal,
                                        const std::vector<double>& wavelengths) {
  if (signal.size() != wavelengths.size()) {
    throw std::invalid_argument("difference_quotient: length mismatch");
  }
  if (signal.size() < 2) {
    throw std::invalid_argument("difference_quotient: need at least 2 samples");
  }
  const std::size_t n = signal.size();
  std::vector<double> out(n);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double dw = wavelengths[i + 1] - wavelengths[i];
    if (!(dw > 0.0)) {
      throw std::invalid_argument("difference_quotient: wavelengths not strictly increasing");
    }
    out[i] = (signal[i + 1] - signal[i]) / dw;
  }
  out[n - 1] = out[n - 2];
  return out;
}

std::vector<double> normalize_unit(const std::vector<double>& signal) {
  if (signal.empty()) throw std::invalid_argument("normalize_unit: empty signal");
  for (double v : signal) {
    if (!std::isfinite(v)) throw std::invalid_argument("normalize_unit: non-finite input");
  }
  const auto [lo_it, hi_it] = std::minmax_element(signal.begin(), signal.end());
  const double lo = *lo_it, hi = *hi_it;
  std::vector<double> out(signal.size());
  if (hi == lo) {
    std::fill(out.begin(), out.end(), 0.5);
  } else {
    for (std::size_t i = 0; i < signal.size(); ++i) out[i] = (signal[i] - lo) / (hi - lo);
  }
  return out;
}

FeatureVector preprocess_sample(const SpectralSample& sample, const FilterSpec& filter) {
  std::vector<double> signal = sample.intensities;
  if (sample.sensor == Sensor::visible) {
    signal = filtfilt(design_butterworth(filter), signal);
  }
  signal = difference_quotient(signal, sample.wavelengths);
  FeatureVector fv;
  fv.values = normalize_unit(signal);
  fv.sensor = sample.sensor;
  fv.object_id = sample.object_id;
  return fv;
}

}  // namespace smm
