#pragma once

#include <string>
#include <vector>

#include "smm/filter.hpp"
#include "smm/types.hpp"

namespace smm {

/// Preprocessed sample ready for classification; values lie in [0, 1] and
/// keep the sensor's raw dimensionality.
struct FeatureVector {
  std::vector<double> values;
  Sensor sensor = Sensor::nir;
  std::string object_id;
};

/// Forward differences over the wavelength grid; the last element is
/// duplicated so length is preserved.
std::vector<double> difference_quotient(const std::vector<double>& signal,
                                        const std::vector<double>& wavelengths);

/// Min-max scaling to [0, 1]; a constant signal maps to all 0.5.
std::vector<double> normalize_unit(const std::vector<double>& signal);

/// visible: filtfilt -> difference quotient -> normalize;
/// nir: difference quotient -> normalize. Filtering runs on the index domain.
FeatureVector preprocess_sample(const SpectralSample& sample, const FilterSpec& filter);

}  // namespace smm
