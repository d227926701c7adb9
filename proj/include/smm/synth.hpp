#pragma once

#include <cstdint>

#include "smm/types.hpp"

namespace smm {

/// Generator for a desk-scale corpus with the same shape as the released
/// dataset. Class structure comes from per-material base curves, objects add
/// a smooth perturbation, samples add noise and a random global gain, so
/// within-object variation stays small relative to between-object variation.
struct SynthConfig {
  int objects_per_material = 10;
  int samples_per_object = 100;
  Sensor sensor = Sensor::nir;
  double class_scale = 1.0;    // amplitude scale of per-material base bumps
  double object_scale = 0.08;  // scale of the smooth per-object perturbation
  double noise_scale = 0.003;  // i.i.d. Gaussian sample noise
  double gain_min = 0.9;       // random global gain range per sample
  double gain_max = 1.1;
};

Corpus synth_corpus(const SynthConfig& config, std::uint64_t seed);

/// Nearest-class-centroid classifier over [0,1]-normalized raw intensities.
/// Centroids are per-material means; returns the fraction of samples whose
/// nearest centroid matches their material. Used as an independent
/// separability check on generated corpora.
double centroid_oracle_accuracy(const Corpus& corpus, Sensor sensor);

}  // namespace smm
