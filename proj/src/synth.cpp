#include "smm/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "smm/rng.hpp"

namespace smm {
namespace {

// Bump center fractions are fixed per material so class structure is stable
// across seeds; only amplitudes are drawn.
double bump_center_fraction(int material, int bump) {
  return 0.08 + std::fmod(0.17 * material + 0.31 * bump, 0.84);
}

std::vector<double> minmax_normalize(const std::vector<double>& x) {
  const auto [lo_it, hi_it] = std::minmax_element(x.begin(), x.end());
  const double lo = *lo_it, hi = *hi_it;
  std::vector<double> out(x.size());
  if (hi == lo) {
    std::fill(out.begin(), out.end(), 0.5);
  } else {
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = (x[i] - lo) / (hi - lo);
  }
  return out;
}

}  // namespace

Corpus synth_corpus(const SynthConfig& config, std::uint64_t seed) {
  if (config.objects_per_material <= 0 || config.samples_per_object <= 0) {
    throw std::invalid_argument("synth_corpus: counts must be positive");
  }
  if (config.class_scale < 0 || config.object_scale < 0 || config.noise_scale < 0) {
    throw std::invalid_argument("synth_corpus: scales must be non-negative");
  }
  if (config.gain_min > config.gain_max) {
    throw std::invalid_argument("synth_corpus: gain_min > gain_max");
  }

  const std::vector<double> grid = default_wavelengths(config.sensor);
  const int dim = static_cast<int>(grid.size());
  const double lo = grid.front(), span = grid.back() - grid.front();

  const Rng root(seed);
  Corpus corpus;
  corpus.provenance = "synthetic(seed=" + std::to_string(seed) + ")";

  // Per-material base curves: baseline plus 3 Gaussian bumps.
  std::vector<std::vector<double>> base(kNumMaterials, std::vector<double>(dim, 0.2));
  for (int m = 0; m < kNumMaterials; ++m) {
    Rng class_rng = root.fork(1 + m);
    for (int bump = 0; bump < 3; ++bump) {
      const double center = lo + span * bump_center_fraction(m, bump);
      const double sigma = span * (0.05 + 0.02 * bump);
      const double amp = config.class_scale * class_rng.uniform(0.5, 1.0);
      for (int i = 0; i < dim; ++i) {
        const double d = (grid[i] - center) / sigma;
        base[m][i] += amp * std::exp(-0.5 * d * d);
      }
    }
  }

  for (int m = 0; m < kNumMaterials; ++m) {
    for (int k = 0; k < config.objects_per_material; ++k) {
      const int object_index = m * config.objects_per_material + k;
      char id[32];
      std::snprintf(id, sizeof(id), "%s_%02d", material_name(static_cast<Material>(m)).c_str(), k);

      ObjectRecord obj;
      obj.object_id = id;
      obj.display_name = material_name(static_cast<Material>(m)) + " object " + std::to_string(k);
      obj.material = static_cast<Material>(m);
      corpus.objects.push_back(obj);

      // Smooth per-object perturbation: a few low-frequency sinusoids.
      Rng object_rng = root.fork(1000 + object_index);
      std::vector<double> perturb(dim, 0.0);
      for (int h = 1; h <= 3; ++h) {
        const double amp = config.object_scale * object_rng.normal() / h;
        const double phase = object_rng.uniform(0.0, 2.0 * M_PI);
        for (int i = 0; i < dim; ++i) {
          const double t = (grid[i] - lo) / span;
          perturb[i] += amp * std::sin(2.0 * M_PI * h * t + phase);
        }
      }

      for (int s = 0; s < config.samples_per_object; ++s) {
        Rng sample_rng = object_rng.fork(1 + s);
        const double gain = sample_rng.uniform(config.gain_min, config.gain_max);
        SpectralSample sample;
        sample.object_id = id;
        sample.sensor = config.sensor;
        sample.sample_index = s;
        sample.wavelengths = grid;
        sample.intensities.resize(dim);
        for (int i = 0; i < dim; ++i) {
          const double noise = config.noise_scale > 0 ? config.noise_scale * sample_rng.normal() : 0.0;
          sample.intensities[i] = gain * std::max(0.0, base[m][i] + perturb[i] + noise);
        }
        corpus.samples.push_back(std::move(sample));
      }
    }
  }
  return corpus;
}

double centroid_oracle_accuracy(const Corpus& corpus, Sensor sensor) {
  const auto indices = corpus.sample_indices(sensor);
  if (indices.empty()) throw std::invalid_argument("centroid oracle: no samples for sensor");
  const int dim = static_cast<int>(corpus.samples[indices[0]].intensities.size());

  std::vector<std::vector<double>> normalized(indices.size());
  std::vector<int> labels(indices.size());
  std::vector<std::vector<double>> centroids(kNumMaterials, std::vector<double>(dim, 0.0));
  std::vector<int> counts(kNumMaterials, 0);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const auto& sample = corpus.samples[indices[i]];
    normalized[i] = minmax_normalize(sample.intensities);
    labels[i] = static_cast<int>(corpus.material_of(sample.object_id));
    for (int j = 0; j < dim; ++j) centroids[labels[i]][j] += normalized[i][j];
    counts[labels[i]]++;
  }
  for (int m = 0; m < kNumMaterials; ++m) {
    if (counts[m] == 0) continue;
    for (int j = 0; j < dim; ++j) centroids[m][j] /= counts[m];
  }

  int correct = 0;
  for (std::size_t i = 0; i < indices.size(); ++i) {
    int best = -1;
    double best_dist = std::numeric_limits<double>::infinity();
    for (int m = 0; m < kNumMaterials; ++m) {
      if (counts[m] == 0) continue;
      double dist = 0.0;
      for (int j = 0; j < dim; ++j) {
        const double d = normalized[i][j] - centroids[m][j];
        dist += d * d;
      }
      if (dist < best_dist) {
        best_dist = dist;
        best = m;
      }
    }
    if (best == labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(indices.size());
}

}  // namespace smm
