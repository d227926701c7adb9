#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace smm {

constexpr int kNumMaterials = 5;

enum class Material : int { metal = 0, plastic = 1, wood = 2, paper = 3, fabric = 4 };

const std::array<std::string, kNumMaterials>& material_names();
const std::string& material_name(Material m);
Material material_from_name(const std::string& name);  // throws on unknown name

enum class Sensor : int { visible = 0, nir = 1 };

struct SensorInfo {
  int expected_dim;
  double wavelength_min_nm;
  double wavelength_max_nm;
};

/// visible: 288 channels over 317-856 nm; nir: 331 channels over 740-1070 nm.
const SensorInfo& sensor_info(Sensor s);
const std::string& sensor_name(Sensor s);
Sensor sensor_from_name(const std::string& name);

/// Default wavelength grid: nir is 331 integer nm values, visible is 288
/// evenly spaced values spanning the sensor range.
std::vector<double> default_wavelengths(Sensor s);

/// One raw spectrometer reading.
struct SpectralSample {
  std::string object_id;
  Sensor sensor = Sensor::nir;
  int sample_index = 0;
  std::vector<double> wavelengths;
  std::vector<double> intensities;
};

struct ObjectRecord {
  std::string object_id;
  std::string display_name;
  Material material = Material::metal;
};

/// Immutable after load; safe to share read-only across evaluation workers.
struct Corpus {
  std::vector<ObjectRecord> objects;
  std::vector<SpectralSample> samples;
  std::string provenance;
  std::vector<std::string> warnings;

  const ObjectRecord* find_object(const std::string& object_id) const;
  Material material_of(const std::string& object_id) const;  // throws on unknown id

  /// Indices into samples for one sensor, in stored order.
  std::vector<int> sample_indices(Sensor s) const;
};

struct ValidationReport {
  // (object_id, sensor name) -> sample count
  std::map<std::pair<std::string, std::string>, int> counts;
  std::array<int, kNumMaterials> objects_per_material{};
  std::vector<std::string> violations;
  std::vector<std::string> warnings;

  bool ok() const { return violations.empty(); }
  std::string to_string() const;
};

/// Pure structural check; violations are reported, never thrown.
ValidationReport validate_corpus(const Corpus& corpus);

}  // namespace smm
