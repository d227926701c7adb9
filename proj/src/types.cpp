#include "smm/types.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace smm {

const std::array<std::string, kNumMaterials>& material_names() {
  static const std::array<std::string, kNumMaterials> names = {
      "metal", "plastic", "wood", "paper", "fabric"};
  return names;
}

const std::string& material_name(Material m) {
  return material_names().at(static_cast<int>(m));
}

Material material_from_name(const std::string& name) {
  const auto& names = material_names();
  for (int i = 0; i < kNumMaterials; ++i) {
    if (names[i] == name) return static_cast<Material>(i);
  }
  throw std::invalid_argument("unknown material name: '" + name + "'");
}

const SensorInfo& sensor_info(Sensor s) {
  static const SensorInfo visible{288, 317.0, 856.0};
  static const SensorInfo nir{331, 740.0, 1070.0};
  return s == Sensor::visible ? visible : nir;
}

const std::string& sensor_name(Sensor s) {
  static const std::string visible = "visible";
  static const std::string nir = "nir";
  return s == Sensor::visible ? visible : nir;
}

Sensor sensor_from_name(const std::string& name) {
  if (name == "visible") return Sensor::visible;
  if (name == "nir") return Sensor::nir;
  throw std::invalid_argument("unknown sensor name: '" + name + "'");
}

std::vector<double> default_wavelengths(Sensor s) {
  const SensorInfo& info = sensor_info(s);
  std::vector<double> grid(info.expected_dim);
  if (s == Sensor::nir) {
    for (int i = 0; i < info.expected_dim; ++i) {
      grid[i] = info.wavelength_min_nm + i;
    }
  } else {
    const double step =
        (info.wavelength_max_nm - info.wavelength_min_nm) / (info.expected_dim - 1);
    for (int i = 0; i < info.expected_dim; ++i) {
      grid[i] = info.wavelength_min_nm + step * i;
    }
  }
  return grid;
}

const ObjectRecord* Corpus::find_object(const std::string& object_id) const {
  for (const auto& obj : objects) {
    if (obj.object_id == object_id) return &obj;
  }
  return nullptr;
}

Material Corpus::material_of(const std::string& object_id) const {
  const ObjectRecord* obj = find_object(object_id);
  if (!obj) throw std::invalid_argument("unknown object_id: '" + object_id + "'");
  return obj->material;
}

std::vector<int> Corpus::sample_indices(Sensor s) const {
  std::vector<int> idx;
  for (int i = 0; i < static_cast<int>(samples.size()); ++i) {
    if (samples[i].sensor == s) idx.push_back(i);
  }
  return idx;
}

ValidationReport validate_corpus(const Corpus& corpus) {
  ValidationReport report;
  report.warnings = corpus.warnings;

  std::map<std::string, int> object_index;
  for (int i = 0; i < static_cast<int>(corpus.objects.size()); ++i) {
    const auto& obj = corpus.objects[i];
    if (object_index.count(obj.object_id)) {
      report.violations.push_back("duplicate object_id '" + obj.object_id + "'");
    }
    object_index[obj.object_id] = i;
    report.objects_per_material[static_cast<int>(obj.material)]++;
  }

  for (const auto& sample : corpus.samples) {
    const auto key = std::make_pair(sample.object_id, sensor_name(sample.sensor));
    report.counts[key]++;
    if (!object_index.count(sample.object_id)) {
      report.violations.push_back("sample references unknown object_id '" +
                                  sample.object_id + "'");
      continue;
    }
    const SensorInfo& info = sensor_info(sample.sensor);
    if (static_cast<int>(sample.intensities.size()) != info.expected_dim ||
        static_cast<int>(sample.wavelengths.size()) != info.expected_dim) {
      std::ostringstream msg;
      msg << "sample (" << sample.object_id << ", " << sensor_name(sample.sensor)
          << ", " << sample.sample_index << ") has dim "
          << sample.intensities.size() << ", expected " << info.expected_dim;
      report.violations.push_back(msg.str());
      continue;
    }
    bool grid_ok = true;
    for (std::size_t i = 1; i < sample.wavelengths.size(); ++i) {
      if (!(sample.wavelengths[i] > sample.wavelengths[i - 1])) grid_ok = false;
    }
    if (!grid_ok) {
      report.violations.push_back("sample (" + sample.object_id +
                                  ") wavelengths not strictly increasing");
    } else {
      if (std::abs(sample.wavelengths.front() - info.wavelength_min_nm) > 2.0 ||
          std::abs(sample.wavelengths.back() - info.wavelength_max_nm) > 2.0) {
        report.violations.push_back("sample (" + sample.object_id +
                                    ") wavelength endpoints outside sensor range");
      }
    }
    for (double v : sample.intensities) {
      if (!std::isfinite(v) || v < 0.0) {
        report.violations.push_back("sample (" + sample.object_id +
                                    ") has non-finite or negative intensity");
        break;
      }
    }
  }

  // Material balance and per-object sample balance are informational unless
  // a count is impossible, so flag imbalances as warnings.
  int expected_per_material = -1;
  bool balanced = true;
  for (int m = 0; m < kNumMaterials; ++m) {
    if (expected_per_material < 0) expected_per_material = report.objects_per_material[m];
    if (report.objects_per_material[m] != expected_per_material) balanced = false;
  }
  if (!balanced) {
    std::ostringstream msg;
    msg << "material imbalance:";
    for (int m = 0; m < kNumMaterials; ++m) {
      msg << " " << material_names()[m] << "=" << report.objects_per_material[m];
    }
    report.warnings.push_back(msg.str());
  }
  return report;
}

std::string ValidationReport::to_string() const {
  std::ostringstream out;
  out << "objects per material:";
  for (int m = 0; m < kNumMaterials; ++m) {
    out << " " << material_names()[m] << "=" << objects_per_material[m];
  }
  out << "\n";
  std::map<std::string, std::map<std::string, int>> by_object;
  for (const auto& [key, count] : counts) {
    by_object[key.first][key.second] = count;
  }
  for (const auto& [object_id, sensors] : by_object) {
    out << object_id << ":";
    for (const auto& [sensor, count] : sensors) {
      out << " " << sensor << "=" << count;
    }
    out << "\n";
  }
  for (const auto& w : warnings) out << "warning: " << w << "\n";
  for (const auto& v : violations) out << "violation: " << v << "\n";
  return out.str();
}

}  // namespace smm
