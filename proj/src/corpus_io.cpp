#include "smm/corpus_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace smm {
namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

double parse_number(const std::string& s, const std::string& file, int line_no) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') {
    throw CorpusError(file + ":" + std::to_string(line_no) + ": bad number '" + s + "'");
  }
  return v;
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw CorpusError("cannot open " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

}  // namespace

std::string format_g9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

Corpus load_corpus(const std::filesystem::path& dir) {
  Corpus corpus;
  corpus.provenance = dir.string();

  const auto objects_path = dir / "objects.csv";
  const auto samples_path = dir / "samples.csv";
  if (!std::filesystem::exists(objects_path)) {
    throw CorpusError("missing manifest file: " + objects_path.string());
  }
  if (!std::filesystem::exists(samples_path)) {
    throw CorpusError("missing manifest file: " + samples_path.string());
  }

  // objects.csv
  {
    const auto lines = read_lines(objects_path);
    const std::string file = objects_path.string();
    if (lines.empty() || lines[0] != "object_id,display_name,material") {
      throw CorpusError(file + ":1: bad header, expected object_id,display_name,material");
    }
    std::set<std::string> seen;
    for (std::size_t i = 1; i < lines.size(); ++i) {
      if (lines[i].empty()) continue;
      const auto fields = split_csv(lines[i]);
      if (fields.size() != 3) {
        throw CorpusError(file + ":" + std::to_string(i + 1) + ": expected 3 fields, got " +
                          std::to_string(fields.size()));
      }
      ObjectRecord obj;
      obj.object_id = fields[0];
      obj.display_name = fields[1];
      try {
        obj.material = material_from_name(fields[2]);
      } catch (const std::invalid_argument& e) {
        throw CorpusError(file + ":" + std::to_string(i + 1) + ": " + e.what());
      }
      if (!seen.insert(obj.object_id).second) {
        throw CorpusError(file + ":" + std::to_string(i + 1) + ": duplicate object_id '" +
                          obj.object_id + "'");
      }
      corpus.objects.push_back(obj);
    }
  }

  // Per-sensor wavelength grids, defaulted when the optional file is absent.
  std::array<std::vector<double>, 2> grids = {default_wavelengths(Sensor::visible),
                                              default_wavelengths(Sensor::nir)};
  for (Sensor s : {Sensor::visible, Sensor::nir}) {
    const auto path = dir / ("wavelengths_" + sensor_name(s) + ".csv");
    if (!std::filesystem::exists(path)) continue;
    const auto lines = read_lines(path);
    const std::string file = path.string();
    if (lines.empty()) throw CorpusError(file + ": empty wavelength file");
    const auto fields = split_csv(lines[0]);
    const int expected = sensor_info(s).expected_dim;
    if (static_cast<int>(fields.size()) != expected) {
      throw CorpusError(file + ":1: expected " + std::to_string(expected) +
                        " values, got " + std::to_string(fields.size()));
    }
    std::vector<double> grid(expected);
    for (int i = 0; i < expected; ++i) grid[i] = parse_number(fields[i], file, 1);
    grids[static_cast<int>(s)] = std::move(grid);
  }

  // samples.csv
  {
    const auto lines = read_lines(samples_path);
    const std::string file = samples_path.string();
    if (lines.empty() || lines[0].rfind("object_id,sensor,sample_index", 0) != 0) {
      throw CorpusError(file + ":1: bad header, expected object_id,sensor,sample_index,v0,...");
    }
    std::set<std::tuple<std::string, int, int>> seen;
    for (std::size_t i = 1; i < lines.size(); ++i) {
      if (lines[i].empty()) continue;
      const int line_no = static_cast<int>(i + 1);
      const auto fields = split_csv(lines[i]);
      if (fields.size() < 4) {
        throw CorpusError(file + ":" + std::to_string(line_no) + ": too few fields");
      }
      SpectralSample sample;
      sample.object_id = fields[0];
      try {
        sample.sensor = sensor_from_name(fields[1]);
      } catch (const std::invalid_argument& e) {
        throw CorpusError(file + ":" + std::to_string(line_no) + ": " + e.what());
      }
      sample.sample_index = static_cast<int>(parse_number(fields[2], file, line_no));
      const int expected = sensor_info(sample.sensor).expected_dim;
      const int dim = static_cast<int>(fields.size()) - 3;
      if (dim != expected) {
        throw CorpusError(file + ":" + std::to_string(line_no) + ": sample dim " +
                          std::to_string(dim) + " != expected " + std::to_string(expected) +
                          " for sensor " + sensor_name(sample.sensor));
      }
      sample.intensities.resize(expected);
      for (int j = 0; j < expected; ++j) {
        sample.intensities[j] = parse_number(fields[3 + j], file, line_no);
        if (!std::isfinite(sample.intensities[j])) {
          throw CorpusError(file + ":" + std::to_string(line_no) + ": non-finite intensity");
        }
      }
      sample.wavelengths = grids[static_cast<int>(sample.sensor)];
      if (!corpus.find_object(sample.object_id)) {
        throw CorpusError(file + ":" + std::to_string(line_no) +
                          ": sample references unknown object_id '" + sample.object_id + "'");
      }
      const auto key = std::make_tuple(sample.object_id, static_cast<int>(sample.sensor),
                                       sample.sample_index);
      if (!seen.insert(key).second) {
        throw CorpusError(file + ":" + std::to_string(line_no) + ": duplicate sample (" +
                          sample.object_id + ", " + sensor_name(sample.sensor) + ", " +
                          std::to_string(sample.sample_index) + ")");
      }
      corpus.samples.push_back(std::move(sample));
    }
  }

  // Shape warnings; partial corpora are allowed.
  if (corpus.samples.empty()) {
    corpus.warnings.push_back("corpus has no samples");
  }
  if (corpus.objects.size() != 50) {
    corpus.warnings.push_back("partial corpus: " + std::to_string(corpus.objects.size()) +
                              " objects (full corpus has 50)");
  }
  std::map<std::pair<std::string, int>, int> counts;
  for (const auto& s : corpus.samples) {
    counts[{s.object_id, static_cast<int>(s.sensor)}]++;
  }
  std::set<int> distinct_counts;
  for (const auto& [key, n] : counts) distinct_counts.insert(n);
  if (distinct_counts.size() > 1) {
    corpus.warnings.push_back("uneven per-object sample counts across sensors/objects");
  } else if (!counts.empty() && *distinct_counts.begin() != 100) {
    corpus.warnings.push_back("per-object sample count is " +
                              std::to_string(*distinct_counts.begin()) +
                              " (full corpus has 100)");
  }
  return corpus;
}

void write_corpus(const Corpus& corpus, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);

  auto objects = corpus.objects;
  std::sort(objects.begin(), objects.end(),
            [](const ObjectRecord& a, const ObjectRecord& b) { return a.object_id < b.object_id; });
  {
    std::ofstream out(dir / "objects.csv", std::ios::binary);
    out << "object_id,display_name,material\n";
    for (const auto& obj : objects) {
      out << obj.object_id << ',' << obj.display_name << ','
          << material_name(obj.material) << '\n';
    }
  }

  std::vector<const SpectralSample*> samples;
  samples.reserve(corpus.samples.size());
  for (const auto& s : corpus.samples) samples.push_back(&s);
  std::sort(samples.begin(), samples.end(), [](const SpectralSample* a, const SpectralSample* b) {
    return std::tie(a->object_id, a->sensor, a->sample_index) <
           std::tie(b->object_id, b->sensor, b->sample_index);
  });

  int max_dim = 0;
  std::array<const std::vector<double>*, 2> grids = {nullptr, nullptr};
  for (const auto* s : samples) {
    max_dim = std::max(max_dim, static_cast<int>(s->intensities.size()));
    grids[static_cast<int>(s->sensor)] = &s->wavelengths;
  }
  {
    std::ofstream out(dir / "samples.csv", std::ios::binary);
    out << "object_id,sensor,sample_index";
    for (int j = 0; j < max_dim; ++j) out << ",v" << j;
    out << '\n';
    for (const auto* s : samples) {
      out << s->object_id << ',' << sensor_name(s->sensor) << ',' << s->sample_index;
      for (double v : s->intensities) out << ',' << format_g9(v);
      out << '\n';
    }
  }
  for (Sensor s : {Sensor::visible, Sensor::nir}) {
    const auto* grid = grids[static_cast<int>(s)];
    if (!grid) continue;
    std::ofstream out(dir / ("wavelengths_" + sensor_name(s) + ".csv"), std::ios::binary);
    for (std::size_t j = 0; j < grid->size(); ++j) {
      if (j) out << ',';
      out << format_g9((*grid)[j]);
    }
    out << '\n';
  }
}

}  // namespace smm
