#pragma once

#include <filesystem>
#include <string>

#include "smm/types.hpp"

namespace smm {

/// Raised for manifest problems; message names file and line where possible.
class CorpusError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Loads a corpus directory containing objects.csv, samples.csv and optional
/// wavelengths_<sensor>.csv files. Structural defects (missing file, bad row,
/// dimension mismatch, duplicate sample key) throw CorpusError; deviations
/// from the full 50-object shape only add warnings.
Corpus load_corpus(const std::filesystem::path& dir);

/// Writes the canonical on-disk form: objects sorted by object_id, samples
/// sorted by (object_id, sensor, sample_index), numbers at up to 9
/// significant digits, LF line endings.
void write_corpus(const Corpus& corpus, const std::filesystem::path& dir);

/// Decimal formatting used throughout the CSV writers.
std::string format_g9(double v);

}  // namespace smm
