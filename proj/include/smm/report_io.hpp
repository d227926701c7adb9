#pragma once

#include <filesystem>

#include "smm/eval.hpp"
#include "smm/mlp.hpp"
#include "smm/svm.hpp"

namespace smm {

/// Self-describing JSON with a model_kind tag. Doubles are written with 17
/// significant digits so eval-mode predictions round-trip bit-for-bit.
void save_mlp_model(const MlpModel& model, const std::filesystem::path& path);
MlpModel load_mlp_model(const std::filesystem::path& path);

void save_svm_model(const LinearSvmModel& model, const std::filesystem::path& path);
LinearSvmModel load_svm_model(const std::filesystem::path& path);

/// report.json plus accuracy.csv, confusion_material.csv, confusion_object.csv
/// under out_dir. The timestamp field in report.json is the only
/// non-deterministic output and is excluded from comparisons.
void write_eval_report(const EvalReport& report, const std::filesystem::path& out_dir);

void write_sweep_report(const SweepReport& sweep, const std::filesystem::path& out_dir);

void write_features_csv(const FeatureDataset& data, const Corpus& corpus,
                        const std::filesystem::path& path);

}  // namespace smm
