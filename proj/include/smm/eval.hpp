#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "smm/mlp.hpp"
#include "smm/preprocess.hpp"
#include "smm/svm.hpp"
#include "smm/types.hpp"

namespace smm {

enum class Protocol { kfold, loobj, sweep };
const std::string& protocol_name(Protocol p);

struct Fold {
  std::vector<int> train_ids;  // indices into Corpus::samples
  std::vector<int> test_ids;
  std::string held_out_object;  // loobj only
};

struct FoldPlan {
  Protocol protocol = Protocol::kfold;
  std::vector<Fold> folds;
  std::uint64_t seed = 0;
  std::vector<std::string> warnings;
};

/// Row-labeled confusion counts over the 5 prediction columns.
struct ConfusionMatrix {
  std::vector<std::string> row_labels;
  std::vector<int> true_class;  // material code of each row's label
  std::vector<std::array<long, kNumMaterials>> counts;

  int row_of(const std::string& label);  // appends if missing
  void add(const std::string& row_label, int truth, int predicted);
  long row_total(int row) const;
  double row_accuracy(int row) const;
  void merge(const ConfusionMatrix& other);
};

struct ClassifierConfig {
  enum class Kind { mlp, svm };
  Kind kind = Kind::mlp;
  MlpArchitecture arch;  // input_dim is overwritten from the sensor
  TrainConfig train;
  double svm_lambda = 1e-4;
  int svm_epochs = 100;
};

struct EvalReport {
  std::string protocol;
  std::string sensor;
  std::string classifier;
  std::vector<double> fold_accuracies;
  double mean_fold_accuracy = 0.0;
  double overall_accuracy = 0.0;  // total correct / total tested
  ConfusionMatrix material_confusion;
  ConfusionMatrix object_confusion;
  int k = 0;
  int n_per_object = 0;           // 0 = all
  int n_objects_per_material = 0; // 0 = all
  std::uint64_t seed = 0;
  double wall_clock_seconds = 0.0;
  std::vector<std::string> warnings;
};

struct SweepPoint {
  int n_objects = 0;
  double accuracy = 0.0;
};

struct SweepReport {
  std::vector<SweepPoint> points;
  double spearman = 0.0;
  std::vector<EvalReport> reports;
};

struct ObjectSpectrumSummary {
  std::string object_id;
  std::vector<double> mean;
  std::vector<double> sd;
  double mean_sd = 0.0;
};

/// Preprocessed per-sensor view of a corpus; rows align with sample_rows.
struct FeatureDataset {
  Eigen::MatrixXd features;
  std::vector<int> labels;
  std::vector<std::string> object_ids;
  std::vector<int> sample_rows;  // corpus sample index per row
  std::vector<int> row_of_sample;  // inverse map, -1 where absent
};

FeatureDataset preprocess_corpus(const Corpus& corpus, Sensor sensor,
                                 const FilterSpec& filter);

/// Per-fold training seed derived from the master seed; exposed so repeated
/// runs can reproduce individual folds.
std::uint64_t fold_seed(std::uint64_t master_seed, int fold_index);

/// Per object: shuffle its samples and deal them round the k folds. Sample
/// counts not divisible by k are truncated with a warning.
FoldPlan plan_stratified_kfold(const Corpus& corpus, Sensor sensor, int k, std::uint64_t seed);

/// One fold per object; test = all of its samples for the sensor. When
/// n_objects_per_material > 0, training objects are a seeded subset of the
/// remaining objects, never including the left-out one.
FoldPlan plan_leave_one_object_out(const Corpus& corpus, Sensor sensor,
                                   int n_objects_per_material, std::uint64_t seed);

/// Keeps exactly n_per_object seeded ids per object from train_ids.
std::vector<int> subsample_per_object(const Corpus& corpus, const std::vector<int>& train_ids,
                                      int n_per_object, std::uint64_t seed);

EvalReport run_kfold(const Corpus& corpus, Sensor sensor, const ClassifierConfig& clf,
                     const FilterSpec& filter, int k, int n_per_object, std::uint64_t seed,
                     int threads = 1);

EvalReport run_leave_one_object_out(const Corpus& corpus, Sensor sensor,
                                    const ClassifierConfig& clf, const FilterSpec& filter,
                                    int n_objects_per_material, std::uint64_t seed,
                                    int threads = 1);

SweepReport run_object_count_sweep(const Corpus& corpus, Sensor sensor,
                                   const ClassifierConfig& clf, const FilterSpec& filter,
                                   int n_min, int n_max, std::uint64_t seed, int threads = 1);

/// Per-wavelength mean and SD over [0,1]-normalized raw samples of each
/// requested object, plus the scalar mean SD across wavelengths.
std::vector<ObjectSpectrumSummary> summarize_spectra(const Corpus& corpus, Sensor sensor,
                                                     const std::vector<std::string>& object_ids);

double spearman_correlation(const std::vector<double>& xs, const std::vector<double>& ys);

/// Runs one fold: trains the configured classifier on the train rows and
/// returns predictions for the test rows. Shared by all protocols.
std::vector<int> run_fold(const FeatureDataset& data, const ClassifierConfig& clf,
                          const std::vector<int>& train_ids, const std::vector<int>& test_ids,
                          std::uint64_t seed);

}  // namespace smm
