#include <algorithm>
#include <set>

#include "doctest.h"
#include "smm/eval.hpp"
#include "smm/synth.hpp"

using namespace smm;

namespace {

Corpus full_scale_corpus() {
  // 50 objects x 100 samples, nir: same shape as the released dataset
  static const Corpus corpus = synth_corpus(SynthConfig{}, 41);
  return corpus;
}

Corpus micro_corpus() {
  SynthConfig config;
  config.objects_per_material = 2;
  config.samples_per_object = 6;  // 60 samples total
  return synth_corpus(config, 17);
}

ClassifierConfig fast_svm() {
  ClassifierConfig clf;
  clf.kind = ClassifierConfig::Kind::svm;
  clf.svm_epochs = 10;
  return clf;
}

}  // namespace

TEST_CASE("stratified 5-fold on the full-scale corpus: 1000 samples, 20 per object") {
  const Corpus corpus = full_scale_corpus();
  const FoldPlan plan = plan_stratified_kfold(corpus, Sensor::nir, 5, 1);
  REQUIRE(plan.folds.size() == 5);

  std::set<int> all_test;
  for (const auto& fold : plan.folds) {
    CHECK(fold.test_ids.size() == 1000);
    CHECK(fold.train_ids.size() == 4000);
    std::map<std::string, int> per_object;
    for (int id : fold.test_ids) per_object[corpus.samples[id].object_id]++;
    CHECK(per_object.size() == 50);
    for (const auto& [object_id, count] : per_object) CHECK(count == 20);
    // train/test disjoint
    std::set<int> train_set(fold.train_ids.begin(), fold.train_ids.end());
    for (int id : fold.test_ids) CHECK(train_set.count(id) == 0);
    all_test.insert(fold.test_ids.begin(), fold.test_ids.end());
  }
  CHECK(all_test.size() == 5000);  // folds partition the corpus
}

TEST_CASE("kfold handles small corpora and rejects bad k") {
  SynthConfig config;
  config.objects_per_material = 1;
  config.samples_per_object = 10;
  const Corpus corpus = synth_corpus(config, 2);
  const FoldPlan plan = plan_stratified_kfold(corpus, Sensor::nir, 5, 0);
  for (const auto& fold : plan.folds) CHECK(fold.test_ids.size() == 2 * kNumMaterials);
  CHECK_THROWS_AS(plan_stratified_kfold(corpus, Sensor::nir, 1, 0), std::invalid_argument);
}

TEST_CASE("kfold truncates with a warning when counts are not divisible") {
  SynthConfig config;
  config.objects_per_material = 1;
  config.samples_per_object = 7;
  const Corpus corpus = synth_corpus(config, 2);
  const FoldPlan plan = plan_stratified_kfold(corpus, Sensor::nir, 3, 0);
  CHECK(!plan.warnings.empty());
  for (const auto& fold : plan.folds) CHECK(fold.test_ids.size() == 2 * kNumMaterials);
}

TEST_CASE("leave-one-object-out folds train on 4900 and test on 100") {
  const Corpus corpus = full_scale_corpus();
  const FoldPlan plan = plan_leave_one_object_out(corpus, Sensor::nir, 0, 1);
  REQUIRE(plan.folds.size() == 50);
  for (const auto& fold : plan.folds) {
    CHECK(fold.train_ids.size() == 4900);
    CHECK(fold.test_ids.size() == 100);
    for (int id : fold.test_ids) CHECK(corpus.samples[id].object_id == fold.held_out_object);
    for (int id : fold.train_ids) CHECK(corpus.samples[id].object_id != fold.held_out_object);
  }
}

TEST_CASE("restricted LOOO training sets never include the held-out object") {
  const Corpus corpus = full_scale_corpus();
  const FoldPlan plan = plan_leave_one_object_out(corpus, Sensor::nir, 3, 9);
  for (const auto& fold : plan.folds) {
    CHECK(fold.train_ids.size() == 3 * kNumMaterials * 100);
    std::set<std::string> train_objects;
    for (int id : fold.train_ids) train_objects.insert(corpus.samples[id].object_id);
    CHECK(train_objects.size() == 3 * kNumMaterials);
    CHECK(train_objects.count(fold.held_out_object) == 0);
  }
  CHECK_THROWS_AS(plan_leave_one_object_out(corpus, Sensor::nir, 10, 9),
                  std::invalid_argument);
}

TEST_CASE("per-object subsampling keeps exactly n seeded ids") {
  const Corpus corpus = full_scale_corpus();
  const FoldPlan plan = plan_stratified_kfold(corpus, Sensor::nir, 5, 1);
  const auto& train = plan.folds[0].train_ids;

  const auto one = subsample_per_object(corpus, train, 1, 5);
  CHECK(one.size() == 50);
  const auto eighty = subsample_per_object(corpus, train, 80, 5);
  CHECK(eighty.size() == 4000);
  std::set<int> train_set(train.begin(), train.end());
  CHECK(std::set<int>(eighty.begin(), eighty.end()) == train_set);

  const auto again = subsample_per_object(corpus, train, 10, 5);
  CHECK(subsample_per_object(corpus, train, 10, 5) == again);
  CHECK(subsample_per_object(corpus, train, 10, 6) != again);
  CHECK_THROWS_AS(subsample_per_object(corpus, train, 81, 5), std::invalid_argument);
}

TEST_CASE("harness accuracy equals an independent brute-force loop") {
  const Corpus corpus = micro_corpus();
  const ClassifierConfig clf = fast_svm();
  const FilterSpec filter;
  const std::uint64_t seed = 23;
  const int k = 3;

  const EvalReport report = run_kfold(corpus, Sensor::nir, clf, filter, k, 0, seed);

  // brute force: enumerate the same plan, train each fold directly, count
  const FoldPlan plan = plan_stratified_kfold(corpus, Sensor::nir, k, seed);
  const FeatureDataset data = preprocess_corpus(corpus, Sensor::nir, filter);
  long total_correct = 0, total = 0;
  for (std::size_t f = 0; f < plan.folds.size(); ++f) {
    Eigen::MatrixXd train(plan.folds[f].train_ids.size(), data.features.cols());
    std::vector<int> train_labels;
    for (std::size_t i = 0; i < plan.folds[f].train_ids.size(); ++i) {
      const int row = data.row_of_sample[plan.folds[f].train_ids[i]];
      train.row(i) = data.features.row(row);
      train_labels.push_back(data.labels[row]);
    }
    const LinearSvmModel model = train_svm(train, train_labels, clf.svm_lambda, clf.svm_epochs,
                                           fold_seed(seed, static_cast<int>(f)));
    long correct = 0;
    for (int id : plan.folds[f].test_ids) {
      const int row = data.row_of_sample[id];
      if (static_cast<int>(predict_svm(model, data.features.row(row).transpose())) ==
          data.labels[row]) {
        ++correct;
      }
    }
    const double accuracy =
        static_cast<double>(correct) / static_cast<double>(plan.folds[f].test_ids.size());
    CHECK(report.fold_accuracies[f] == accuracy);
    total_correct += correct;
    total += static_cast<long>(plan.folds[f].test_ids.size());
  }
  CHECK(report.overall_accuracy == static_cast<double>(total_correct) / total);
}

TEST_CASE("confusion row sums equal test counts and accuracy matches the trace") {
  const Corpus corpus = micro_corpus();
  const EvalReport report = run_kfold(corpus, Sensor::nir, fast_svm(), FilterSpec{}, 3, 0, 5);
  long trace = 0, total = 0;
  for (std::size_t r = 0; r < report.material_confusion.row_labels.size(); ++r) {
    const long row_sum = report.material_confusion.row_total(static_cast<int>(r));
    CHECK(row_sum == 12);  // 2 objects x 6 samples per material
    trace += report.material_confusion.counts[r][report.material_confusion.true_class[r]];
    total += row_sum;
  }
  CHECK(report.overall_accuracy == static_cast<double>(trace) / total);
  for (std::size_t r = 0; r < report.object_confusion.row_labels.size(); ++r) {
    CHECK(report.object_confusion.row_total(static_cast<int>(r)) == 6);
  }
}

TEST_CASE("reports are deterministic and thread-count independent") {
  const Corpus corpus = micro_corpus();
  const EvalReport a = run_kfold(corpus, Sensor::nir, fast_svm(), FilterSpec{}, 3, 2, 5, 1);
  const EvalReport b = run_kfold(corpus, Sensor::nir, fast_svm(), FilterSpec{}, 3, 2, 5, 1);
  const EvalReport c = run_kfold(corpus, Sensor::nir, fast_svm(), FilterSpec{}, 3, 2, 5, 3);
  CHECK(a.fold_accuracies == b.fold_accuracies);
  CHECK(a.overall_accuracy == b.overall_accuracy);
  CHECK(a.fold_accuracies == c.fold_accuracies);
  CHECK(a.material_confusion.counts == c.material_confusion.counts);
}

TEST_CASE("LOOO on objects with identical distributions matches kfold accuracy") {
  SynthConfig config;
  config.objects_per_material = 2;
  config.samples_per_object = 50;
  config.object_scale = 0.0;  // objects within a material are indistinguishable
  const Corpus corpus = synth_corpus(config, 33);

  ClassifierConfig clf = fast_svm();
  clf.svm_epochs = 50;
  const EvalReport loobj = run_leave_one_object_out(corpus, Sensor::nir, clf, FilterSpec{}, 0, 3);
  const EvalReport kfold = run_kfold(corpus, Sensor::nir, clf, FilterSpec{}, 5, 0, 3);
  CHECK(std::abs(loobj.overall_accuracy - kfold.overall_accuracy) < 0.05);
}

TEST_CASE("object count sweep trends upward on structured data") {
  SynthConfig config;
  config.objects_per_material = 4;
  config.samples_per_object = 10;
  const Corpus corpus = synth_corpus(config, 8);
  const SweepReport sweep =
      run_object_count_sweep(corpus, Sensor::nir, fast_svm(), FilterSpec{}, 1, 3, 11);
  REQUIRE(sweep.points.size() == 3);
  CHECK(sweep.points.front().n_objects == 1);
  CHECK(sweep.points.back().n_objects == 3);
  // endpoint coincides with plain LOOO restricted to n objects
  const EvalReport direct =
      run_leave_one_object_out(corpus, Sensor::nir, fast_svm(), FilterSpec{}, 3, 11);
  CHECK(sweep.points.back().accuracy == direct.mean_fold_accuracy);
}

TEST_CASE("spearman correlation basics") {
  CHECK(spearman_correlation({1, 2, 3, 4}, {10, 20, 30, 40}) == doctest::Approx(1.0));
  CHECK(spearman_correlation({1, 2, 3, 4}, {9, 7, 5, 3}) == doctest::Approx(-1.0));
  CHECK(spearman_correlation({1, 2, 3, 4}, {1, 1, 1, 1}) == doctest::Approx(0.0));
  CHECK_THROWS_AS(spearman_correlation({1}, {1}), std::invalid_argument);
}

TEST_CASE("spectrum summaries collapse for zero-variance objects") {
  SynthConfig config;
  config.objects_per_material = 1;
  config.samples_per_object = 3;
  config.noise_scale = 0.0;
  config.gain_min = config.gain_max = 1.0;
  const Corpus corpus = synth_corpus(config, 2);

  const auto summaries =
      summarize_spectra(corpus, Sensor::nir, {corpus.objects.front().object_id});
  REQUIRE(summaries.size() == 1);
  for (double sd : summaries[0].sd) CHECK(sd == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(summaries[0].mean_sd == doctest::Approx(0.0).epsilon(1e-12));
  for (double m : summaries[0].mean) {
    CHECK(m >= 0.0);
    CHECK(m <= 1.0);
  }
  CHECK_THROWS_AS(summarize_spectra(corpus, Sensor::nir, {"ghost"}), std::invalid_argument);
}
