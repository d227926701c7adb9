#include "smm/eval.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>
#include <thread>

#include "smm/rng.hpp"

namespace smm {

const std::string& protocol_name(Protocol p) {
  static const std::string names[] = {"kfold", "loobj", "sweep"};
  return names[static_cast<int>(p)];
}

int ConfusionMatrix::row_of(const std::string& label) {
  for (std::size_t i = 0; i < row_labels.size(); ++i) {
    if (row_labels[i] == label) return static_cast<int>(i);
  }
  row_labels.push_back(label);
  true_class.push_back(-1);
  counts.push_back({});
  return static_cast<int>(row_labels.size()) - 1;
}

void ConfusionMatrix::add(const std::string& row_label, int truth, int predicted) {
  const int row = row_of(row_label);
  true_class[row] = truth;
  counts[row][predicted]++;
}

long ConfusionMatrix::row_total(int row) const {
  return std::accumulate(counts[row].begin(), counts[row].end(), 0L);
}

double ConfusionMatrix::row_accuracy(int row) const {
  const long total = row_total(row);
  if (total == 0 || true_class[row] < 0) return 0.0;
  return static_cast<double>(counts[row][true_class[row]]) / total;
}

void ConfusionMatrix::merge(const ConfusionMatrix& other) {
  for (std::size_t r = 0; r < other.row_labels.size(); ++r) {
    const int row = row_of(other.row_labels[r]);
    true_class[row] = other.true_class[r];
    for (int c = 0; c < kNumMaterials; ++c) counts[row][c] += other.counts[r][c];
  }
}

FeatureDataset preprocess_corpus(const Corpus& corpus, Sensor sensor, const FilterSpec& filter) {
  const auto indices = corpus.sample_indices(sensor);
  if (indices.empty()) throw std::invalid_argument("preprocess_corpus: no samples for sensor");
  const int dim = sensor_info(sensor).expected_dim;

  FeatureDataset data;
  data.features.resize(static_cast<Eigen::Index>(indices.size()), dim);
  data.labels.resize(indices.size());
  data.object_ids.resize(indices.size());
  data.sample_rows = indices;
  data.row_of_sample.assign(corpus.samples.size(), -1);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const auto& sample = corpus.samples[indices[i]];
    const FeatureVector fv = preprocess_sample(sample, filter);
    for (int j = 0; j < dim; ++j) data.features(static_cast<Eigen::Index>(i), j) = fv.values[j];
    data.labels[i] = static_cast<int>(corpus.material_of(sample.object_id));
    data.object_ids[i] = sample.object_id;
    data.row_of_sample[indices[i]] = static_cast<int>(i);
  }
  return data;
}

std::uint64_t fold_seed(std::uint64_t master_seed, int fold_index) {
  return splitmix64(master_seed ^ splitmix64(0xF01D0000ULL + static_cast<std::uint64_t>(fold_index)));
}

namespace {

std::map<std::string, std::vector<int>> group_by_object(const Corpus& corpus, Sensor sensor) {
  std::map<std::string, std::vector<int>> groups;
  for (int i = 0; i < static_cast<int>(corpus.samples.size()); ++i) {
    if (corpus.samples[i].sensor == sensor) groups[corpus.samples[i].object_id].push_back(i);
  }
  return groups;
}

}  // namespace

FoldPlan plan_stratified_kfold(const Corpus& corpus, Sensor sensor, int k, std::uint64_t seed) {
  if (k < 2) throw std::invalid_argument("plan_stratified_kfold: k must be >= 2");
  auto groups = group_by_object(corpus, sensor);
  if (groups.empty()) throw std::invalid_argument("plan_stratified_kfold: empty corpus");

  FoldPlan plan;
  plan.protocol = Protocol::kfold;
  plan.seed = seed;
  plan.folds.resize(k);

  const Rng root(seed);
  int object_index = 0;
  for (auto& [object_id, ids] : groups) {
    Rng rng = root.fork(object_index++);
    rng.shuffle(ids);
    const int per_fold = static_cast<int>(ids.size()) / k;
    if (per_fold == 0) {
      throw std::invalid_argument("plan_stratified_kfold: object '" + object_id +
                                  "' has fewer samples than folds");
    }
    if (static_cast<int>(ids.size()) % k != 0) {
      plan.warnings.push_back("object '" + object_id + "' sample count " +
                              std::to_string(ids.size()) + " not divisible by k; truncated to " +
                              std::to_string(per_fold * k));
    }
    for (int f = 0; f < k; ++f) {
      for (int j = 0; j < per_fold; ++j) {
        const int id = ids[f * per_fold + j];
        plan.folds[f].test_ids.push_back(id);
        for (int g = 0; g < k; ++g) {
          if (g != f) plan.folds[g].train_ids.push_back(id);
        }
      }
    }
  }
  for (auto& fold : plan.folds) {
    std::sort(fold.train_ids.begin(), fold.train_ids.end());
    std::sort(fold.test_ids.begin(), fold.test_ids.end());
  }
  return plan;
}

FoldPlan plan_leave_one_object_out(const Corpus& corpus, Sensor sensor,
                                   int n_objects_per_material, std::uint64_t seed) {
  auto groups = group_by_object(corpus, sensor);
  if (groups.empty()) throw std::invalid_argument("plan_leave_one_object_out: empty corpus");

  std::array<std::vector<std::string>, kNumMaterials> objects_by_material;
  for (const auto& obj : corpus.objects) {
    if (groups.count(obj.object_id)) {
      objects_by_material[static_cast<int>(obj.material)].push_back(obj.object_id);
    }
  }
  for (int m = 0; m < kNumMaterials; ++m) {
    std::sort(objects_by_material[m].begin(), objects_by_material[m].end());
    if (n_objects_per_material == 0 && objects_by_material[m].size() == 1) {
      throw std::invalid_argument("plan_leave_one_object_out: material '" +
                                  material_names()[m] + "' has a single object");
    }
  }

  FoldPlan plan;
  plan.protocol = Protocol::loobj;
  plan.seed = seed;

  const Rng root(seed);
  int fold_index = 0;
  for (const auto& [held_out, test_ids] : groups) {
    Fold fold;
    fold.held_out_object = held_out;
    fold.test_ids = test_ids;
    const int held_material = static_cast<int>(corpus.material_of(held_out));

    std::set<std::string> train_objects;
    if (n_objects_per_material == 0) {
      for (const auto& [object_id, ids] : groups) {
        if (object_id != held_out) train_objects.insert(object_id);
      }
    } else {
      Rng rng = root.fork(fold_index);
      for (int m = 0; m < kNumMaterials; ++m) {
        std::vector<std::string> candidates;
        for (const auto& object_id : objects_by_material[m]) {
          if (object_id != held_out) candidates.push_back(object_id);
        }
        if (static_cast<int>(candidates.size()) < n_objects_per_material) {
          throw std::invalid_argument(
              "plan_leave_one_object_out: material '" + material_names()[m] +
              "' has too few objects for n=" + std::to_string(n_objects_per_material) +
              (m == held_material ? " excluding the held-out object" : ""));
        }
        rng.shuffle(candidates);
        for (int j = 0; j < n_objects_per_material; ++j) train_objects.insert(candidates[j]);
      }
    }
    for (const auto& object_id : train_objects) {
      const auto& ids = groups.at(object_id);
      fold.train_ids.insert(fold.train_ids.end(), ids.begin(), ids.end());
    }
    std::sort(fold.train_ids.begin(), fold.train_ids.end());
    std::sort(fold.test_ids.begin(), fold.test_ids.end());
    plan.folds.push_back(std::move(fold));
    ++fold_index;
  }
  return plan;
}

std::vector<int> subsample_per_object(const Corpus& corpus, const std::vector<int>& train_ids,
                                      int n_per_object, std::uint64_t seed) {
  if (n_per_object < 1) throw std::invalid_argument("subsample_per_object: n must be >= 1");
  std::map<std::string, std::vector<int>> groups;
  for (int id : train_ids) groups[corpus.samples[id].object_id].push_back(id);

  const Rng root(seed);
  std::vector<int> kept;
  int object_index = 0;
  for (auto& [object_id, ids] : groups) {
    if (static_cast<int>(ids.size()) < n_per_object) {
      throw std::invalid_argument("subsample_per_object: object '" + object_id + "' has only " +
                                  std::to_string(ids.size()) + " training samples");
    }
    Rng rng = root.fork(object_index++);
    rng.shuffle(ids);
    kept.insert(kept.end(), ids.begin(), ids.begin() + n_per_object);
  }
  std::sort(kept.begin(), kept.end());
  return kept;
}

std::vector<int> run_fold(const FeatureDataset& data, const ClassifierConfig& clf,
                          const std::vector<int>& train_ids, const std::vector<int>& test_ids,
                          std::uint64_t seed) {
  Eigen::MatrixXd train(static_cast<Eigen::Index>(train_ids.size()), data.features.cols());
  std::vector<int> train_labels(train_ids.size());
  for (std::size_t i = 0; i < train_ids.size(); ++i) {
    const int row = data.row_of_sample[train_ids[i]];
    train.row(static_cast<Eigen::Index>(i)) = data.features.row(row);
    train_labels[i] = data.labels[row];
  }

  std::vector<int> predictions(test_ids.size());
  if (clf.kind == ClassifierConfig::Kind::mlp) {
    MlpArchitecture arch = clf.arch;
    arch.input_dim = static_cast<int>(data.features.cols());
    TrainConfig cfg = clf.train;
    cfg.seed = seed;
    const MlpModel model = train_mlp(train, train_labels, arch, cfg);
    for (std::size_t i = 0; i < test_ids.size(); ++i) {
      const int row = data.row_of_sample[test_ids[i]];
      predictions[i] = static_cast<int>(predict(model, data.features.row(row).transpose()).first);
    }
  } else {
    const LinearSvmModel model =
        train_svm(train, train_labels, clf.svm_lambda, clf.svm_epochs, seed);
    for (std::size_t i = 0; i < test_ids.size(); ++i) {
      const int row = data.row_of_sample[test_ids[i]];
      predictions[i] = static_cast<int>(predict_svm(model, data.features.row(row).transpose()));
    }
  }
  return predictions;
}

namespace {

struct FoldResult {
  double accuracy = 0.0;
  long correct = 0;
  long total = 0;
  ConfusionMatrix material_confusion;
  ConfusionMatrix object_confusion;
};

EvalReport run_plan(const Corpus& corpus, Sensor sensor, const ClassifierConfig& clf,
                    const FilterSpec& filter, const FoldPlan& plan, int n_per_object,
                    std::uint64_t seed, int threads) {
  const auto start_time = std::chrono::steady_clock::now();
  const FeatureDataset data = preprocess_corpus(corpus, sensor, filter);

  const int num_folds = static_cast<int>(plan.folds.size());
  std::vector<FoldResult> results(num_folds);

  auto run_one = [&](int f) {
    const Fold& fold = plan.folds[f];
    std::vector<int> train_ids = fold.train_ids;
    if (n_per_object > 0) {
      train_ids = subsample_per_object(corpus, train_ids, n_per_object, fold_seed(seed, f));
    }
    const std::vector<int> predictions =
        run_fold(data, clf, train_ids, fold.test_ids, fold_seed(seed, f));
    FoldResult& r = results[f];
    for (std::size_t i = 0; i < fold.test_ids.size(); ++i) {
      const int row = data.row_of_sample[fold.test_ids[i]];
      const int truth = data.labels[row];
      r.material_confusion.add(material_names()[truth], truth, predictions[i]);
      r.object_confusion.add(data.object_ids[row], truth, predictions[i]);
      if (predictions[i] == truth) r.correct++;
      r.total++;
    }
    r.accuracy = r.total > 0 ? static_cast<double>(r.correct) / r.total : 0.0;
  };

  if (threads <= 1) {
    for (int f = 0; f < num_folds; ++f) run_one(f);
  } else {
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (int t = 0; t < std::min(threads, num_folds); ++t) {
      pool.emplace_back([&] {
        for (int f = next.fetch_add(1); f < num_folds; f = next.fetch_add(1)) run_one(f);
      });
    }
    for (auto& th : pool) th.join();
  }

  EvalReport report;
  report.protocol = protocol_name(plan.protocol);
  report.sensor = sensor_name(sensor);
  report.classifier = clf.kind == ClassifierConfig::Kind::mlp ? "mlp" : "svm";
  report.seed = seed;
  report.n_per_object = n_per_object;
  report.warnings = plan.warnings;

  long correct = 0, total = 0;
  // Deterministic reduction ordered by fold index.
  for (int f = 0; f < num_folds; ++f) {
    report.fold_accuracies.push_back(results[f].accuracy);
    report.material_confusion.merge(results[f].material_confusion);
    report.object_confusion.merge(results[f].object_confusion);
    correct += results[f].correct;
    total += results[f].total;
  }
  report.overall_accuracy = total > 0 ? static_cast<double>(correct) / total : 0.0;
  report.mean_fold_accuracy =
      std::accumulate(report.fold_accuracies.begin(), report.fold_accuracies.end(), 0.0) /
      std::max(1, num_folds);
  report.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start_time).count();
  return report;
}

}  // namespace

EvalReport run_kfold(const Corpus& corpus, Sensor sensor, const ClassifierConfig& clf,
                     const FilterSpec& filter, int k, int n_per_object, std::uint64_t seed,
                     int threads) {
  const FoldPlan plan = plan_stratified_kfold(corpus, sensor, k, seed);
  EvalReport report = run_plan(corpus, sensor, clf, filter, plan, n_per_object, seed, threads);
  report.k = k;
  return report;
}

EvalReport run_leave_one_object_out(const Corpus& corpus, Sensor sensor,
                                    const ClassifierConfig& clf, const FilterSpec& filter,
                                    int n_objects_per_material, std::uint64_t seed, int threads) {
  const FoldPlan plan = plan_leave_one_object_out(corpus, sensor, n_objects_per_material, seed);
  EvalReport report = run_plan(corpus, sensor, clf, filter, plan, 0, seed, threads);
  report.n_objects_per_material = n_objects_per_material;
  return report;
}

SweepReport run_object_count_sweep(const Corpus& corpus, Sensor sensor,
                                   const ClassifierConfig& clf, const FilterSpec& filter,
                                   int n_min, int n_max, std::uint64_t seed, int threads) {
  if (n_min < 1 || n_max < n_min) {
    throw std::invalid_argument("run_object_count_sweep: bad n range");
  }
  SweepReport sweep;
  std::vector<double> xs, ys;
  for (int n = n_min; n <= n_max; ++n) {
    EvalReport report =
        run_leave_one_object_out(corpus, sensor, clf, filter, n, seed, threads);
    report.protocol = protocol_name(Protocol::sweep);
    sweep.points.push_back({n, report.mean_fold_accuracy});
    xs.push_back(n);
    ys.push_back(report.mean_fold_accuracy);
    sweep.reports.push_back(std::move(report));
  }
  sweep.spearman = xs.size() > 1 ? spearman_correlation(xs, ys) : 0.0;
  return sweep;
}

std::vector<ObjectSpectrumSummary> summarize_spectra(const Corpus& corpus, Sensor sensor,
                                                     const std::vector<std::string>& object_ids) {
  auto groups = group_by_object(corpus, sensor);
  std::vector<ObjectSpectrumSummary> summaries;
  for (const auto& object_id : object_ids) {
    auto it = groups.find(object_id);
    if (it == groups.end()) {
      throw std::invalid_argument("summarize_spectra: unknown object id '" + object_id + "'");
    }
    const auto& ids = it->second;
    if (ids.size() < 2) {
      throw std::invalid_argument("summarize_spectra: object '" + object_id +
                                  "' needs at least 2 samples");
    }
    const int dim = static_cast<int>(corpus.samples[ids[0]].intensities.size());
    ObjectSpectrumSummary summary;
    summary.object_id = object_id;
    summary.mean.assign(dim, 0.0);
    summary.sd.assign(dim, 0.0);
    std::vector<std::vector<double>> normalized;
    for (int id : ids) {
      normalized.push_back(normalize_unit(corpus.samples[id].intensities));
      for (int j = 0; j < dim; ++j) summary.mean[j] += normalized.back()[j];
    }
    const double n = static_cast<double>(ids.size());
    for (int j = 0; j < dim; ++j) summary.mean[j] /= n;
    for (const auto& sample : normalized) {
      for (int j = 0; j < dim; ++j) {
        const double d = sample[j] - summary.mean[j];
        summary.sd[j] += d * d;
      }
    }
    double sd_sum = 0.0;
    for (int j = 0; j < dim; ++j) {
      summary.sd[j] = std::sqrt(summary.sd[j] / n);
      sd_sum += summary.sd[j];
    }
    summary.mean_sd = sd_sum / dim;
    summaries.push_back(std::move(summary));
  }
  return summaries;
}

double spearman_correlation(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2) {
    throw std::invalid_argument("spearman_correlation: need >= 2 paired values");
  }
  auto ranks = [](const std::vector<double>& v) {
    const int n = static_cast<int>(v.size());
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return v[a] < v[b]; });
    std::vector<double> r(n);
    int i = 0;
    while (i < n) {
      int j = i;
      while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
      const double avg_rank = (i + j) / 2.0 + 1.0;  // average rank for ties
      for (int k = i; k <= j; ++k) r[order[k]] = avg_rank;
      i = j + 1;
    }
    return r;
  };
  const auto rx = ranks(xs), ry = ranks(ys);
  const int n = static_cast<int>(xs.size());
  double mean_x = 0.0, mean_y = 0.0;
  for (int i = 0; i < n; ++i) {
    mean_x += rx[i];
    mean_y += ry[i];
  }
  mean_x /= n;
  mean_y /= n;
  double num = 0.0, den_x = 0.0, den_y = 0.0;
  for (int i = 0; i < n; ++i) {
    num += (rx[i] - mean_x) * (ry[i] - mean_y);
    den_x += (rx[i] - mean_x) * (rx[i] - mean_x);
    den_y += (ry[i] - mean_y) * (ry[i] - mean_y);
  }
  if (den_x == 0.0 || den_y == 0.0) return 0.0;
  return num / std::sqrt(den_x * den_y);
}

}  // namespace smm
