#include "smm/report_io.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>

#include "json.hpp"
#include "smm/corpus_io.hpp"

namespace smm {
namespace {

using nlohmann::json;

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& rows) {
  const Eigen::Index nr = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index nc = nr > 0 ? static_cast<Eigen::Index>(rows[0].size()) : 0;
  Eigen::MatrixXd m(nr, nc);
  for (Eigen::Index r = 0; r < nr; ++r) {
    for (Eigen::Index c = 0; c < nc; ++c) m(r, c) = rows[r][c].get<double>();
  }
  return m;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Eigen::VectorXd vector_from_json(const json& arr) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(arr.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = arr[i].get<double>();
  return v;
}

void write_json_file(const json& doc, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return json::parse(in);
}

std::string timestamp_utc() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

json confusion_to_json(const ConfusionMatrix& cm) {
  json rows = json::array();
  for (std::size_t r = 0; r < cm.row_labels.size(); ++r) {
    json row;
    row["label"] = cm.row_labels[r];
    row["true_class"] = cm.true_class[r];
    row["counts"] = cm.counts[r];
    row["accuracy"] = cm.row_accuracy(static_cast<int>(r));
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_confusion_csv(const ConfusionMatrix& cm, const std::filesystem::path& path,
                         const std::string& row_header) {
  std::vector<int> order(cm.row_labels.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return cm.row_labels[a] < cm.row_labels[b]; });
  std::ofstream out(path, std::ios::binary);
  out << row_header;
  for (const auto& name : material_names()) out << ',' << name;
  out << ",row_accuracy\n";
  for (int r : order) {
    out << cm.row_labels[r];
    for (int c = 0; c < kNumMaterials; ++c) out << ',' << cm.counts[r][c];
    out << ',' << format_g9(cm.row_accuracy(r)) << '\n';
  }
}

json report_body(const EvalReport& report) {
  json doc;
  doc["protocol"] = report.protocol;
  doc["sensor"] = report.sensor;
  doc["classifier"] = report.classifier;
  doc["seed"] = report.seed;
  doc["k"] = report.k;
  doc["n_per_object"] = report.n_per_object;
  doc["n_objects_per_material"] = report.n_objects_per_material;
  doc["fold_accuracies"] = report.fold_accuracies;
  doc["mean_fold_accuracy"] = report.mean_fold_accuracy;
  doc["overall_accuracy"] = report.overall_accuracy;
  doc["confusion_material"] = confusion_to_json(report.material_confusion);
  doc["confusion_object"] = confusion_to_json(report.object_confusion);
  doc["warnings"] = report.warnings;
  return doc;
}

}  // namespace

void save_mlp_model(const MlpModel& model, const std::filesystem::path& path) {
  json doc;
  doc["model_kind"] = "mlp";
  doc["architecture"] = {{"input_dim", model.architecture.input_dim},
                         {"hidden", model.architecture.hidden},
                         {"output_dim", model.architecture.output_dim},
                         {"leaky_slope", model.architecture.leaky_slope},
                         {"dropout_rate", model.architecture.dropout_rate}};
  doc["train_config"] = {{"epochs", model.config.epochs},
                         {"batch_size", model.config.batch_size},
                         {"learning_rate", model.config.learning_rate},
                         {"beta1", model.config.beta1},
                         {"beta2", model.config.beta2},
                         {"adam_epsilon", model.config.adam_epsilon},
                         {"seed", model.config.seed},
                         {"shuffle_each_epoch", model.config.shuffle_each_epoch}};
  doc["epoch_losses"] = model.epoch_losses;
  json layers = json::array();
  for (std::size_t l = 0; l < model.params.weights.size(); ++l) {
    json layer;
    layer["weights"] = matrix_to_json(model.params.weights[l]);
    layer["biases"] = vector_to_json(model.params.biases[l]);
    layers.push_back(std::move(layer));
  }
  doc["layers"] = std::move(layers);
  write_json_file(doc, path);
}

MlpModel load_mlp_model(const std::filesystem::path& path) {
  const json doc = read_json_file(path);
  if (doc.at("model_kind") != "mlp") {
    throw std::runtime_error(path.string() + ": not an mlp model file");
  }
  MlpModel model;
  const auto& arch = doc.at("architecture");
  model.architecture.input_dim = arch.at("input_dim");
  model.architecture.hidden = arch.at("hidden").get<std::vector<int>>();
  model.architecture.output_dim = arch.at("output_dim");
  model.architecture.leaky_slope = arch.at("leaky_slope");
  model.architecture.dropout_rate = arch.at("dropout_rate");
  const auto& cfg = doc.at("train_config");
  model.config.epochs = cfg.at("epochs");
  model.config.batch_size = cfg.at("batch_size");
  model.config.learning_rate = cfg.at("learning_rate");
  model.config.beta1 = cfg.at("beta1");
  model.config.beta2 = cfg.at("beta2");
  model.config.adam_epsilon = cfg.at("adam_epsilon");
  model.config.seed = cfg.at("seed");
  model.config.shuffle_each_epoch = cfg.at("shuffle_each_epoch");
  model.epoch_losses = doc.value("epoch_losses", std::vector<double>{});
  for (const auto& layer : doc.at("layers")) {
    model.params.weights.push_back(matrix_from_json(layer.at("weights")));
    model.params.biases.push_back(vector_from_json(layer.at("biases")));
  }
  return model;
}

void save_svm_model(const LinearSvmModel& model, const std::filesystem::path& path) {
  json doc;
  doc["model_kind"] = "linear_svm";
  doc["lambda"] = model.lambda;
  doc["epochs"] = model.epochs;
  doc["seed"] = model.seed;
  doc["weights"] = matrix_to_json(model.weights);
  doc["biases"] = vector_to_json(model.biases);
  write_json_file(doc, path);
}

LinearSvmModel load_svm_model(const std::filesystem::path& path) {
  const json doc = read_json_file(path);
  if (doc.at("model_kind") != "linear_svm") {
    throw std::runtime_error(path.string() + ": not a linear_svm model file");
  }
  LinearSvmModel model;
  model.lambda = doc.at("lambda");
  model.epochs = doc.at("epochs");
  model.seed = doc.at("seed");
  model.weights = matrix_from_json(doc.at("weights"));
  model.biases = vector_from_json(doc.at("biases"));
  return model;
}

void write_eval_report(const EvalReport& report, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  json doc = report_body(report);
  doc["meta"] = {{"timestamp", timestamp_utc()},
                 {"wall_clock_seconds", report.wall_clock_seconds}};
  write_json_file(doc, out_dir / "report.json");

  {
    std::ofstream out(out_dir / "accuracy.csv", std::ios::binary);
    out << "protocol,n,fold,accuracy\n";
    const int n = report.n_per_object > 0 ? report.n_per_object : report.n_objects_per_material;
    for (std::size_t f = 0; f < report.fold_accuracies.size(); ++f) {
      out << report.protocol << ',' << n << ',' << f << ','
          << format_g9(report.fold_accuracies[f]) << '\n';
    }
    out << report.protocol << ',' << n << ",overall," << format_g9(report.overall_accuracy)
        << '\n';
  }
  write_confusion_csv(report.material_confusion, out_dir / "confusion_material.csv", "material");
  write_confusion_csv(report.object_confusion, out_dir / "confusion_object.csv", "object_id");
}

void write_sweep_report(const SweepReport& sweep, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  json doc;
  doc["protocol"] = "sweep";
  json points = json::array();
  for (const auto& p : sweep.points) {
    points.push_back({{"n_objects", p.n_objects}, {"accuracy", p.accuracy}});
  }
  doc["points"] = std::move(points);
  doc["spearman"] = sweep.spearman;
  json reports = json::array();
  for (const auto& r : sweep.reports) reports.push_back(report_body(r));
  doc["reports"] = std::move(reports);
  doc["meta"] = {{"timestamp", timestamp_utc()}};
  write_json_file(doc, out_dir / "report.json");

  std::ofstream out(out_dir / "accuracy.csv", std::ios::binary);
  out << "protocol,n,fold,accuracy\n";
  for (const auto& r : sweep.reports) {
    for (std::size_t f = 0; f < r.fold_accuracies.size(); ++f) {
      out << "sweep," << r.n_objects_per_material << ',' << f << ','
          << format_g9(r.fold_accuracies[f]) << '\n';
    }
    out << "sweep," << r.n_objects_per_material << ",overall,"
        << format_g9(r.overall_accuracy) << '\n';
  }
  if (!sweep.reports.empty()) {
    write_confusion_csv(sweep.reports.back().material_confusion,
                        out_dir / "confusion_material.csv", "material");
    write_confusion_csv(sweep.reports.back().object_confusion,
                        out_dir / "confusion_object.csv", "object_id");
  }
}

void write_features_csv(const FeatureDataset& data, const Corpus& corpus,
                        const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "object_id,sensor,sample_index";
  for (Eigen::Index j = 0; j < data.features.cols(); ++j) out << ",f" << j;
  out << '\n';
  // Canonical order: (object_id, sample_index).
  std::vector<int> order(data.sample_rows.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const auto& sa = corpus.samples[data.sample_rows[a]];
    const auto& sb = corpus.samples[data.sample_rows[b]];
    return std::tie(sa.object_id, sa.sample_index) < std::tie(sb.object_id, sb.sample_index);
  });
  for (int i : order) {
    const auto& sample = corpus.samples[data.sample_rows[i]];
    out << sample.object_id << ',' << sensor_name(sample.sensor) << ',' << sample.sample_index;
    for (Eigen::Index j = 0; j < data.features.cols(); ++j) {
      out << ',' << format_g9(data.features(i, j));
    }
    out << '\n';
  }
}

}  // namespace smm
