#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "smm/corpus_io.hpp"
#include "smm/eval.hpp"
#include "smm/report_io.hpp"
#include "smm/svg.hpp"
#include "smm/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;  // validation / domain failure
constexpr int kExitUsage = 2;   // I/O or usage failure

struct RunOptions {
  std::string corpus;
  std::string sensor = "nir";
  std::string classifier = "mlp";
  std::string protocol = "kfold";
  int k = 5;
  int n_per_object = 0;        // 0 = all
  std::string n_objects = "all";
  int sweep_min = 1;
  int sweep_max = 9;
  std::uint64_t seed = 0;
  std::string out = "out";
  int threads = 1;
  smm::FilterSpec filter;
  smm::ClassifierConfig clf;
};

void apply_config_file(RunOptions& opt, const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path.string());
  const json cfg = json::parse(in);
  opt.corpus = cfg.value("corpus", opt.corpus);
  opt.sensor = cfg.value("sensor", opt.sensor);
  opt.classifier = cfg.value("classifier", opt.classifier);
  opt.protocol = cfg.value("protocol", opt.protocol);
  opt.k = cfg.value("k", opt.k);
  opt.n_per_object = cfg.value("n_per_object", opt.n_per_object);
  if (cfg.contains("n_objects")) {
    if (cfg["n_objects"].is_string()) {
      opt.n_objects = cfg["n_objects"].get<std::string>();
    } else {
      opt.n_objects = std::to_string(cfg["n_objects"].get<int>());
    }
  }
  opt.sweep_min = cfg.value("sweep_min", opt.sweep_min);
  opt.sweep_max = cfg.value("sweep_max", opt.sweep_max);
  opt.seed = cfg.value("seed", opt.seed);
  opt.out = cfg.value("out", opt.out);
  opt.threads = cfg.value("threads", opt.threads);
  if (cfg.contains("filter")) {
    opt.filter.order = cfg["filter"].value("order", opt.filter.order);
    opt.filter.cutoff = cfg["filter"].value("cutoff", opt.filter.cutoff);
  }
  if (cfg.contains("train")) {
    const auto& t = cfg["train"];
    opt.clf.train.epochs = t.value("epochs", opt.clf.train.epochs);
    opt.clf.train.batch_size = t.value("batch_size", opt.clf.train.batch_size);
    opt.clf.train.learning_rate = t.value("learning_rate", opt.clf.train.learning_rate);
    opt.clf.train.beta1 = t.value("beta1", opt.clf.train.beta1);
    opt.clf.train.beta2 = t.value("beta2", opt.clf.train.beta2);
    opt.clf.train.adam_epsilon = t.value("adam_epsilon", opt.clf.train.adam_epsilon);
  }
  if (cfg.contains("arch")) {
    const auto& a = cfg["arch"];
    opt.clf.arch.hidden = a.value("hidden", opt.clf.arch.hidden);
    opt.clf.arch.leaky_slope = a.value("leaky_slope", opt.clf.arch.leaky_slope);
    opt.clf.arch.dropout_rate = a.value("dropout_rate", opt.clf.arch.dropout_rate);
  }
  if (cfg.contains("svm")) {
    opt.clf.svm_lambda = cfg["svm"].value("lambda", opt.clf.svm_lambda);
    opt.clf.svm_epochs = cfg["svm"].value("epochs", opt.clf.svm_epochs);
  }
}

void print_report_summary(const smm::EvalReport& report) {
  std::cout << "protocol: " << report.protocol << "  sensor: " << report.sensor
            << "  classifier: " << report.classifier << "\n";
  std::cout << "overall accuracy: " << report.overall_accuracy << "\n";
  std::cout << "mean fold accuracy: " << report.mean_fold_accuracy << "\n";
  for (std::size_t r = 0; r < report.material_confusion.row_labels.size(); ++r) {
    std::cout << "  " << report.material_confusion.row_labels[r] << ": "
              << report.material_confusion.row_accuracy(static_cast<int>(r)) << "\n";
  }
}

int cmd_validate(const std::string& corpus_dir) {
  if (!fs::exists(corpus_dir) || !fs::exists(fs::path(corpus_dir) / "objects.csv") ||
      !fs::exists(fs::path(corpus_dir) / "samples.csv")) {
    std::cerr << "error: corpus manifest not found under " << corpus_dir << "\n";
    return kExitUsage;
  }
  try {
    const smm::Corpus corpus = smm::load_corpus(corpus_dir);
    const smm::ValidationReport report = smm::validate_corpus(corpus);
    std::cout << report.to_string();
    return report.ok() ? kExitOk : kExitDomain;
  } catch (const smm::CorpusError& e) {
    std::cerr << "validation failed: " << e.what() << "\n";
    return kExitDomain;
  }
}

int cmd_synth(const smm::SynthConfig& config, std::uint64_t seed, const std::string& out_dir) {
  const smm::Corpus corpus = smm::synth_corpus(config, seed);
  smm::write_corpus(corpus, out_dir);
  std::cout << "wrote " << corpus.objects.size() << " objects, " << corpus.samples.size()
            << " samples to " << out_dir << "\n";
  std::cout << "centroid oracle accuracy: "
            << smm::centroid_oracle_accuracy(corpus, config.sensor) << "\n";
  return kExitOk;
}

int cmd_preprocess(const std::string& corpus_dir, const std::string& sensor,
                   const smm::FilterSpec& filter, const std::string& out_dir) {
  const smm::Corpus corpus = smm::load_corpus(corpus_dir);
  const smm::Sensor s = smm::sensor_from_name(sensor);
  const smm::FeatureDataset data = smm::preprocess_corpus(corpus, s, filter);
  fs::create_directories(out_dir);
  const fs::path path = fs::path(out_dir) / ("features_" + sensor + ".csv");
  smm::write_features_csv(data, corpus, path);
  std::cout << "wrote " << data.sample_rows.size() << " feature vectors to " << path.string()
            << "\n";
  return kExitOk;
}

int cmd_run(const RunOptions& opt) {
  const smm::Corpus corpus = smm::load_corpus(opt.corpus);
  const smm::Sensor sensor = smm::sensor_from_name(opt.sensor);
  smm::ClassifierConfig clf = opt.clf;
  clf.kind = opt.classifier == "svm" ? smm::ClassifierConfig::Kind::svm
                                     : smm::ClassifierConfig::Kind::mlp;
  const int n_objects = opt.n_objects == "all" ? 0 : std::stoi(opt.n_objects);
  const fs::path out_dir = opt.out;
  const fs::path figures = out_dir / "figures";

  if (opt.protocol == "kfold") {
    const smm::EvalReport report = smm::run_kfold(corpus, sensor, clf, opt.filter, opt.k,
                                                  opt.n_per_object, opt.seed, opt.threads);
    smm::write_eval_report(report, out_dir);
    smm::write_confusion_svg(report.material_confusion, figures / "confusion_material.svg");
    print_report_summary(report);
  } else if (opt.protocol == "loobj") {
    const smm::EvalReport report = smm::run_leave_one_object_out(
        corpus, sensor, clf, opt.filter, n_objects, opt.seed, opt.threads);
    smm::write_eval_report(report, out_dir);
    smm::write_confusion_svg(report.material_confusion, figures / "confusion_material.svg");
    smm::write_confusion_svg(report.object_confusion, figures / "confusion_object.svg");
    print_report_summary(report);
  } else if (opt.protocol == "sweep") {
    const smm::SweepReport sweep = smm::run_object_count_sweep(
        corpus, sensor, clf, opt.filter, opt.sweep_min, opt.sweep_max, opt.seed, opt.threads);
    smm::write_sweep_report(sweep, out_dir);
    smm::write_sweep_svg(sweep.points, figures / "sweep.svg");
    std::cout << "sweep (n, accuracy):\n";
    for (const auto& p : sweep.points) {
      std::cout << "  " << p.n_objects << "  " << p.accuracy << "\n";
    }
    std::cout << "spearman: " << sweep.spearman << "\n";
  } else {
    throw std::invalid_argument("unknown protocol '" + opt.protocol + "'");
  }
  return kExitOk;
}

smm::ConfusionMatrix confusion_from_json(const json& rows) {
  smm::ConfusionMatrix cm;
  for (const auto& row : rows) {
    const int r = cm.row_of(row.at("label").get<std::string>());
    cm.true_class[r] = row.value("true_class", -1);
    const auto counts = row.at("counts").get<std::vector<long>>();
    for (int c = 0; c < smm::kNumMaterials && c < static_cast<int>(counts.size()); ++c) {
      cm.counts[r][c] = counts[c];
    }
  }
  return cm;
}

int cmd_report(const std::string& report_path, const std::string& corpus_dir,
               const std::string& figure, const std::string& objects_arg,
               const std::string& out_dir) {
  const fs::path figures = fs::path(out_dir) / "figures";
  if (figure == "spectrum") {
    const smm::Corpus corpus = smm::load_corpus(corpus_dir);
    std::vector<std::string> object_ids;
    std::stringstream ss(objects_arg);
    std::string id;
    while (std::getline(ss, id, ',')) {
      if (!id.empty()) object_ids.push_back(id);
    }
    if (object_ids.empty()) {
      for (const auto& obj : corpus.objects) object_ids.push_back(obj.object_id);
    }
    smm::Sensor sensor = smm::Sensor::nir;
    if (!corpus.samples.empty()) sensor = corpus.samples.front().sensor;
    const auto summaries = smm::summarize_spectra(corpus, sensor, object_ids);
    smm::write_spectrum_svg(summaries, figures / "spectrum.svg");
    // companion CSV so the figure is regenerable externally
    fs::create_directories(out_dir);
    std::ofstream csv(fs::path(out_dir) / "spectrum_summary.csv", std::ios::binary);
    csv << "object_id,channel,mean,sd\n";
    for (const auto& s : summaries) {
      for (std::size_t j = 0; j < s.mean.size(); ++j) {
        csv << s.object_id << ',' << j << ',' << smm::format_g9(s.mean[j]) << ','
            << smm::format_g9(s.sd[j]) << '\n';
      }
    }
    std::cout << "wrote " << (figures / "spectrum.svg").string() << "\n";
    return kExitOk;
  }

  std::ifstream in(report_path);
  if (!in) {
    std::cerr << "error: cannot open report " << report_path << "\n";
    return kExitUsage;
  }
  const json doc = json::parse(in);
  if (figure == "confusion") {
    if (!doc.contains("confusion_material")) {
      throw std::invalid_argument("report has no confusion matrices");
    }
    smm::write_confusion_svg(confusion_from_json(doc["confusion_material"]),
                             figures / "confusion_material.svg");
    if (doc.contains("confusion_object")) {
      smm::write_confusion_svg(confusion_from_json(doc["confusion_object"]),
                               figures / "confusion_object.svg");
    }
    std::cout << "wrote " << (figures / "confusion_material.svg").string() << "\n";
    return kExitOk;
  }
  if (figure == "sweep") {
    if (!doc.contains("points")) throw std::invalid_argument("report has no sweep points");
    std::vector<smm::SweepPoint> points;
    for (const auto& p : doc["points"]) {
      points.push_back({p.at("n_objects").get<int>(), p.at("accuracy").get<double>()});
    }
    smm::write_sweep_svg(points, figures / "sweep.svg");
    std::cout << "wrote " << (figures / "sweep.svg").string() << "\n";
    return kExitOk;
  }
  throw std::invalid_argument("unknown figure kind '" + figure + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spectral material classification toolkit"};
  app.require_subcommand(1);

  // validate
  std::string validate_corpus_dir;
  auto* validate = app.add_subcommand("validate", "check a corpus directory");
  validate->add_option("--corpus", validate_corpus_dir, "corpus directory")->required();

  // synth
  smm::SynthConfig synth_config;
  std::uint64_t synth_seed = 7;
  std::string synth_out = "synth_corpus";
  std::string synth_sensor = "nir";
  auto* synth = app.add_subcommand("synth", "generate a synthetic corpus");
  synth->add_option("--out", synth_out, "output directory");
  synth->add_option("--seed", synth_seed, "generator seed");
  synth->add_option("--sensor", synth_sensor, "visible|nir");
  synth->add_option("--objects-per-material", synth_config.objects_per_material);
  synth->add_option("--samples-per-object", synth_config.samples_per_object);
  synth->add_option("--class-scale", synth_config.class_scale);
  synth->add_option("--object-scale", synth_config.object_scale);
  synth->add_option("--noise-scale", synth_config.noise_scale);
  synth->add_option("--gain-min", synth_config.gain_min);
  synth->add_option("--gain-max", synth_config.gain_max);

  // preprocess
  std::string pre_corpus, pre_sensor = "nir", pre_out = "out";
  smm::FilterSpec pre_filter;
  auto* preprocess = app.add_subcommand("preprocess", "write feature CSVs");
  preprocess->add_option("--corpus", pre_corpus)->required();
  preprocess->add_option("--sensor", pre_sensor, "visible|nir");
  preprocess->add_option("--out", pre_out);
  preprocess->add_option("--filter-order", pre_filter.order);
  preprocess->add_option("--filter-cutoff", pre_filter.cutoff);

  // run
  RunOptions opt;
  std::string config_file;
  auto* run = app.add_subcommand("run", "run an evaluation protocol");
  run->add_option("--config", config_file, "JSON config file (flags override)");
  auto* o_corpus = run->add_option("--corpus", opt.corpus);
  auto* o_sensor = run->add_option("--sensor", opt.sensor, "visible|nir");
  auto* o_clf = run->add_option("--classifier", opt.classifier, "mlp|svm");
  auto* o_protocol = run->add_option("--protocol", opt.protocol, "kfold|loobj|sweep");
  auto* o_k = run->add_option("--k", opt.k);
  auto* o_npo = run->add_option("--n-per-object", opt.n_per_object, "0 = all");
  auto* o_nobj = run->add_option("--n-objects", opt.n_objects, "INT or 'all'");
  auto* o_smin = run->add_option("--sweep-min", opt.sweep_min);
  auto* o_smax = run->add_option("--sweep-max", opt.sweep_max);
  auto* o_seed = run->add_option("--seed", opt.seed);
  auto* o_out = run->add_option("--out", opt.out);
  auto* o_threads = run->add_option("--threads", opt.threads);
  auto* o_epochs = run->add_option("--epochs", opt.clf.train.epochs);
  auto* o_batch = run->add_option("--batch-size", opt.clf.train.batch_size);
  auto* o_lr = run->add_option("--learning-rate", opt.clf.train.learning_rate);
  auto* o_forder = run->add_option("--filter-order", opt.filter.order);
  auto* o_fcut = run->add_option("--filter-cutoff", opt.filter.cutoff);
  auto* o_lambda = run->add_option("--svm-lambda", opt.clf.svm_lambda);
  auto* o_sepochs = run->add_option("--svm-epochs", opt.clf.svm_epochs);

  // report
  std::string rep_report, rep_corpus, rep_figure = "confusion", rep_objects, rep_out = "out";
  auto* report = app.add_subcommand("report", "emit SVG/CSV figures");
  report->add_option("--report", rep_report, "report.json path");
  report->add_option("--corpus", rep_corpus, "corpus directory (spectrum figure)");
  report->add_option("--figure", rep_figure, "spectrum|confusion|sweep");
  report->add_option("--objects", rep_objects, "comma-separated object ids");
  report->add_option("--out", rep_out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (validate->parsed()) return cmd_validate(validate_corpus_dir);
    if (synth->parsed()) {
      synth_config.sensor = smm::sensor_from_name(synth_sensor);
      return cmd_synth(synth_config, synth_seed, synth_out);
    }
    if (preprocess->parsed()) return cmd_preprocess(pre_corpus, pre_sensor, pre_filter, pre_out);
    if (run->parsed()) {
      if (!config_file.empty()) {
        RunOptions from_file = opt;
        apply_config_file(from_file, config_file);
        // flags the user actually passed win over the file
        if (!o_corpus->count()) opt.corpus = from_file.corpus;
        if (!o_sensor->count()) opt.sensor = from_file.sensor;
        if (!o_clf->count()) opt.classifier = from_file.classifier;
        if (!o_protocol->count()) opt.protocol = from_file.protocol;
        if (!o_k->count()) opt.k = from_file.k;
        if (!o_npo->count()) opt.n_per_object = from_file.n_per_object;
        if (!o_nobj->count()) opt.n_objects = from_file.n_objects;
        if (!o_smin->count()) opt.sweep_min = from_file.sweep_min;
        if (!o_smax->count()) opt.sweep_max = from_file.sweep_max;
        if (!o_seed->count()) opt.seed = from_file.seed;
        if (!o_out->count()) opt.out = from_file.out;
        if (!o_threads->count()) opt.threads = from_file.threads;
        if (!o_epochs->count()) opt.clf.train.epochs = from_file.clf.train.epochs;
        if (!o_batch->count()) opt.clf.train.batch_size = from_file.clf.train.batch_size;
        if (!o_lr->count()) opt.clf.train.learning_rate = from_file.clf.train.learning_rate;
        if (!o_forder->count()) opt.filter.order = from_file.filter.order;
        if (!o_fcut->count()) opt.filter.cutoff = from_file.filter.cutoff;
        if (!o_lambda->count()) opt.clf.svm_lambda = from_file.clf.svm_lambda;
        if (!o_sepochs->count()) opt.clf.svm_epochs = from_file.clf.svm_epochs;
        opt.clf.train.beta1 = from_file.clf.train.beta1;
        opt.clf.train.beta2 = from_file.clf.train.beta2;
        opt.clf.train.adam_epsilon = from_file.clf.train.adam_epsilon;
        opt.clf.arch = from_file.clf.arch;
      }
      if (opt.corpus.empty()) {
        std::cerr << "error: --corpus (or a config file) is required\n";
        return kExitUsage;
      }
      opt.clf.train.seed = opt.seed;
      return cmd_run(opt);
    }
    if (report->parsed()) {
      return cmd_report(rep_report, rep_corpus, rep_figure, rep_objects, rep_out);
    }
  } catch (const smm::CorpusError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDomain;
  }
  return kExitUsage;
}
