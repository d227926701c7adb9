#include "smm/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "smm/corpus_io.hpp"

namespace smm {
namespace {

std::ofstream open_svg(const std::filesystem::path& path, int width, int height) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  return out;
}

std::string coord(double v) { return format_g9(std::round(v * 100.0) / 100.0); }

}  // namespace

void write_spectrum_svg(const std::vector<ObjectSpectrumSummary>& summaries,
                        const std::filesystem::path& path) {
  const int panel_w = 640, panel_h = 200, margin = 40;
  const int width = panel_w + 2 * margin;
  const int height = static_cast<int>(summaries.size()) * (panel_h + margin) + margin;
  auto out = open_svg(path, width, height);

  int panel = 0;
  for (const auto& summary : summaries) {
    const int n = static_cast<int>(summary.mean.size());
    const double top = margin + panel * (panel_h + margin);
    auto x_at = [&](int i) { return margin + panel_w * static_cast<double>(i) / (n - 1); };
    auto y_at = [&](double v) {
      const double clamped = std::clamp(v, 0.0, 1.0);
      return top + panel_h * (1.0 - clamped);
    };

    out << "<rect x=\"" << margin << "\" y=\"" << coord(top) << "\" width=\"" << panel_w
        << "\" height=\"" << panel_h << "\" fill=\"none\" stroke=\"#888\"/>\n";

    // band polygon: mean+sd forward, mean-sd backward
    out << "<polygon fill=\"#a0c4ff\" fill-opacity=\"0.5\" stroke=\"none\" points=\"";
    for (int i = 0; i < n; ++i) {
      out << coord(x_at(i)) << ',' << coord(y_at(summary.mean[i] + summary.sd[i])) << ' ';
    }
    for (int i = n - 1; i >= 0; --i) {
      out << coord(x_at(i)) << ',' << coord(y_at(summary.mean[i] - summary.sd[i])) << ' ';
    }
    out << "\"/>\n";

    out << "<polyline fill=\"none\" stroke=\"#1d3557\" stroke-width=\"1.5\" points=\"";
    for (int i = 0; i < n; ++i) {
      out << coord(x_at(i)) << ',' << coord(y_at(summary.mean[i])) << ' ';
    }
    out << "\"/>\n";

    out << "<text x=\"" << margin + 6 << "\" y=\"" << coord(top + 16)
        << "\" font-size=\"13\" font-family=\"sans-serif\">" << summary.object_id
        << " (mean SD " << format_g9(summary.mean_sd) << ")</text>\n";
    ++panel;
  }
  out << "</svg>\n";
}

void write_confusion_svg(const ConfusionMatrix& matrix, const std::filesystem::path& path) {
  const int cell = 64, label_w = 140, label_h = 40;
  const int rows = static_cast<int>(matrix.row_labels.size());
  const int width = label_w + kNumMaterials * cell + 20;
  const int height = label_h + rows * cell + 20;
  auto out = open_svg(path, width, height);

  for (int c = 0; c < kNumMaterials; ++c) {
    out << "<text x=\"" << coord(label_w + c * cell + cell / 2.0) << "\" y=\"" << label_h - 10
        << "\" text-anchor=\"middle\" font-size=\"12\" font-family=\"sans-serif\">"
        << material_names()[c] << "</text>\n";
  }
  for (int r = 0; r < rows; ++r) {
    const long total = matrix.row_total(r);
    out << "<text x=\"" << label_w - 8 << "\" y=\"" << coord(label_h + r * cell + cell / 2.0 + 4)
        << "\" text-anchor=\"end\" font-size=\"12\" font-family=\"sans-serif\">"
        << matrix.row_labels[r] << "</text>\n";
    for (int c = 0; c < kNumMaterials; ++c) {
      const double share = total > 0 ? static_cast<double>(matrix.counts[r][c]) / total : 0.0;
      const int shade = static_cast<int>(std::lround(255.0 * (1.0 - share)));
      out << "<rect x=\"" << label_w + c * cell << "\" y=\"" << label_h + r * cell
          << "\" width=\"" << cell << "\" height=\"" << cell << "\" fill=\"rgb(" << shade << ','
          << shade << ",255)\" stroke=\"#555\"/>\n";
      char pct[16];
      std::snprintf(pct, sizeof(pct), "%.1f%%", 100.0 * share);
      out << "<text x=\"" << coord(label_w + c * cell + cell / 2.0) << "\" y=\""
          << coord(label_h + r * cell + cell / 2.0 + 4)
          << "\" text-anchor=\"middle\" font-size=\"11\" font-family=\"sans-serif\""
          << (share > 0.6 ? " fill=\"#fff\"" : "") << ">" << pct << "</text>\n";
    }
  }
  out << "</svg>\n";
}

void write_sweep_svg(const std::vector<SweepPoint>& points, const std::filesystem::path& path) {
  const int width = 640, height = 400, margin = 50;
  auto out = open_svg(path, width, height);
  if (!points.empty()) {
    int n_min = points.front().n_objects, n_max = points.front().n_objects;
    for (const auto& p : points) {
      n_min = std::min(n_min, p.n_objects);
      n_max = std::max(n_max, p.n_objects);
    }
    const double span = std::max(1, n_max - n_min);
    auto x_at = [&](int n) {
      return margin + (width - 2.0 * margin) * (n - n_min) / span;
    };
    auto y_at = [&](double acc) { return height - margin - (height - 2.0 * margin) * acc; };

    out << "<rect x=\"" << margin << "\" y=\"" << margin << "\" width=\"" << width - 2 * margin
        << "\" height=\"" << height - 2 * margin << "\" fill=\"none\" stroke=\"#888\"/>\n";
    out << "<polyline fill=\"none\" stroke=\"#e63946\" stroke-width=\"2\" points=\"";
    for (const auto& p : points) {
      out << coord(x_at(p.n_objects)) << ',' << coord(y_at(p.accuracy)) << ' ';
    }
    out << "\"/>\n";
    for (const auto& p : points) {
      out << "<circle cx=\"" << coord(x_at(p.n_objects)) << "\" cy=\"" << coord(y_at(p.accuracy))
          << "\" r=\"3\" fill=\"#e63946\"/>\n";
      out << "<text x=\"" << coord(x_at(p.n_objects)) << "\" y=\"" << height - margin + 18
          << "\" text-anchor=\"middle\" font-size=\"11\" font-family=\"sans-serif\">"
          << p.n_objects << "</text>\n";
    }
  }
  out << "</svg>\n";
}

}  // namespace smm
