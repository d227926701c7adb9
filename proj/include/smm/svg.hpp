#pragma once

#include <filesystem>

#include "smm/eval.hpp"

namespace smm {

/// Mean curve with a shaded +/- one SD band per object, one panel per object.
void write_spectrum_svg(const std::vector<ObjectSpectrumSummary>& summaries,
                        const std::filesystem::path& path);

/// Heatmap of row-normalized confusion percentages with per-cell text.
void write_confusion_svg(const ConfusionMatrix& matrix, const std::filesystem::path& path);

/// Accuracy-vs-n polyline with one vertex per sweep point, in input order.
void write_sweep_svg(const std::vector<SweepPoint>& points, const std::filesystem::path& path);

}  // namespace smm
