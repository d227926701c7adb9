#include "smm/filter.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace smm {
namespace {

std::vector<std::complex<double>> poly_from_roots(
    const std::vector<std::complex<double>>& roots) {
  std::vector<std::complex<double>> coeffs = {1.0};
  for (const auto& r : roots) {
    coeffs.push_back(0.0);
    for (std::size_t i = coeffs.size() - 1; i > 0; --i) {
      coeffs[i] -= r * coeffs[i - 1];
    }
  }
  return coeffs;
}

// Gaussian elimination with partial pivoting; systems here are order x order.
std::vector<double> solve_linear(std::vector<std::vector<double>> m, std::vector<double> rhs) {
  const int n = static_cast<int>(rhs.size());
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int row = col + 1; row < n; ++row) {
      if (std::abs(m[row][col]) > std::abs(m[pivot][col])) pivot = row;
    }
    std::swap(m[col], m[pivot]);
    std::swap(rhs[col], rhs[pivot]);
    if (m[col][col] == 0.0) throw std::runtime_error("singular system in filter design");
    for (int row = col + 1; row < n; ++row) {
      const double f = m[row][col] / m[col][col];
      for (int j = col; j < n; ++j) m[row][j] -= f * m[col][j];
      rhs[row] -= f * rhs[col];
    }
  }
  std::vector<double> x(n);
  for (int row = n - 1; row >= 0; --row) {
    double acc = rhs[row];
    for (int j = row + 1; j < n; ++j) acc -= m[row][j] * x[j];
    x[row] = acc / m[row][row];
  }
  return x;
}

/// Initial state such that a step of the first sample's amplitude passes
/// through with no transient (same construction as the usual lfilter_zi).
std::vector<double> step_matched_state(const IirCoefficients& coeffs) {
  const int n = static_cast<int>(coeffs.a.size()) - 1;
  // M = I - companion(a)^T
  std::vector<std::vector<double>> m(n, std::vector<double>(n, 0.0));
  std::vector<double> rhs(n);
  for (int i = 0; i < n; ++i) {
    m[i][i] = 1.0;
    m[i][0] += coeffs.a[i + 1];
    if (i + 1 < n) m[i][i + 1] -= 1.0;
    rhs[i] = coeffs.b[i + 1] - coeffs.a[i + 1] * coeffs.b[0];
  }
  return solve_linear(std::move(m), std::move(rhs));
}

std::vector<double> lfilter_with_state(const IirCoefficients& coeffs,
                                       const std::vector<double>& x,
                                       std::vector<double> state) {
  const auto& b = coeffs.b;
  const auto& a = coeffs.a;
  const int n = static_cast<int>(a.size()) - 1;
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double yi = b[0] * x[i] + (n > 0 ? state[0] : 0.0);
    for (int k = 0; k < n - 1; ++k) {
      state[k] = b[k + 1] * x[i] + state[k + 1] - a[k + 1] * yi;
    }
    if (n > 0) state[n - 1] = b[n] * x[i] - a[n] * yi;
    y[i] = yi;
  }
  return y;
}

std::vector<double> filtfilt_once(const IirCoefficients& coeffs, const std::vector<double>& x,
                                  const std::vector<double>& zi) {
  const int order = static_cast<int>(coeffs.a.size()) - 1;
  const int pad = 3 * order;
  const int n = static_cast<int>(x.size());

  std::vector<double> ext;
  ext.reserve(n + 2 * pad);
  for (int i = 0; i < pad; ++i) ext.push_back(2.0 * x[0] - x[pad - i]);
  ext.insert(ext.end(), x.begin(), x.end());
  for (int i = 0; i < pad; ++i) ext.push_back(2.0 * x[n - 1] - x[n - 2 - i]);

  auto scaled = [&](double v) {
    std::vector<double> s(zi.size());
    for (std::size_t i = 0; i < zi.size(); ++i) s[i] = zi[i] * v;
    return s;
  };

  std::vector<double> y = lfilter_with_state(coeffs, ext, scaled(ext.front()));
  std::reverse(y.begin(), y.end());
  y = lfilter_with_state(coeffs, y, scaled(y.front()));
  std::reverse(y.begin(), y.end());
  return {y.begin() + pad, y.begin() + pad + n};
}

}  // namespace

IirCoefficients design_butterworth(const FilterSpec& spec) {
  if (spec.order < 1 || spec.order > 12) {
    throw std::invalid_argument("butterworth order must be in [1, 12]");
  }
  if (!(spec.cutoff > 0.0) || !(spec.cutoff < 1.0)) {
    throw std::invalid_argument("butterworth cutoff must be in (0, 1)");
  }

  const int n = spec.order;
  const double warped = std::tan(M_PI * spec.cutoff / 2.0);

  std::vector<std::complex<double>> digital_poles;
  digital_poles.reserve(n);
  for (int k = 0; k < n; ++k) {
    const double theta = M_PI / 2.0 + M_PI * (2.0 * k + 1.0) / (2.0 * n);
    const std::complex<double> s = warped * std::polar(1.0, theta);
    digital_poles.push_back((1.0 + s) / (1.0 - s));
  }
  const auto a_complex = poly_from_roots(digital_poles);
  // n zeros at z = -1
  const auto b_complex = poly_from_roots(std::vector<std::complex<double>>(n, -1.0));

  IirCoefficients coeffs;
  coeffs.a.resize(n + 1);
  coeffs.b.resize(n + 1);
  for (int i = 0; i <= n; ++i) coeffs.a[i] = a_complex[i].real();
  const double a_sum = std::accumulate(coeffs.a.begin(), coeffs.a.end(), 0.0);
  double b_sum = 0.0;
  for (int i = 0; i <= n; ++i) b_sum += b_complex[i].real();
  const double gain = a_sum / b_sum;  // DC gain exactly 1
  for (int i = 0; i <= n; ++i) coeffs.b[i] = b_complex[i].real() * gain;
  return coeffs;
}

std::complex<double> frequency_response(const IirCoefficients& coeffs, double omega) {
  const std::complex<double> z_inv = std::polar(1.0, -omega);
  std::complex<double> num = 0.0, den = 0.0, zk = 1.0;
  for (std::size_t i = 0; i < coeffs.b.size(); ++i) {
    num += coeffs.b[i] * zk;
    den += coeffs.a[i] * zk;
    zk *= z_inv;
  }
  return num / den;
}

std::vector<std::complex<double>> poles(const IirCoefficients& coeffs) {
  // Roots of the monic denominator via Durand-Kerner iteration.
  const int n = static_cast<int>(coeffs.a.size()) - 1;
  std::vector<std::complex<double>> roots(n);
  for (int i = 0; i < n; ++i) roots[i] = std::polar(0.5, 2.0 * M_PI * i / n + 0.7);
  auto eval = [&](std::complex<double> z) {
    std::complex<double> v = 0.0;
    for (double c : coeffs.a) v = v * z + c;
    return v;
  };
  for (int iter = 0; iter < 500; ++iter) {
    double max_step = 0.0;
    for (int i = 0; i < n; ++i) {
      std::complex<double> denom = 1.0;
      for (int j = 0; j < n; ++j) {
        if (j != i) denom *= roots[i] - roots[j];
      }
      const std::complex<double> step = eval(roots[i]) / denom;
      roots[i] -= step;
      max_step = std::max(max_step, std::abs(step));
    }
    if (max_step < 1e-14) break;
  }
  return roots;
}

std::vector<double> lfilter(const IirCoefficients& coeffs, const std::vector<double>& x) {
  return lfilter_with_state(coeffs, x,
                            std::vector<double>(coeffs.a.size() - 1, 0.0));
}

std::vector<double> filtfilt(const IirCoefficients& coeffs, const std::vector<double>& x) {
  const int order = static_cast<int>(coeffs.a.size()) - 1;
  if (static_cast<int>(x.size()) <= 3 * order) {
    throw std::invalid_argument("filtfilt: signal length must exceed 3*order");
  }
  for (double v : x) {
    if (!std::isfinite(v)) throw std::invalid_argument("filtfilt: non-finite input");
  }
  const std::vector<double> zi = step_matched_state(coeffs);

  // Remove the mid-range offset before filtering so a constant signal maps to
  // an exact zero vector and comes back exactly constant. (min+max)/2 is
  // invariant under reversal, unlike a summed mean.
  const auto [lo_it, hi_it] = std::minmax_element(x.begin(), x.end());
  const double offset = 0.5 * (*lo_it + *hi_it);
  std::vector<double> centered(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) centered[i] = x[i] - offset;

  const std::vector<double> forward_first = filtfilt_once(coeffs, centered, zi);
  std::vector<double> reversed(centered.rbegin(), centered.rend());
  std::vector<double> reverse_first = filtfilt_once(coeffs, reversed, zi);
  std::reverse(reverse_first.begin(), reverse_first.end());

  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    y[i] = 0.5 * (forward_first[i] + reverse_first[i]) + offset;
  }
  return y;
}

}  // namespace smm
