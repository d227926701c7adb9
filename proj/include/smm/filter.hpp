#pragma once

#include <complex>
#include <vector>

namespace smm {

/// Low-pass Butterworth design request. cutoff is a fraction of Nyquist.
struct FilterSpec {
  int order = 5;
  double cutoff = 0.1;
};

struct IirCoefficients {
  std::vector<double> b;  // numerator, length order+1
  std::vector<double> a;  // denominator, length order+1, a[0] == 1
};

/// Analog Butterworth prototype mapped through the bilinear transform with
/// frequency pre-warping. DC gain is normalized to exactly 1; the single-pass
/// magnitude at the cutoff is 1/sqrt(2).
IirCoefficients design_butterworth(const FilterSpec& spec);

/// H(e^{j*omega}) for a designed filter; omega in radians per sample.
std::complex<double> frequency_response(const IirCoefficients& coeffs, double omega);

/// Pole locations of the denominator polynomial.
std::vector<std::complex<double>> poles(const IirCoefficients& coeffs);

/// Single causal pass (direct form II transposed), zero initial state.
std::vector<double> lfilter(const IirCoefficients& coeffs, const std::vector<double>& x);

/// Zero-phase forward-backward filtering. The signal is extended by an
/// odd-symmetric reflection of length 3*order at each end and trimmed after
/// filtering; initial filter state is matched to the first sample so constant
/// signals pass through unchanged. The result is symmetrized over the two
/// pass orders, which makes filtfilt(reverse(x)) == reverse(filtfilt(x))
/// hold to machine precision.
std::vector<double> filtfilt(const IirCoefficients& coeffs, const std::vector<double>& x);

}  // namespace smm
