#include <cmath>

#include "doctest.h"
#include "smm/preprocess.hpp"
#include "smm/rng.hpp"

using namespace smm;

TEST_CASE("first order bilinear design matches the hand computation") {
  // H(s) = 1/(s+1) with pre-warped cutoff tan(pi/4) = 1 maps to b=[.5,.5], a=[1,0]
  const auto coeffs = design_butterworth({1, 0.5});
  CHECK(coeffs.b[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(coeffs.b[1] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(coeffs.a[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(coeffs.a[1] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("fifth order design hits the -3 dB point, unit DC gain, stable poles") {
  const auto coeffs = design_butterworth({5, 0.1});
  CHECK(std::abs(frequency_response(coeffs, M_PI * 0.1)) ==
        doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-6));
  CHECK(std::abs(frequency_response(coeffs, 0.0)) == doctest::Approx(1.0).epsilon(1e-9));
  for (const auto& p : poles(coeffs)) {
    CHECK(std::abs(p) < 1.0 - 1e-9);
  }
}

TEST_CASE("design validates and DC gain holds across specs") {
  CHECK_THROWS_AS(design_butterworth({0, 0.1}), std::invalid_argument);
  CHECK_THROWS_AS(design_butterworth({13, 0.1}), std::invalid_argument);
  CHECK_THROWS_AS(design_butterworth({5, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(design_butterworth({5, 1.0}), std::invalid_argument);
  for (int order : {1, 2, 5, 8, 12}) {
    for (double cutoff : {0.05, 0.1, 0.3, 0.7, 0.95}) {
      const auto coeffs = design_butterworth({order, cutoff});
      CHECK(std::abs(frequency_response(coeffs, 0.0)) == doctest::Approx(1.0).epsilon(1e-9));
      // polynomial-coefficient form loses precision at high order + extreme cutoff
      const double tol = order <= 8 ? 1e-6 : 2e-3;
      CHECK(std::abs(frequency_response(coeffs, M_PI * cutoff)) ==
            doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(tol));
    }
  }
}

TEST_CASE("filtfilt preserves constants and length") {
  const auto coeffs = design_butterworth({5, 0.1});
  std::vector<double> x(64, 3.25);
  const auto y = filtfilt(coeffs, x);
  REQUIRE(y.size() == x.size());
  for (double v : y) CHECK(v == doctest::Approx(3.25).epsilon(1e-10));
}

TEST_CASE("filtfilt impulse response is symmetric about the center") {
  const auto coeffs = design_butterworth({5, 0.1});
  std::vector<double> x(201, 0.0);
  x[100] = 1.0;
  const auto y = filtfilt(coeffs, x);
  double err = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    err = std::max(err, std::abs(y[i] - y[y.size() - 1 - i]));
  }
  CHECK(err < 1e-8);
}

TEST_CASE("filtfilt halves amplitude at the cutoff frequency") {
  const auto coeffs = design_butterworth({5, 0.1});
  std::vector<double> x(2000);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::sin(M_PI * 0.1 * i);
  const auto y = filtfilt(coeffs, x);
  double amp = 0.0;
  for (std::size_t i = 500; i < 1500; ++i) amp = std::max(amp, std::abs(y[i]));
  CHECK(amp == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("filtfilt commutes with time reversal") {
  const auto coeffs = design_butterworth({5, 0.1});
  Rng rng(42);
  std::vector<double> x(100);
  for (double& v : x) v = rng.normal();
  const auto forward = filtfilt(coeffs, x);
  std::vector<double> reversed(x.rbegin(), x.rend());
  auto backward = filtfilt(coeffs, reversed);
  std::reverse(backward.begin(), backward.end());
  for (std::size_t i = 0; i < x.size(); ++i) {
    CHECK(std::abs(forward[i] - backward[i]) < 1e-9);
  }
}

TEST_CASE("filtfilt rejects signals shorter than the padding") {
  const auto coeffs = design_butterworth({5, 0.1});
  CHECK_THROWS_AS(filtfilt(coeffs, std::vector<double>(15, 1.0)), std::invalid_argument);
  CHECK_NOTHROW(filtfilt(coeffs, std::vector<double>(16, 1.0)));
}

TEST_CASE("difference quotient examples") {
  CHECK(difference_quotient({2, 2, 2}, {1, 2, 3}) == std::vector<double>{0, 0, 0});
  CHECK(difference_quotient({1, 2, 3}, {1, 2, 3}) == std::vector<double>{1, 1, 1});
  CHECK(difference_quotient({0, 2, 6}, {100, 101, 103}) == std::vector<double>{2, 2, 2});
  CHECK_THROWS_AS(difference_quotient({1}, {1}), std::invalid_argument);
  CHECK_THROWS_AS(difference_quotient({1, 2}, {2, 1}), std::invalid_argument);
}

TEST_CASE("unit normalization examples") {
  CHECK(normalize_unit({-1, 0, 3}) == std::vector<double>{0, 0.25, 1});
  CHECK(normalize_unit({4, 4, 4}) == std::vector<double>{0.5, 0.5, 0.5});
  const auto out = normalize_unit({3, -2, 9, 0});
  CHECK(*std::min_element(out.begin(), out.end()) == 0.0);
  CHECK(*std::max_element(out.begin(), out.end()) == 1.0);
  CHECK_THROWS_AS(normalize_unit({1.0, std::nan("")}), std::invalid_argument);
}

namespace {

SpectralSample make_sample(Sensor sensor, double value) {
  SpectralSample sample;
  sample.object_id = "obj";
  sample.sensor = sensor;
  sample.wavelengths = default_wavelengths(sensor);
  sample.intensities.assign(sample.wavelengths.size(), value);
  return sample;
}

}  // namespace

TEST_CASE("preprocess of constant samples collapses to 0.5") {
  const FilterSpec filter;
  for (Sensor sensor : {Sensor::nir, Sensor::visible}) {
    const auto fv = preprocess_sample(make_sample(sensor, 2.0), filter);
    REQUIRE(static_cast<int>(fv.values.size()) == sensor_info(sensor).expected_dim);
    for (double v : fv.values) CHECK(v == doctest::Approx(0.5).epsilon(1e-9));
  }
}

TEST_CASE("preprocess output stays in the unit interval at full dimension") {
  Rng rng(5);
  const FilterSpec filter;
  for (Sensor sensor : {Sensor::nir, Sensor::visible}) {
    SpectralSample sample = make_sample(sensor, 0.0);
    for (double& v : sample.intensities) v = std::abs(rng.normal()) + 0.1;
    const auto fv = preprocess_sample(sample, filter);
    REQUIRE(static_cast<int>(fv.values.size()) == sensor_info(sensor).expected_dim);
    for (double v : fv.values) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  }
}

TEST_CASE("preprocess is invariant to positive gain") {
  Rng rng(9);
  const FilterSpec filter;
  SpectralSample sample = make_sample(Sensor::nir, 0.0);
  for (double& v : sample.intensities) v = std::abs(rng.normal()) + 0.5;
  SpectralSample scaled = sample;
  for (double& v : scaled.intensities) v *= 3.7;
  const auto a = preprocess_sample(sample, filter);
  const auto b = preprocess_sample(scaled, filter);
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    CHECK(std::abs(a.values[i] - b.values[i]) < 1e-9);
  }
}
