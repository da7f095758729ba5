//
// Copyright 2026 The userdp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "userdp/noise.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "userdp/errors.h"
#include "userdp/privacy.h"

namespace userdp {

TDLap::TDLap(double eps, double delta)
    : eps_(eps), delta_(delta), kappa_(tdlap_kappa(eps, delta)) {
  const int size = 2 * kappa_ + 1;
  std::vector<long double> w(size);
  long double total = 0;
  for (int x = 0; x < size; ++x) {
    w[x] = std::exp(-static_cast<long double>(eps) * std::abs(x - kappa_));
    total += w[x];
  }
  pmf_.resize(size);
  cdf_.resize(size);
  long double acc = 0;
  for (int x = 0; x < size; ++x) {
    pmf_[x] = static_cast<double>(w[x] / total);
    acc += w[x] / total;
    cdf_[x] = acc;
  }
  cdf_.back() = 1.0L;
}

double TDLap::pmf(int x) const {
  if (x < 0 || x > support_max()) return 0;
  return pmf_[x];
}

int TDLap::sample(RandomSource& rng) const {
  const long double u = rng.uniform01();
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  return static_cast<int>(std::min<std::ptrdiff_t>(it - cdf_.begin(),
                                                   support_max()));
}

Vector gaussian_vector(Index d, double sigma, RandomSource& rng) {
  if (d < 1) throw ArgumentError("gaussian_vector: d must be >= 1");
  if (!(sigma >= 0)) throw ArgumentError("gaussian_vector: sigma must be >= 0");
  Vector out(d);
  for (Index k = 0; k < d; k += 2) {
    const double u1 = rng.uniform_open_low();
    const double u2 = rng.uniform01();
    const double r = std::sqrt(-2 * std::log(u1));
    const double a = 2 * std::numbers::pi * u2;
    out(k) = sigma * r * std::cos(a);
    if (k + 1 < d) out(k + 1) = sigma * r * std::sin(a);
  }
  return out;
}

Vector truncated_gaussian_sample(const TruncatedGaussianSpec& spec,
                                 RandomSource& rng) {
  if (!(spec.B > 0)) throw ArgumentError("truncation radius must be positive");
  Vector z = spec.chi + gaussian_vector(spec.chi.size(), spec.sigma, rng);
  if (z.norm() <= spec.B) return z;
  return Vector::Zero(spec.chi.size());
}

Vector truncated_gaussian_mean(const TruncatedGaussianSpec& spec) {
  if (!(spec.B > 0)) throw ArgumentError("truncation radius must be positive");
  const Index d = spec.chi.size();
  const double a = spec.chi.norm();
  if (a == 0) return Vector::Zero(d);
  const double s = spec.sigma;
  const double B = spec.B;
  if (s == 0) return a <= B ? spec.chi : Vector::Zero(d);

  // Along u = chi/|chi|, Z'_1 ~ N(a, s^2); the orthogonal part has squared
  // norm s^2 * chi^2_{d-1}. Orthogonal components average to zero.
  const double lo = std::isfinite(B) ? std::max(-B, a - 12 * s) : a - 12 * s;
  const double hi = std::isfinite(B) ? std::min(B, a + 12 * s) : a + 12 * s;
  if (!(lo < hi)) return Vector::Zero(d);
  const double dof = static_cast<double>(d - 1);
  auto integrand = [&](double z) {
    const double t = (z - a) / s;
    const double density =
        std::exp(-0.5 * t * t) / (s * std::sqrt(2 * std::numbers::pi));
    double inside = 1;
    if (std::isfinite(B)) {
      const double room = (B * B - z * z) / (s * s);
      if (room <= 0) {
        inside = 0;
      } else if (dof > 0) {
        inside = boost::math::gamma_p(dof / 2, room / 2);
      }
    }
    return z * density * inside;
  };
  const double first = boost::math::quadrature::gauss_kronrod<double, 61>::
      integrate(integrand, lo, hi, 15, 1e-13);
  return spec.chi * (first / a);
}

}  // namespace userdp
