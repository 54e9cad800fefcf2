#include "conflict/wavelet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace conflict::wavelet {

namespace {

// Daubechies wavelet with 6 vanishing moments, reconstruction low-pass filter.
const std::vector<double> kRecLo = {
  0.11154074335010947,    0.49462389039845306,    0.7511339080210954,   0.31525035170919763,
  -0.22626469396543983,   -0.12976686756726194,   0.09750160558732304,  0.027522865530305727,
  -0.03158203931748603,   0.0005538422011614961,  0.004777257510945511, -0.0010773010853084796,
};

std::vector<double> reversed(const std::vector<double>& v) { return {v.rbegin(), v.rend()}; }

std::vector<double> make_rec_hi()
{
  // rec_hi[k] = (-1)^k * rec_lo[F-1-k]
  const std::size_t f = kRecLo.size();
  std::vector<double> out(f);
  for (std::size_t k = 0; k < f; ++k) out[k] = ((k % 2) ? -1.0 : 1.0) * kRecLo[f - 1 - k];
  return out;
}

// Half-sample symmetric extension: x[-1] = x[0], x[N] = x[N-1].
std::size_t reflect(std::ptrdiff_t k, std::ptrdiff_t n)
{
  while (k < 0 || k >= n) {
    if (k < 0) k = -k - 1;
    if (k >= n) k = 2 * n - k - 1;
  }
  return static_cast<std::size_t>(k);
}

std::vector<double> analyse(std::span<const double> x, const std::vector<double>& filter)
{
  const auto n = static_cast<std::ptrdiff_t>(x.size());
  const auto f = static_cast<std::ptrdiff_t>(filter.size());
  const std::ptrdiff_t m = (n + f - 1) / 2;
  std::vector<double> out(static_cast<std::size_t>(m));
  for (std::ptrdiff_t o = 0; o < m; ++o) {
    const std::ptrdiff_t i = 2 * o + 1;
    double sum = 0.0;
    for (std::ptrdiff_t j = 0; j < f; ++j) sum += filter[static_cast<std::size_t>(j)] * x[reflect(i - j, n)];
    out[static_cast<std::size_t>(o)] = sum;
  }
  return out;
}

}  // namespace

const std::vector<double>& Db6::rec_lo() { return kRecLo; }

const std::vector<double>& Db6::rec_hi()
{
  static const std::vector<double> hi = make_rec_hi();
  return hi;
}

const std::vector<double>& Db6::dec_lo()
{
  static const std::vector<double> lo = reversed(kRecLo);
  return lo;
}

const std::vector<double>& Db6::dec_hi()
{
  static const std::vector<double> hi = reversed(rec_hi());
  return hi;
}

Level dwt(std::span<const double> signal)
{
  if (signal.empty()) throw std::invalid_argument("dwt of an empty signal");
  return {analyse(signal, Db6::dec_lo()), analyse(signal, Db6::dec_hi())};
}

std::vector<double> idwt(std::span<const double> approx, std::span<const double> detail)
{
  if (approx.size() != detail.size()) throw std::invalid_argument("idwt: coefficient bands differ in length");
  const auto& lo = Db6::rec_lo();
  const auto& hi = Db6::rec_hi();
  const auto f = static_cast<std::ptrdiff_t>(lo.size());
  const auto m = static_cast<std::ptrdiff_t>(approx.size());
  const std::ptrdiff_t len = 2 * m - f + 2;
  if (len <= 0) throw std::invalid_argument("idwt: too few coefficients for the filter length");

  // Full convolution of the zero-upsampled bands, keeping the valid window [f-2, f-2+len).
  std::vector<double> out(static_cast<std::size_t>(len), 0.0);
  for (std::ptrdiff_t o = 0; o < len; ++o) {
    const std::ptrdiff_t n = o + f - 2;
    double sum = 0.0;
    for (std::ptrdiff_t j = 0; j < f; ++j) {
      const std::ptrdiff_t u = n - j;
      if (u < 0 || u % 2 != 0 || u / 2 >= m) continue;
      const auto k = static_cast<std::size_t>(u / 2);
      sum += lo[static_cast<std::size_t>(j)] * approx[k] + hi[static_cast<std::size_t>(j)] * detail[k];
    }
    out[static_cast<std::size_t>(o)] = sum;
  }
  return out;
}

Decomposition wavedec(std::span<const double> signal, int levels)
{
  if (levels < 1) throw std::invalid_argument("wavedec needs at least one level");
  Decomposition out;
  std::vector<double> current(signal.begin(), signal.end());
  for (int l = 0; l < levels; ++l) {
    auto level = dwt(current);
    out.details.insert(out.details.begin(), std::move(level.detail));
    current = std::move(level.approx);
  }
  out.approx = std::move(current);
  return out;
}

std::vector<double> waverec(const Decomposition& coeffs)
{
  std::vector<double> a = coeffs.approx;
  for (const auto& d : coeffs.details) {
    if (a.size() == d.size() + 1) a.pop_back();
    a = idwt(a, d);
  }
  return a;
}

double soft_threshold(double value, double threshold)
{
  const double mag = std::abs(value) - threshold;
  return mag > 0.0 ? std::copysign(mag, value) : 0.0;
}

double bayes_shrink_threshold(std::span<const double> detail, double sigma)
{
  double energy = 0.0;
  for (double d : detail) energy += d * d;
  const double dvar = detail.empty() ? 0.0 : energy / static_cast<double>(detail.size());
  const double var = sigma * sigma;
  return var / std::sqrt(std::max(dvar - var, std::numeric_limits<double>::epsilon()));
}

std::vector<double> denoise(std::span<const double> signal, const DenoiseSettings& settings)
{
  auto coeffs = wavedec(signal, settings.levels);
  for (auto& band : coeffs.details) {
    const double thr = bayes_shrink_threshold(band, settings.sigma);
    for (double& d : band) d = soft_threshold(d, thr);
  }
  auto out = waverec(coeffs);
  out.resize(signal.size());
  return out;
}

}  // namespace conflict::wavelet
