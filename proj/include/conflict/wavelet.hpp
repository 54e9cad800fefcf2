#pragma once
/**
 * @file wavelet.hpp
 * @brief Orthogonal Daubechies-6 wavelet transform with half-sample symmetric extension and
 * BayesShrink soft-threshold denoising of 1-D signals.
 */

#include <span>
#include <vector>

namespace conflict::wavelet {

struct Db6
{
  static const std::vector<double>& dec_lo();
  static const std::vector<double>& dec_hi();
  static const std::vector<double>& rec_lo();
  static const std::vector<double>& rec_hi();
};

struct Level
{
  std::vector<double> approx;
  std::vector<double> detail;
};

/// Single-level analysis; both outputs have floor((N + 11) / 2) samples.
Level dwt(std::span<const double> signal);
/// Single-level synthesis; output has 2 * M - 10 samples.
std::vector<double> idwt(std::span<const double> approx, std::span<const double> detail);

struct Decomposition
{
  std::vector<double> approx;               // coarsest approximation
  std::vector<std::vector<double>> details; // coarsest first
};

Decomposition wavedec(std::span<const double> signal, int levels);
std::vector<double> waverec(const Decomposition& coeffs);

double soft_threshold(double value, double threshold);
/// sigma^2 / sqrt(max(mean(d^2) - sigma^2, eps))
double bayes_shrink_threshold(std::span<const double> detail, double sigma);

struct DenoiseSettings
{
  double sigma = 0.5;
  int levels = 3;
};

/// Soft-threshold every detail band with its BayesShrink threshold; the approximation is kept.
std::vector<double> denoise(std::span<const double> signal, const DenoiseSettings& settings = {});

}  // namespace conflict::wavelet
