#pragma once
// Brute-force reference computations. They share no code with the library beyond the data types.

#include "conflict/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

namespace oracle {

/// Linear interpolation on a strictly increasing abscissa, clamped at both ends.
inline double lerp(const std::vector<double>& x, const std::vector<double>& y, double at)
{
  if (at <= x.front()) return y.front();
  if (at >= x.back()) return y.back();
  const auto hi = static_cast<std::size_t>(std::upper_bound(x.begin(), x.end(), at) - x.begin());
  const std::size_t lo = hi - 1;
  const double w = (at - x[lo]) / (x[hi] - x[lo]);
  return y[lo] * (1.0 - w) + y[hi] * w;
}

struct MrctRule
{
  double hs = 2.0;
  double h0 = 8.0;
  double gs = 2.0;
  double g0 = 8.0;
};

inline bool headway_holds(const conflict::CurvilinearProfile& p, double t_limit, double dt, const MrctRule& r)
{
  int evaluated = 0;
  for (std::size_t i = 0; i < p.t.size(); ++i) {
    if (p.t[i] > t_limit + 1e-6) continue;
    const double back = p.t[i] - dt;
    if (back < p.t.front() - 1e-6) continue;
    ++evaluated;
    const double gained = p.s[i] - lerp(p.t, p.s, back);
    if (gained < r.hs * lerp(p.t, p.v, back) + r.h0) return false;
  }
  return evaluated > 0;
}

inline bool mrct_feasible(const conflict::CurvilinearProfile& a, const conflict::CurvilinearProfile& b, double dt,
                          const MrctRule& r = {})
{
  if (!headway_holds(a, a.t_pass, dt, r) || !headway_holds(b, b.t_pass, dt, r)) return false;
  const double tau = b.t_pass - dt;
  if (tau < a.t.front() - 1e-6 || tau > a.t.back() + 1e-6) return false;
  const double remaining = -lerp(a.t, a.s, tau);
  return remaining >= std::max(r.gs * lerp(a.t, a.v, tau), r.g0);
}

/// First feasible period on a uniform grid of `step`, up to `max`.
inline std::optional<double> mrct_scan(const conflict::CurvilinearProfile& a, const conflict::CurvilinearProfile& b,
                                       double step = 0.001, double max = 30.0, const MrctRule& r = {})
{
  const auto count = static_cast<long>(std::llround(max / step));
  for (long m = 1; m <= count; ++m) {
    const double dt = static_cast<double>(m) * step;
    if (mrct_feasible(a, b, dt, r)) return dt;
  }
  return std::nullopt;
}

/// Minimum of (remaining distance) * 2|a_max| / v^2 over every sample before passage.
inline std::optional<double> psd_scan(const conflict::CurvilinearProfile& p, double a_max, double min_speed)
{
  std::optional<double> best;
  for (std::size_t i = 0; i < p.t.size(); ++i) {
    if (!(p.t[i] < p.t_pass) || !(p.s[i] < 0.0) || !(p.v[i] > min_speed)) continue;
    const double value = -p.s[i] * 2.0 * std::abs(a_max) / (p.v[i] * p.v[i]);
    best = best ? std::min(*best, value) : value;
  }
  return best;
}

/// Closed-form integral of c0 + c1 t + c2 t^2 + c3 t^3 over [a, b].
inline double cubic_integral(const double (&c)[4], double a, double b)
{
  auto prim = [&](double t) { return t * (c[0] + t * (c[1] / 2.0 + t * (c[2] / 3.0 + t * c[3] / 4.0))); };
  return prim(b) - prim(a);
}

inline double cubic_value(const double (&c)[4], double t) { return c[0] + t * (c[1] + t * (c[2] + t * c[3])); }

}  // namespace oracle
