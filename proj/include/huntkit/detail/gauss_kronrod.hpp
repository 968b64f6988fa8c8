#pragma once

// 7-point Gauss / 15-point Kronrod pair with the QUADPACK error heuristic,
// plus a recursive-bisection driver.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>

namespace huntkit::detail {

struct PanelResult {
  double value = 0.0;
  double abs_err = 0.0;
  std::size_t panels = 0;

  PanelResult& operator+=(const PanelResult& o) {
    value += o.value;
    abs_err += o.abs_err;
    panels += o.panels;
    return *this;
  }
};

inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, 7).
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class F>
PanelResult gauss_kronrod15(F&& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double resk = fc * kKronrodWeights[7];
  double resg = fc * kGaussWeights[3];
  double resabs = std::abs(resk);
  std::array<double, 7> f1{}, f2{};
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kKronrodNodes[j];
    f1[j] = f(center - dx);
    f2[j] = f(center + dx);
    const double sum = f1[j] + f2[j];
    resk += kKronrodWeights[j] * sum;
    resabs += kKronrodWeights[j] * (std::abs(f1[j]) + std::abs(f2[j]));
    if (j % 2 == 1) resg += kGaussWeights[j / 2] * sum;
  }
  const double mean = 0.5 * resk;
  double resasc = kKronrodWeights[7] * std::abs(fc - mean);
  for (int j = 0; j < 7; ++j)
    resasc += kKronrodWeights[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));

  const double ahalf = std::abs(half);
  resk *= half;
  resabs *= ahalf;
  resasc *= ahalf;
  double err = std::abs((resk - resg * half));
  if (resasc != 0.0 && err != 0.0)
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / (50.0 * eps))
    err = std::max(50.0 * eps * resabs, err);
  return {resk, err, 1};
}

// Bisects until the local estimate meets max(abs_target, rel_target*|value|).
template <class F>
PanelResult adaptive_gk(F&& f, double a, double b, double abs_target, double rel_target,
                        int depth = 0) {
  PanelResult r = gauss_kronrod15(f, a, b);
  if (r.abs_err <= std::max(abs_target, rel_target * std::abs(r.value)) || depth >= 48)
    return r;
  const double mid = 0.5 * (a + b);
  if (!(mid > a && mid < b)) return r;
  PanelResult left = adaptive_gk(f, a, mid, 0.5 * abs_target, rel_target, depth + 1);
  left += adaptive_gk(f, mid, b, 0.5 * abs_target, rel_target, depth + 1);
  return left;
}

}  // namespace huntkit::detail
