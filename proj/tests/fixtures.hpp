#pragma once

#include <cmath>
#include <vector>

#include "huntkit/model.hpp"

namespace fx {

using namespace huntkit;

inline Piece power_piece(double lo, double hi, double kappa, double alpha) {
  return Piece{lo, hi, PowerLaw{kappa, alpha}};
}

inline LevyDensity power_density(double alpha, double hi = 1.0, double kappa = 1.0) {
  LevyDensity d;
  d.pieces.push_back(power_piece(0.0, hi, kappa, alpha));
  return d;
}

// constant density 1 on (0, 1]: kappa x^0 = kappa x^{-1-alpha} with alpha = -1
inline LevyDensity uniform_density(double hi = 1.0) { return power_density(-1.0, hi); }

inline LevyTriplet jumps_only(LevyDensity d, ExponentForm form = ExponentForm::levy_khintchine) {
  LevyTriplet t;
  t.density = std::move(d);
  t.form = form;
  return t;
}

inline LevyTriplet brownian(double q = 1.0) {
  LevyTriplet t;
  t.gaussian = q;
  return t;
}

inline LevyDensity loglog_density(double c = 1.0, double delta = 1.0) {
  LevyDensity d;
  d.pieces.push_back(Piece{0.0, std::exp(-1.0) * 0.5, LogLog{c, delta}});
  return d;
}

inline std::vector<double> logspace(double lo, double hi, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i)
    v[i] = n == 1 ? lo : std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * i / (n - 1));
  return v;
}

inline bool close(double a, double b, double abs_tol, double rel_tol) {
  return std::abs(a - b) <= std::max(abs_tol, rel_tol * std::abs(b));
}

}  // namespace fx
