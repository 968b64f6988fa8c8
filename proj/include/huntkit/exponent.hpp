#pragma once

#include <cmath>
#include <ostream>
#include <vector>

#include "huntkit/detail/format.hpp"
#include "huntkit/detail/parallel.hpp"
#include "huntkit/model.hpp"
#include "huntkit/quad.hpp"

namespace huntkit {

// psi(z) for the triplet. In Lévy–Khintchine form jumps below 1 are
// compensated; in subordinator form psi = -iaz + ∫(1 - e^{izx}) rho.
inline ExponentValue eval_exponent(const LevyTriplet& t, double z, double tol = 1e-8) {
  if (!(tol > 0.0)) throw PreconditionError("tol must be positive");
  if (!std::isfinite(z)) throw PreconditionError("z must be finite");
  ExponentValue v;
  v.z = z;
  if (z == 0.0) {
    v.A = 1.0;
    v.B = 1.0;
    return v;
  }
  const LevyDensity& d = t.density;
  const double factor = d.mirror ? 2.0 : 1.0;

  const QuadResult cos_part = integrate_one_minus_cos(d, z, tol);
  v.psi_re = t.gaussian * z * z / 2.0 + factor * cos_part.value;
  v.re_err = factor * cos_part.abs_err;

  if (t.form == ExponentForm::subordinator) {
    v.psi_im = -t.drift * z;
    if (!d.mirror) {
      const QuadResult s = integrate_sin(d, z, tol);
      v.psi_im -= s.value;
      v.im_err = s.abs_err;
    }
  } else {
    v.psi_im = t.drift * z;
    if (!d.mirror) {
      const QuadResult small = integrate_kernel(d, Kernel::x_minus_sin, z, tol, 0.0, 1.0);
      const QuadResult big = integrate_kernel(d, Kernel::sin, z, tol, 1.0, kInf);
      v.psi_im += small.value - big.value;
      v.im_err = small.abs_err + big.abs_err;
    }
  }
  v.psi_re = std::max(0.0, v.psi_re);
  v.A = 1.0 + v.psi_re;
  v.B = std::hypot(v.A, v.psi_im);
  v.abs_err = v.re_err + v.im_err;
  return v;
}

inline std::vector<ExponentValue> eval_exponent_grid(const LevyTriplet& t,
                                                     const std::vector<double>& zs,
                                                     double tol = 1e-8) {
  for (std::size_t i = 1; i < zs.size(); ++i)
    if (!(zs[i] > zs[i - 1])) throw PreconditionError("z grid must be strictly increasing");
  return detail::parallel_map<ExponentValue>(zs.size(),
                                             [&](std::size_t i) { return eval_exponent(t, zs[i], tol); });
}

inline void write_exponent_csv(std::ostream& os, const std::vector<ExponentValue>& vs) {
  using detail::g17;
  os << "z,psi_re,psi_im,A,B,abs_err\n";
  for (const auto& v : vs)
    os << g17(v.z) << ',' << g17(v.psi_re) << ',' << g17(v.psi_im) << ',' << g17(v.A) << ','
       << g17(v.B) << ',' << g17(v.abs_err) << '\n';
}

}  // namespace huntkit
