#pragma once

#include "dsp/error.hpp"

#include <cmath>

namespace dsp {

template <typename Scalar>
struct QuadratureResult {
  Scalar value{};
  Scalar error_estimate{};
};

namespace detail {

template <typename Scalar, typename Func>
struct SimpsonState {
  const Func& f;
  int max_depth;
  Scalar error{};
  bool converged = true;

  Scalar refine(Scalar a, Scalar fa, Scalar b, Scalar fb, Scalar m, Scalar fm, Scalar whole,
                Scalar tol, int depth) {
    const Scalar lm = (a + m) / 2;
    const Scalar rm = (m + b) / 2;
    const Scalar flm = f(lm);
    const Scalar frm = f(rm);
    const Scalar left = (m - a) / 6 * (fa + 4 * flm + fm);
    const Scalar right = (b - m) / 6 * (fm + 4 * frm + fb);
    const Scalar delta = left + right - whole;
    if (std::abs(delta) <= 15 * tol) {
      error += std::abs(delta) / 15;
      return left + right + delta / 15;
    }
    if (depth >= max_depth) {
      converged = false;
      error += std::abs(delta) / 15;
      return left + right + delta / 15;
    }
    return refine(a, fa, m, fm, lm, flm, left, tol / 2, depth + 1) +
           refine(m, fm, b, fb, rm, frm, right, tol / 2, depth + 1);
  }
};

}  // namespace detail

// Adaptive Simpson with Richardson correction on [a, b] to absolute tolerance abs_tol.
// Throws QuadratureError (carrying the achieved estimate) if max_depth bisections do not
// suffice on some subinterval.
template <typename Scalar, typename Func>
QuadratureResult<Scalar> adaptive_simpson(const Func& f, Scalar a, Scalar b, Scalar abs_tol,
                                          int max_depth = 48) {
  if (a == b) return {Scalar(0), Scalar(0)};
  detail::SimpsonState<Scalar, Func> state{f, max_depth};
  const Scalar fa = f(a);
  const Scalar fb = f(b);
  const Scalar m = (a + b) / 2;
  const Scalar fm = f(m);
  const Scalar whole = (b - a) / 6 * (fa + 4 * fm + fb);
  const Scalar value = state.refine(a, fa, b, fb, m, fm, whole, abs_tol, 0);
  if (!state.converged) {
    throw QuadratureError("adaptive Simpson did not reach the requested tolerance", value,
                          state.error);
  }
  return {value, state.error};
}

}  // namespace dsp
