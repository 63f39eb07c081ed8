#pragma once

#include <functional>

namespace durasim {

struct QuadratureOptions {
  double abs_tol = 1e-8;
  int max_subdivisions = 200;
};

struct QuadratureResult {
  double value = 0.0;
  double abs_error = 0.0;
  int subdivisions = 0;
};

// Globally adaptive 15-point Gauss-Kronrod integration of f over [lo, hi].
// The interval with the largest error estimate is bisected until the summed
// estimate is below abs_tol. Throws NumericError carrying the achieved
// estimate when max_subdivisions is exhausted.
QuadratureResult integrate(const std::function<double(double)>& f, double lo,
                           double hi, const QuadratureOptions& options = {});

}  // namespace durasim
