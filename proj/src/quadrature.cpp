#include "durasim/quadrature.h"

#include <array>
#include <cmath>
#include <queue>
#include <string>
#include <vector>

#include "durasim/errors.h"

namespace durasim {
namespace {

// Kronrod nodes on [0, 1] (symmetric about 0); odd indices are Gauss nodes.
constexpr std::array<double, 8> kNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double lo;
  double hi;
  double value;
  double error;

  bool operator<(const Segment& other) const { return error < other.error; }
};

Segment kronrod15(const std::function<double(double)>& f, double lo,
                  double hi) {
  const double center = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  const double fc = f(center);
  double kronrod = fc * kKronrodWeights[7];
  double gauss = fc * kGaussWeights[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kNodes[j];
    const double pair = f(center - dx) + f(center + dx);
    kronrod += kKronrodWeights[j] * pair;
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * pair;
  }
  kronrod *= half;
  gauss *= half;
  return {lo, hi, kronrod, std::abs(kronrod - gauss)};
}

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double lo,
                           double hi, const QuadratureOptions& options) {
  if (!(options.abs_tol > 0.0)) {
    throw ParameterError("integrate: tolerance must be positive");
  }
  if (!std::isfinite(lo) || !std::isfinite(hi)) {
    throw ParameterError("integrate: bounds must be finite");
  }
  if (lo == hi) return {};
  double sign = 1.0;
  if (hi < lo) {
    std::swap(lo, hi);
    sign = -1.0;
  }

  std::priority_queue<Segment> heap;
  Segment first = kronrod15(f, lo, hi);
  double total = first.value;
  double error = first.error;
  heap.push(first);
  int subdivisions = 0;

  while (error > options.abs_tol) {
    if (subdivisions >= options.max_subdivisions) {
      throw NumericError("quadrature did not converge: error estimate " +
                             std::to_string(error),
                         error);
    }
    const Segment worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (!(mid > worst.lo && mid < worst.hi)) {
      // Interval cannot be split further in floating point.
      throw NumericError("quadrature interval underflow: error estimate " +
                             std::to_string(error),
                         error);
    }
    const Segment left = kronrod15(f, worst.lo, mid);
    const Segment right = kronrod15(f, mid, worst.hi);
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++subdivisions;
  }

  // Re-sum to shed the drift of the running updates.
  double value = 0.0;
  double err = 0.0;
  while (!heap.empty()) {
    value += heap.top().value;
    err += heap.top().error;
    heap.pop();
  }
  return {sign * value, err, subdivisions};
}

}  // namespace durasim
