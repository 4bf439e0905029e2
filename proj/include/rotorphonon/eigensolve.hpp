#pragma once
#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "rotorphonon/errors.hpp"

namespace rotorphonon {

struct EigenResult {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // columns aligned with values, orthonormal
};

// Dense symmetric eigensolve. The input must be symmetric; only the lower
// triangle is referenced.
EigenResult symmetric_eigen(const Eigen::MatrixXd& a);

// Cyclic Jacobi eigenvalues for an arbitrary floating scalar, for use where
// double rounding would bury the quantity under study. Input is a symmetric
// n x n matrix in row-major order; returns ascending eigenvalues.
template <class Scalar>
std::vector<Scalar> jacobi_eigenvalues(std::vector<Scalar> a, int n,
                                       int max_sweeps = 64) {
  auto at = [&](int i, int j) -> Scalar& { return a[i * n + j]; };
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    Scalar off = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) off += at(i, j) * at(i, j);
    if (off == Scalar(0)) break;
    // Threshold below which a rotation can no longer move the spectrum.
    Scalar diag = 0;
    for (int i = 0; i < n; ++i) diag += at(i, i) * at(i, i);
    using std::sqrt;
    if (sqrt(off) <= std::numeric_limits<Scalar>::epsilon() * sqrt(diag + off))
      break;

    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const Scalar apq = at(p, q);
        if (apq == Scalar(0)) continue;
        const Scalar theta = (at(q, q) - at(p, p)) / (2 * apq);
        using std::abs;
        Scalar t;
        if (abs(theta) > Scalar(1e18)) {
          t = 1 / (2 * theta);
        } else {
          t = Scalar(1) / (abs(theta) + sqrt(theta * theta + 1));
          if (theta < 0) t = -t;
        }
        const Scalar c = 1 / sqrt(t * t + 1);
        const Scalar s = t * c;
        const Scalar tau = s / (1 + c);

        const Scalar app = at(p, p), aqq = at(q, q);
        at(p, p) = app - t * apq;
        at(q, q) = aqq + t * apq;
        at(p, q) = 0;
        at(q, p) = 0;
        for (int i = 0; i < n; ++i) {
          if (i == p || i == q) continue;
          const Scalar aip = at(i, p), aiq = at(i, q);
          at(i, p) = aip - s * (aiq + tau * aip);
          at(p, i) = at(i, p);
          at(i, q) = aiq + s * (aip - tau * aiq);
          at(q, i) = at(i, q);
        }
      }
    }
  }
  std::vector<Scalar> vals(n);
  for (int i = 0; i < n; ++i) vals[i] = a[i * n + i];
  std::sort(vals.begin(), vals.end());
  return vals;
}

}  // namespace rotorphonon
