#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>

#include "npgeo/errors.hpp"

namespace npgeo {

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<std::array<double, 3>, 3>;
using Complex = std::complex<double>;
using CVec3 = std::array<Complex, 3>;

inline double det(const Mat3& m) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

/// Cofactor inverse; throws DomainError when |det| <= tiny.
inline Mat3 inverse(const Mat3& m, double tiny = 1e-14) {
  const double d = det(m);
  if (!(std::fabs(d) > tiny)) throw DomainError("singular metric (det = " + std::to_string(d) + ")");
  Mat3 r{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const int i1 = (j + 1) % 3, i2 = (j + 2) % 3, j1 = (i + 1) % 3, j2 = (i + 2) % 3;
      r[i][j] = (m[i1][j1] * m[i2][j2] - m[i1][j2] * m[i2][j1]) / d;
    }
  return r;
}

/// Eigenvalues of a symmetric 3x3 by cyclic Jacobi rotations, ascending.
struct SymmetricEigen {
  Vec3 values{};
  std::array<Vec3, 3> vectors{};  ///< vectors[i] belongs to values[i]; Euclidean-orthonormal
};

/// Cyclic Jacobi; eigenpairs sorted by ascending eigenvalue.
inline SymmetricEigen symmetric_eigen(Mat3 a) {
  Mat3 v{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < 3; ++p)
      for (int q = p + 1; q < 3; ++q) off += a[p][q] * a[p][q];
    if (off < 1e-30) break;
    for (int p = 0; p < 3; ++p)
      for (int q = p + 1; q < 3; ++q) {
        if (a[p][q] == 0.0) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = std::copysign(1.0, theta) / (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (int k = 0; k < 3; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
          const double vkp = v[k][p], vkq = v[k][q];
          v[k][p] = c * vkp - s * vkq;
          v[k][q] = s * vkp + c * vkq;
        }
        for (int k = 0; k < 3; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
      }
  }
  std::array<int, 3> idx{0, 1, 2};
  std::sort(idx.begin(), idx.end(), [&](int i, int j) { return a[i][i] < a[j][j]; });
  SymmetricEigen out;
  for (int n = 0; n < 3; ++n) {
    out.values[n] = a[idx[n]][idx[n]];
    for (int k = 0; k < 3; ++k) out.vectors[n][k] = v[k][idx[n]];
  }
  return out;
}

inline Vec3 symmetric_eigenvalues(const Mat3& a) { return symmetric_eigen(a).values; }

/// g(u, v) with complex-bilinear (not Hermitian) extension.
template <class U, class V>
auto inner(const Mat3& g, const std::array<U, 3>& u, const std::array<V, 3>& v) {
  decltype(U{} * V{}) s{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) s += g[i][j] * u[i] * v[j];
  return s;
}

inline CVec3 to_complex(const Vec3& v) { return {v[0], v[1], v[2]}; }

}  // namespace npgeo
