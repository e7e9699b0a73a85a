#pragma once

// Small fixed-size vector/matrix algebra in R^3 used by the pointwise kernels.

#include <array>
#include <cmath>

namespace biax {

using Vec3 = std::array<double, 3>;
/// Row-major 3x3 matrix, m[row][col].
using Mat3 = std::array<std::array<double, 3>, 3>;

inline constexpr Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline constexpr Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline constexpr Vec3 operator-(const Vec3& a) { return {-a[0], -a[1], -a[2]}; }
inline constexpr Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }
inline constexpr Vec3& operator+=(Vec3& a, const Vec3& b) {
  a[0] += b[0];
  a[1] += b[1];
  a[2] += b[2];
  return a;
}

inline constexpr double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

inline constexpr Mat3 zero_mat() { return {}; }
inline constexpr Mat3 identity_mat() { return {{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}}; }

inline constexpr Mat3 outer(const Vec3& a, const Vec3& b) {
  Mat3 m{};
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) m[r][c] = a[r] * b[c];
  return m;
}

inline constexpr Mat3 operator+(const Mat3& a, const Mat3& b) {
  Mat3 m{};
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) m[r][c] = a[r][c] + b[r][c];
  return m;
}
inline constexpr Mat3 operator-(const Mat3& a, const Mat3& b) {
  Mat3 m{};
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) m[r][c] = a[r][c] - b[r][c];
  return m;
}
inline constexpr Mat3 operator*(double s, const Mat3& a) {
  Mat3 m{};
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) m[r][c] = s * a[r][c];
  return m;
}
inline constexpr Mat3& operator+=(Mat3& a, const Mat3& b) {
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) a[r][c] += b[r][c];
  return a;
}

/// Frobenius inner product A·B = sum_ij A_ij B_ij.
inline constexpr double frob(const Mat3& a, const Mat3& b) {
  double s = 0.0;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) s += a[r][c] * b[r][c];
  return s;
}

inline constexpr Mat3 transpose(const Mat3& a) {
  Mat3 m{};
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) m[r][c] = a[c][r];
  return m;
}

inline constexpr Mat3 matmul(const Mat3& a, const Mat3& b) {
  Mat3 m{};
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += a[r][k] * b[k][c];
      m[r][c] = s;
    }
  return m;
}

inline constexpr Vec3 matvec(const Mat3& a, const Vec3& v) {
  return {a[0][0] * v[0] + a[0][1] * v[1] + a[0][2] * v[2], a[1][0] * v[0] + a[1][1] * v[1] + a[1][2] * v[2],
          a[2][0] * v[0] + a[2][1] * v[1] + a[2][2] * v[2]};
}

inline constexpr double det(const Mat3& a) {
  return a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
         a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
}

inline constexpr double trace(const Mat3& a) { return a[0][0] + a[1][1] + a[2][2]; }

inline double frob_norm(const Mat3& a) { return std::sqrt(frob(a, a)); }

/// Levi-Civita symbol with 0-based indices.
inline constexpr int levi_civita(int i, int j, int k) {
  if (i == j || j == k || i == k) return 0;
  return ((i == 0 && j == 1) || (i == 1 && j == 2) || (i == 2 && j == 0)) ? 1 : -1;
}

}  // namespace biax
