#pragma once

#include <array>
#include <cmath>
#include <cstddef>

#include "hsx/errors.hpp"

namespace hsx {

using Vec3 = std::array<double, 3>;

inline Vec3 operator+(const Vec3& a, const Vec3& b) {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}
inline Vec3 operator-(const Vec3& a, const Vec3& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}
inline Vec3 operator*(double s, const Vec3& a) {
  return {s * a[0], s * a[1], s * a[2]};
}
inline double dot(const Vec3& a, const Vec3& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

// 4x4 homogeneous voxel-index -> world-mm map, row-major. The bottom row is
// always (0,0,0,1): NIfTI sforms only carry the top three rows.
class Affine {
 public:
  Affine() : m_{} {
    m_[0] = m_[5] = m_[10] = m_[15] = 1.0;
  }

  static Affine identity() { return Affine{}; }

  static Affine from_array(const std::array<double, 16>& rowmajor) {
    Affine a;
    a.m_ = rowmajor;
    a.m_[12] = a.m_[13] = a.m_[14] = 0.0;
    a.m_[15] = 1.0;
    return a;
  }

  // Diagonal scaling (voxel spacing) with a world origin.
  static Affine scaling(const Vec3& spacing, const Vec3& origin = {0, 0, 0}) {
    Affine a;
    a.m_[0] = spacing[0];
    a.m_[5] = spacing[1];
    a.m_[10] = spacing[2];
    a.m_[3] = origin[0];
    a.m_[7] = origin[1];
    a.m_[11] = origin[2];
    return a;
  }

  double at(int r, int c) const { return m_[r * 4 + c]; }
  double& at(int r, int c) { return m_[r * 4 + c]; }
  const std::array<double, 16>& data() const { return m_; }

  Vec3 apply(const Vec3& p) const {
    return {m_[0] * p[0] + m_[1] * p[1] + m_[2] * p[2] + m_[3],
            m_[4] * p[0] + m_[5] * p[1] + m_[6] * p[2] + m_[7],
            m_[8] * p[0] + m_[9] * p[1] + m_[10] * p[2] + m_[11]};
  }

  // Linear part only (directions, no translation).
  Vec3 apply_vector(const Vec3& v) const {
    return {m_[0] * v[0] + m_[1] * v[1] + m_[2] * v[2],
            m_[4] * v[0] + m_[5] * v[1] + m_[6] * v[2],
            m_[8] * v[0] + m_[9] * v[1] + m_[10] * v[2]};
  }

  Affine operator*(const Affine& o) const {
    Affine r;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 4; ++j) {
        double s = 0.0;
        for (int k = 0; k < 4; ++k) s += at(i, k) * o.at(k, j);
        r.at(i, j) = s;
      }
    }
    r.at(3, 0) = r.at(3, 1) = r.at(3, 2) = 0.0;
    r.at(3, 3) = 1.0;
    return r;
  }

  Vec3 column(int c) const { return {m_[c], m_[4 + c], m_[8 + c]}; }
  Vec3 translation() const { return {m_[3], m_[7], m_[11]}; }
  void set_translation(const Vec3& t) {
    m_[3] = t[0];
    m_[7] = t[1];
    m_[11] = t[2];
  }

  double det3() const {
    return at(0, 0) * (at(1, 1) * at(2, 2) - at(1, 2) * at(2, 1)) -
           at(0, 1) * (at(1, 0) * at(2, 2) - at(1, 2) * at(2, 0)) +
           at(0, 2) * (at(1, 0) * at(2, 1) - at(1, 1) * at(2, 0));
  }

  bool invertible(double eps = 1e-12) const { return std::abs(det3()) > eps; }

  Affine inverse() const {
    const double d = det3();
    if (std::abs(d) <= 1e-12) throw GeometryError("affine is singular");
    const double inv = 1.0 / d;
    Affine r;
    // Adjugate of the 3x3 linear part.
    r.at(0, 0) = (at(1, 1) * at(2, 2) - at(1, 2) * at(2, 1)) * inv;
    r.at(0, 1) = (at(0, 2) * at(2, 1) - at(0, 1) * at(2, 2)) * inv;
    r.at(0, 2) = (at(0, 1) * at(1, 2) - at(0, 2) * at(1, 1)) * inv;
    r.at(1, 0) = (at(1, 2) * at(2, 0) - at(1, 0) * at(2, 2)) * inv;
    r.at(1, 1) = (at(0, 0) * at(2, 2) - at(0, 2) * at(2, 0)) * inv;
    r.at(1, 2) = (at(0, 2) * at(1, 0) - at(0, 0) * at(1, 2)) * inv;
    r.at(2, 0) = (at(1, 0) * at(2, 1) - at(1, 1) * at(2, 0)) * inv;
    r.at(2, 1) = (at(0, 1) * at(2, 0) - at(0, 0) * at(2, 1)) * inv;
    r.at(2, 2) = (at(0, 0) * at(1, 1) - at(0, 1) * at(1, 0)) * inv;
    const Vec3 t = translation();
    r.at(0, 3) = -(r.at(0, 0) * t[0] + r.at(0, 1) * t[1] + r.at(0, 2) * t[2]);
    r.at(1, 3) = -(r.at(1, 0) * t[0] + r.at(1, 1) * t[1] + r.at(1, 2) * t[2]);
    r.at(2, 3) = -(r.at(2, 0) * t[0] + r.at(2, 1) * t[1] + r.at(2, 2) * t[2]);
    return r;
  }

  Vec3 spacing() const {
    return {norm(column(0)), norm(column(1)), norm(column(2))};
  }

  // True when the three direction columns are mutually orthogonal; separable
  // per-axis distance transforms are exact in world units exactly then.
  bool orthogonal_columns(double tol = 1e-9) const {
    const Vec3 c0 = column(0), c1 = column(1), c2 = column(2);
    const double s = norm(c0) * norm(c1) + norm(c1) * norm(c2) + norm(c0) * norm(c2);
    return std::abs(dot(c0, c1)) + std::abs(dot(c1, c2)) + std::abs(dot(c0, c2)) <=
           tol * (s > 0 ? s : 1.0);
  }

  bool almost_equal(const Affine& o, double tol = 1e-9) const {
    for (int i = 0; i < 16; ++i) {
      if (std::abs(m_[i] - o.m_[i]) > tol) return false;
    }
    return true;
  }

 private:
  std::array<double, 16> m_;
};

// Rotation about the world origin from per-axis angles in degrees, applied
// as Rz * Ry * Rx.
inline Affine rotation_deg(const Vec3& angles_deg) {
  const double cx = std::cos(angles_deg[0] * M_PI / 180.0);
  const double sx = std::sin(angles_deg[0] * M_PI / 180.0);
  const double cy = std::cos(angles_deg[1] * M_PI / 180.0);
  const double sy = std::sin(angles_deg[1] * M_PI / 180.0);
  const double cz = std::cos(angles_deg[2] * M_PI / 180.0);
  const double sz = std::sin(angles_deg[2] * M_PI / 180.0);
  Affine r;
  r.at(0, 0) = cz * cy;
  r.at(0, 1) = cz * sy * sx - sz * cx;
  r.at(0, 2) = cz * sy * cx + sz * sx;
  r.at(1, 0) = sz * cy;
  r.at(1, 1) = sz * sy * sx + cz * cx;
  r.at(1, 2) = sz * sy * cx - cz * sx;
  r.at(2, 0) = -sy;
  r.at(2, 1) = cy * sx;
  r.at(2, 2) = cy * cx;
  return r;
}

}  // namespace hsx
