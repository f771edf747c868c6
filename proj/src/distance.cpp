#include "hsx/distance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hsx {

namespace detail {

namespace {

// 1D lower-envelope pass: f[i] <- min_j ( ((i-j)*s)^2 + f[j] ).
// Envelope breakpoints use true infinities: intersection abscissae of far
// seedless parabolas can fall below any finite sentinel.
void dt_line(double* f, int n, double s, std::vector<int>& v, std::vector<double>& z,
             std::vector<double>& buf) {
  if (n == 1) return;
  constexpr double kInf = std::numeric_limits<double>::infinity();
  const double s2 = s * s;
  int k = 0;
  v[0] = 0;
  z[0] = -kInf;
  z[1] = kInf;
  for (int q = 1; q < n; ++q) {
    double sxt = ((f[q] + s2 * q * q) - (f[v[k]] + s2 * v[k] * v[k])) /
                 (2.0 * s2 * (q - v[k]));
    while (sxt <= z[k]) {
      --k;
      sxt = ((f[q] + s2 * q * q) - (f[v[k]] + s2 * v[k] * v[k])) /
            (2.0 * s2 * (q - v[k]));
    }
    ++k;
    v[k] = q;
    z[k] = sxt;
    z[k + 1] = kInf;
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) ++k;
    const double d = (q - v[k]) * s;
    buf[q] = d * d + f[v[k]];
  }
  std::copy(buf.begin(), buf.begin() + n, f);
}

}  // namespace

std::vector<double> squared_edt(const std::vector<uint8_t>& seed, const Dims3& dims,
                                const Vec3& spacing) {
  const std::size_t n = voxel_count(dims);
  std::vector<double> d(n);
  for (std::size_t f = 0; f < n; ++f) d[f] = seed[f] ? 0.0 : kNoSeed;

  const int nx = dims[0], ny = dims[1], nz = dims[2];
  const int nmax = std::max({nx, ny, nz});
  std::vector<int> v(nmax);
  std::vector<double> z(nmax + 1), buf(nmax), line(nmax);

  // Axis 0 (contiguous).
  for (int k = 0; k < nz; ++k) {
    for (int j = 0; j < ny; ++j) {
      double* row = d.data() + static_cast<std::size_t>(nx) * (j + static_cast<std::size_t>(ny) * k);
      dt_line(row, nx, spacing[0], v, z, buf);
    }
  }
  // Axis 1.
  for (int k = 0; k < nz; ++k) {
    for (int i = 0; i < nx; ++i) {
      const std::size_t base = static_cast<std::size_t>(i) +
                               static_cast<std::size_t>(nx) * ny * static_cast<std::size_t>(k);
      for (int j = 0; j < ny; ++j) line[j] = d[base + static_cast<std::size_t>(j) * nx];
      dt_line(line.data(), ny, spacing[1], v, z, buf);
      for (int j = 0; j < ny; ++j) d[base + static_cast<std::size_t>(j) * nx] = line[j];
    }
  }
  // Axis 2.
  const std::size_t plane = static_cast<std::size_t>(nx) * ny;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const std::size_t base = static_cast<std::size_t>(i) + static_cast<std::size_t>(j) * nx;
      for (int k = 0; k < nz; ++k) line[k] = d[base + static_cast<std::size_t>(k) * plane];
      dt_line(line.data(), nz, spacing[2], v, z, buf);
      for (int k = 0; k < nz; ++k) d[base + static_cast<std::size_t>(k) * plane] = line[k];
    }
  }
  return d;
}

}  // namespace detail

double default_clip_mm(const Volume& mask) {
  const Vec3 sp = mask.spacing();
  return 10.0 * std::min({sp[0], sp[1], sp[2]});
}

Volume distance_map(const Volume& mask, double clip_mm) {
  if (!mask.is_binary()) throw MaskError("distance_map input must be binary");
  if (!(clip_mm > 0.0)) throw MaskError("clip_mm must be positive");

  const Dims3& dims = mask.dims;
  const int nx = dims[0], ny = dims[1], nz = dims[2];
  std::vector<uint8_t> boundary(mask.size(), 0);
  bool any = false;
  for (int k = 0; k < nz; ++k) {
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        if (mask.at(i, j, k) != 1.0) continue;
        const bool edge = (i > 0 && mask.at(i - 1, j, k) == 0.0) ||
                          (i + 1 < nx && mask.at(i + 1, j, k) == 0.0) ||
                          (j > 0 && mask.at(i, j - 1, k) == 0.0) ||
                          (j + 1 < ny && mask.at(i, j + 1, k) == 0.0) ||
                          (k > 0 && mask.at(i, j, k - 1) == 0.0) ||
                          (k + 1 < nz && mask.at(i, j, k + 1) == 0.0);
        if (edge) {
          boundary[mask.index(i, j, k)] = 1;
          any = true;
        }
      }
    }
  }

  Volume out(dims, mask.affine);
  if (!any) {
    // Distance to nothing: the convention is saturation at the clip.
    std::fill(out.data.begin(), out.data.end(), 1.0);
    return out;
  }

  const std::vector<double> d2 = detail::squared_edt(boundary, dims, mask.spacing());
  const double inv = 1.0 / clip_mm;
  for (std::size_t f = 0; f < out.data.size(); ++f) {
    out.data[f] = std::min(std::sqrt(d2[f]), clip_mm) * inv;
  }
  return out;
}

}  // namespace hsx
