#include "hsx/nifti.hpp"

#include <zlib.h>

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <nlohmann/json.hpp>

namespace hsx {

static_assert(std::endian::native == std::endian::little,
              "NIfTI writer assumes a little-endian host");

namespace {

#pragma pack(push, 1)
struct NiftiHeader {
  int32_t sizeof_hdr;     // must be 348
  char data_type[10];
  char db_name[18];
  int32_t extents;
  int16_t session_error;
  char regular;
  char dim_info;
  int16_t dim[8];
  float intent_p1;
  float intent_p2;
  float intent_p3;
  int16_t intent_code;
  int16_t datatype;
  int16_t bitpix;
  int16_t slice_start;
  float pixdim[8];
  float vox_offset;
  float scl_slope;
  float scl_inter;
  int16_t slice_end;
  char slice_code;
  char xyzt_units;
  float cal_max;
  float cal_min;
  float slice_duration;
  float toffset;
  int32_t glmax;
  int32_t glmin;
  char descrip[80];
  char aux_file[24];
  int16_t qform_code;
  int16_t sform_code;
  float quatern_b;
  float quatern_c;
  float quatern_d;
  float qoffset_x;
  float qoffset_y;
  float qoffset_z;
  float srow_x[4];
  float srow_y[4];
  float srow_z[4];
  char intent_name[16];
  char magic[4];
};
#pragma pack(pop)

static_assert(sizeof(NiftiHeader) == 348, "NIfTI-1 header must be 348 bytes");

constexpr int kVoxOffset = 352;  // header + 4 zero extension bytes

int dtype_bits(Dtype d) {
  switch (d) {
    case Dtype::u8: return 8;
    case Dtype::i16: return 16;
    case Dtype::i32: return 32;
    case Dtype::f32: return 32;
    case Dtype::f64: return 64;
  }
  throw UnsupportedDtype("unknown dtype code");
}

std::vector<uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingInputError("cannot open file: " + path.string());
  in.seekg(0, std::ios::end);
  const std::streamoff n = in.tellg();
  in.seekg(0, std::ios::beg);
  std::vector<uint8_t> buf(static_cast<std::size_t>(n));
  if (n > 0) in.read(reinterpret_cast<char*>(buf.data()), n);
  if (!in) throw FormatError("short read: " + path.string());
  return buf;
}

bool is_gzip(const std::vector<uint8_t>& b) {
  return b.size() >= 2 && b[0] == 0x1f && b[1] == 0x8b;
}

std::vector<uint8_t> gunzip(const std::vector<uint8_t>& in) {
  z_stream zs{};
  if (inflateInit2(&zs, 15 + 32) != Z_OK) throw FormatError("inflateInit failed");
  std::vector<uint8_t> out;
  out.resize(std::max<std::size_t>(in.size() * 4, 1 << 16));
  zs.next_in = const_cast<Bytef*>(in.data());
  zs.avail_in = static_cast<uInt>(in.size());
  std::size_t written = 0;
  int rc = Z_OK;
  while (rc != Z_STREAM_END) {
    if (written == out.size()) out.resize(out.size() * 2);
    zs.next_out = out.data() + written;
    zs.avail_out = static_cast<uInt>(out.size() - written);
    rc = inflate(&zs, Z_NO_FLUSH);
    if (rc != Z_OK && rc != Z_STREAM_END) {
      inflateEnd(&zs);
      throw FormatError("corrupt gzip stream");
    }
    written = out.size() - zs.avail_out;
  }
  inflateEnd(&zs);
  out.resize(written);
  return out;
}

// Fixed gzip container (mtime 0, OS byte 3) so identical payloads always
// produce identical files.
std::vector<uint8_t> gzip_bytes(const std::vector<uint8_t>& in) {
  z_stream zs{};
  if (deflateInit2(&zs, 6, Z_DEFLATED, -15, 8, Z_DEFAULT_STRATEGY) != Z_OK) {
    throw FormatError("deflateInit failed");
  }
  std::vector<uint8_t> body(deflateBound(&zs, static_cast<uLong>(in.size())));
  zs.next_in = const_cast<Bytef*>(in.data());
  zs.avail_in = static_cast<uInt>(in.size());
  zs.next_out = body.data();
  zs.avail_out = static_cast<uInt>(body.size());
  if (deflate(&zs, Z_FINISH) != Z_STREAM_END) {
    deflateEnd(&zs);
    throw FormatError("deflate failed");
  }
  body.resize(zs.total_out);
  deflateEnd(&zs);

  std::vector<uint8_t> out = {0x1f, 0x8b, 0x08, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x03};
  out.insert(out.end(), body.begin(), body.end());
  const uint32_t crc = static_cast<uint32_t>(crc32(0L, in.data(), static_cast<uInt>(in.size())));
  const uint32_t isize = static_cast<uint32_t>(in.size());
  for (uint32_t v : {crc, isize}) {
    out.push_back(static_cast<uint8_t>(v & 0xff));
    out.push_back(static_cast<uint8_t>((v >> 8) & 0xff));
    out.push_back(static_cast<uint8_t>((v >> 16) & 0xff));
    out.push_back(static_cast<uint8_t>((v >> 24) & 0xff));
  }
  return out;
}

Affine affine_from_qform(const NiftiHeader& h) {
  const double b = h.quatern_b, c = h.quatern_c, d = h.quatern_d;
  double a = 1.0 - (b * b + c * c + d * d);
  a = a < 0.0 ? 0.0 : std::sqrt(a);
  const double qfac = h.pixdim[0] < 0.0f ? -1.0 : 1.0;
  const double sx = h.pixdim[1], sy = h.pixdim[2], sz = h.pixdim[3];
  Affine m;
  m.at(0, 0) = (a * a + b * b - c * c - d * d) * sx;
  m.at(0, 1) = (2 * b * c - 2 * a * d) * sy;
  m.at(0, 2) = (2 * b * d + 2 * a * c) * sz * qfac;
  m.at(1, 0) = (2 * b * c + 2 * a * d) * sx;
  m.at(1, 1) = (a * a + c * c - b * b - d * d) * sy;
  m.at(1, 2) = (2 * c * d - 2 * a * b) * sz * qfac;
  m.at(2, 0) = (2 * b * d - 2 * a * c) * sx;
  m.at(2, 1) = (2 * c * d + 2 * a * b) * sy;
  m.at(2, 2) = (a * a + d * d - b * b - c * c) * sz * qfac;
  m.set_translation({h.qoffset_x, h.qoffset_y, h.qoffset_z});
  return m;
}

template <typename T>
void widen(const uint8_t* src, std::size_t n, std::vector<double>& dst) {
  dst.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    T v;
    std::memcpy(&v, src + i * sizeof(T), sizeof(T));
    dst[i] = static_cast<double>(v);
  }
}

template <typename T>
void narrow_int(const std::vector<double>& src, std::vector<uint8_t>& dst) {
  dst.resize(src.size() * sizeof(T));
  const double lo = static_cast<double>(std::numeric_limits<T>::min());
  const double hi = static_cast<double>(std::numeric_limits<T>::max());
  for (std::size_t i = 0; i < src.size(); ++i) {
    const double r = std::nearbyint(src[i]);
    if (!(r >= lo && r <= hi)) {
      throw RangeError("value " + std::to_string(src[i]) + " outside dtype range");
    }
    const T v = static_cast<T>(r);
    std::memcpy(dst.data() + i * sizeof(T), &v, sizeof(T));
  }
}

}  // namespace

Volume load_volume(const std::filesystem::path& path) {
  std::vector<uint8_t> raw = read_file(path);
  if (is_gzip(raw)) raw = gunzip(raw);
  if (raw.size() < sizeof(NiftiHeader)) throw FormatError("file shorter than a NIfTI-1 header");

  NiftiHeader h;
  std::memcpy(&h, raw.data(), sizeof(h));
  if (std::memcmp(h.magic, "n+1", 3) != 0 || h.magic[3] != '\0') {
    throw FormatError("bad NIfTI magic (expected \"n+1\")");
  }
  if (h.sizeof_hdr != 348) throw FormatError("sizeof_hdr != 348");
  if (h.dim[0] < 1 || h.dim[0] > 7) throw FormatError("invalid dim[0]");
  for (int a = 4; a <= h.dim[0]; ++a) {
    if (h.dim[a] > 1) throw FormatError("only 3D volumes are supported");
  }

  Dims3 dims = {h.dim[0] >= 1 ? h.dim[1] : 1, h.dim[0] >= 2 ? h.dim[2] : 1,
                h.dim[0] >= 3 ? h.dim[3] : 1};
  if (dims[0] < 1 || dims[1] < 1 || dims[2] < 1) throw FormatError("nonpositive dimension");
  const std::size_t n = voxel_count(dims);

  const std::size_t off = static_cast<std::size_t>(h.vox_offset);
  if (off < sizeof(NiftiHeader)) throw FormatError("vox_offset inside header");

  Dtype dt;
  switch (h.datatype) {
    case 2: dt = Dtype::u8; break;
    case 4: dt = Dtype::i16; break;
    case 8: dt = Dtype::i32; break;
    case 16: dt = Dtype::f32; break;
    case 64: dt = Dtype::f64; break;
    default:
      throw UnsupportedDtype("datatype code " + std::to_string(h.datatype) +
                             " not supported");
  }
  const std::size_t need = off + n * (dtype_bits(dt) / 8);
  if (raw.size() < need) throw FormatError("data section truncated");

  Volume vol;
  vol.dims = dims;
  const uint8_t* src = raw.data() + off;
  switch (dt) {
    case Dtype::u8: widen<uint8_t>(src, n, vol.data); break;
    case Dtype::i16: widen<int16_t>(src, n, vol.data); break;
    case Dtype::i32: widen<int32_t>(src, n, vol.data); break;
    case Dtype::f32: widen<float>(src, n, vol.data); break;
    case Dtype::f64: widen<double>(src, n, vol.data); break;
  }

  if (h.scl_slope != 0.0f && (h.scl_slope != 1.0f || h.scl_inter != 0.0f)) {
    for (double& v : vol.data) v = h.scl_slope * v + h.scl_inter;
  }

  if (h.sform_code > 0) {
    Affine m;
    for (int c = 0; c < 4; ++c) {
      m.at(0, c) = h.srow_x[c];
      m.at(1, c) = h.srow_y[c];
      m.at(2, c) = h.srow_z[c];
    }
    vol.affine = m;
  } else if (h.qform_code > 0) {
    vol.affine = affine_from_qform(h);
  } else {
    vol.affine = Affine::scaling({h.pixdim[1] != 0.0f ? h.pixdim[1] : 1.0,
                                  h.pixdim[2] != 0.0f ? h.pixdim[2] : 1.0,
                                  h.pixdim[3] != 0.0f ? h.pixdim[3] : 1.0});
  }
  if (!vol.affine.invertible()) throw FormatError("file carries a singular affine");
  return vol;
}

void save_volume(const Volume& vol, const std::filesystem::path& path, Dtype dtype) {
  NiftiHeader h{};
  h.sizeof_hdr = 348;
  h.regular = 'r';
  h.dim[0] = 3;
  h.dim[1] = static_cast<int16_t>(vol.dims[0]);
  h.dim[2] = static_cast<int16_t>(vol.dims[1]);
  h.dim[3] = static_cast<int16_t>(vol.dims[2]);
  for (int a = 4; a < 8; ++a) h.dim[a] = 1;
  h.datatype = static_cast<int16_t>(dtype);
  h.bitpix = static_cast<int16_t>(dtype_bits(dtype));
  const Vec3 sp = vol.spacing();
  h.pixdim[0] = 1.0f;
  h.pixdim[1] = static_cast<float>(sp[0]);
  h.pixdim[2] = static_cast<float>(sp[1]);
  h.pixdim[3] = static_cast<float>(sp[2]);
  h.vox_offset = static_cast<float>(kVoxOffset);
  h.scl_slope = 1.0f;
  h.scl_inter = 0.0f;
  h.xyzt_units = 2;  // NIFTI_UNITS_MM
  std::snprintf(h.descrip, sizeof(h.descrip), "hsx");
  h.qform_code = 0;
  h.sform_code = 1;
  for (int c = 0; c < 4; ++c) {
    h.srow_x[c] = static_cast<float>(vol.affine.at(0, c));
    h.srow_y[c] = static_cast<float>(vol.affine.at(1, c));
    h.srow_z[c] = static_cast<float>(vol.affine.at(2, c));
  }
  std::memcpy(h.magic, "n+1", 4);

  std::vector<uint8_t> payload;
  switch (dtype) {
    case Dtype::u8: narrow_int<uint8_t>(vol.data, payload); break;
    case Dtype::i16: narrow_int<int16_t>(vol.data, payload); break;
    case Dtype::i32: narrow_int<int32_t>(vol.data, payload); break;
    case Dtype::f32: {
      payload.resize(vol.data.size() * 4);
      for (std::size_t i = 0; i < vol.data.size(); ++i) {
        const double v = vol.data[i];
        if (std::isfinite(v) && std::abs(v) > std::numeric_limits<float>::max()) {
          throw RangeError("value " + std::to_string(v) + " overflows f32");
        }
        const float f = static_cast<float>(v);
        std::memcpy(payload.data() + i * 4, &f, 4);
      }
      break;
    }
    case Dtype::f64: {
      payload.resize(vol.data.size() * 8);
      std::memcpy(payload.data(), vol.data.data(), payload.size());
      break;
    }
  }

  std::vector<uint8_t> file(kVoxOffset, 0);
  std::memcpy(file.data(), &h, sizeof(h));
  file.insert(file.end(), payload.begin(), payload.end());
  if (path.extension() == ".gz") file = gzip_bytes(file);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write file: " + path.string());
  out.write(reinterpret_cast<const char*>(file.data()),
            static_cast<std::streamsize>(file.size()));
  if (!out) throw Error("short write: " + path.string());
}

std::filesystem::path sidecar_path(const std::filesystem::path& nifti_path,
                                   const std::string& tag) {
  std::filesystem::path p = nifti_path;
  if (p.extension() == ".gz") p.replace_extension();
  if (p.extension() == ".nii") p.replace_extension();
  p += "." + tag + ".json";
  return p;
}

LabelMap load_labelmap(const std::filesystem::path& path) {
  LabelMap lm;
  lm.vol = load_volume(path);
  for (double v : lm.vol.data) {
    if (v < 0.0 || v != std::floor(v)) {
      throw LabelError("volume is not integer-valued; not a label map");
    }
  }
  const std::filesystem::path side = sidecar_path(path, "labels");
  if (std::filesystem::exists(side)) {
    std::ifstream in(side);
    nlohmann::json j;
    in >> j;
    for (auto it = j.begin(); it != j.end(); ++it) {
      lm.labels[std::stoi(it.key())] = it.value().get<std::string>();
    }
  } else {
    for (int id : lm.distinct_ids()) lm.labels[id] = "label-" + std::to_string(id);
  }
  lm.validate();
  return lm;
}

void save_labelmap(const LabelMap& lm, const std::filesystem::path& path, Dtype dtype) {
  lm.validate();
  if (dtype == Dtype::f32 || dtype == Dtype::f64) {
    throw UnsupportedDtype("label maps must use an integer dtype");
  }
  save_volume(lm.vol, path, dtype);
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [id, name] : lm.labels) j[std::to_string(id)] = name;
  std::ofstream out(sidecar_path(path, "labels"));
  out << j.dump(2) << "\n";
}

}  // namespace hsx
