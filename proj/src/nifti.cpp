#include "lesionq/nifti.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "lesionq/errors.hpp"

namespace lesionq {
namespace {

constexpr std::size_t kHeaderSize = 348;
constexpr std::size_t kVoxOffset = 352;

// Byte offsets into the 348-byte header.
constexpr std::size_t kOffSizeofHdr = 0;
constexpr std::size_t kOffDim = 40;
constexpr std::size_t kOffDatatype = 70;
constexpr std::size_t kOffBitpix = 72;
constexpr std::size_t kOffPixdim = 76;
constexpr std::size_t kOffVoxOffset = 108;
constexpr std::size_t kOffSclSlope = 112;
constexpr std::size_t kOffSclInter = 116;
constexpr std::size_t kOffXyztUnits = 123;
constexpr std::size_t kOffMagic = 344;

constexpr short kDtU8 = 2;
constexpr short kDtI16 = 4;
constexpr short kDtF32 = 16;
constexpr short kDtU16 = 512;

template <typename T>
T byteswap_value(T v) {
  auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
  std::reverse(bytes.begin(), bytes.end());
  return std::bit_cast<T>(bytes);
}

class HeaderView {
 public:
  HeaderView(const unsigned char* bytes, bool swap) : bytes_(bytes), swap_(swap) {}

  template <typename T>
  T get(std::size_t offset) const {
    T v;
    std::memcpy(&v, bytes_ + offset, sizeof(T));
    return swap_ ? byteswap_value(v) : v;
  }

 private:
  const unsigned char* bytes_;
  bool swap_;
};

template <typename T>
void put(std::vector<unsigned char>& buf, std::size_t offset, T v) {
  std::memcpy(buf.data() + offset, &v, sizeof(T));
}

std::size_t bytes_per_voxel(short datatype) {
  switch (datatype) {
    case kDtU8:
      return 1;
    case kDtI16:
    case kDtU16:
      return 2;
    case kDtF32:
      return 4;
  }
  return 0;
}

DType dtype_from_code(short code) {
  switch (code) {
    case kDtU8:
      return DType::U8;
    case kDtI16:
      return DType::I16;
    case kDtU16:
      return DType::U16;
    default:
      return DType::F32;
  }
}

short code_from_dtype(DType dtype) {
  switch (dtype) {
    case DType::U8:
      return kDtU8;
    case DType::I16:
      return kDtI16;
    case DType::U16:
      return kDtU16;
    case DType::F32:
      return kDtF32;
  }
  return kDtF32;
}

template <typename T>
void decode_samples(const unsigned char* src, std::size_t n, bool swap, std::vector<float>& out) {
  out.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    T v;
    std::memcpy(&v, src + i * sizeof(T), sizeof(T));
    if (swap) v = byteswap_value(v);
    out[i] = static_cast<float>(v);
  }
}

template <typename T>
void encode_samples(const std::vector<float>& in, std::vector<unsigned char>& out) {
  const std::size_t base = out.size();
  out.resize(base + in.size() * sizeof(T));
  for (std::size_t i = 0; i < in.size(); ++i) {
    const T v = static_cast<T>(in[i]);
    std::memcpy(out.data() + base + i * sizeof(T), &v, sizeof(T));
  }
}

void check_representable(const Volume& volume) {
  double lo = 0.0;
  double hi = 0.0;
  switch (volume.dtype) {
    case DType::U8:
      lo = 0, hi = 255;
      break;
    case DType::I16:
      lo = -32768, hi = 32767;
      break;
    case DType::U16:
      lo = 0, hi = 65535;
      break;
    case DType::F32:
      return;
  }
  for (float v : volume.data) {
    if (v < lo || v > hi || std::floor(v) != v) {
      throw InvalidArgument("value " + std::to_string(v) + " not representable as " +
                            std::string(dtype_name(volume.dtype)));
    }
  }
}

}  // namespace

Volume read_nifti(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure("cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  if (bytes.size() >= 2 && bytes[0] == 0x1f && bytes[1] == 0x8b) {
    throw UnsupportedFormat(path.string() + ": gzip-compressed NIfTI is not supported");
  }
  if (bytes.size() < kHeaderSize) {
    throw TruncatedData(path.string() + ": file shorter than the 348-byte header");
  }

  std::int32_t sizeof_hdr;
  std::memcpy(&sizeof_hdr, bytes.data() + kOffSizeofHdr, 4);
  bool swap = false;
  if (sizeof_hdr != 348) {
    if (byteswap_value(sizeof_hdr) != 348) {
      throw UnsupportedFormat(path.string() + ": sizeof_hdr is not 348 in either byte order");
    }
    swap = true;
  }
  const HeaderView hdr(bytes.data(), swap);

  if (std::memcmp(bytes.data() + kOffMagic, "n+1\0", 4) != 0) {
    throw UnsupportedFormat(path.string() + ": magic is not \"n+1\" (only single-file NIfTI-1 is supported)");
  }
  const auto ndim = hdr.get<std::int16_t>(kOffDim);
  if (ndim != 3) {
    throw UnsupportedFormat(path.string() + ": dim[0] is " + std::to_string(ndim) + ", expected 3");
  }
  const auto datatype = hdr.get<std::int16_t>(kOffDatatype);
  const std::size_t bpv = bytes_per_voxel(datatype);
  if (bpv == 0) {
    throw UnsupportedFormat(path.string() + ": datatype " + std::to_string(datatype) + " outside {2, 4, 16, 512}");
  }

  Grid grid;
  for (int a = 0; a < 3; ++a) {
    const auto d = hdr.get<std::int16_t>(kOffDim + 2 * (a + 1));
    if (d <= 0) throw CorruptHeader(path.string() + ": nonpositive dim[" + std::to_string(a + 1) + "]");
    grid.dims[a] = d;
    const auto p = hdr.get<float>(kOffPixdim + 4 * (a + 1));
    if (!std::isfinite(p) || p <= 0.0f) {
      throw CorruptHeader(path.string() + ": pixdim[" + std::to_string(a + 1) + "] must be finite and > 0");
    }
    grid.spacing[a] = p;
  }

  const float vox_offset = hdr.get<float>(kOffVoxOffset);
  if (!(vox_offset >= static_cast<float>(kVoxOffset))) {
    throw CorruptHeader(path.string() + ": vox_offset " + std::to_string(vox_offset) + " < 352");
  }
  const auto offset = static_cast<std::size_t>(vox_offset);
  const std::size_t n = grid.voxel_count();
  if (bytes.size() < offset + n * bpv) {
    throw TruncatedData(path.string() + ": payload shorter than dims x datatype size");
  }

  Volume volume;
  volume.grid = grid;
  volume.dtype = dtype_from_code(datatype);
  const unsigned char* payload = bytes.data() + offset;
  switch (datatype) {
    case kDtU8:
      decode_samples<std::uint8_t>(payload, n, false, volume.data);
      break;
    case kDtI16:
      decode_samples<std::int16_t>(payload, n, swap, volume.data);
      break;
    case kDtU16:
      decode_samples<std::uint16_t>(payload, n, swap, volume.data);
      break;
    case kDtF32:
      decode_samples<float>(payload, n, swap, volume.data);
      break;
  }

  const float slope = hdr.get<float>(kOffSclSlope);
  const float inter = hdr.get<float>(kOffSclInter);
  if (slope != 0.0f && std::isfinite(slope) && std::isfinite(inter) && (slope != 1.0f || inter != 0.0f)) {
    for (float& v : volume.data) v = v * slope + inter;
    volume.dtype = DType::F32;
  }
  if (std::any_of(volume.data.begin(), volume.data.end(), [](float v) { return std::isnan(v); })) {
    throw CorruptHeader(path.string() + ": payload contains NaN");
  }
  return volume;
}

void write_nifti(const Volume& volume, const std::filesystem::path& path) {
  validate(volume);
  check_representable(volume);
  for (int a = 0; a < 3; ++a) {
    if (volume.grid.dims[a] > 32767) throw InvalidArgument("dimension exceeds NIfTI-1 limit of 32767");
  }

  std::vector<unsigned char> buf(kVoxOffset, 0);
  const short code = code_from_dtype(volume.dtype);
  put<std::int32_t>(buf, kOffSizeofHdr, 348);
  const std::int16_t dim[8] = {3,
                               static_cast<std::int16_t>(volume.grid.dims[0]),
                               static_cast<std::int16_t>(volume.grid.dims[1]),
                               static_cast<std::int16_t>(volume.grid.dims[2]),
                               1, 1, 1, 1};
  for (int i = 0; i < 8; ++i) put<std::int16_t>(buf, kOffDim + 2 * i, dim[i]);
  put<std::int16_t>(buf, kOffDatatype, code);
  put<std::int16_t>(buf, kOffBitpix, static_cast<std::int16_t>(8 * bytes_per_voxel(code)));
  const float pixdim[8] = {1.0f,
                           static_cast<float>(volume.grid.spacing[0]),
                           static_cast<float>(volume.grid.spacing[1]),
                           static_cast<float>(volume.grid.spacing[2]),
                           0.0f, 0.0f, 0.0f, 0.0f};
  for (int i = 0; i < 8; ++i) put<float>(buf, kOffPixdim + 4 * i, pixdim[i]);
  put<float>(buf, kOffVoxOffset, static_cast<float>(kVoxOffset));
  put<float>(buf, kOffSclSlope, 1.0f);
  put<float>(buf, kOffSclInter, 0.0f);
  buf[kOffXyztUnits] = 2;  // NIFTI_UNITS_MM
  std::memcpy(buf.data() + kOffMagic, "n+1\0", 4);

  switch (volume.dtype) {
    case DType::U8:
      encode_samples<std::uint8_t>(volume.data, buf);
      break;
    case DType::I16:
      encode_samples<std::int16_t>(volume.data, buf);
      break;
    case DType::U16:
      encode_samples<std::uint16_t>(volume.data, buf);
      break;
    case DType::F32:
      encode_samples<float>(volume.data, buf);
      break;
  }

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoFailure("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!out) throw IoFailure("write failed for " + path.string());
}

MaskVolume read_nifti_mask(const std::filesystem::path& path, double threshold) {
  return binarize(read_nifti(path), threshold);
}

void write_nifti_mask(const MaskVolume& mask, const std::filesystem::path& path) {
  validate(mask);
  write_nifti(to_volume(mask), path);
}

}  // namespace lesionq
