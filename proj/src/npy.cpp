#include "hausloss/npy.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

namespace hausloss::npy {
namespace {

static_assert(std::endian::native == std::endian::little, "NPY I/O assumes a little-endian host");

constexpr char kMagic[] = "\x93NUMPY";
constexpr std::size_t kMagicLen = 6;

std::size_t item_size(Dtype d) {
  switch (d) {
    case Dtype::Bool:
    case Dtype::U8: return 1;
    case Dtype::I32:
    case Dtype::F4: return 4;
    case Dtype::I64:
    case Dtype::F8: return 8;
  }
  return 0;
}

Dtype parse_descr(std::string_view d) {
  if (d == "|b1") return Dtype::Bool;
  if (d == "|u1" || d == "<u1") return Dtype::U8;
  if (d == "<i4") return Dtype::I32;
  if (d == "<i8") return Dtype::I64;
  if (d == "<f4") return Dtype::F4;
  if (d == "<f8") return Dtype::F8;
  throw Error(ErrorCode::Io, "unsupported NPY dtype '" + std::string(d) + "'");
}

template <typename T>
double load(const char* p) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  return static_cast<double>(v);
}

template <typename T>
void store(std::string& out, double v) {
  const T t = static_cast<T>(v);
  char buf[sizeof(T)];
  std::memcpy(buf, &t, sizeof(T));
  out.append(buf, sizeof(T));
}

// Value that follows 'key': in the header dict, trimmed of quotes.
std::string dict_value(const std::string& header, const std::string& key) {
  const auto k = header.find("'" + key + "'");
  if (k == std::string::npos) throw Error(ErrorCode::Io, "NPY header lacks '" + key + "'");
  auto pos = header.find(':', k);
  if (pos == std::string::npos) throw Error(ErrorCode::Io, "malformed NPY header");
  ++pos;
  while (pos < header.size() && header[pos] == ' ') ++pos;
  if (pos < header.size() && header[pos] == '(') {
    const auto end = header.find(')', pos);
    if (end == std::string::npos) throw Error(ErrorCode::Io, "malformed NPY shape");
    return header.substr(pos, end - pos + 1);
  }
  if (pos < header.size() && header[pos] == '\'') {
    const auto end = header.find('\'', pos + 1);
    if (end == std::string::npos) throw Error(ErrorCode::Io, "malformed NPY header string");
    return header.substr(pos + 1, end - pos - 1);
  }
  const auto end = header.find_first_of(",}", pos);
  return header.substr(pos, end - pos);
}

}  // namespace

std::string_view descr(Dtype dtype) {
  switch (dtype) {
    case Dtype::Bool: return "|b1";
    case Dtype::U8: return "|u1";
    case Dtype::I32: return "<i4";
    case Dtype::I64: return "<i8";
    case Dtype::F4: return "<f4";
    case Dtype::F8: return "<f8";
  }
  return "";
}

std::string encode(const std::vector<Index>& shape, Dtype dtype, std::span<const double> values) {
  Index count = 1;
  for (Index e : shape) count *= e;
  require(count == static_cast<Index>(values.size()), ErrorCode::InvalidArgument,
          "NPY shape does not match the number of values");

  std::ostringstream dict;
  dict << "{'descr': '" << descr(dtype) << "', 'fortran_order': False, 'shape': (";
  for (std::size_t i = 0; i < shape.size(); ++i) dict << shape[i] << (shape.size() == 1 || i + 1 < shape.size() ? ", " : "");
  dict << "), }";
  std::string header = dict.str();
  // magic + version + length field + header + '\n' padded to 64 bytes
  const std::size_t fixed = kMagicLen + 2 + 2;
  const std::size_t total = fixed + header.size() + 1;
  header.append((64 - total % 64) % 64, ' ');
  header.push_back('\n');
  require(header.size() <= 0xffff, ErrorCode::Io, "NPY header too long for format 1.0");

  std::string out(kMagic, kMagicLen);
  out.push_back('\x01');
  out.push_back('\x00');
  const auto len = static_cast<std::uint16_t>(header.size());
  out.push_back(static_cast<char>(len & 0xff));
  out.push_back(static_cast<char>(len >> 8));
  out += header;
  out.reserve(out.size() + values.size() * item_size(dtype));
  for (double v : values) {
    switch (dtype) {
      case Dtype::Bool:
      case Dtype::U8: store<std::uint8_t>(out, v); break;
      case Dtype::I32: store<std::int32_t>(out, v); break;
      case Dtype::I64: store<std::int64_t>(out, v); break;
      case Dtype::F4: store<float>(out, v); break;
      case Dtype::F8: store<double>(out, v); break;
    }
  }
  return out;
}

Array decode(std::string_view bytes) {
  require(bytes.size() >= 10 && bytes.substr(0, kMagicLen) == std::string_view(kMagic, kMagicLen), ErrorCode::Io,
          "not an NPY file");
  const auto major = static_cast<unsigned char>(bytes[6]);
  std::size_t header_len = 0;
  std::size_t offset = 0;
  if (major == 1) {
    header_len = static_cast<unsigned char>(bytes[8]) | (static_cast<std::size_t>(static_cast<unsigned char>(bytes[9])) << 8);
    offset = 10;
  } else if (major == 2 || major == 3) {
    require(bytes.size() >= 12, ErrorCode::Io, "truncated NPY header");
    for (int i = 0; i < 4; ++i) header_len |= static_cast<std::size_t>(static_cast<unsigned char>(bytes[8 + i])) << (8 * i);
    offset = 12;
  } else {
    throw Error(ErrorCode::Io, "unsupported NPY version " + std::to_string(major));
  }
  require(bytes.size() >= offset + header_len, ErrorCode::Io, "truncated NPY header");
  const std::string header(bytes.substr(offset, header_len));

  Array out;
  out.dtype = parse_descr(dict_value(header, "descr"));
  require(dict_value(header, "fortran_order").find("False") != std::string::npos, ErrorCode::Io,
          "Fortran-ordered NPY arrays are not supported");
  const std::string shape = dict_value(header, "shape");
  Index count = 1;
  std::string token;
  for (char c : shape.substr(1)) {
    if (c >= '0' && c <= '9') {
      token.push_back(c);
    } else if (!token.empty()) {
      out.shape.push_back(std::stoll(token));
      count *= out.shape.back();
      token.clear();
    }
  }

  const std::size_t size = item_size(out.dtype);
  const std::size_t data_offset = offset + header_len;
  require(bytes.size() == data_offset + static_cast<std::size_t>(count) * size, ErrorCode::Io,
          "NPY payload length does not match its shape");
  out.values.resize(static_cast<std::size_t>(count));
  const char* p = bytes.data() + data_offset;
  for (std::size_t i = 0; i < out.values.size(); ++i, p += size) {
    switch (out.dtype) {
      case Dtype::Bool:
      case Dtype::U8: out.values[i] = load<std::uint8_t>(p); break;
      case Dtype::I32: out.values[i] = load<std::int32_t>(p); break;
      case Dtype::I64: out.values[i] = load<std::int64_t>(p); break;
      case Dtype::F4: out.values[i] = load<float>(p); break;
      case Dtype::F8: out.values[i] = load<double>(p); break;
    }
  }
  return out;
}

Array read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCode::Io, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return decode(buf.str());
}

void write(const std::filesystem::path& path, const std::vector<Index>& shape, Dtype dtype,
           std::span<const double> values) {
  const std::string bytes = encode(shape, dtype, values);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    require(out.good(), ErrorCode::Io, "cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    require(out.good(), ErrorCode::Io, "failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void write_mask(const std::filesystem::path& path, const BinaryMask& mask) {
  const Eigen::ArrayXd v = mask.values().cast<double>();
  write(path, mask.spec().shape(), Dtype::U8, std::span<const double>(v.data(), static_cast<std::size_t>(v.size())));
}

void write_field(const std::filesystem::path& path, const Grid<double>& field, Dtype dtype) {
  const auto& v = field.values();
  write(path, field.spec().shape(), dtype, std::span<const double>(v.data(), static_cast<std::size_t>(v.size())));
}

GridSpec spec_of(const Array& array, std::vector<double> spacing) {
  require(array.shape.size() == 2 || array.shape.size() == 3, ErrorCode::InvalidArgument,
          "arrays must be 2D or 3D");
  return GridSpec(array.shape, std::move(spacing));
}

}  // namespace hausloss::npy
