#include "eigenbench/model_io.hpp"

#include <zlib.h>

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>
#include <string>

#include "eigenbench/error.hpp"

namespace eigenbench {

namespace {

constexpr char kMagic[4] = {'E', 'F', 'M', '1'};

std::uint32_t crc32_of(std::span<const std::uint8_t> bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed in chunks for very large models.
  constexpr std::size_t kChunk = 1u << 30;
  for (std::size_t off = 0; off < bytes.size(); off += kChunk) {
    const std::size_t n = std::min(kChunk, bytes.size() - off);
    crc = crc32(crc, bytes.data() + off, static_cast<uInt>(n));
  }
  return static_cast<std::uint32_t>(crc);
}

class Writer {
 public:
  void raw(const void* data, std::size_t n) {
    const auto* p = static_cast<const std::uint8_t*>(data);
    out_.insert(out_.end(), p, p + n);
  }
  template <typename T>
  void uint(T value) {
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      out_.push_back(static_cast<std::uint8_t>(value >> (8 * i)));
    }
  }
  void real(double v) { uint(std::bit_cast<std::uint64_t>(v)); }
  void reals(std::span<const double> vs) {
    for (double v : vs) real(v);
  }
  std::vector<std::uint8_t> take() { return std::move(out_); }
  std::span<const std::uint8_t> bytes() const { return out_; }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::span<const std::uint8_t> take(std::size_t n) {
    if (n > bytes_.size() - pos_) {
      std::ostringstream msg;
      msg << "model file truncated at byte " << pos_ << " (needed " << n << " more)";
      throw Error(ErrorKind::format, msg.str());
    }
    auto s = bytes_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  template <typename T>
  T uint() {
    const auto s = take(sizeof(T));
    T value = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) value |= static_cast<T>(s[i]) << (8 * i);
    return value;
  }
  double real() { return std::bit_cast<double>(uint<std::uint64_t>()); }
  Vector reals(std::size_t n) {
    check_remaining(n, 8);
    Vector v(n);
    for (double& x : v) x = real();
    return v;
  }
  // Throws when `count` items of `width` bytes exceed the unread input.
  void check_remaining(std::size_t count, std::size_t width) const {
    if (width != 0 && count > (bytes_.size() - pos_) / width) {
      throw Error(ErrorKind::format, "model file truncated (declared sizes exceed file length)");
    }
  }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> encode_model(const EigenModel& model) {
  const std::size_t d = model.dimension();
  const std::size_t m = model.training_count();
  const std::size_t kept = model.kept_count();
  if (model.eigenfaces.rows() != d && kept != 0) {
    throw Error(ErrorKind::invalid_input, "encode_model: eigenface length differs from mean length");
  }
  if (model.classes.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw Error(ErrorKind::invalid_input, "encode_model: too many classes");
  }

  Writer w;
  w.raw(kMagic, sizeof kMagic);
  w.uint<std::uint64_t>(d);
  w.uint<std::uint64_t>(m);
  w.uint<std::uint64_t>(kept);
  w.uint<std::uint32_t>(model.dims.width);
  w.uint<std::uint32_t>(model.dims.height);
  w.reals(model.mean_face);
  w.reals(model.eigenvalues);
  w.reals(model.eigenfaces.data());
  w.uint<std::uint32_t>(static_cast<std::uint32_t>(model.classes.size()));
  for (const auto& c : model.classes) {
    if (c.projection.size() != kept) {
      throw Error(ErrorKind::invalid_input,
                  "encode_model: class " + c.subject_id + " projection length differs from m'");
    }
    w.uint<std::uint32_t>(static_cast<std::uint32_t>(c.subject_id.size()));
    w.raw(c.subject_id.data(), c.subject_id.size());
    w.uint<std::uint32_t>(static_cast<std::uint32_t>(c.image_count));
    w.reals(c.projection);
  }
  w.uint<std::uint32_t>(crc32_of(w.bytes()));
  return w.take();
}

EigenModel decode_model(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4) throw Error(ErrorKind::format, "model file too short for magic bytes");
  if (std::memcmp(bytes.data(), kMagic, 3) != 0) {
    throw Error(ErrorKind::format, "bad magic bytes: not an eigenfaces model file");
  }
  if (bytes[3] != static_cast<std::uint8_t>(kMagic[3])) {
    std::string tag(reinterpret_cast<const char*>(bytes.data()), 4);
    throw Error(ErrorKind::unsupported_version,
                "unsupported model version tag '" + tag + "' (this build reads EFM1)");
  }
  if (bytes.size() < 8) throw Error(ErrorKind::format, "model file truncated before checksum");

  const auto body = bytes.first(bytes.size() - 4);
  Reader tail(bytes.last(4));
  const auto stored_crc = tail.uint<std::uint32_t>();

  Reader r(body);
  r.take(4);
  const auto d = r.uint<std::uint64_t>();
  const auto m = r.uint<std::uint64_t>();
  const auto kept = r.uint<std::uint64_t>();
  EigenModel model;
  model.dims.width = r.uint<std::uint32_t>();
  model.dims.height = r.uint<std::uint32_t>();

  if (d == 0 || model.dims.pixel_count() != d) {
    throw Error(ErrorKind::format, "model header: D does not equal width * height");
  }
  if (kept > m) throw Error(ErrorKind::format, "model header: m' exceeds M");
  r.check_remaining(d, 8);
  model.mean_face = r.reals(d);
  model.eigenvalues = r.reals(m);
  r.check_remaining(kept, 8 * d);
  model.eigenfaces = Matrix(d, kept);
  {
    Vector flat = r.reals(d * kept);
    std::copy(flat.begin(), flat.end(), model.eigenfaces.data().begin());
  }
  const auto class_count = r.uint<std::uint32_t>();
  r.check_remaining(class_count, 8);
  model.classes.reserve(class_count);
  for (std::uint32_t c = 0; c < class_count; ++c) {
    ClassProjection cls;
    const auto id_len = r.uint<std::uint32_t>();
    const auto id = r.take(id_len);
    cls.subject_id.assign(id.begin(), id.end());
    cls.image_count = r.uint<std::uint32_t>();
    cls.projection = r.reals(kept);
    model.classes.push_back(std::move(cls));
  }
  if (r.remaining() != 0) {
    throw Error(ErrorKind::format, "unexpected trailing bytes in model file");
  }
  if (crc32_of(body) != stored_crc) {
    throw Error(ErrorKind::checksum, "model checksum mismatch");
  }
  model.selection = SelectionRule::top_k(static_cast<std::size_t>(kept));
  return model;
}

void save_model(const EigenModel& model, const std::filesystem::path& path) {
  const auto bytes = encode_model(model);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::io, "cannot write model " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::io, "short write to " + path.string());
}

EigenModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open model " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>());
  try {
    return decode_model(bytes);
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

}  // namespace eigenbench
