#include "xpcsvd/io.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <vector>

namespace xpcs::io {

namespace {

class ByteReader {
 public:
  ByteReader(const std::string& path, const char* what) : what_(what) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(std::string("cannot open ") + what + " file " + path);
    in.seekg(0, std::ios::end);
    bytes_.resize(static_cast<std::size_t>(in.tellg()));
    in.seekg(0);
    in.read(reinterpret_cast<char*>(bytes_.data()),
            static_cast<std::streamsize>(bytes_.size()));
    if (!in) throw Error(std::string("cannot read ") + what + " file " + path);
  }

  std::size_t offset() const { return pos_; }
  std::size_t size() const { return bytes_.size(); }

  void expect_magic(const char m[4]) {
    if (size() < 4 || std::memcmp(bytes_.data(), m, 4) != 0) {
      throw FormatError(std::string("bad magic, expected \"") + m + "\" for " +
                            what_,
                        0);
    }
    pos_ = 4;
  }

  void need(std::size_t n) {
    if (pos_ + n > bytes_.size()) {
      throw FormatError(std::string(what_) + " file truncated, need " +
                            std::to_string(n) + " more bytes",
                        bytes_.size());
    }
  }

  std::uint8_t u8() {
    need(1);
    return bytes_[pos_++];
  }

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | bytes_[pos_ + i];
    pos_ += 4;
    return v;
  }

  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | bytes_[pos_ + i];
    pos_ += 8;
    return v;
  }

  double f64() { return std::bit_cast<double>(u64()); }

  void expect_version(std::uint32_t want) {
    const std::size_t at = pos_;
    const std::uint32_t got = u32();
    if (got != want) {
      throw FormatError("unsupported " + std::string(what_) + " version " +
                            std::to_string(got),
                        at);
    }
  }

  void expect_exact_size(std::size_t expected) {
    if (bytes_.size() != expected) {
      throw FormatError(std::string(what_) + " file length " +
                            std::to_string(bytes_.size()) + ", expected " +
                            std::to_string(expected),
                        std::min(bytes_.size(), expected));
    }
  }

 private:
  const char* what_;
  std::vector<std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

class ByteWriter {
 public:
  ByteWriter(const std::string& path, const char* what)
      : out_(path, std::ios::binary | std::ios::trunc), path_(path), what_(what) {
    if (!out_) throw Error(std::string("cannot create ") + what + " file " + path);
  }

  void magic(const char m[4]) { out_.write(m, 4); }

  void u8(std::uint8_t v) { out_.put(static_cast<char>(v)); }

  void u32(std::uint32_t v) {
    char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<char>(v >> (8 * i));
    out_.write(b, 4);
  }

  void u64(std::uint64_t v) {
    char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>(v >> (8 * i));
    out_.write(b, 8);
  }

  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

  // Batched little-endian packing; one stream write per call.
  void f64_array(std::span<const double> values) {
    buf_.resize(values.size() * 8);
    for (std::size_t i = 0; i < values.size(); ++i) {
      std::uint64_t v = std::bit_cast<std::uint64_t>(values[i]);
      for (int b = 0; b < 8; ++b)
        buf_[i * 8 + b] = static_cast<char>(v >> (8 * b));
    }
    out_.write(buf_.data(), static_cast<std::streamsize>(buf_.size()));
  }

  void close() {
    out_.close();
    if (!out_) throw Error(std::string("failed writing ") + what_ + " file " + path_);
  }

 private:
  std::ofstream out_;
  std::string path_;
  const char* what_;
  std::vector<char> buf_;
};

void append_u64_le(std::vector<char>& buf, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>(v >> (8 * i)));
}

}  // namespace

void write_frames(const std::string& path, const FrameSeries& frames,
                  FrameDtype dtype) {
  const auto& x = frames.intensities;
  ByteWriter w(path, "frames");
  w.magic("XFSR");
  w.u32(1);
  w.u32(static_cast<std::uint32_t>(dtype));
  w.u64(frames.n_frames());
  w.u64(frames.n_pixels());
  w.f64(frames.frame_period);
  switch (dtype) {
    case FrameDtype::kU16:
      for (double v : x.data()) {
        if (v < 0.0 || v > 65535.0 || v != std::floor(v)) {
          throw ContractError(
              "frame value " + std::to_string(v) +
              " not representable as u16; use f32/f64 dtype instead");
        }
        const auto u = static_cast<std::uint16_t>(v);
        w.u8(static_cast<std::uint8_t>(u & 0xFF));
        w.u8(static_cast<std::uint8_t>(u >> 8));
      }
      break;
    case FrameDtype::kF32:
      for (double v : x.data()) {
        const float f = static_cast<float>(v);
        w.u32(std::bit_cast<std::uint32_t>(f));
      }
      break;
    case FrameDtype::kF64:
      for (std::size_t i = 0; i < x.rows(); ++i) w.f64_array(x.row(i));
      break;
    default:
      throw ContractError("unknown frame dtype");
  }
  w.close();
}

FrameSeries read_frames(const std::string& path) {
  ByteReader r(path, "frames");
  r.expect_magic("XFSR");
  r.expect_version(1);
  const std::size_t dtype_at = r.offset();
  const std::uint32_t dtype = r.u32();
  if (dtype > 2) {
    throw FormatError("unknown frames dtype " + std::to_string(dtype), dtype_at);
  }
  const std::size_t dims_at = r.offset();
  const std::uint64_t n = r.u64();
  const std::uint64_t m = r.u64();
  if (n < 1 || m < 1 || m > (1ULL << 40) / n) {
    throw FormatError("implausible frame dimensions " + std::to_string(n) +
                          "x" + std::to_string(m),
                      dims_at);
  }
  const double period = r.f64();
  if (!(period > 0.0) || !std::isfinite(period)) {
    throw FormatError("frame period must be positive", dims_at + 16);
  }
  const std::size_t elem = dtype == 0 ? 2 : dtype == 1 ? 4 : 8;
  r.expect_exact_size(36 + n * m * elem);
  const std::size_t payload_at = r.offset();
  std::vector<double> data(n * m);
  for (std::size_t i = 0; i < data.size(); ++i) {
    switch (dtype) {
      case 0: {
        const std::uint8_t lo = r.u8();
        const std::uint8_t hi = r.u8();
        data[i] = static_cast<double>(lo | (std::uint32_t(hi) << 8));
        break;
      }
      case 1: {
        data[i] = static_cast<double>(std::bit_cast<float>(r.u32()));
        break;
      }
      default:
        data[i] = r.f64();
    }
  }
  try {
    return FrameSeries(Matrix(n, m, std::move(data)), period);
  } catch (const Error& e) {
    throw FormatError(std::string("invalid frame payload: ") + e.what(),
                      payload_at);
  }
}

void write_mask(const std::string& path, const PixelMask& mask) {
  ByteWriter w(path, "mask");
  w.magic("XMSK");
  w.u32(1);
  w.u64(mask.full_pixels);
  w.u64(mask.count());
  for (std::size_t idx : mask.indices) w.u64(idx);
  w.close();
}

PixelMask read_mask(const std::string& path) {
  ByteReader r(path, "mask");
  r.expect_magic("XMSK");
  r.expect_version(1);
  const std::uint64_t full = r.u64();
  const std::size_t count_at = r.offset();
  const std::uint64_t count = r.u64();
  if (count > (1ULL << 40)) {
    throw FormatError("implausible mask count " + std::to_string(count),
                      count_at);
  }
  r.expect_exact_size(24 + 8 * count);
  std::vector<std::size_t> indices(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t at = r.offset();
    indices[i] = r.u64();
    if (indices[i] >= full || (i > 0 && indices[i] <= indices[i - 1])) {
      throw FormatError("mask indices not strictly ascending / in range", at);
    }
  }
  try {
    return PixelMask(full, std::move(indices));
  } catch (const Error& e) {
    throw FormatError(std::string("invalid mask: ") + e.what(), 24);
  }
}

void write_encoder(const std::string& path, const EncodingMatrix& enc) {
  ByteWriter w(path, "encoder");
  w.magic("XENC");
  w.u32(1);
  w.u8(static_cast<std::uint8_t>(enc.mode()));
  w.u64(enc.n_pixels());
  w.u64(enc.k());
  w.u64(enc.spectrum().size());
  w.f64_array(enc.spectrum());
  for (std::size_t i = 0; i < enc.v().rows(); ++i) w.f64_array(enc.v().row(i));
  w.close();
}

EncodingMatrix read_encoder(const std::string& path) {
  ByteReader r(path, "encoder");
  r.expect_magic("XENC");
  r.expect_version(1);
  const std::size_t mode_at = r.offset();
  const std::uint8_t mode = r.u8();
  if (mode > 2) {
    throw FormatError("unknown encoder mode " + std::to_string(mode), mode_at);
  }
  const std::size_t dims_at = r.offset();
  const std::uint64_t m = r.u64();
  const std::uint64_t k = r.u64();
  const std::uint64_t spectrum_len = r.u64();
  if (m < 1 || k < 1 || k > m || spectrum_len < k ||
      spectrum_len > (1ULL << 40) || m > (1ULL << 40) / k) {
    throw FormatError("implausible encoder dimensions", dims_at);
  }
  r.expect_exact_size(33 + 8 * spectrum_len + 8 * m * k);
  std::vector<double> spectrum(spectrum_len);
  for (auto& s : spectrum) s = r.f64();
  const std::size_t payload_at = r.offset();
  std::vector<double> data(m * k);
  for (auto& v : data) v = r.f64();
  try {
    return EncodingMatrix(Matrix(m, k, std::move(data)), std::move(spectrum),
                          static_cast<EncoderMode>(mode));
  } catch (const Error& e) {
    // Covers orthonormality loss beyond tolerance and spectrum disorder.
    throw FormatError(std::string("encoder integrity: ") + e.what(),
                      payload_at);
  }
}

void write_compressed(const std::string& path, const CompressedSeries& series) {
  const auto snap = series.snapshot();
  ByteWriter w(path, "compressed store");
  w.magic("XCMP");
  w.u32(1);
  w.u64(snap.k);
  w.u64(snap.encoder_id);
  w.u64(snap.n_frames());
  for (std::size_t i = 0; i < snap.n_frames(); ++i) {
    w.f64(snap.norms[i]);
    w.f64_array({snap.coefficients.data() + i * snap.k, snap.k});
  }
  w.close();
}

CompressedSeries read_compressed(const std::string& path) {
  ByteReader r(path, "compressed store");
  r.expect_magic("XCMP");
  r.expect_version(1);
  const std::size_t dims_at = r.offset();
  const std::uint64_t k = r.u64();
  const std::uint64_t hash = r.u64();
  const std::uint64_t n = r.u64();
  if (k < 1 || k > (1ULL << 30) || n > (1ULL << 40) / (k + 1)) {
    throw FormatError("implausible store dimensions", dims_at);
  }
  r.expect_exact_size(32 + n * 8 * (k + 1));
  const std::size_t payload_at = r.offset();
  std::vector<double> norms(n);
  std::vector<double> coeffs(n * k);
  for (std::size_t i = 0; i < n; ++i) {
    norms[i] = r.f64();
    for (std::size_t j = 0; j < k; ++j) coeffs[i * k + j] = r.f64();
  }
  try {
    return CompressedSeries(k, hash, std::move(coeffs), std::move(norms));
  } catch (const Error& e) {
    throw FormatError(std::string("invalid store payload: ") + e.what(),
                      payload_at);
  }
}

namespace {

constexpr std::size_t kStoreHeaderSize = 32;
constexpr std::size_t kStoreFrameCountOffset = 24;

}  // namespace

CompressedFileAppender::CompressedFileAppender(const std::string& path,
                                               std::size_t k,
                                               std::uint64_t encoder_hash)
    : k_(k), n_(0) {
  if (k_ < 1) throw ContractError("appender needs k >= 1");
  if (std::filesystem::exists(path) && std::filesystem::file_size(path) > 0) {
    // Validate the existing header, then continue where it left off.
    CompressedSeries existing = read_compressed(path);
    if (existing.k() != k_) {
      throw ShapeError("existing store has k = " + std::to_string(existing.k()) +
                       ", appender configured with k = " + std::to_string(k_));
    }
    if (existing.encoder_id() != encoder_hash) {
      throw BindingError("existing store was written with a different encoder");
    }
    n_ = existing.n_frames();
    file_.open(path, std::ios::binary | std::ios::in | std::ios::out);
    if (!file_) throw Error("cannot reopen store file " + path);
    file_.seekp(0, std::ios::end);
  } else {
    file_.open(path, std::ios::binary | std::ios::out | std::ios::trunc);
    file_.close();
    file_.open(path, std::ios::binary | std::ios::in | std::ios::out);
    if (!file_) throw Error("cannot create store file " + path);
    std::vector<char> header;
    header.insert(header.end(), {'X', 'C', 'M', 'P'});
    header.push_back(1);
    header.push_back(0);
    header.push_back(0);
    header.push_back(0);
    append_u64_le(header, k_);
    append_u64_le(header, encoder_hash);
    append_u64_le(header, 0);
    file_.write(header.data(), static_cast<std::streamsize>(header.size()));
  }
  open_ = true;
}

CompressedFileAppender::~CompressedFileAppender() {
  try {
    close();
  } catch (...) {
    // Destructor stays silent; call close() directly to observe errors.
  }
}

void CompressedFileAppender::append(std::span<const double> coefficients,
                                    double norm) {
  if (!open_) throw Error("appender already closed");
  if (coefficients.size() != k_) {
    throw ShapeError("appender: row has " +
                     std::to_string(coefficients.size()) +
                     " coefficients, store holds k = " + std::to_string(k_));
  }
  std::vector<char> rec;
  rec.reserve(8 * (k_ + 1));
  append_u64_le(rec, std::bit_cast<std::uint64_t>(norm));
  for (double c : coefficients)
    append_u64_le(rec, std::bit_cast<std::uint64_t>(c));
  file_.write(rec.data(), static_cast<std::streamsize>(rec.size()));
  if (!file_) throw Error("store append failed");
  ++n_;
}

void CompressedFileAppender::close() {
  if (!open_) return;
  open_ = false;
  file_.seekp(kStoreFrameCountOffset);
  std::vector<char> buf;
  append_u64_le(buf, n_);
  file_.write(buf.data(), 8);
  file_.close();
  if (!file_) throw Error("store close failed");
}

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void export_g2_csv(const std::string& path, const G2Curve& curve) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot create g2 csv " + path);
  out << "lag_seconds,g2,count\n";
  for (std::size_t d = 0; d < curve.lags.size(); ++d) {
    out << fmt17(curve.lags[d]) << ',' << fmt17(curve.values[d]) << ','
        << curve.counts[d] << '\n';
  }
  out.close();
  if (!out) throw Error("failed writing g2 csv " + path);
}

void export_ttc_csv(const std::string& path, const TTCMatrix& ttc) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot create ttc csv " + path);
  const auto& g = ttc.values();
  for (std::size_t i = 0; i < g.rows(); ++i) {
    for (std::size_t j = 0; j < g.cols(); ++j) {
      if (j) out << ',';
      out << fmt17(g(i, j));
    }
    out << '\n';
  }
  out.close();
  if (!out) throw Error("failed writing ttc csv " + path);
}

GrayImage read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open pgm file " + path);
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
  std::size_t pos = 0;
  const auto peek = [&]() -> int {
    return pos < bytes.size() ? static_cast<unsigned char>(bytes[pos]) : -1;
  };
  const auto skip_space_and_comments = [&]() {
    while (pos < bytes.size()) {
      const char c = bytes[pos];
      if (c == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        ++pos;
      } else {
        break;
      }
    }
  };
  const auto read_int = [&]() -> std::uint64_t {
    skip_space_and_comments();
    const std::size_t start = pos;
    std::uint64_t v = 0;
    while (pos < bytes.size() && bytes[pos] >= '0' && bytes[pos] <= '9') {
      v = v * 10 + static_cast<std::uint64_t>(bytes[pos] - '0');
      ++pos;
    }
    if (pos == start) throw FormatError("pgm: expected integer", start);
    return v;
  };

  if (bytes.size() < 2 || bytes[0] != 'P') {
    throw FormatError("pgm: bad magic", 0);
  }
  if (bytes[1] == '2') {
    throw FormatError("pgm: ASCII P2 not supported, need binary P5", 0);
  }
  if (bytes[1] != '5') throw FormatError("pgm: bad magic", 0);
  pos = 2;
  const std::uint64_t width = read_int();
  const std::uint64_t height = read_int();
  const std::size_t maxval_at = pos;
  const std::uint64_t maxval = read_int();
  if (width < 1 || height < 1) {
    throw FormatError("pgm: zero dimensions", 2);
  }
  if (maxval < 1 || maxval > 65535) {
    throw FormatError("pgm: maxval " + std::to_string(maxval) +
                          " outside [1, 65535]",
                      maxval_at);
  }
  if (peek() == -1) throw FormatError("pgm: truncated header", pos);
  ++pos;  // single whitespace after maxval

  const std::size_t bytes_per = maxval > 255 ? 2 : 1;
  const std::size_t need = width * height * bytes_per;
  if (bytes.size() - pos != need) {
    throw FormatError("pgm: payload is " + std::to_string(bytes.size() - pos) +
                          " bytes, expected " + std::to_string(need),
                      pos);
  }
  GrayImage img;
  img.width = width;
  img.height = height;
  img.pixels.resize(width * height);
  for (std::size_t i = 0; i < img.pixels.size(); ++i) {
    if (bytes_per == 1) {
      img.pixels[i] = static_cast<unsigned char>(bytes[pos + i]);
    } else {
      const auto hi = static_cast<unsigned char>(bytes[pos + 2 * i]);
      const auto lo = static_cast<unsigned char>(bytes[pos + 2 * i + 1]);
      img.pixels[i] = static_cast<double>((std::uint32_t(hi) << 8) | lo);
    }
  }
  return img;
}

}  // namespace xpcs::io
