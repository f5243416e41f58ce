#ifndef XPCSVD_IO_HPP_
#define XPCSVD_IO_HPP_

#include <cstdint>
#include <fstream>
#include <string>

#include "xpcsvd/model.hpp"

namespace xpcs::io {

// All on-disk formats are little-endian with a 4-byte magic and a u32
// version. Readers return FormatError with the byte offset of the first
// inconsistency; they never crash on truncated input.
//
//   frames  "XFSR"  u32 version, u32 dtype (0 u16, 1 f32, 2 f64),
//           u64 N, u64 M, f64 frame_period, then N*M values row-major.
//           size = 36 + N*M*sizeof(dtype)
//   mask    "XMSK"  u32 version, u64 full_pixels, u64 count,
//           count ascending u64 indices.      size = 24 + 8*count
//   encoder "XENC"  u32 version, u8 mode, u64 M, u64 K, u64 spectrum_len,
//           spectrum f64, then M*K f64 row-major.
//           size = 33 + 8*spectrum_len + 8*M*K
//   store   "XCMP"  u32 version, u64 K, u64 encoder hash, u64 N, then N
//           records of (f64 norm + K f64 coefficients).
//           size = 32 + N*8*(K+1)

enum class FrameDtype : std::uint32_t { kU16 = 0, kF32 = 1, kF64 = 2 };

void write_frames(const std::string& path, const FrameSeries& frames,
                  FrameDtype dtype = FrameDtype::kF64);
FrameSeries read_frames(const std::string& path);

void write_mask(const std::string& path, const PixelMask& mask);
PixelMask read_mask(const std::string& path);

void write_encoder(const std::string& path, const EncodingMatrix& enc);
EncodingMatrix read_encoder(const std::string& path);

void write_compressed(const std::string& path, const CompressedSeries& series);
CompressedSeries read_compressed(const std::string& path);

// Streaming writer for the store format: creates the file or extends an
// existing one, and rewrites the N header field on close.
class CompressedFileAppender {
 public:
  CompressedFileAppender(const std::string& path, std::size_t k,
                         std::uint64_t encoder_hash);
  ~CompressedFileAppender();

  CompressedFileAppender(const CompressedFileAppender&) = delete;
  CompressedFileAppender& operator=(const CompressedFileAppender&) = delete;

  void append(std::span<const double> coefficients, double norm);
  void close();

  std::size_t n_frames() const { return n_; }

 private:
  std::fstream file_;
  std::size_t k_;
  std::size_t n_;
  bool open_ = false;
};

// CSV exports. g2 gets a `lag_seconds,g2,count` header; the TTC is N rows
// of N comma-separated values. 17 significant digits so doubles survive
// the text round trip.
void export_g2_csv(const std::string& path, const G2Curve& curve);
void export_ttc_csv(const std::string& path, const TTCMatrix& ttc);

// Binary PGM (P5) reader, maxval up to 65535 (two-byte samples are
// big-endian per the format). ASCII P2 files are rejected.
GrayImage read_pgm(const std::string& path);

}  // namespace xpcs::io

#endif  // XPCSVD_IO_HPP_
