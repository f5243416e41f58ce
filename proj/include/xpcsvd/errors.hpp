#ifndef XPCSVD_ERRORS_HPP_
#define XPCSVD_ERRORS_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace xpcs {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Dimension mismatch between operands (matmul, append, extend, ...).
class ShapeError : public Error {
 public:
  using Error::Error;
};

// A precondition on an argument was violated (bad tolerance, empty window,
// non-symmetric input, ...).
class ContractError : public Error {
 public:
  using Error::Error;
};

// Pixel mask inconsistent with the frames it is applied to.
class MaskError : public Error {
 public:
  using Error::Error;
};

// A frame (row) had zero norm and cannot be normalized.
class NormalizationError : public Error {
 public:
  NormalizationError(const std::string& msg, std::size_t frame_index)
      : Error(msg), frame_index_(frame_index) {}
  std::size_t frame_index() const { return frame_index_; }

 private:
  std::size_t frame_index_;
};

// Requested more components than the data supports.
class RankError : public Error {
 public:
  RankError(const std::string& msg, std::size_t achievable_rank)
      : Error(msg), achievable_rank_(achievable_rank) {}
  std::size_t achievable_rank() const { return achievable_rank_; }

 private:
  std::size_t achievable_rank_;
};

// Compressed data paired with an encoder it was not produced by.
class BindingError : public Error {
 public:
  using Error::Error;
};

// Malformed or truncated file. `offset` is the byte position of the
// first inconsistency.
class FormatError : public Error {
 public:
  FormatError(const std::string& msg, std::size_t offset)
      : Error(msg + " (at byte offset " + std::to_string(offset) + ")"),
        offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

}  // namespace xpcs

#endif  // XPCSVD_ERRORS_HPP_
