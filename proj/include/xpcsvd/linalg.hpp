#ifndef XPCSVD_LINALG_HPP_
#define XPCSVD_LINALG_HPP_

#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "xpcsvd/errors.hpp"

namespace xpcs {

// Dense row-major matrix of 64-bit floats. Entries are validated finite on
// construction; rows and cols are always >= 1.
class Matrix {
 public:
  Matrix(std::size_t rows, std::size_t cols);  // zero-filled
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }
  double& operator()(std::size_t i, std::size_t j) {
    return data_[i * cols_ + j];
  }

  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }
  std::span<double> row(std::size_t i) {
    return {data_.data() + i * cols_, cols_};
  }
  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }

  Matrix transposed() const;

  // Re-checks the finiteness invariant after in-place mutation.
  void check_finite() const;

  friend bool operator==(const Matrix& a, const Matrix& b) = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> data_;
};

// Thin SVD x = U diag(sigma) V^T restricted to the numerical rank r.
struct SvdResult {
  Matrix left_vectors;                 // N x r
  std::vector<double> singular_values; // length r, descending, all > 0
  Matrix right_vectors;                // M x r, orthonormal columns
};

// Fixed-order dot product. Four independent accumulators combined as
// ((a0 + a1) + (a2 + a3)) + tail; the order depends only on the length, so
// results are bit-reproducible regardless of caller-side parallelism.
double dot(std::span<const double> a, std::span<const double> b);

// Standard product a * b. Deterministic for fixed inputs across thread
// counts (each output entry is one fixed-order dot).
Matrix matmul(const Matrix& a, const Matrix& b);

// x * x^T. The upper triangle is computed and mirrored, so the result is
// bitwise symmetric.
Matrix gram(const Matrix& x);

// x^T * x in a single streaming pass over x. Used to check column
// orthonormality without materializing a transpose.
Matrix gram_of_columns(const Matrix& x);

// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
// Eigenvalues descending; eigenvectors are the columns of the returned
// matrix, orthonormal to near machine precision. Off-diagonal entries are
// driven below a threshold relative to the local diagonal scale, which
// keeps small eigenpairs accurate for graded spectra.
struct EigResult {
  std::vector<double> eigenvalues;
  Matrix eigenvectors;
};
EigResult sym_eig(const Matrix& s);

// Thin SVD via the N x N Gram matrix eigendecomposition (never forms an
// M x M matrix). Components with sigma <= rel_tol * sigma_max are dropped;
// the count of survivors is the numerical rank. Each singular pair is
// sign-fixed so the largest-magnitude entry of the right vector is
// positive.
SvdResult gram_svd(const Matrix& x, double rel_tol = 1e-12);

// Divides each row by its Euclidean norm; returns the norms alongside.
// A zero row raises NormalizationError naming the row.
std::pair<Matrix, std::vector<double>> row_normalize(const Matrix& x);

// Number of worker threads the kernels may use: XPCS_THREADS when set to a
// positive value, otherwise the hardware concurrency.
unsigned thread_budget();

// Runs fn(begin, end) over disjoint chunks of [0, n), possibly on several
// threads. Chunk boundaries never affect results for entry-wise work.
void parallel_for(std::size_t n, std::size_t grain,
                  const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace xpcs

#endif  // XPCSVD_LINALG_HPP_
