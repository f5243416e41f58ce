#include "xpcsvd/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <optional>
#include <string>
#include <thread>

namespace xpcs {

namespace {

void check_dims(std::size_t rows, std::size_t cols) {
  if (rows < 1 || cols < 1) {
    throw ContractError("matrix dimensions must be at least 1x1, got " +
                        std::to_string(rows) + "x" + std::to_string(cols));
  }
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {
  check_dims(rows, cols);
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  check_dims(rows, cols);
  if (data_.size() != rows_ * cols_) {
    throw ShapeError("matrix data length " + std::to_string(data_.size()) +
                     " does not match " + std::to_string(rows_) + "x" +
                     std::to_string(cols_));
  }
  check_finite();
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

void Matrix::check_finite() const {
  for (std::size_t i = 0; i < data_.size(); ++i) {
    if (!std::isfinite(data_[i])) {
      throw ContractError("non-finite matrix entry at flat index " +
                          std::to_string(i));
    }
  }
}

unsigned thread_budget() {
  if (const char* env = std::getenv("XPCS_THREADS")) {
    const long v = std::atol(env);
    if (v > 0) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

void parallel_for(std::size_t n, std::size_t grain,
                  const std::function<void(std::size_t, std::size_t)>& fn) {
  const unsigned budget = thread_budget();
  if (n == 0) return;
  if (budget <= 1 || n <= grain) {
    fn(0, n);
    return;
  }
  const std::size_t max_chunks = (n + grain - 1) / grain;
  const std::size_t workers = std::min<std::size_t>(budget, max_chunks);
  const std::size_t chunk = (n + workers - 1) / workers;
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    threads.emplace_back([&fn, begin, end] { fn(begin, end); });
  }
  for (auto& t : threads) t.join();
}

double dot(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    s0 += a[k] * b[k];
    s1 += a[k + 1] * b[k + 1];
    s2 += a[k + 2] * b[k + 2];
    s3 += a[k + 3] * b[k + 3];
  }
  double tail = 0.0;
  for (; k < n; ++k) tail += a[k] * b[k];
  return ((s0 + s1) + (s2 + s3)) + tail;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("matmul: " + std::to_string(a.rows()) + "x" +
                     std::to_string(a.cols()) + " times " +
                     std::to_string(b.rows()) + "x" +
                     std::to_string(b.cols()));
  }
  const Matrix bt = b.transposed();
  Matrix c(a.rows(), b.cols());
  const std::size_t inner = a.cols();
  const std::size_t grain = std::max<std::size_t>(1, (1u << 21) / (inner + 1));
  parallel_for(a.rows(), grain, [&](std::size_t r0, std::size_t r1) {
    for (std::size_t i = r0; i < r1; ++i)
      for (std::size_t j = 0; j < bt.rows(); ++j)
        c(i, j) = dot(a.row(i), bt.row(j));
  });
  return c;
}

Matrix gram(const Matrix& x) {
  const std::size_t n = x.rows();
  const std::size_t m = x.cols();
  Matrix g(n, n);
  // Two-level tiling: pixel stripes keep a block of left-hand row segments
  // cache-resident while each right-hand segment streams through once per
  // block. Entry (i,j) accumulates its stripes in ascending order, so the
  // tiling (and the thread split over row blocks) never changes results;
  // with a single stripe the sum collapses to one plain dot.
  constexpr std::size_t kStripe = 16384;
  constexpr std::size_t kBlock = 16;
  const std::size_t grain = std::max<std::size_t>(kBlock, (1u << 21) / m);
  parallel_for(n, grain, [&](std::size_t r0, std::size_t r1) {
    for (std::size_t ib = r0; ib < r1; ib += kBlock) {
      const std::size_t ie = std::min(ib + kBlock, r1);
      for (std::size_t s0 = 0; s0 < m; s0 += kStripe) {
        const std::size_t len = std::min(kStripe, m - s0);
        for (std::size_t j = ib; j < n; ++j) {
          const auto seg_j = x.row(j).subspan(s0, len);
          const std::size_t top = std::min(ie, j + 1);
          for (std::size_t i = ib; i < top; ++i)
            g(i, j) += dot(x.row(i).subspan(s0, len), seg_j);
        }
      }
    }
  });
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) g(i, j) = g(j, i);
  return g;
}

Matrix gram_of_columns(const Matrix& x) {
  const std::size_t m = x.rows();
  const std::size_t r = x.cols();
  Matrix s(r, r);
  // s = x^T x accumulated row by row: one streaming pass over x with the
  // r x r accumulator resident in cache.
  for (std::size_t i = 0; i < m; ++i) {
    const auto xi = x.row(i);
    for (std::size_t j = 0; j < r; ++j) {
      const double xij = xi[j];
      if (xij == 0.0) continue;
      double* srow = &s(j, 0);
      for (std::size_t k = j; k < r; ++k) srow[k] += xij * xi[k];
    }
  }
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < i; ++j) s(i, j) = s(j, i);
  return s;
}

namespace {

// One cyclic sweep of upper-triangle Jacobi rotations. Off-diagonals are
// annihilated when they exceed tol relative to the geometric mean of their
// diagonal pair, which preserves the accuracy of small eigenvalues in
// graded spectra.
bool jacobi_sweep(Matrix& a, Matrix& v, double tol) {
  const std::size_t n = a.rows();
  bool rotated = false;
  for (std::size_t p = 0; p + 1 < n; ++p) {
    for (std::size_t q = p + 1; q < n; ++q) {
      const double apq = a(p, q);
      if (apq == 0.0) continue;
      const double scale = std::sqrt(std::abs(a(p, p)) * std::abs(a(q, q)));
      if (std::abs(apq) <= tol * scale) continue;
      rotated = true;

      const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
      const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                       (std::abs(theta) + std::sqrt(theta * theta + 1.0));
      const double c = 1.0 / std::sqrt(t * t + 1.0);
      const double s = t * c;

      const double app = a(p, p);
      const double aqq = a(q, q);
      a(p, p) = app - t * apq;
      a(q, q) = aqq + t * apq;
      a(p, q) = 0.0;

      for (std::size_t k = 0; k < p; ++k) {
        const double akp = a(k, p), akq = a(k, q);
        a(k, p) = c * akp - s * akq;
        a(k, q) = s * akp + c * akq;
      }
      for (std::size_t k = p + 1; k < q; ++k) {
        const double apk = a(p, k), akq = a(k, q);
        a(p, k) = c * apk - s * akq;
        a(k, q) = s * apk + c * akq;
      }
      for (std::size_t k = q + 1; k < n; ++k) {
        const double apk = a(p, k), aqk = a(q, k);
        a(p, k) = c * apk - s * aqk;
        a(q, k) = s * apk + c * aqk;
      }
      for (std::size_t k = 0; k < n; ++k) {
        const double vkp = v(k, p), vkq = v(k, q);
        v(k, p) = c * vkp - s * vkq;
        v(k, q) = s * vkp + c * vkq;
      }
    }
  }
  return rotated;
}

}  // namespace

EigResult sym_eig(const Matrix& s) {
  const std::size_t n = s.rows();
  if (s.cols() != n) {
    throw ContractError("sym_eig: matrix is " + std::to_string(n) + "x" +
                        std::to_string(s.cols()) + ", expected square");
  }
  double max_abs = 0.0;
  double max_asym = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      max_abs = std::max(max_abs, std::abs(s(i, j)));
      max_asym = std::max(max_asym, std::abs(s(i, j) - s(j, i)));
    }
  }
  if (max_asym > 1e-10 * std::max(1.0, max_abs)) {
    throw ContractError("sym_eig: input asymmetric by " +
                        std::to_string(max_asym));
  }

  Matrix a = s;
  // Work on the symmetrized upper triangle only.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) a(i, j) = 0.0;
  Matrix v = Matrix::identity(n);

  double tol = 1e-15;
  const int max_sweeps = 100;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    if (!jacobi_sweep(a, v, tol)) break;
    if (sweep >= 40 && sweep % 10 == 0) tol *= 100.0;  // stall escape
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });

  EigResult out{std::vector<double>(n), Matrix(n, n)};
  for (std::size_t j = 0; j < n; ++j) {
    out.eigenvalues[j] = a(order[j], order[j]);
    for (std::size_t i = 0; i < n; ++i) out.eigenvectors(i, j) = v(i, order[j]);
  }
  return out;
}

SvdResult gram_svd(const Matrix& x, double rel_tol) {
  if (!(rel_tol > 0.0 && rel_tol < 1.0)) {
    throw ContractError("gram_svd: rel_tol must be in (0,1), got " +
                        std::to_string(rel_tol));
  }
  const std::size_t n = x.rows();
  const std::size_t m = x.cols();

  const EigResult eig = sym_eig(gram(x));

  // w_j = x^T u_j, accumulated as rank-1 updates so the memory walk over x
  // stays sequential. The per-entry summation order is the row order of x,
  // independent of the parallel split over pixel blocks. Held in an
  // optional so the buffer can be released once the kept columns are
  // copied out.
  std::optional<Matrix> w_opt(std::in_place, m, n);
  Matrix& w = *w_opt;
  const std::size_t tile = std::clamp<std::size_t>((1u << 16) / n, 8, 4096);
  parallel_for(m, tile, [&](std::size_t m0, std::size_t m1) {
    for (std::size_t t0 = m0; t0 < m1; t0 += tile) {
      const std::size_t t1 = std::min(t0 + tile, m1);
      for (std::size_t i = 0; i < n; ++i) {
        const auto xi = x.row(i);
        const auto ui = eig.eigenvectors.row(i);
        for (std::size_t mm = t0; mm < t1; ++mm) {
          const double xv = xi[mm];
          if (xv == 0.0) continue;
          auto wrow = w.row(mm);
          for (std::size_t j = 0; j < n; ++j) wrow[j] += xv * ui[j];
        }
      }
    }
  });

  // The singular values are measured as the actual norms |x^T u_j| rather
  // than sqrt(eigenvalue): the eigenvalues of the Gram matrix carry an
  // absolute noise floor around eps * lambda_max, which would inflate
  // exact zeros to ~sqrt(eps) * sigma_max and defeat rank detection.
  std::vector<double> norms(n, 0.0);
  for (std::size_t mm = 0; mm < m; ++mm) {
    const auto wrow = w.row(mm);
    for (std::size_t j = 0; j < n; ++j) norms[j] += wrow[j] * wrow[j];
  }
  for (double& v : norms) v = std::sqrt(v);

  // Eigenvalue order and measured-norm order can disagree within roundoff
  // for near-ties; sort by the measured values to keep the spectrum
  // descending.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return norms[a] > norms[b];
  });

  const double sigma_max = norms[order[0]];
  if (sigma_max == 0.0) {
    throw RankError("gram_svd: matrix is numerically zero, no spectrum", 0);
  }
  std::size_t r = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (norms[order[i]] <= rel_tol * sigma_max) break;
    ++r;
  }

  // Kept columns of w, transposed so each vector is a contiguous row.
  Matrix wt(r, m);
  parallel_for(m, 512, [&](std::size_t m0, std::size_t m1) {
    for (std::size_t mm = m0; mm < m1; ++mm) {
      const auto wrow = w.row(mm);
      for (std::size_t j = 0; j < r; ++j) wt(j, mm) = wrow[order[j]];
    }
  });
  w_opt.reset();

  // Forming w = x^T u leaks an absolute eps * sigma_max of cross-talk into
  // every column, which is eps * cond(x) relative for the smallest kept
  // pair. Two modified Gram-Schmidt passes restore orthonormality to
  // machine level; the combined triangular factor is folded back into the
  // left vectors, so u r_total^T v_hat^T still reproduces x^T u exactly.
  Matrix r_total = Matrix::identity(r);
  for (int pass = 0; pass < 2; ++pass) {
    Matrix rfac(r, r);
    for (std::size_t j = 0; j < r; ++j) {
      auto wj = wt.row(j);
      for (std::size_t i = 0; i < j; ++i) {
        const double rij = dot(wt.row(i), wj);
        rfac(i, j) = rij;
        const auto wi = wt.row(i);
        for (std::size_t mm = 0; mm < m; ++mm) wj[mm] -= rij * wi[mm];
      }
      const double norm = std::sqrt(dot(wj, wj));
      if (norm == 0.0) {
        throw RankError("gram_svd: column collapse during orthogonalization",
                        j);
      }
      rfac(j, j) = norm;
      for (std::size_t mm = 0; mm < m; ++mm) wj[mm] /= norm;
    }
    r_total = matmul(rfac, r_total);
  }

  // a = u_kept * r_total^T; its column norms are the singular values and
  // its normalized columns the left vectors.
  Matrix a(n, r);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < r; ++j) {
      double acc = 0.0;
      for (std::size_t l = j; l < r; ++l) {
        acc += eig.eigenvectors(i, order[l]) * r_total(j, l);
      }
      a(i, j) = acc;
    }
  }
  std::vector<double> sigma(r);
  for (std::size_t j = 0; j < r; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a(i, j) * a(i, j);
    sigma[j] = std::sqrt(s);
  }

  // The polish can reorder near-tied values by a hair; restore descending
  // order explicitly.
  std::vector<std::size_t> perm(r);
  std::iota(perm.begin(), perm.end(), 0);
  std::stable_sort(perm.begin(), perm.end(), [&](std::size_t x, std::size_t y) {
    return sigma[x] > sigma[y];
  });

  Matrix u(n, r);
  std::vector<double> sigma_sorted(r);
  for (std::size_t j = 0; j < r; ++j) {
    sigma_sorted[j] = sigma[perm[j]];
    for (std::size_t i = 0; i < n; ++i) u(i, j) = a(i, perm[j]) / sigma[perm[j]];
  }
  Matrix v(m, r);
  parallel_for(m, 512, [&](std::size_t m0, std::size_t m1) {
    for (std::size_t mm = m0; mm < m1; ++mm) {
      auto vrow = v.row(mm);
      for (std::size_t j = 0; j < r; ++j) vrow[j] = wt(perm[j], mm);
    }
  });

  // Sign convention: largest-magnitude entry of each right vector positive.
  for (std::size_t j = 0; j < r; ++j) {
    std::size_t arg = 0;
    double best = -1.0;
    for (std::size_t mm = 0; mm < m; ++mm) {
      const double mag = std::abs(v(mm, j));
      if (mag > best) {
        best = mag;
        arg = mm;
      }
    }
    if (v(arg, j) < 0.0) {
      for (std::size_t mm = 0; mm < m; ++mm) v(mm, j) = -v(mm, j);
      for (std::size_t i = 0; i < n; ++i) u(i, j) = -u(i, j);
    }
  }

  return SvdResult{std::move(u), std::move(sigma_sorted), std::move(v)};
}

std::pair<Matrix, std::vector<double>> row_normalize(const Matrix& x) {
  Matrix out(x.rows(), x.cols());
  std::vector<double> norms(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const double norm = std::sqrt(dot(x.row(i), x.row(i)));
    if (norm == 0.0) {
      throw NormalizationError(
          "row_normalize: frame " + std::to_string(i) + " has zero norm", i);
    }
    norms[i] = norm;
    const auto src = x.row(i);
    auto dst = out.row(i);
    for (std::size_t j = 0; j < x.cols(); ++j) dst[j] = src[j] / norm;
  }
  return {std::move(out), std::move(norms)};
}

}  // namespace xpcs
