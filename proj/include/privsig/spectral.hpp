//
// Copyright 2026 The privsig Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

// Dense symmetric eigendecomposition (cyclic Jacobi) and the matrix
// functions built on it: square roots, pseudo-inverses, Cholesky.

#ifndef PRIVSIG_SPECTRAL_HPP_
#define PRIVSIG_SPECTRAL_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "privsig/error.hpp"
#include "privsig/matrix.hpp"

namespace privsig {

enum class EigenOrder {
  kDescending,
  // Eigenvalues above zero_tol first, then the rest; descending within each
  // group.
  kPositivesFirst,
};

struct Inertia {
  int positive = 0;
  int negative = 0;
  int zero = 0;
  friend bool operator==(const Inertia&, const Inertia&) = default;
};

struct SpectralDecomposition {
  Matrix q;                   // eigenvectors in columns
  std::vector<double> lambda;  // eigenvalues, ordered as requested
  Inertia inertia;
  double zero_tol = 0.0;

  std::size_t dim() const noexcept { return lambda.size(); }
  std::vector<double> vector(std::size_t i) const { return q.column(i); }

  // Q diag(lambda) Q^T.
  Matrix Reconstruct() const {
    Matrix scaled = q;
    for (std::size_t r = 0; r < q.rows(); ++r) {
      for (std::size_t c = 0; c < q.cols(); ++c) scaled(r, c) *= lambda[c];
    }
    return scaled * q.transpose();
  }
};

inline constexpr int kJacobiMaxSweeps = 100;
inline constexpr double kJacobiOffDiagonalTol = 1e-12;
inline constexpr double kDefaultRelativeZeroTol = 1e-10;
inline constexpr double kPositiveDefiniteRelTol = 1e-12;

namespace detail {

inline double OffDiagonalNorm(const Matrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (i != j) s += a(i, j) * a(i, j);
    }
  }
  return std::sqrt(s);
}

// Rotates rows/columns p and q of the symmetric matrix a so that a(p, q)
// vanishes, accumulating the rotation into v.
inline void JacobiRotate(Matrix& a, Matrix& v, std::size_t p, std::size_t q) {
  const double apq = a(p, q);
  if (apq == 0.0) return;
  const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
  double t;
  if (std::abs(theta) > 1e150) {
    t = 0.5 / theta;
  } else {
    t = (theta >= 0.0 ? 1.0 : -1.0) /
        (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  }
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;
  const std::size_t n = a.rows();
  for (std::size_t k = 0; k < n; ++k) {
    const double akp = a(k, p);
    const double akq = a(k, q);
    a(k, p) = c * akp - s * akq;
    a(k, q) = s * akp + c * akq;
  }
  for (std::size_t k = 0; k < n; ++k) {
    const double apk = a(p, k);
    const double aqk = a(q, k);
    a(p, k) = c * apk - s * aqk;
    a(q, k) = s * apk + c * aqk;
  }
  a(p, q) = 0.0;
  a(q, p) = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double vkp = v(k, p);
    const double vkq = v(k, q);
    v(k, p) = c * vkp - s * vkq;
    v(k, q) = s * vkp + c * vkq;
  }
}

// Flips each column so that its largest-magnitude entry (first one on ties)
// is positive.
inline void CanonicalizeSigns(Matrix& q) {
  for (std::size_t c = 0; c < q.cols(); ++c) {
    std::size_t best = 0;
    for (std::size_t r = 1; r < q.rows(); ++r) {
      if (std::abs(q(r, c)) > std::abs(q(best, c))) best = r;
    }
    if (q(best, c) < 0.0) {
      for (std::size_t r = 0; r < q.rows(); ++r) q(r, c) = -q(r, c);
    }
  }
}

}  // namespace detail

// Eigendecomposition of a symmetric matrix. zero_tol defaults to
// 1e-10 * max|lambda| and decides which eigenvalues count as zero in the
// inertia.
inline SpectralDecomposition EigSym(
    const SymMatrix& m, EigenOrder order = EigenOrder::kDescending,
    std::optional<double> zero_tol = std::nullopt) {
  if (zero_tol && *zero_tol < 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "zero_tol must be nonnegative");
  }
  const std::size_t n = m.dim();
  Matrix a = m.matrix();
  Matrix v = Matrix::Identity(n);
  const double scale = a.frobenius_norm();
  const double target =
      kJacobiOffDiagonalTol * std::max(scale, std::numeric_limits<double>::min());

  bool converged = detail::OffDiagonalNorm(a) <= target;
  for (int sweep = 0; sweep < kJacobiMaxSweeps && !converged; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) detail::JacobiRotate(a, v, p, q);
    }
    converged = detail::OffDiagonalNorm(a) <= target;
  }
  if (!converged) {
    throw Error(ErrorCode::kNonConvergence,
                "Jacobi off-diagonal norm " +
                    std::to_string(detail::OffDiagonalNorm(a)) + " after " +
                    std::to_string(kJacobiMaxSweeps) + " sweeps");
  }

  std::vector<double> raw(n);
  double max_abs = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    raw[i] = a(i, i);
    max_abs = std::max(max_abs, std::abs(raw[i]));
  }
  const double tol = zero_tol.value_or(kDefaultRelativeZeroTol * max_abs);

  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  auto descending = [&](std::size_t i, std::size_t j) {
    return raw[i] > raw[j];
  };
  if (order == EigenOrder::kDescending) {
    std::stable_sort(idx.begin(), idx.end(), descending);
  } else {
    auto mid = std::stable_partition(idx.begin(), idx.end(),
                                     [&](std::size_t i) { return raw[i] > tol; });
    std::stable_sort(idx.begin(), mid, descending);
    std::stable_sort(mid, idx.end(), descending);
  }

  SpectralDecomposition out;
  out.q = Matrix(n, n);
  out.lambda.resize(n);
  out.zero_tol = tol;
  for (std::size_t c = 0; c < n; ++c) {
    out.lambda[c] = raw[idx[c]];
    for (std::size_t r = 0; r < n; ++r) out.q(r, c) = v(r, idx[c]);
    if (out.lambda[c] > tol) {
      ++out.inertia.positive;
    } else if (out.lambda[c] < -tol) {
      ++out.inertia.negative;
    } else {
      ++out.inertia.zero;
    }
  }
  detail::CanonicalizeSigns(out.q);
  return out;
}

// Q f(Lambda) Q^T for a function applied to each eigenvalue.
template <typename F>
SymMatrix ApplySpectralFunction(const SpectralDecomposition& d, F&& f) {
  SpectralDecomposition mapped = d;
  for (double& l : mapped.lambda) l = f(l);
  return SymMatrix(mapped.Reconstruct());
}

namespace detail {

inline void RequirePositiveDefinite(const SpectralDecomposition& d,
                                    const char* what) {
  double max_abs = 0.0;
  for (double l : d.lambda) max_abs = std::max(max_abs, std::abs(l));
  const double min_l = *std::min_element(d.lambda.begin(), d.lambda.end());
  if (!(min_l > kPositiveDefiniteRelTol * max_abs) || !(min_l > 0.0)) {
    throw NotPositiveDefinite(std::string(what) + ": matrix is not positive definite",
                              min_l);
  }
}

}  // namespace detail

inline bool IsPositiveDefinite(const SymMatrix& m) {
  try {
    detail::RequirePositiveDefinite(EigSym(m), "IsPositiveDefinite");
    return true;
  } catch (const NotPositiveDefinite&) {
    return false;
  }
}

// Principal square root S with S * S = m.
inline SymMatrix SqrtPd(const SymMatrix& m) {
  const SpectralDecomposition d = EigSym(m);
  detail::RequirePositiveDefinite(d, "SqrtPd");
  return ApplySpectralFunction(d, [](double l) { return std::sqrt(l); });
}

// S with S * m * S = I.
inline SymMatrix InvSqrtPd(const SymMatrix& m) {
  const SpectralDecomposition d = EigSym(m);
  detail::RequirePositiveDefinite(d, "InvSqrtPd");
  return ApplySpectralFunction(d, [](double l) { return 1.0 / std::sqrt(l); });
}

inline SymMatrix InversePd(const SymMatrix& m) {
  const SpectralDecomposition d = EigSym(m);
  detail::RequirePositiveDefinite(d, "InversePd");
  return ApplySpectralFunction(d, [](double l) { return 1.0 / l; });
}

// Moore-Penrose inverse; eigenvalues with |lambda| <= rel_cutoff * max|lambda|
// are treated as zero.
inline SymMatrix PseudoInverse(const SymMatrix& m, double rel_cutoff = 1e-12) {
  const SpectralDecomposition d = EigSym(m);
  double max_abs = 0.0;
  for (double l : d.lambda) max_abs = std::max(max_abs, std::abs(l));
  const double cut = rel_cutoff * max_abs;
  return ApplySpectralFunction(d, [cut](double l) {
    return std::abs(l) > cut ? 1.0 / l : 0.0;
  });
}

// Lower-triangular L with L * L^T = m.
inline Matrix CholeskyPd(const SymMatrix& m) {
  const std::size_t n = m.dim();
  Matrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double diag = m(j, j);
    for (std::size_t k = 0; k < j; ++k) diag -= l(j, k) * l(j, k);
    if (!(diag > 0.0)) {
      throw NotPositiveDefinite("CholeskyPd: nonpositive pivot", diag);
    }
    l(j, j) = std::sqrt(diag);
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = m(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / l(j, j);
    }
  }
  return l;
}

}  // namespace privsig

#endif  // PRIVSIG_SPECTRAL_HPP_
