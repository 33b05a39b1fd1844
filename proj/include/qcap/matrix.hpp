#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace qcap {

using cplx = std::complex<double>;

/// Numerical invariant breach (CPTP residual, non-finite state, ...).
/// The CLI maps this to exit code 3.
class numerical_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dense row-major complex matrix. Sized for density matrices of at most
/// 10 qubits (1024 x 1024); no sparsity, no views.
struct ComplexMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<cplx> entries;  // row-major, rows*cols

  ComplexMatrix() = default;
  ComplexMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), entries(r * c) {}

  cplx& operator()(std::size_t i, std::size_t j) { return entries[i * cols + j]; }
  const cplx& operator()(std::size_t i, std::size_t j) const { return entries[i * cols + j]; }

  static ComplexMatrix identity(std::size_t n) {
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }
};

inline ComplexMatrix operator+(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows != b.rows || a.cols != b.cols) throw std::invalid_argument("matrix add: shape mismatch");
  ComplexMatrix out(a.rows, a.cols);
  for (std::size_t i = 0; i < a.entries.size(); ++i) out.entries[i] = a.entries[i] + b.entries[i];
  return out;
}

inline ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows != b.rows || a.cols != b.cols) throw std::invalid_argument("matrix sub: shape mismatch");
  ComplexMatrix out(a.rows, a.cols);
  for (std::size_t i = 0; i < a.entries.size(); ++i) out.entries[i] = a.entries[i] - b.entries[i];
  return out;
}

inline ComplexMatrix operator*(cplx s, const ComplexMatrix& a) {
  ComplexMatrix out(a.rows, a.cols);
  for (std::size_t i = 0; i < a.entries.size(); ++i) out.entries[i] = s * a.entries[i];
  return out;
}

inline ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols != b.rows) throw std::invalid_argument("matrix mul: shape mismatch");
  ComplexMatrix out(a.rows, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i) {
    for (std::size_t k = 0; k < a.cols; ++k) {
      const cplx aik = a(i, k);
      if (aik == cplx{}) continue;
      for (std::size_t j = 0; j < b.cols; ++j) out(i, j) += aik * b(k, j);
    }
  }
  return out;
}

inline ComplexMatrix adjoint(const ComplexMatrix& a) {
  ComplexMatrix out(a.cols, a.rows);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t j = 0; j < a.cols; ++j) out(j, i) = std::conj(a(i, j));
  return out;
}

inline cplx trace(const ComplexMatrix& a) {
  if (a.rows != a.cols) throw std::invalid_argument("trace: matrix not square");
  cplx t{};
  for (std::size_t i = 0; i < a.rows; ++i) t += a(i, i);
  return t;
}

/// max_ij |a_ij|  (the max-norm used by every tolerance in this library)
inline double max_abs(const ComplexMatrix& a) {
  double m = 0.0;
  for (const cplx& e : a.entries) m = std::max(m, std::abs(e));
  return m;
}

inline double hermiticity_error(const ComplexMatrix& a) {
  if (a.rows != a.cols) throw std::invalid_argument("hermiticity_error: matrix not square");
  double m = 0.0;
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t j = i; j < a.cols; ++j) m = std::max(m, std::abs(a(i, j) - std::conj(a(j, i))));
  return m;
}

inline bool all_finite(const ComplexMatrix& a) {
  for (const cplx& e : a.entries)
    if (!std::isfinite(e.real()) || !std::isfinite(e.imag())) return false;
  return true;
}

/// Kronecker product: block (i,j) of the result equals a(i,j) * b.
inline ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows * b.rows, a.cols * b.cols);
  for (std::size_t ia = 0; ia < a.rows; ++ia)
    for (std::size_t ja = 0; ja < a.cols; ++ja) {
      const cplx f = a(ia, ja);
      if (f == cplx{}) continue;
      for (std::size_t ib = 0; ib < b.rows; ++ib)
        for (std::size_t jb = 0; jb < b.cols; ++jb)
          out(ia * b.rows + ib, ja * b.cols + jb) = f * b(ib, jb);
    }
  return out;
}

}  // namespace qcap
