#pragma once

#include <cassert>
#include <cstddef>
#include <vector>

namespace nmpa {

using Vec = std::vector<double>;

// Dense row-major matrix. Sizes here are tiny (M ~ 10, hidden ~ 32), so the
// kernels stay serial; parallelism lives at batch granularity.
struct Mat {
  int rows = 0;
  int cols = 0;
  Vec a;

  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, 0.0) {}
  Mat(int r, int c, Vec data) : rows(r), cols(c), a(std::move(data)) {
    assert(static_cast<size_t>(rows) * cols == a.size());
  }

  double& operator()(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
  double operator()(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }

  void zero() { a.assign(a.size(), 0.0); }
  bool same_shape(const Mat& o) const { return rows == o.rows && cols == o.cols; }
};

// C = A * B
inline void matmul(const Mat& A, const Mat& B, Mat& C) {
  assert(A.cols == B.rows);
  if (C.rows != A.rows || C.cols != B.cols) C = Mat(A.rows, B.cols);
  for (int i = 0; i < A.rows; ++i) {
    double* ci = &C.a[static_cast<size_t>(i) * C.cols];
    for (int j = 0; j < C.cols; ++j) ci[j] = 0.0;
    for (int k = 0; k < A.cols; ++k) {
      const double aik = A(i, k);
      if (aik == 0.0) continue;
      const double* bk = &B.a[static_cast<size_t>(k) * B.cols];
      for (int j = 0; j < B.cols; ++j) ci[j] += aik * bk[j];
    }
  }
}

// C += A * B
inline void matmul_acc(const Mat& A, const Mat& B, Mat& C) {
  assert(A.cols == B.rows && C.rows == A.rows && C.cols == B.cols);
  for (int i = 0; i < A.rows; ++i) {
    double* ci = &C.a[static_cast<size_t>(i) * C.cols];
    for (int k = 0; k < A.cols; ++k) {
      const double aik = A(i, k);
      if (aik == 0.0) continue;
      const double* bk = &B.a[static_cast<size_t>(k) * B.cols];
      for (int j = 0; j < C.cols; ++j) ci[j] += aik * bk[j];
    }
  }
}

// C += A^T * B
inline void matmul_tn_acc(const Mat& A, const Mat& B, Mat& C) {
  assert(A.rows == B.rows && C.rows == A.cols && C.cols == B.cols);
  for (int k = 0; k < A.rows; ++k) {
    const double* ak = &A.a[static_cast<size_t>(k) * A.cols];
    const double* bk = &B.a[static_cast<size_t>(k) * B.cols];
    for (int i = 0; i < C.rows; ++i) {
      const double aki = ak[i];
      if (aki == 0.0) continue;
      double* ci = &C.a[static_cast<size_t>(i) * C.cols];
      for (int j = 0; j < C.cols; ++j) ci[j] += aki * bk[j];
    }
  }
}

// C += A * B^T
inline void matmul_nt_acc(const Mat& A, const Mat& B, Mat& C) {
  assert(A.cols == B.cols && C.rows == A.rows && C.cols == B.rows);
  for (int i = 0; i < A.rows; ++i) {
    const double* ai = &A.a[static_cast<size_t>(i) * A.cols];
    double* ci = &C.a[static_cast<size_t>(i) * C.cols];
    for (int j = 0; j < B.rows; ++j) {
      const double* bj = &B.a[static_cast<size_t>(j) * B.cols];
      double s = 0.0;
      for (int k = 0; k < A.cols; ++k) s += ai[k] * bj[k];
      ci[j] += s;
    }
  }
}

inline void add_scaled(Mat& dst, const Mat& src, double scale) {
  assert(dst.same_shape(src));
  for (size_t i = 0; i < dst.a.size(); ++i) dst.a[i] += scale * src.a[i];
}

}  // namespace nmpa
