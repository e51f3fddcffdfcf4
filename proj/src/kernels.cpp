#include "factcheck/kernels.hpp"

#include <cmath>
#include <cstdint>
#include <exception>

#include <omp.h>

namespace fc::kernels {
namespace {

inline void matmul_row(const double* a, const double* b, double* c, std::size_t i, std::size_t k,
                       std::size_t n, bool accumulate) {
  double* ci = c + i * n;
  if (!accumulate) {
    for (std::size_t j = 0; j < n; ++j) ci[j] = 0.0;
  }
  const double* ai = a + i * k;
  for (std::size_t p = 0; p < k; ++p) {
    const double av = ai[p];
    if (av == 0.0) continue;
    const double* bp = b + p * n;
    for (std::size_t j = 0; j < n; ++j) ci[j] += av * bp[j];
  }
}

inline void matmul_bt_row(const double* a, const double* b, double* c, std::size_t i,
                          std::size_t k, std::size_t n, bool accumulate) {
  const double* ai = a + i * k;
  double* ci = c + i * n;
  for (std::size_t j = 0; j < n; ++j) {
    const double* bj = b + j * k;
    double s = 0.0;
    for (std::size_t p = 0; p < k; ++p) s += ai[p] * bj[p];
    ci[j] = accumulate ? ci[j] + s : s;
  }
}

// Row r of A^T B: sum over samples i of a[i][r] * b[i][:].
inline void matmul_at_row(const double* a, const double* b, double* c, std::size_t r,
                          std::size_t m, std::size_t k, std::size_t n, bool accumulate) {
  double* cr = c + r * n;
  if (!accumulate) {
    for (std::size_t j = 0; j < n; ++j) cr[j] = 0.0;
  }
  for (std::size_t i = 0; i < m; ++i) {
    const double av = a[i * k + r];
    if (av == 0.0) continue;
    const double* bi = b + i * n;
    for (std::size_t j = 0; j < n; ++j) cr[j] += av * bi[j];
  }
}

inline double sqdist(const double* x, const double* y, std::size_t d) {
  double s = 0.0;
  for (std::size_t p = 0; p < d; ++p) {
    const double t = x[p] - y[p];
    s += t * t;
  }
  return s;
}

}  // namespace

void matmul(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
            std::size_t n, Policy policy, bool accumulate) {
  const auto rows = static_cast<std::int64_t>(m);
  if (policy == Policy::kParallel) {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < rows; ++i) {
      matmul_row(a, b, c, static_cast<std::size_t>(i), k, n, accumulate);
    }
  } else {
    for (std::size_t i = 0; i < m; ++i) matmul_row(a, b, c, i, k, n, accumulate);
  }
}

void matmul_bt(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
               std::size_t n, Policy policy, bool accumulate) {
  const auto rows = static_cast<std::int64_t>(m);
  if (policy == Policy::kParallel) {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < rows; ++i) {
      matmul_bt_row(a, b, c, static_cast<std::size_t>(i), k, n, accumulate);
    }
  } else {
    for (std::size_t i = 0; i < m; ++i) matmul_bt_row(a, b, c, i, k, n, accumulate);
  }
}

void matmul_at(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
               std::size_t n, Policy policy, bool accumulate) {
  const auto rows = static_cast<std::int64_t>(k);
  if (policy == Policy::kParallel) {
#pragma omp parallel for schedule(static)
    for (std::int64_t r = 0; r < rows; ++r) {
      matmul_at_row(a, b, c, static_cast<std::size_t>(r), m, k, n, accumulate);
    }
  } else {
    for (std::size_t r = 0; r < k; ++r) matmul_at_row(a, b, c, r, m, k, n, accumulate);
  }
}

void rbf_cross(const double* x, std::size_t n, const double* y, std::size_t m, std::size_t d,
               double gamma, double* out, Policy policy) {
  auto row = [&](std::size_t i) {
    for (std::size_t j = 0; j < m; ++j) {
      out[i * m + j] = std::exp(-gamma * sqdist(x + i * d, y + j * d, d));
    }
  };
  const auto rows = static_cast<std::int64_t>(n);
  if (policy == Policy::kParallel) {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < rows; ++i) row(static_cast<std::size_t>(i));
  } else {
    for (std::size_t i = 0; i < n; ++i) row(i);
  }
}

void rbf_gram(const double* x, std::size_t n, std::size_t d, double gamma, double* out,
              Policy policy) {
  rbf_cross(x, n, x, n, d, gamma, out, policy);
}

void for_each_index(std::size_t n, const std::function<void(std::size_t)>& fn, Policy policy) {
  if (policy == Policy::kSerial) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  // The exception of the lowest failing index is rethrown, as the serial loop would.
  const auto count = static_cast<std::int64_t>(n);
  std::exception_ptr error;
  std::int64_t error_index = count;
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < count; ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(fc_for_each_error)
      if (i < error_index) {
        error_index = i;
        error = std::current_exception();
      }
    }
  }
  if (error) std::rethrow_exception(error);
}

int max_threads() { return omp_get_max_threads(); }

}  // namespace fc::kernels
