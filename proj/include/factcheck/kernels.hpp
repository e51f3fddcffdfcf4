#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

namespace fc::kernels {

/// Serial is the reference; Parallel splits output rows across OpenMP threads.
/// Every output element is computed by the same loop in both, so results are
/// bit-identical.
enum class Policy : std::uint8_t { kSerial, kParallel };

/// C[m x n] (+)= A[m x k] * B[k x n], row-major.
void matmul(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
            std::size_t n, Policy policy, bool accumulate = false);

/// C[m x n] (+)= A[m x k] * B[n x k]^T.
void matmul_bt(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
               std::size_t n, Policy policy, bool accumulate = false);

/// C[k x n] (+)= A[m x k]^T * B[m x n].
void matmul_at(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
               std::size_t n, Policy policy, bool accumulate = false);

/// K[i][j] = exp(-gamma * ||x_i - y_j||^2) for X[n x d], Y[m x d].
void rbf_cross(const double* x, std::size_t n, const double* y, std::size_t m, std::size_t d,
               double gamma, double* out, Policy policy);

/// Symmetric n x n Gram matrix of X with itself.
void rbf_gram(const double* x, std::size_t n, std::size_t d, double gamma, double* out,
              Policy policy);

/// Runs fn(i) for i in [0, n); in parallel mode with a static schedule.
void for_each_index(std::size_t n, const std::function<void(std::size_t)>& fn, Policy policy);

int max_threads();

}  // namespace fc::kernels
