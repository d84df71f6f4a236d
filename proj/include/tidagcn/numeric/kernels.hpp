#pragma once

// Inner-loop kernels for the numeric core.
//
// Every kernel has a scalar reference implementation and, on x86-64 builds,
// an AVX2/FMA variant. The variant is chosen once at startup from CPUID; the
// TIDAGCN_KERNELS environment variable ("scalar" or "avx2") overrides it.
// All matrix arguments are dense row-major. The gemm kernels accumulate into C.
//
// The scalar variant fixes the summation order (row-major, left to right).
// SIMD variants are deterministic for a given machine but may round
// differently; equivalence is tested at 1e-12 relative tolerance.

#include <cstddef>
#include <string_view>
#include <vector>

namespace tidagcn::kernels {

struct KernelTable {
  const char* name;

  // sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // y += a (.) b
  void (*hadamard_acc)(const double* a, const double* b, double* y, std::size_t n);
  // C[m x n] += A[m x k] * B[k x n]
  void (*gemm_nn)(std::size_t m, std::size_t k, std::size_t n, const double* a, const double* b,
                  double* c);
  // C[m x n] += A[m x k] * B[n x k]^T
  void (*gemm_nt)(std::size_t m, std::size_t k, std::size_t n, const double* a, const double* b,
                  double* c);
  // C[k x n] += A[m x k]^T * B[m x n]
  void (*gemm_tn)(std::size_t m, std::size_t k, std::size_t n, const double* a, const double* b,
                  double* c);
};

const KernelTable& scalar_table();

// nullptr when the variant was not compiled in or the CPU lacks support.
const KernelTable* avx2_table();

// The table every numeric op dispatches through.
const KernelTable& active();

// Forces a variant by name ("scalar", "avx2"). Returns false if unavailable.
bool select(std::string_view name);

// Names of the variants usable on this machine, scalar first.
std::vector<std::string_view> available();

}  // namespace tidagcn::kernels
