#pragma once

// Dense double-precision inner loops. Each kernel has a scalar reference
// implementation and, on x86-64 builds, an AVX2/FMA variant. The active
// table is chosen once at startup from CPUID and can be overridden for
// testing. All matrices are row-major and contiguous.

#include <cstddef>
#include <string_view>

namespace mshyper::kernels {

enum class Backend { kScalar, kAvx2 };

struct KernelTable {
  // sum_i x[i] * y[i]
  double (*dot)(const double* x, const double* y, std::size_t n);
  // y[i] += alpha * x[i]
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // c[m x n] += a[m x k] * b[k x n]
  void (*gemm_nn)(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b,
                  double* c);
  // c[m x n] += a[m x k] * b[n x k]^T
  void (*gemm_nt)(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b,
                  double* c);
  // c[m x n] += a[k x m]^T * b[k x n]
  void (*gemm_tn)(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b,
                  double* c);
};

const KernelTable& scalar_table();
#if defined(MSHYPER_HAVE_AVX2)
const KernelTable& avx2_table();
#endif

bool backend_available(Backend backend);
const KernelTable& table(Backend backend);

Backend active_backend();
const KernelTable& active();

// Throws mshyper::Error if the backend is not available on this CPU/build.
void select_backend(Backend backend);

std::string_view backend_name(Backend backend);

}  // namespace mshyper::kernels
