#include <atomic>

#include "mshyper/error.hpp"
#include "mshyper/kernels.hpp"

namespace mshyper::kernels {
namespace {

bool probe_avx2() {
#if defined(MSHYPER_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

bool cpu_has_avx2() {
  static const bool has = probe_avx2();
  return has;
}

Backend detect() { return cpu_has_avx2() ? Backend::kAvx2 : Backend::kScalar; }

std::atomic<Backend>& current();

}  // namespace

bool backend_available(Backend backend) {
  switch (backend) {
    case Backend::kScalar:
      return true;
    case Backend::kAvx2:
      return cpu_has_avx2();
  }
  return false;
}

const KernelTable& table(Backend backend) {
  if (!backend_available(backend)) {
    throw Error("kernel backend '" + std::string(backend_name(backend)) +
                "' is not available on this CPU/build");
  }
#if defined(MSHYPER_HAVE_AVX2)
  if (backend == Backend::kAvx2) return avx2_table();
#endif
  return scalar_table();
}

namespace {

std::atomic<Backend>& current() {
  static std::atomic<Backend> selection{detect()};
  return selection;
}

}  // namespace

Backend active_backend() { return current().load(std::memory_order_relaxed); }

const KernelTable& active() {
#if defined(MSHYPER_HAVE_AVX2)
  // Only reachable once the CPU probe succeeded (detect() or select_backend()).
  if (current().load(std::memory_order_relaxed) == Backend::kAvx2) return avx2_table();
#endif
  return scalar_table();
}

void select_backend(Backend backend) {
  table(backend);  // throws if unavailable
  current().store(backend, std::memory_order_relaxed);
}

std::string_view backend_name(Backend backend) {
  switch (backend) {
    case Backend::kScalar:
      return "scalar";
    case Backend::kAvx2:
      return "avx2";
  }
  return "unknown";
}

}  // namespace mshyper::kernels
