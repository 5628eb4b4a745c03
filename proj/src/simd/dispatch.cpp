#include <cstdlib>
#include <stdexcept>
#include <string>

#include "ksg/simd/kernels.hpp"

namespace ksg::simd {

#ifndef KSG_HAVE_AVX2
namespace detail {
const KernelTable* avx2_table() { return nullptr; }
}  // namespace detail
#endif

std::string_view to_string(Backend backend) {
  switch (backend) {
    case Backend::Scalar:
      return "scalar";
    case Backend::Avx2:
      return "avx2";
  }
  return "unknown";
}

bool backend_available(Backend backend) {
  switch (backend) {
    case Backend::Scalar:
      return true;
    case Backend::Avx2:
#if defined(__x86_64__) || defined(__i386__)
      return detail::avx2_table() != nullptr && __builtin_cpu_supports("avx2");
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& kernels(Backend backend) {
  if (!backend_available(backend)) {
    throw std::invalid_argument("SIMD backend not available: " + std::string(to_string(backend)));
  }
  return backend == Backend::Avx2 ? *detail::avx2_table() : detail::scalar_table();
}

namespace {

const KernelTable& select_table() {
  if (const char* forced = std::getenv("KSG_SIMD")) {
    const std::string name(forced);
    if (name == "scalar") return detail::scalar_table();
    if (name == "avx2" && backend_available(Backend::Avx2)) return *detail::avx2_table();
  }
  if (backend_available(Backend::Avx2)) return *detail::avx2_table();
  return detail::scalar_table();
}

}  // namespace

const KernelTable& kernels() {
  static const KernelTable& table = select_table();
  return table;
}

}  // namespace ksg::simd
