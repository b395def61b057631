#include <cstdlib>
#include <string>

#include "atr/error.hpp"
#include "atr/simd/kernels.hpp"

namespace atr::simd {
namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable& select() {
  if (const char* env = std::getenv("ATR_SIMD")) {
    const std::string want(env);
    if (want == "scalar") return table(Level::Scalar);
    if (want == "avx2") return table(Level::Avx2);
    if (want == "neon") return table(Level::Neon);
  }
  if (supported(Level::Avx2)) return *detail::avx2_table();
  if (supported(Level::Neon)) return *detail::neon_table();
  return detail::kScalarTable;
}

}  // namespace

bool supported(Level level) {
  switch (level) {
    case Level::Scalar: return true;
    case Level::Avx2: return detail::avx2_table() != nullptr && cpu_has_avx2();
    case Level::Neon: return detail::neon_table() != nullptr;
  }
  return false;
}

std::string_view name(Level level) {
  switch (level) {
    case Level::Scalar: return "scalar";
    case Level::Avx2: return "avx2";
    case Level::Neon: return "neon";
  }
  return "unknown";
}

const KernelTable& table(Level level) {
  if (!supported(level)) {
    throw ConfigError("SIMD level '" + std::string(name(level)) + "' is not available on this CPU");
  }
  switch (level) {
    case Level::Avx2: return *detail::avx2_table();
    case Level::Neon: return *detail::neon_table();
    default: return detail::kScalarTable;
  }
}

const KernelTable& active() {
  static const KernelTable& chosen = select();
  return chosen;
}

}  // namespace atr::simd
