#include <atomic>
#include <cstdlib>
#include <cstring>

#include "fairgeo/error.hpp"
#include "fairgeo/kernels.hpp"

namespace fairgeo::kernels {

namespace {

Backend initial_backend() noexcept {
  const char* env = std::getenv("FAIRGEO_SIMD");
  if (env != nullptr && std::strcmp(env, "scalar") == 0) return Backend::Scalar;
  return avx2_supported() ? Backend::Avx2 : Backend::Scalar;
}

std::atomic<Backend>& backend_slot() noexcept {
  static std::atomic<Backend> slot{initial_backend()};
  return slot;
}

}  // namespace

bool avx2_supported() noexcept {
#if defined(__x86_64__) || defined(_M_X64)
  static const bool supported = [] {
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") != 0;
  }();
  return supported;
#else
  return false;
#endif
}

Backend active_backend() noexcept { return backend_slot().load(std::memory_order_relaxed); }

void set_backend(Backend backend) {
  if (backend == Backend::Avx2 && !avx2_supported())
    throw ValidationError("AVX2 backend requested but the CPU does not support it");
  backend_slot().store(backend, std::memory_order_relaxed);
}

const char* backend_name(Backend backend) noexcept {
  return backend == Backend::Avx2 ? "avx2" : "scalar";
}

void evaluate_row(const BinaryChannelModel& model, double a, std::span<const double> b_values,
                  std::span<double> objective, std::span<std::uint8_t> feasible) {
  if (active_backend() == Backend::Avx2)
    avx2::evaluate_row(model, a, b_values, objective, feasible);
  else
    scalar::evaluate_row(model, a, b_values, objective, feasible);
}

void log(std::span<const double> in, std::span<double> out) {
  if (active_backend() == Backend::Avx2)
    avx2::log(in, out);
  else
    scalar::log(in, out);
}

}  // namespace fairgeo::kernels
