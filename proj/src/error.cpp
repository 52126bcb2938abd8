#include "fairgeo/error.hpp"

#include <cstdio>
#include <mutex>
#include <utility>

namespace fairgeo {

namespace {

std::mutex g_warning_mutex;
WarningHandler g_warning_handler;

std::string infeasible_message(const std::string& conditional, std::size_t index, double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", value);
  return "infeasible epsilon: " + conditional + " entry " + std::to_string(index) +
         " is negative (" + buf + ")";
}

}  // namespace

InfeasibleEpsilonError::InfeasibleEpsilonError(std::string conditional, std::size_t index,
                                               double value)
    : Error(ErrorKind::InfeasibleEpsilon, infeasible_message(conditional, index, value)),
      conditional_(std::move(conditional)),
      index_(index),
      value_(value) {}

int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Parse: return 2;
    case ErrorKind::Validation: return 3;
    case ErrorKind::InfeasibleEpsilon: return 4;
    case ErrorKind::Numerical: return 5;
  }
  return 1;
}

void set_warning_handler(WarningHandler handler) {
  std::lock_guard lock(g_warning_mutex);
  g_warning_handler = std::move(handler);
}

void warn(std::string_view message) {
  std::lock_guard lock(g_warning_mutex);
  if (g_warning_handler) {
    g_warning_handler(message);
    return;
  }
  std::fprintf(stderr, "warning: %.*s\n", static_cast<int>(message.size()), message.data());
}

}  // namespace fairgeo
