#pragma once

#include <cstdarg>
#include <cstdio>
#include <string>

namespace coopeq::detail {

// printf-style formatting into a std::string (gcc 11 has no std::format).
inline std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));

inline std::string fmt(const char* f, ...) {
  va_list args;
  va_start(args, f);
  va_list copy;
  va_copy(copy, args);
  const int len = std::vsnprintf(nullptr, 0, f, args);
  va_end(args);
  std::string out(len > 0 ? static_cast<std::size_t>(len) : 0, '\0');
  if (len > 0) std::vsnprintf(out.data(), out.size() + 1, f, copy);
  va_end(copy);
  return out;
}

}  // namespace coopeq::detail
