#pragma once

// Round-trip-safe text formatting for floating-point values.

#include <charconv>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <system_error>

namespace scalemix {

// Shortest decimal string that parses back to exactly the same double
// ("inf", "-inf", and "nan" spelled out for the non-finite values).
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  if (res.ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& text) {
  const char* begin = text.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || end != begin + text.size())
    throw std::invalid_argument("parse_double: not a number: '" + text + "'");
  return v;
}

}  // namespace scalemix
