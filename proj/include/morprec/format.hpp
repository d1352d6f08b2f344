// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <charconv>
#include <string>

namespace morprec {

// Shortest decimal string that round-trips the value. std::to_string renders
// small numbers as "0.000000", which makes residuals in diagnostics useless.
inline std::string shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace morprec
