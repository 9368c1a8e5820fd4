#pragma once

#include <array>
#include <cctype>
#include <string>
#include <string_view>

#include "resume_snn/errors.hpp"

namespace resume_snn {

enum class LogicalOp { kTrue, kJ0, kAnd, kXor };

inline constexpr std::array kAllOps{LogicalOp::kTrue, LogicalOp::kJ0, LogicalOp::kAnd, LogicalOp::kXor};

constexpr bool evaluate(LogicalOp op, bool j0, bool j1) {
  switch (op) {
    case LogicalOp::kTrue: return true;
    case LogicalOp::kJ0: return j0;
    case LogicalOp::kAnd: return j0 && j1;
    case LogicalOp::kXor: return j0 != j1;
  }
  return false;
}

constexpr std::string_view to_string(LogicalOp op) {
  switch (op) {
    case LogicalOp::kTrue: return "true";
    case LogicalOp::kJ0: return "j0";
    case LogicalOp::kAnd: return "and";
    case LogicalOp::kXor: return "xor";
  }
  return "?";
}

inline LogicalOp parse_op(std::string_view text) {
  std::string lower(text);
  for (auto& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  for (auto op : kAllOps) {
    if (lower == to_string(op)) return op;
  }
  throw ConfigError("op: expected one of true|j0|and|xor, got '" + std::string(text) + "'");
}

/// Test cases in fixed order (F,F), (F,T), (T,F), (T,T); index bit 1 is J0, bit 0 is J1.
constexpr bool case_j0(int c) { return (c & 2) != 0; }
constexpr bool case_j1(int c) { return (c & 1) != 0; }
inline constexpr int kNumCases = 4;

}  // namespace resume_snn
