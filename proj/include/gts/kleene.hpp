#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

namespace gts {

/// The three truth values of Kleene logic. The numeric encoding follows the
/// logical order 0 <= 1/2 <= 1, so conjunction and disjunction are plain
/// min/max on the underlying integer.
enum class TruthValue : std::uint8_t {
  False = 0,
  Maybe = 1,
  True = 2,
};

inline constexpr TruthValue conj(TruthValue a, TruthValue b) {
  return a < b ? a : b;
}

inline constexpr TruthValue disj(TruthValue a, TruthValue b) {
  return a > b ? a : b;
}

inline constexpr TruthValue neg(TruthValue a) {
  switch (a) {
  case TruthValue::False: return TruthValue::True;
  case TruthValue::True: return TruthValue::False;
  default: return TruthValue::Maybe;
  }
}

inline constexpr TruthValue implies(TruthValue a, TruthValue b) {
  return disj(neg(a), b);
}

/// Information order: a value is below 1/2 ("unknown") and below itself.
inline constexpr bool info_le(TruthValue a, TruthValue b) {
  return a == b || b == TruthValue::Maybe;
}

/// Logical order 0 <= 1/2 <= 1.
inline constexpr bool logical_le(TruthValue a, TruthValue b) {
  return a <= b;
}

/// Least upper bound in the information order.
inline constexpr TruthValue info_join(TruthValue a, TruthValue b) {
  return a == b ? a : TruthValue::Maybe;
}

inline constexpr std::string_view to_text(TruthValue v) {
  switch (v) {
  case TruthValue::False: return "0";
  case TruthValue::True: return "1";
  default: return "1/2";
  }
}

inline constexpr std::optional<TruthValue> truth_value_from_text(std::string_view text) {
  if (text == "0") return TruthValue::False;
  if (text == "1/2") return TruthValue::Maybe;
  if (text == "1") return TruthValue::True;
  return std::nullopt;
}

} // namespace gts
