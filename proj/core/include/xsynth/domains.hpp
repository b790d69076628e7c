#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "xsynth/bitvec.hpp"

namespace xsynth {

using Rng = std::mt19937_64;

enum class Domain : uint8_t { KnownBits, URange, SRange };

std::string_view domain_tag(Domain d); // "kb", "cru", "crs"
std::optional<Domain> parse_domain(std::string_view tag);

/// Element of one of the three abstract domains, or Bottom.
///
/// Non-bottom values always satisfy their domain invariant: known-bits
/// masks are disjoint and range endpoints are ordered in the domain's order.
/// Field 0/1 are (zero, one) for known bits and (lo, hi) for ranges.
class AbstractValue {
public:
  AbstractValue() = default;

  static AbstractValue bottom(Domain d, unsigned width);
  static AbstractValue top(Domain d, unsigned width);
  /// Builds a value from raw fields; an ill-formed pair yields Bottom.
  static AbstractValue from_fields(Domain d, unsigned width, uint64_t f0, uint64_t f1);
  static AbstractValue known_bits(unsigned width, uint64_t zero, uint64_t one) {
    return from_fields(Domain::KnownBits, width, zero, one);
  }
  static AbstractValue urange(unsigned width, uint64_t lo, uint64_t hi) {
    return from_fields(Domain::URange, width, lo, hi);
  }
  static AbstractValue srange(unsigned width, int64_t lo, int64_t hi) {
    return from_fields(Domain::SRange, width, static_cast<uint64_t>(lo), static_cast<uint64_t>(hi));
  }

  Domain domain() const { return domain_; }
  unsigned width() const { return width_; }
  bool is_bottom() const { return bottom_; }
  bool is_top() const;

  uint64_t field0() const { return f0_; }
  uint64_t field1() const { return f1_; }
  uint64_t zero() const { return f0_; }
  uint64_t one() const { return f1_; }
  uint64_t lo() const { return f0_; }
  uint64_t hi() const { return f1_; }

  friend bool operator==(const AbstractValue &, const AbstractValue &) = default;

private:
  uint64_t f0_ = 0;
  uint64_t f1_ = 0;
  Domain domain_ = Domain::KnownBits;
  uint8_t width_ = 1;
  bool bottom_ = true;
};

/// True when raw fields do not form a well-formed element.
inline bool raw_is_bottom(Domain d, unsigned w, uint64_t f0, uint64_t f1) {
  switch (d) {
  case Domain::KnownBits: return (f0 & f1) != 0;
  case Domain::URange: return f0 > f1;
  case Domain::SRange: return slt(f1, f0, w);
  }
  return true;
}

/// Canonical ill-formed field pair standing for Bottom.
inline std::pair<uint64_t, uint64_t> raw_bottom(Domain d, unsigned w) {
  const uint64_t m = width_mask(w);
  switch (d) {
  case Domain::KnownBits: return {m, m};
  case Domain::URange: return {m, 0};
  case Domain::SRange: return {m >> 1, sign_bit(w)};
  }
  return {m, m};
}

inline bool raw_contains(Domain d, unsigned w, uint64_t f0, uint64_t f1, uint64_t c) {
  switch (d) {
  case Domain::KnownBits: return (f0 & f1) == 0 && (c & f0) == 0 && (~c & f1) == 0;
  case Domain::URange: return f0 <= c && c <= f1;
  case Domain::SRange: {
    const int64_t s = sign_extend(c, w);
    return sign_extend(f0, w) <= s && s <= sign_extend(f1, w);
  }
  }
  return false;
}

/// Size of a well-formed element given by raw fields; 0 for Bottom.
inline unsigned raw_size(Domain d, unsigned w, uint64_t f0, uint64_t f1) {
  if (raw_is_bottom(d, w, f0, f1))
    return 0;
  if (d == Domain::KnownBits)
    return static_cast<unsigned>(std::popcount(~(f0 | f1) & width_mask(w)));
  const uint64_t gap = (f1 - f0) & width_mask(w);
  return gap == 0 ? 0 : static_cast<unsigned>(std::bit_width(gap) - 1);
}

/// Raw meet; the result may be ill-formed, which encodes Bottom.
inline void raw_meet(Domain d, unsigned w, uint64_t a0, uint64_t a1, uint64_t b0, uint64_t b1,
                     uint64_t &o0, uint64_t &o1) {
  switch (d) {
  case Domain::KnownBits:
    o0 = a0 | b0;
    o1 = a1 | b1;
    return;
  case Domain::URange:
    o0 = a0 > b0 ? a0 : b0;
    o1 = a1 < b1 ? a1 : b1;
    return;
  case Domain::SRange:
    o0 = prim::smax(a0, b0, w);
    o1 = prim::smin(a1, b1, w);
    return;
  }
}

/// Raw a ⊑ b where either side may be Bottom.
bool raw_leq(Domain d, unsigned w, uint64_t a0, uint64_t a1, uint64_t b0, uint64_t b1);

AbstractValue top(Domain d, unsigned width);
AbstractValue meet(const AbstractValue &a, const AbstractValue &b);
AbstractValue join(const AbstractValue &a, const AbstractValue &b);
AbstractValue beta(Domain d, BitVec c);
bool contains(const AbstractValue &a, BitVec c);
/// Lattice order a ⊑ b.
bool leq(const AbstractValue &a, const AbstractValue &b);
/// Precondition: `a` is not Bottom.
unsigned size(const AbstractValue &a);
/// size() with Bottom mapped to 0.
unsigned size_or_zero(const AbstractValue &a);

std::vector<AbstractValue> enumerate(Domain d, unsigned width);
AbstractValue sample(Domain d, unsigned width, Rng &rng);

/// |γ(a)|, saturating at UINT64_MAX.
uint64_t concretization_size(const AbstractValue &a);
/// Uniform draw from γ(a); precondition: `a` is not Bottom.
uint64_t sample_concrete(const AbstractValue &a, Rng &rng);

/// Calls f(bits) for every member of γ(a); stops early when f returns false.
template <class F> void for_each_concrete(const AbstractValue &a, F &&f) {
  if (a.is_bottom())
    return;
  if (a.domain() == Domain::KnownBits) {
    const uint64_t unknown = ~(a.zero() | a.one()) & width_mask(a.width());
    uint64_t s = 0;
    do {
      if (!f(a.one() | s))
        return;
      s = (s - unknown) & unknown;
    } while (s != 0);
    return;
  }
  const uint64_t m = width_mask(a.width());
  for (uint64_t c = a.lo();; c = (c + 1) & m) {
    if (!f(c))
      return;
    if (c == a.hi())
      return;
  }
}

std::string to_string(const AbstractValue &a);
std::optional<AbstractValue> parse_abstract_value(std::string_view text, Domain d, unsigned width);

} // namespace xsynth
