#pragma once

#include <stdexcept>
#include <string>

#include "xsynth/domains.hpp"

namespace testing_values {

inline xsynth::AbstractValue kb(const std::string &text) {
  auto v = xsynth::parse_abstract_value(text, xsynth::Domain::KnownBits, static_cast<unsigned>(text.size()));
  if (!v)
    throw std::invalid_argument(text);
  return *v;
}
inline xsynth::AbstractValue ur(unsigned w, uint64_t lo, uint64_t hi) { return xsynth::AbstractValue::urange(w, lo, hi); }
inline xsynth::AbstractValue sr(unsigned w, int64_t lo, int64_t hi) { return xsynth::AbstractValue::srange(w, lo, hi); }

} // namespace testing_values
