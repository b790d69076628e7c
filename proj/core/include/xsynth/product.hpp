#pragma once

#include <optional>

#include "xsynth/domains.hpp"

namespace xsynth {

/// Pair of a known-bits value and a range value over the same concrete set.
struct ProductValue {
  AbstractValue kb;
  AbstractValue rng;

  friend bool operator==(const ProductValue &, const ProductValue &) = default;
};

/// Smallest range of the range's kind containing γ(kb).
AbstractValue kb_range_hull(const AbstractValue &kb, Domain range_domain);
/// Known bits shared by every element of a range: the common leading bits
/// of its endpoints.
AbstractValue range_known_prefix(const AbstractValue &rng);

/// Mutual refinement iterated to a fixpoint (at most 2·width rounds);
/// std::nullopt when the components are disjoint.
std::optional<ProductValue> reduce(const ProductValue &p);

/// α of γ(kb) ∩ γ(rng) in each component, by enumeration (width ≤ 16).
std::optional<ProductValue> reduce_exact(const ProductValue &p);

} // namespace xsynth
