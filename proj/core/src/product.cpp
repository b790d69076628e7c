#include "xsynth/product.hpp"

#include <bit>
#include <cassert>

namespace xsynth {

AbstractValue kb_range_hull(const AbstractValue &kb, Domain range_domain) {
  const unsigned w = kb.width();
  if (kb.is_bottom())
    return AbstractValue::bottom(range_domain, w);
  const uint64_t m = width_mask(w);
  const uint64_t min_u = kb.one();
  const uint64_t max_u = ~kb.zero() & m;
  if (range_domain == Domain::URange)
    return AbstractValue::urange(w, min_u, max_u);
  const uint64_t sb = sign_bit(w);
  const bool sign_unknown = ((kb.zero() | kb.one()) & sb) == 0;
  if (!sign_unknown)
    return AbstractValue::from_fields(Domain::SRange, w, min_u, max_u);
  // Most negative member sets the sign bit; most positive clears it.
  return AbstractValue::from_fields(Domain::SRange, w, min_u | sb, max_u & ~sb);
}

AbstractValue range_known_prefix(const AbstractValue &rng) {
  const unsigned w = rng.width();
  if (rng.is_bottom())
    return AbstractValue::bottom(Domain::KnownBits, w);
  const uint64_t m = width_mask(w);
  const uint64_t diff = (rng.lo() ^ rng.hi()) & m;
  // Bits above the highest differing bit agree across the whole interval.
  const uint64_t known = diff == 0 ? m : ~prim::low_bits(static_cast<unsigned>(std::bit_width(diff))) & m;
  const uint64_t one = rng.lo() & known;
  return AbstractValue::known_bits(w, known & ~one, one);
}

std::optional<ProductValue> reduce(const ProductValue &p) {
  assert(p.kb.width() == p.rng.width() && p.kb.domain() == Domain::KnownBits);
  ProductValue cur = p;
  const unsigned rounds = 2 * p.kb.width();
  for (unsigned i = 0; i < rounds; ++i) {
    if (cur.kb.is_bottom() || cur.rng.is_bottom())
      return std::nullopt;
    const AbstractValue rng = meet(cur.rng, kb_range_hull(cur.kb, cur.rng.domain()));
    if (rng.is_bottom())
      return std::nullopt;
    const AbstractValue kb = meet(cur.kb, range_known_prefix(rng));
    if (kb.is_bottom())
      return std::nullopt;
    const ProductValue next{kb, rng};
    if (next == cur)
      break;
    cur = next;
  }
  return cur;
}

std::optional<ProductValue> reduce_exact(const ProductValue &p) {
  const unsigned w = p.kb.width();
  assert(w <= 16);
  AbstractValue kb = AbstractValue::bottom(Domain::KnownBits, w);
  AbstractValue rng = AbstractValue::bottom(p.rng.domain(), w);
  for (uint64_t c = 0; c <= width_mask(w); ++c) {
    const BitVec v(w, c);
    if (!contains(p.kb, v) || !contains(p.rng, v))
      continue;
    kb = join(kb, beta(Domain::KnownBits, v));
    rng = join(rng, beta(p.rng.domain(), v));
  }
  if (kb.is_bottom())
    return std::nullopt;
  return ProductValue{kb, rng};
}

} // namespace xsynth
