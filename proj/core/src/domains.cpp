#include "xsynth/domains.hpp"

#include <charconv>
#include <limits>

namespace xsynth {

std::string_view domain_tag(Domain d) {
  switch (d) {
  case Domain::KnownBits: return "kb";
  case Domain::URange: return "cru";
  case Domain::SRange: return "crs";
  }
  return "";
}

std::optional<Domain> parse_domain(std::string_view tag) {
  if (tag == "kb")
    return Domain::KnownBits;
  if (tag == "cru")
    return Domain::URange;
  if (tag == "crs")
    return Domain::SRange;
  return std::nullopt;
}

AbstractValue AbstractValue::bottom(Domain d, unsigned width) {
  AbstractValue v;
  v.domain_ = d;
  v.width_ = static_cast<uint8_t>(width);
  v.bottom_ = true;
  return v;
}

AbstractValue AbstractValue::top(Domain d, unsigned width) {
  const uint64_t m = width_mask(width);
  switch (d) {
  case Domain::KnownBits: return from_fields(d, width, 0, 0);
  case Domain::URange: return from_fields(d, width, 0, m);
  case Domain::SRange: return from_fields(d, width, sign_bit(width), m >> 1);
  }
  return bottom(d, width);
}

AbstractValue AbstractValue::from_fields(Domain d, unsigned width, uint64_t f0, uint64_t f1) {
  assert(width >= 1 && width <= kMaxWidth);
  const uint64_t m = width_mask(width);
  f0 &= m;
  f1 &= m;
  if (raw_is_bottom(d, width, f0, f1))
    return bottom(d, width);
  AbstractValue v;
  v.f0_ = f0;
  v.f1_ = f1;
  v.domain_ = d;
  v.width_ = static_cast<uint8_t>(width);
  v.bottom_ = false;
  return v;
}

bool AbstractValue::is_top() const { return *this == AbstractValue::top(domain_, width_); }

bool raw_leq(Domain d, unsigned w, uint64_t a0, uint64_t a1, uint64_t b0, uint64_t b1) {
  if (raw_is_bottom(d, w, a0, a1))
    return true;
  if (raw_is_bottom(d, w, b0, b1))
    return false;
  switch (d) {
  case Domain::KnownBits: return (b0 & ~a0) == 0 && (b1 & ~a1) == 0;
  case Domain::URange: return b0 <= a0 && a1 <= b1;
  case Domain::SRange: return !slt(a0, b0, w) && !slt(b1, a1, w);
  }
  return false;
}

AbstractValue top(Domain d, unsigned width) { return AbstractValue::top(d, width); }

AbstractValue meet(const AbstractValue &a, const AbstractValue &b) {
  assert(a.domain() == b.domain() && a.width() == b.width());
  if (a.is_bottom() || b.is_bottom())
    return AbstractValue::bottom(a.domain(), a.width());
  uint64_t o0 = 0, o1 = 0;
  raw_meet(a.domain(), a.width(), a.field0(), a.field1(), b.field0(), b.field1(), o0, o1);
  return AbstractValue::from_fields(a.domain(), a.width(), o0, o1);
}

AbstractValue join(const AbstractValue &a, const AbstractValue &b) {
  assert(a.domain() == b.domain() && a.width() == b.width());
  if (a.is_bottom())
    return b;
  if (b.is_bottom())
    return a;
  const unsigned w = a.width();
  switch (a.domain()) {
  case Domain::KnownBits:
    return AbstractValue::known_bits(w, a.zero() & b.zero(), a.one() & b.one());
  case Domain::URange:
    return AbstractValue::urange(w, prim::umin(a.lo(), b.lo()), prim::umax(a.hi(), b.hi()));
  case Domain::SRange:
    return AbstractValue::from_fields(Domain::SRange, w, prim::smin(a.lo(), b.lo(), w),
                                      prim::smax(a.hi(), b.hi(), w));
  }
  return a;
}

AbstractValue beta(Domain d, BitVec c) {
  if (d == Domain::KnownBits)
    return AbstractValue::known_bits(c.width(), ~c.bits(), c.bits());
  return AbstractValue::from_fields(d, c.width(), c.bits(), c.bits());
}

bool contains(const AbstractValue &a, BitVec c) {
  assert(a.width() == c.width());
  if (a.is_bottom())
    return false;
  return raw_contains(a.domain(), a.width(), a.field0(), a.field1(), c.bits());
}

bool leq(const AbstractValue &a, const AbstractValue &b) {
  assert(a.domain() == b.domain() && a.width() == b.width());
  if (a.is_bottom())
    return true;
  if (b.is_bottom())
    return false;
  return raw_leq(a.domain(), a.width(), a.field0(), a.field1(), b.field0(), b.field1());
}

unsigned size(const AbstractValue &a) {
  assert(!a.is_bottom());
  return raw_size(a.domain(), a.width(), a.field0(), a.field1());
}

unsigned size_or_zero(const AbstractValue &a) { return a.is_bottom() ? 0 : size(a); }

std::vector<AbstractValue> enumerate(Domain d, unsigned width) {
  assert(width <= 8);
  std::vector<AbstractValue> out;
  const uint64_t n = uint64_t{1} << width;
  if (d == Domain::KnownBits) {
    // Each bit takes one of {0, 1, ?}; iterate the base-3 digits.
    uint64_t count = 1;
    for (unsigned i = 0; i < width; ++i)
      count *= 3;
    out.reserve(count);
    for (uint64_t code = 0; code < count; ++code) {
      uint64_t zero = 0, one = 0, rest = code;
      for (unsigned i = 0; i < width; ++i, rest /= 3) {
        if (rest % 3 == 0)
          zero |= uint64_t{1} << i;
        else if (rest % 3 == 1)
          one |= uint64_t{1} << i;
      }
      out.push_back(AbstractValue::known_bits(width, zero, one));
    }
    return out;
  }
  out.reserve(n * (n + 1) / 2);
  // Signed ranges walk the patterns in signed order by starting at the minimum.
  const uint64_t start = d == Domain::SRange ? sign_bit(width) : 0;
  const uint64_t m = width_mask(width);
  for (uint64_t i = 0; i < n; ++i)
    for (uint64_t j = i; j < n; ++j)
      out.push_back(AbstractValue::from_fields(d, width, (start + i) & m, (start + j) & m));
  return out;
}

AbstractValue sample(Domain d, unsigned width, Rng &rng) {
  const uint64_t m = width_mask(width);
  if (d == Domain::KnownBits) {
    std::uniform_int_distribution<int> trit(0, 2);
    uint64_t zero = 0, one = 0;
    for (unsigned i = 0; i < width; ++i) {
      const int t = trit(rng);
      if (t == 0)
        zero |= uint64_t{1} << i;
      else if (t == 1)
        one |= uint64_t{1} << i;
    }
    return AbstractValue::known_bits(width, zero, one);
  }
  uint64_t a = rng() & m;
  uint64_t b = rng() & m;
  const bool swap = d == Domain::URange ? b < a : slt(b, a, width);
  if (swap)
    std::swap(a, b);
  return AbstractValue::from_fields(d, width, a, b);
}

uint64_t concretization_size(const AbstractValue &a) {
  if (a.is_bottom())
    return 0;
  if (a.domain() == Domain::KnownBits) {
    const unsigned u = size(a);
    return u >= 64 ? std::numeric_limits<uint64_t>::max() : uint64_t{1} << u;
  }
  const uint64_t gap = (a.hi() - a.lo()) & width_mask(a.width());
  return gap == std::numeric_limits<uint64_t>::max() ? gap : gap + 1;
}

uint64_t sample_concrete(const AbstractValue &a, Rng &rng) {
  assert(!a.is_bottom());
  const uint64_t m = width_mask(a.width());
  if (a.domain() == Domain::KnownBits) {
    const uint64_t unknown = ~(a.zero() | a.one()) & m;
    return a.one() | (rng() & unknown);
  }
  const uint64_t gap = (a.hi() - a.lo()) & m;
  const uint64_t off = std::uniform_int_distribution<uint64_t>(0, gap)(rng);
  return (a.lo() + off) & m;
}

std::string to_string(const AbstractValue &a) {
  if (a.is_bottom())
    return "bottom";
  const unsigned w = a.width();
  if (a.domain() == Domain::KnownBits) {
    std::string s(w, '?');
    for (unsigned i = 0; i < w; ++i) {
      if ((a.zero() >> i) & 1)
        s[w - 1 - i] = '0';
      else if ((a.one() >> i) & 1)
        s[w - 1 - i] = '1';
    }
    return s;
  }
  if (a.domain() == Domain::URange)
    return "[" + std::to_string(a.lo()) + "," + std::to_string(a.hi()) + "]";
  return "[" + std::to_string(sign_extend(a.lo(), w)) + "," + std::to_string(sign_extend(a.hi(), w)) +
         "]";
}

namespace {

template <class T> std::optional<T> parse_number(std::string_view s) {
  T v{};
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    return std::nullopt;
  return v;
}

} // namespace

std::optional<AbstractValue> parse_abstract_value(std::string_view text, Domain d, unsigned width) {
  if (text == "bottom")
    return AbstractValue::bottom(d, width);
  if (d == Domain::KnownBits) {
    if (text.size() != width)
      return std::nullopt;
    uint64_t zero = 0, one = 0;
    for (unsigned i = 0; i < width; ++i) {
      const char ch = text[width - 1 - i];
      if (ch == '0')
        zero |= uint64_t{1} << i;
      else if (ch == '1')
        one |= uint64_t{1} << i;
      else if (ch != '?')
        return std::nullopt;
    }
    return AbstractValue::known_bits(width, zero, one);
  }
  if (text.size() < 5 || text.front() != '[' || text.back() != ']')
    return std::nullopt;
  const std::string_view body = text.substr(1, text.size() - 2);
  const std::size_t comma = body.find(',');
  if (comma == std::string_view::npos)
    return std::nullopt;
  const std::string_view a = body.substr(0, comma), b = body.substr(comma + 1);
  const uint64_t m = width_mask(width);
  uint64_t lo = 0, hi = 0;
  if (d == Domain::URange) {
    auto x = parse_number<uint64_t>(a), y = parse_number<uint64_t>(b);
    if (!x || !y || *x > m || *y > m)
      return std::nullopt;
    lo = *x;
    hi = *y;
  } else {
    auto x = parse_number<int64_t>(a), y = parse_number<int64_t>(b);
    if (!x || !y || sign_extend(static_cast<uint64_t>(*x) & m, width) != *x ||
        sign_extend(static_cast<uint64_t>(*y) & m, width) != *y)
      return std::nullopt;
    lo = static_cast<uint64_t>(*x);
    hi = static_cast<uint64_t>(*y);
  }
  AbstractValue v = AbstractValue::from_fields(d, width, lo, hi);
  if (v.is_bottom())
    return std::nullopt;
  return v;
}

} // namespace xsynth
