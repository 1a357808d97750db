#include "shabc/factored.hpp"

#include <algorithm>
#include <sstream>

namespace shabc {

namespace {

uint64_t mulmod_u64(uint64_t a, uint64_t b, uint64_t m) {
  return static_cast<uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

uint64_t powmod_u64(uint64_t a, uint64_t e, uint64_t m) {
  uint64_t r = 1 % m;
  a %= m;
  while (e) {
    if (e & 1) r = mulmod_u64(r, a, m);
    a = mulmod_u64(a, a, m);
    e >>= 1;
  }
  return r;
}

// Deterministic Miller-Rabin below 2^64 (this base set is proven sufficient).
bool is_prime_u64(uint64_t n) {
  if (n < 2) return false;
  for (uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull,
                     23ull, 29ull, 31ull, 37ull}) {
    if (n % p == 0) return n == p;
  }
  uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull,
                     23ull, 29ull, 31ull, 37ull}) {
    uint64_t x = powmod_u64(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int i = 1; i < s; ++i) {
      x = mulmod_u64(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

}  // namespace

bool is_prime(const mpz_class& n) {
  if (n <= 0) return false;
  if (n.fits_ulong_p() || mpz_sizeinbase(n.get_mpz_t(), 2) <= 64) {
    uint64_t v = 0;
    if (n.fits_ulong_p()) {
      v = n.get_ui();
    } else {
      // 64-bit value on a platform where unsigned long is narrower.
      mpz_class hi = n >> 32, lo = n & mpz_class(0xffffffffUL);
      v = (static_cast<uint64_t>(hi.get_ui()) << 32) | lo.get_ui();
    }
    return is_prime_u64(v);
  }
  return mpz_probab_prime_p(n.get_mpz_t(), 64) > 0;
}

FactoredInteger::FactoredInteger(int sign, std::vector<PrimePower> factors)
    : sign_(sign), factors_(std::move(factors)) {
  if (sign_ != 1 && sign_ != -1)
    throw ValidationError("factored integer: sign must be +1 or -1");
  std::sort(factors_.begin(), factors_.end(),
            [](const PrimePower& a, const PrimePower& b) { return a.p < b.p; });
  for (size_t i = 0; i < factors_.size(); ++i) {
    const auto& pp = factors_[i];
    if (pp.e == 0)
      throw ValidationError("factored integer: zero exponent for " +
                            pp.p.get_str());
    if (i > 0 && factors_[i - 1].p == pp.p)
      throw ValidationError("factored integer: repeated prime " +
                            pp.p.get_str());
    if (!is_prime(pp.p))
      throw ValidationError("factored integer: " + pp.p.get_str() +
                            " is not prime");
  }
  rebuild_and_check(nullptr);
}

void FactoredInteger::rebuild_and_check(const mpz_class* expected) {
  mpz_class v = 1;
  for (const auto& pp : factors_) {
    mpz_class q;
    mpz_pow_ui(q.get_mpz_t(), pp.p.get_mpz_t(), pp.e);
    v *= q;
  }
  if (sign_ < 0) v = -v;
  if (expected && v != *expected)
    throw InternalError("factored integer: cached value mismatch");
  value_ = v;
}

FactoredInteger FactoredInteger::from_prime(const mpz_class& p, unsigned e) {
  return FactoredInteger(1, {PrimePower{p, e}});
}

unsigned FactoredInteger::valuation(const mpz_class& p) const {
  for (const auto& pp : factors_)
    if (pp.p == p) return pp.e;
  return 0;
}

bool FactoredInteger::square_free() const {
  for (const auto& pp : factors_)
    if (pp.e > 1) return false;
  return true;
}

FactoredInteger FactoredInteger::operator*(const FactoredInteger& o) const {
  std::vector<PrimePower> out;
  out.reserve(factors_.size() + o.factors_.size());
  size_t i = 0, j = 0;
  while (i < factors_.size() || j < o.factors_.size()) {
    if (j == o.factors_.size() ||
        (i < factors_.size() && factors_[i].p < o.factors_[j].p)) {
      out.push_back(factors_[i++]);
    } else if (i == factors_.size() || o.factors_[j].p < factors_[i].p) {
      out.push_back(o.factors_[j++]);
    } else {
      out.push_back(PrimePower{factors_[i].p, factors_[i].e + o.factors_[j].e});
      ++i;
      ++j;
    }
  }
  FactoredInteger r;
  r.sign_ = sign_ * o.sign_;
  r.factors_ = std::move(out);
  mpz_class expect = value_ * o.value_;
  r.rebuild_and_check(&expect);
  return r;
}

FactoredInteger FactoredInteger::pow(unsigned e) const {
  if (e == 0) return one();
  FactoredInteger r = *this;
  r.sign_ = (sign_ < 0 && (e & 1)) ? -1 : 1;
  for (auto& pp : r.factors_) pp.e *= e;
  r.rebuild_and_check(nullptr);
  return r;
}

FactoredInteger FactoredInteger::negate() const {
  FactoredInteger r = *this;
  r.sign_ = -r.sign_;
  r.value_ = -r.value_;
  return r;
}

FactoredInteger FactoredInteger::abs() const {
  return sign_ < 0 ? negate() : *this;
}

FactoredInteger FactoredInteger::divide_exact(const FactoredInteger& o) const {
  std::vector<PrimePower> out;
  size_t j = 0;
  for (const auto& pp : factors_) {
    unsigned sub = 0;
    while (j < o.factors_.size() && o.factors_[j].p < pp.p)
      throw ValidationError("divide_exact: divisor has prime " +
                            o.factors_[j].p.get_str() + " not in dividend");
    if (j < o.factors_.size() && o.factors_[j].p == pp.p) sub = o.factors_[j++].e;
    if (sub > pp.e)
      throw ValidationError("divide_exact: exponent underflow at prime " +
                            pp.p.get_str());
    if (pp.e > sub) out.push_back(PrimePower{pp.p, pp.e - sub});
  }
  if (j < o.factors_.size())
    throw ValidationError("divide_exact: divisor has prime " +
                          o.factors_[j].p.get_str() + " not in dividend");
  FactoredInteger r;
  r.sign_ = sign_ * o.sign_;
  r.factors_ = std::move(out);
  mpz_class expect;
  mpz_divexact(expect.get_mpz_t(), value_.get_mpz_t(), o.value_.get_mpz_t());
  r.rebuild_and_check(&expect);
  return r;
}

FactoredInteger FactoredInteger::gcd(const FactoredInteger& a,
                                     const FactoredInteger& b) {
  std::vector<PrimePower> out;
  size_t i = 0, j = 0;
  while (i < a.factors_.size() && j < b.factors_.size()) {
    if (a.factors_[i].p < b.factors_[j].p) {
      ++i;
    } else if (b.factors_[j].p < a.factors_[i].p) {
      ++j;
    } else {
      out.push_back(PrimePower{a.factors_[i].p,
                               std::min(a.factors_[i].e, b.factors_[j].e)});
      ++i;
      ++j;
    }
  }
  FactoredInteger r;
  r.factors_ = std::move(out);
  r.sign_ = 1;
  r.rebuild_and_check(nullptr);
  return r;
}

FactoredInteger FactoredInteger::radical() const {
  FactoredInteger r = *this;
  r.sign_ = 1;
  for (auto& pp : r.factors_) pp.e = 1;
  r.rebuild_and_check(nullptr);
  return r;
}

std::string FactoredInteger::str() const {
  std::ostringstream os;
  if (sign_ < 0) os << '-';
  if (factors_.empty()) {
    os << '1';
    return os.str();
  }
  bool first = true;
  for (const auto& pp : factors_) {
    if (!first) os << ' ';
    first = false;
    os << pp.p.get_str();
    if (pp.e > 1) os << '^' << pp.e;
  }
  return os.str();
}

namespace {
bool is_sep(char c) {
  return c == ' ' || c == '\t' || c == '*';
}
}  // namespace

FactoredInteger parse_factored(std::string_view text) {
  // Accept the middle dot U+00B7 as a separator too.
  std::string s;
  s.reserve(text.size());
  for (size_t i = 0; i < text.size(); ++i) {
    if (i + 1 < text.size() && static_cast<unsigned char>(text[i]) == 0xC2 &&
        static_cast<unsigned char>(text[i + 1]) == 0xB7) {
      s += ' ';
      ++i;
    } else {
      s += text[i];
    }
  }
  size_t pos = 0;
  auto skip = [&] {
    while (pos < s.size() && is_sep(s[pos])) ++pos;
  };
  skip();
  int sign = 1;
  if (pos < s.size() && s[pos] == '-') {
    sign = -1;
    ++pos;
    skip();
  }
  if (pos >= s.size()) throw ValidationError("factored parse: empty input");
  std::vector<PrimePower> factors;
  bool saw_one = false;
  while (pos < s.size()) {
    size_t start = pos;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos])))
      ++pos;
    if (pos == start)
      throw ValidationError("factored parse: expected digit at offset " +
                            std::to_string(pos) + " in '" + s + "'");
    mpz_class p(s.substr(start, pos - start));
    unsigned long e = 1;
    if (pos < s.size() && s[pos] == '^') {
      ++pos;
      size_t es = pos;
      while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos])))
        ++pos;
      if (pos == es)
        throw ValidationError("factored parse: missing exponent after '^'");
      e = std::stoul(s.substr(es, pos - es));
      if (e == 0) throw ValidationError("factored parse: zero exponent");
    }
    if (pos < s.size() && !is_sep(s[pos]))
      throw ValidationError("factored parse: unexpected character '" +
                            std::string(1, s[pos]) + "'");
    skip();
    if (p == 1) {
      if (e != 1 || !factors.empty() || saw_one || pos < s.size())
        throw ValidationError("factored parse: '1' must stand alone");
      saw_one = true;
      continue;
    }
    factors.push_back(PrimePower{p, static_cast<unsigned>(e)});
  }
  if (saw_one) return sign < 0 ? FactoredInteger().negate() : FactoredInteger();
  if (factors.empty()) throw ValidationError("factored parse: empty input");
  return FactoredInteger(sign, std::move(factors));
}

}  // namespace shabc
