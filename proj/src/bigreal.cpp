#include "shabc/bigreal.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <vector>

namespace shabc {

namespace {
std::atomic<unsigned> g_default_digits{BigReal::kDefaultDigits};

mpfr_prec_t pick_bits(unsigned digits) {
  if (digits == 0) digits = g_default_digits.load();
  return BigReal::bits_for_digits(digits);
}
}  // namespace

void BigReal::set_default_digits(unsigned digits) {
  if (digits < kMinDigits)
    throw std::invalid_argument("BigReal: precision below minimum");
  g_default_digits.store(digits);
}

unsigned BigReal::default_digits() { return g_default_digits.load(); }

mpfr_prec_t BigReal::bits_for_digits(unsigned digits) {
  if (digits < kMinDigits)
    throw std::invalid_argument("BigReal: precision below minimum");
  // ceil(digits * log2(10)) plus guard bits.
  return static_cast<mpfr_prec_t>(std::ceil(digits * 3.3219280948873623)) + 8;
}

BigReal::BigReal() { mpfr_init2(v_, pick_bits(0)); }

BigReal::BigReal(long v, unsigned digits) {
  mpfr_init2(v_, pick_bits(digits));
  mpfr_set_si(v_, v, MPFR_RNDN);
}

BigReal::BigReal(unsigned long v, unsigned digits) {
  mpfr_init2(v_, pick_bits(digits));
  mpfr_set_ui(v_, v, MPFR_RNDN);
}

BigReal::BigReal(double v, unsigned digits) {
  mpfr_init2(v_, pick_bits(digits));
  mpfr_set_d(v_, v, MPFR_RNDN);
}

BigReal::BigReal(const mpz_class& v, unsigned digits) {
  mpfr_init2(v_, pick_bits(digits));
  mpfr_set_z(v_, v.get_mpz_t(), MPFR_RNDN);
}

BigReal::BigReal(const std::string& decimal, unsigned digits) {
  mpfr_init2(v_, pick_bits(digits));
  if (mpfr_set_str(v_, decimal.c_str(), 10, MPFR_RNDN) != 0)
    throw std::invalid_argument("BigReal: bad decimal literal: " + decimal);
}

BigReal::BigReal(const BigReal& o) {
  mpfr_init2(v_, mpfr_get_prec(o.v_));
  mpfr_set(v_, o.v_, MPFR_RNDN);
}

BigReal::BigReal(BigReal&& o) noexcept {
  mpfr_init2(v_, mpfr_get_prec(o.v_));
  mpfr_swap(v_, o.v_);
}

BigReal& BigReal::operator=(const BigReal& o) {
  if (this != &o) {
    mpfr_set_prec(v_, mpfr_get_prec(o.v_));
    mpfr_set(v_, o.v_, MPFR_RNDN);
  }
  return *this;
}

BigReal& BigReal::operator=(BigReal&& o) noexcept {
  if (this != &o) mpfr_swap(v_, o.v_);
  return *this;
}

BigReal::~BigReal() { mpfr_clear(v_); }

namespace {
mpfr_prec_t join_prec(const BigReal& a, const BigReal& b) {
  return std::max(a.precision_bits(), b.precision_bits());
}
}  // namespace

#define SHABC_BIGREAL_BINOP(op, fn)                          \
  BigReal BigReal::operator op(const BigReal& o) const {     \
    BigReal r(join_prec(*this, o), RawPrec{});                    \
    fn(r.v_, v_, o.v_, MPFR_RNDN);                           \
    return r;                                                \
  }                                                          \
  BigReal& BigReal::operator op##=(const BigReal& o) {       \
    if (o.precision_bits() > precision_bits()) {             \
      BigReal r(join_prec(*this, o), RawPrec{});                  \
      fn(r.v_, v_, o.v_, MPFR_RNDN);                         \
      *this = std::move(r);                                  \
    } else {                                                 \
      fn(v_, v_, o.v_, MPFR_RNDN);                           \
    }                                                        \
    return *this;                                            \
  }

SHABC_BIGREAL_BINOP(+, mpfr_add)
SHABC_BIGREAL_BINOP(-, mpfr_sub)
SHABC_BIGREAL_BINOP(*, mpfr_mul)
SHABC_BIGREAL_BINOP(/, mpfr_div)
#undef SHABC_BIGREAL_BINOP

BigReal BigReal::operator-() const {
  BigReal r(precision_bits(), RawPrec{});
  mpfr_neg(r.v_, v_, MPFR_RNDN);
  return r;
}

BigReal BigReal::abs() const {
  BigReal r(precision_bits(), RawPrec{});
  mpfr_abs(r.v_, v_, MPFR_RNDN);
  return r;
}

BigReal BigReal::sqrt() const {
  if (sign() < 0) throw std::domain_error("BigReal::sqrt of negative value");
  BigReal r(precision_bits(), RawPrec{});
  mpfr_sqrt(r.v_, v_, MPFR_RNDN);
  return r;
}

BigReal BigReal::log() const {
  if (sign() <= 0 || is_nan())
    throw std::domain_error("BigReal::log of non-positive value");
  BigReal r(precision_bits(), RawPrec{});
  mpfr_log(r.v_, v_, MPFR_RNDN);
  return r;
}

BigReal BigReal::exp() const {
  BigReal r(precision_bits(), RawPrec{});
  mpfr_exp(r.v_, v_, MPFR_RNDN);
  return r;
}

BigReal BigReal::pow(const BigReal& e) const {
  BigReal r(join_prec(*this, e), RawPrec{});
  mpfr_pow(r.v_, v_, e.v_, MPFR_RNDN);
  return r;
}

long long BigReal::to_ll_rounded() const {
  mpz_class z = to_mpz_rounded();
  if (!z.fits_slong_p())
    throw std::overflow_error("BigReal: rounded value exceeds long long");
  return static_cast<long long>(z.get_si());
}

mpz_class BigReal::to_mpz_rounded() const {
  if (is_nan()) throw std::domain_error("BigReal: rounding NaN to integer");
  mpz_class z;
  mpfr_get_z(z.get_mpz_t(), v_, MPFR_RNDN);
  return z;
}

std::string BigReal::str(unsigned sig_digits) const {
  if (sig_digits == 0) sig_digits = 1;
  char* s = nullptr;
  int n = mpfr_asprintf(&s, "%.*Rg", static_cast<int>(sig_digits), v_);
  if (n < 0) throw std::runtime_error("BigReal: formatting failed");
  std::string out(s);
  mpfr_free_str(s);
  return out;
}

std::string BigReal::str_sig_fixed(unsigned sig) const {
  if (sig == 0) sig = 1;
  if (is_nan()) return "nan";
  if (is_zero()) {
    std::string out = "0.";
    out.append(sig - 1 ? sig - 1 : 1, '0');
    return out;
  }
  // Decimal exponent e with |v| in [10^(e-1), 10^e).
  double l10 = std::fabs(mpfr_get_d(v_, MPFR_RNDN));
  long e = static_cast<long>(std::floor(std::log10(l10))) + 1;
  // log10 via doubles can be off by one near powers of ten; fix up exactly.
  auto pow10 = [&](long k) {
    BigReal t(10L, 0);
    BigReal r(1L, 0);
    mpfr_pow_si(r.v_, t.v_, k, MPFR_RNDN);
    return r;
  };
  BigReal av = abs();
  while (av >= pow10(e)) ++e;
  while (av < pow10(e - 1)) --e;
  long decimals = static_cast<long>(sig) - e;
  if (decimals < 0) {
    // Integer wider than sig digits: render rounded integer as-is.
    char* s = nullptr;
    if (mpfr_asprintf(&s, "%.0Rf", v_) < 0)
      throw std::runtime_error("BigReal: formatting failed");
    std::string out(s);
    mpfr_free_str(s);
    return out;
  }
  char* s = nullptr;
  if (mpfr_asprintf(&s, "%.*Rf", static_cast<int>(decimals), v_) < 0)
    throw std::runtime_error("BigReal: formatting failed");
  std::string out(s);
  mpfr_free_str(s);
  // Rounding may bump the value into the next decade ("9.99995" -> "10.0000"
  // at sig=6 has 6 significant digits already; tolerate one extra).
  return out;
}

std::string BigReal::hex() const {
  char* s = nullptr;
  if (mpfr_asprintf(&s, "%Ra", v_) < 0)
    throw std::runtime_error("BigReal: hex formatting failed");
  std::string out(s);
  mpfr_free_str(s);
  out += "@";
  out += std::to_string(static_cast<long>(precision_bits()));
  return out;
}

BigReal BigReal::from_hex(const std::string& s) {
  auto at = s.rfind('@');
  if (at == std::string::npos)
    throw std::invalid_argument("BigReal: hex literal missing precision tag");
  long bits = std::stol(s.substr(at + 1));
  if (bits < 2) throw std::invalid_argument("BigReal: bad precision tag");
  BigReal r(static_cast<mpfr_prec_t>(bits), RawPrec{});
  std::string body = s.substr(0, at);
  if (mpfr_set_str(r.v_, body.c_str(), 16, MPFR_RNDN) != 0)
    throw std::invalid_argument("BigReal: bad hex literal: " + body);
  return r;
}

BigReal BigReal::pi(unsigned digits) {
  BigReal r(pick_bits(digits), RawPrec{});
  mpfr_const_pi(r.v_, MPFR_RNDN);
  return r;
}

BigReal BigReal::nan(unsigned digits) {
  BigReal r(pick_bits(digits), RawPrec{});
  mpfr_set_nan(r.v_);
  return r;
}

AgmResult agm_iterated(const BigReal& x, const BigReal& y) {
  if (x.sign() <= 0 || y.sign() <= 0 || x.is_nan() || y.is_nan())
    throw std::domain_error("agm requires positive arguments");
  mpfr_prec_t prec = std::max(x.precision_bits(), y.precision_bits());
  BigReal a = x, g = y;
  BigReal half(std::string("0.5"), 0);
  // Quadratic convergence: the iteration count is far below the bit
  // precision; the bound doubles as a runaway guard.
  unsigned max_iter = static_cast<unsigned>(prec);
  unsigned it = 0;
  for (; it < max_iter; ++it) {
    BigReal diff = (a - g).abs();
    if (diff.is_zero()) break;
    // Stop once |a-g| <= |a| * 2^(1-prec): further iterations only churn
    // rounding noise.
    mpfr_exp_t ea = mpfr_get_exp(a.raw());
    mpfr_exp_t ed = mpfr_get_exp(diff.raw());
    if (ed <= ea - static_cast<mpfr_exp_t>(prec) + 1) break;
    BigReal am = (a + g) * half;
    BigReal gm = (a * g).sqrt();
    a = std::move(am);
    g = std::move(gm);
  }
  if (it == max_iter)
    throw std::runtime_error("agm failed to converge");
  return AgmResult{(a + g) * half, it};
}

BigReal agm(const BigReal& x, const BigReal& y) {
  return agm_iterated(x, y).value;
}

}  // namespace shabc
