#include "shabc/sha.hpp"

#include "shabc/factorize.hpp"

#include <cmath>

namespace shabc {

BigReal sha_from_l(const IsogenyClass& cls, const BigReal& l_value, int k) {
  unsigned digits = 0;  // default precision; period factor matches l_value op
  return l_value * period_factor(cls, k, digits);
}

BigReal goldfeld_szpiro(const IsogenyClass& cls, const BigReal& sha_value,
                        unsigned digits) {
  BigReal n(cls.n_value(), digits);
  return sha_value / n.sqrt();
}

SnapResult snap_sha(const IsogenyClass& cls, const BigReal& sha_value,
                    double tol) {
  SnapResult r;
  if (sha_value.sign() < 0) return r;
  BigReal y = sha_value.sqrt();
  for (int i = 0; i < cls.t; ++i) y /= BigReal(2L);
  double yd = y.to_double();
  r.integer = std::llround(yd);
  r.residual = std::abs(yd - static_cast<double>(r.integer));
  r.root = r.integer << cls.t;
  r.ok = r.integer >= 0 && r.residual < tol;
  return r;
}

BigReal truncation_terms(const IsogenyClass& cls, const BigReal& sha_value,
                         const BigReal& g_value, const BigReal& l_value,
                         double K) {
  BigReal two_pi = BigReal::pi() * BigReal(2L);
  BigReal pow2t(1L);
  for (int i = 0; i < cls.t; ++i) pow2t *= BigReal(2L);
  BigReal arg = BigReal(K) * sha_value.sqrt() / (pow2t * l_value);
  if (arg.sign() <= 0 || arg <= BigReal(1L))
    throw ValidationError("truncation_terms: tail target already met");
  return sha_value / (two_pi * g_value) * arg.log();
}

BurdenEstimate burden(const IsogenyClass& cls, const BigReal& sha_value,
                      const BigReal& g_value, const BigReal& l_value,
                      double K) {
  BurdenEstimate out{truncation_terms(cls, sha_value, g_value, l_value, K), 0};
  BigReal b = out.terms / BigReal(100'000'000L);
  b = b.pow(BigReal(1.25));
  for (const auto& ell : cls.sq_primes) {
    BigReal e(ell);
    b *= (e - BigReal(1L)) / e;
  }
  out.burden = b.to_ll_rounded();
  return out;
}

ShaFactors sha_prime_factors(long long root, const mpz_class& threshold) {
  if (root <= 0) throw ValidationError("sha_prime_factors: root must be > 0");
  ShaFactors out;
  out.root = factorize(mpz_class(static_cast<long>(root)));
  for (const auto& pp : out.root.factors())
    if (pp.p > threshold) out.large.push_back(pp.p);
  return out;
}

std::string ReportRow::str() const {
  std::string s = std::to_string(root) + "^2, " + c + ", " + a + ", " + q +
                  ", " + std::to_string(k) + ", " + l6 + ", " + g6;
  return s;
}

ReportRow make_report(const IsogenyClass& cls, const ConvergedRun& run) {
  ReportRow row;
  row.root = run.root;
  row.c = cls.triple.c.str();
  row.a = cls.triple.a.str();
  row.q = cls.q.sign() < 0 ? "-" + cls.q.abs().value().get_str()
                           : cls.q.value().get_str();
  row.k = cls.k_star;
  row.l6 = run.l_value.str_sig_fixed(6);
  row.g6 = run.g_value.str_sig_fixed(6);
  return row;
}

}  // namespace shabc
