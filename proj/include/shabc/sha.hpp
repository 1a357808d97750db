#ifndef SHABC_SHA_HPP
#define SHABC_SHA_HPP

#include "shabc/curves.hpp"

#include <optional>
#include <string>

namespace shabc {

// Analytic third-descent order attached to curve k of the class:
// sha = L * sqrt(|q| c) * agm(1, alpha) / (pi * C_k).
BigReal sha_from_l(const IsogenyClass& cls, const BigReal& l_value, int k);

// Ratio against the square root of the conductor: g = sha / sqrt(N).
BigReal goldfeld_szpiro(const IsogenyClass& cls, const BigReal& sha_value,
                        unsigned digits = 0);

// Snapping: y = sqrt(sha)/2^t should sit within tol of an integer I; the
// snapped order is then (2^t I)^2.
struct SnapResult {
  long long integer = 0;      // I
  long long root = 0;         // 2^t I
  double residual = 0.0;      // |y - I|
  bool ok = false;            // residual < tol and I >= 0
};
SnapResult snap_sha(const IsogenyClass& cls, const BigReal& sha_value,
                    double tol = 0.05);

// Series length for the tail bound to clear the snapping gap:
// m = (sha/(2 pi G)) * log(K sqrt(sha) / (2^t L)).
BigReal truncation_terms(const IsogenyClass& cls, const BigReal& sha_value,
                         const BigReal& g_value, const BigReal& l_value,
                         double K = 4.0);

// Work metric: B = round((m / 10^8)^(5/4) * prod_{ell^2 | N} (1 - 1/ell)).
struct BurdenEstimate {
  BigReal terms;      // m
  long long burden;   // B
};
BurdenEstimate burden(const IsogenyClass& cls, const BigReal& sha_value,
                      const BigReal& g_value, const BigReal& l_value,
                      double K = 4.0);

// Prime factorisation of the snapped root, flagging factors above the
// largeness threshold.
struct ShaFactors {
  FactoredInteger root;
  std::vector<mpz_class> large;  // primes above threshold
};
ShaFactors sha_prime_factors(long long root, const mpz_class& threshold);

// Finished-run summary and its row rendering
// "<root>^2, <c>, <a>, <q>, <k>, <L>, <G>" with L and G at 6 significant
// digits, trailing zeros kept.
struct ConvergedRun {
  uint64_t n_stop = 0;
  unsigned steps = 0;
  BigReal l_value;
  BigReal sha_value;
  long long root = 0;
  BigReal g_value;
};

struct ReportRow {
  long long root = 0;
  std::string c, a, q;
  int k = 0;
  std::string l6, g6;  // 6-significant-digit renderings
  std::string str() const;
};

ReportRow make_report(const IsogenyClass& cls, const ConvergedRun& run);

}  // namespace shabc

#endif
