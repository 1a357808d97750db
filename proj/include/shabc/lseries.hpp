#ifndef SHABC_LSERIES_HPP
#define SHABC_LSERIES_HPP

#include "shabc/curves.hpp"
#include "shabc/pointcount.hpp"

#include <atomic>
#include <deque>
#include <memory>
#include <string>
#include <vector>

namespace shabc {

struct ResumeError : Error {
  using Error::Error;
};

struct LSeriesConfig {
  unsigned digits = 40;          // working precision in decimal digits
  uint64_t step = 10'000'000;    // stopping-rule / checkpoint granularity
  uint64_t block = 1 << 20;      // sieve block length
  unsigned threads = 1;          // block producers
  uint64_t naive_bound = 1 << 12;     // below: character-sum counting
  uint64_t cache_entries = 100'000'000;  // odd-index a(p) cache slots
};

// Multiplicative coefficients a(n) of the class L-series.  Good primes are
// point-counted on curve 4 of the class (full 2-torsion: order divisor 4);
// bad primes come from the reduction data.  Large-prime values are memoised
// in a lock-free write-once cache so block production can run on several
// threads with deterministic results.
class CoefficientEngine {
 public:
  CoefficientEngine(const IsogenyClass& cls, const LSeriesConfig& cfg);

  // Prepares the small-prime table and cache for n <= max_n.  Not
  // thread-safe; call between block batches.
  void ensure(uint64_t max_n);

  // Fills out[0 .. hi-lo) with a(lo), ..., a(hi-1); requires hi <= prepared
  // max_n + 1.  Thread-safe after ensure().
  void produce_block(uint64_t lo, uint64_t hi, int32_t* out) const;

  // Single-n route (factor n, multiply a(p^k)); must agree with blocks.
  int64_t an(uint64_t n) const;

  // a(p) for prime p (any route: bad table, F_2 count, char sum, bsgs).
  int64_t ap(uint64_t p) const;

  // a(p^e) from a(p) by the good/multiplicative/additive rules.
  int64_t ap_power(uint64_t p, unsigned e, int64_t ap_val) const;

  uint64_t prepared() const { return max_n_; }

 private:
  int64_t ap_fresh(uint64_t p) const;
  bool bad_lookup(uint64_t p, int* a_out, bool* additive) const;

  const IsogenyClass& cls_;
  LSeriesConfig cfg_;
  CurveModP reduce_count_curve(uint64_t p) const;
  mpz_class ca2_, ca4_;  // count-curve coefficients
  std::vector<std::pair<uint64_t, int>> bad_;  // p -> a(p), additive as 0
  std::vector<uint64_t> bad_additive_;         // additive p (a = 0, e >= 1)
  struct SievePrime {
    uint32_t p;
    std::vector<int64_t> apow;  // apow[e] = a(p^e) while p^e <= max_n
  };
  std::vector<SievePrime> small_;
  uint64_t max_n_ = 0;
  // Cache of a(p) for odd p in (small-table bound, cache_n_], slot (p-3)/2.
  std::unique_ptr<std::atomic<int32_t>[]> cache_;
  uint64_t cache_n_ = 0;
  static constexpr int32_t kUnknown = INT32_MIN;
};

// Partial sum state of L = 2 * sum a(n)/n * x^n with x = exp(-2pi/sqrt(N)).
class LSeriesJob {
 public:
  LSeriesJob(const IsogenyClass& cls, const LSeriesConfig& cfg);

  // Extends the sum through n = n_target inclusive.
  void advance_to(uint64_t n_target);

  uint64_t n_done() const { return n_done_; }
  BigReal partial_sum() const;  // sum a(n)/n x^n so far
  BigReal value() const;        // L estimate = 2 * partial sum
  const BigReal& x() const { return x_; }
  const IsogenyClass& cls() const { return cls_; }
  const LSeriesConfig& config() const { return cfg_; }
  CoefficientEngine& engine() { return engine_; }
  const CoefficientEngine& engine() const { return engine_; }

  // Exact state serialisation (text, hex payloads); used by checkpoints.
  void serialize_state(std::string& sum_hex, std::string& pow_hex) const;
  void restore_state(uint64_t n_done, const std::string& sum_hex,
                     const std::string& pow_hex);

 private:
  const IsogenyClass& cls_;
  LSeriesConfig cfg_;
  CoefficientEngine engine_;
  BigReal x_;     // exp(-2 pi / sqrt(N))
  BigReal sum_;   // sum_{n <= n_done} a(n)/n x^n
  BigReal pow_;   // x^n_done
  uint64_t n_done_ = 0;
};

// Convergence detector: at every step boundary push y = sqrt(sha_raw)/2^t;
// converged once `span` consecutive values sit within `tol` of one common
// non-negative integer.
class StoppingWindow {
 public:
  explicit StoppingWindow(unsigned span = 20, double tol = 0.05)
      : span_(span), tol_(tol) {}
  void push(double y);
  void clear() { ys_.clear(); }
  bool converged(long long* integer_out = nullptr) const;
  const std::deque<double>& values() const { return ys_; }
  unsigned span() const { return span_; }
  double tol() const { return tol_; }

 private:
  unsigned span_;
  double tol_;
  std::deque<double> ys_;
};

// Checkpoints: atomic write (temp + rename), refuses to resume when the
// class hash, precision, or step disagree.  The class definition is embedded
// so `resume` can rebuild everything from the file alone.
void checkpoint_save(const std::string& path, const LSeriesJob& job,
                     const StoppingWindow& window);

struct CheckpointData {
  std::string a, b, c, q;  // factored strings
  std::string hash;
  unsigned digits = 0;
  uint64_t step = 0;
  uint64_t n_done = 0;
  std::string x_hex, sum_hex, pow_hex;
  std::vector<double> window;
};

CheckpointData checkpoint_read(const std::string& path);

// Restores job state + window from a parsed checkpoint; validates against
// the supplied class/config.
void checkpoint_apply(const CheckpointData& data, LSeriesJob& job,
                      StoppingWindow& window);

}  // namespace shabc

#endif
