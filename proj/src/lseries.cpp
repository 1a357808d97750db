#include "shabc/lseries.hpp"

#include "shabc/factorize.hpp"

#include <cinttypes>
#include <climits>
#include <cmath>
#include <condition_variable>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <unistd.h>

namespace shabc {

namespace {

uint64_t isqrt_u64(uint64_t n) {
  uint64_t r = static_cast<uint64_t>(std::sqrt(static_cast<double>(n)));
  while (r > 0 && r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

constexpr uint64_t kMaxN = 1ull << 31;  // int32 coefficient guarantee

}  // namespace

CoefficientEngine::CoefficientEngine(const IsogenyClass& cls,
                                     const LSeriesConfig& cfg)
    : cls_(cls), cfg_(cfg) {
  if (cfg_.naive_bound < 8) cfg_.naive_bound = 8;
  if (cfg_.naive_bound > (1ull << 26)) cfg_.naive_bound = 1ull << 26;
  ca2_ = cls.count_curve.a2;
  ca4_ = cls.count_curve.a4;
  if (cls.count_curve.a6 != 0 || cls.count_curve.a1 != 0 ||
      cls.count_curve.a3 != 0)
    throw InternalError("coefficients: count curve not in y^2 = x(..) form");
  for (const auto& [p, a] : cls.bad_ap) {
    if (!p.fits_ulong_p()) continue;  // beyond any reachable n
    bad_.emplace_back(p.get_ui(), a);
    if (a == 0) bad_additive_.push_back(p.get_ui());
  }
  std::sort(bad_.begin(), bad_.end());
}

CurveModP CoefficientEngine::reduce_count_curve(uint64_t p) const {
  mpz_class pm(static_cast<unsigned long>(p));
  mpz_class a2m, a4m;
  mpz_fdiv_r(a2m.get_mpz_t(), ca2_.get_mpz_t(), pm.get_mpz_t());
  mpz_fdiv_r(a4m.get_mpz_t(), ca4_.get_mpz_t(), pm.get_mpz_t());
  return CurveModP{p, a2m.get_ui(), a4m.get_ui(), 0};
}

bool CoefficientEngine::bad_lookup(uint64_t p, int* a_out, bool* additive) const {
  auto it = std::lower_bound(bad_.begin(), bad_.end(),
                             std::make_pair(p, INT_MIN));
  if (it == bad_.end() || it->first != p) return false;
  *a_out = it->second;
  *additive = (it->second == 0);
  return true;
}

int64_t CoefficientEngine::ap_fresh(uint64_t p) const {
  CurveModP c = reduce_count_curve(p);
  int64_t a = (p < cfg_.naive_bound) ? ap_naive(c) : ap_bsgs(c, 4, 0);
  if ((p + 1 - a) % 4 != 0)
    throw InternalError("coefficients: count violates 2-torsion divisor");
  return a;
}

int64_t CoefficientEngine::ap(uint64_t p) const {
  if (p == 2) {
    if (cls_.good_at_2) return cls_.a2_good;
    int a;
    bool add;
    if (!bad_lookup(2, &a, &add))
      throw InternalError("coefficients: 2 neither good nor in bad table");
    return a;
  }
  {
    int a;
    bool add;
    if (bad_lookup(p, &a, &add)) return a;
  }
  if (p >= 3 && p <= cache_n_ && (p & 1)) {
    auto& slot = cache_[(p - 3) / 2];
    int32_t v = slot.load(std::memory_order_relaxed);
    if (v != kUnknown) return v;
    int64_t a = ap_fresh(p);
    slot.store(static_cast<int32_t>(a), std::memory_order_relaxed);
    return a;
  }
  return ap_fresh(p);
}

int64_t CoefficientEngine::ap_power(uint64_t p, unsigned e, int64_t ap_val) const {
  if (e == 0) return 1;
  int a;
  bool additive;
  if (p == 2 && !cls_.good_at_2) {
    if (!bad_lookup(2, &a, &additive))
      throw InternalError("coefficients: missing bad entry for 2");
  } else if (bad_lookup(p, &a, &additive)) {
  } else {
    // Good prime: a(p^e) = a(p) a(p^(e-1)) - p a(p^(e-2)).
    int64_t am2 = 1, am1 = ap_val;
    for (unsigned k = 2; k <= e; ++k) {
      int64_t cur = ap_val * am1 - static_cast<int64_t>(p) * am2;
      am2 = am1;
      am1 = cur;
    }
    return am1;
  }
  if (additive) return 0;
  // Multiplicative: a(p^e) = a(p)^e with a(p) = +-1.
  return (a == 1 || (e % 2 == 0)) ? 1 : -1;
}

void CoefficientEngine::ensure(uint64_t max_n) {
  if (max_n <= max_n_) return;
  if (max_n >= kMaxN)
    throw ValidationError("coefficients: n beyond supported range");
  max_n_ = max_n;
  // Small-prime table for all p <= sqrt(max_n).
  uint64_t bound = isqrt_u64(max_n);
  const auto& primes = primes_below(static_cast<uint32_t>(bound + 1));
  small_.reserve(primes.size());
  for (size_t i = small_.size(); i < primes.size(); ++i) {
    SievePrime sp;
    sp.p = primes[i];
    sp.apow = {1, ap(primes[i])};
    small_.push_back(std::move(sp));
  }
  for (auto& sp : small_) {
    uint64_t pe = sp.p;
    unsigned e = 1;
    while (pe <= max_n / sp.p) {
      pe *= sp.p;
      ++e;
    }
    int64_t a1 = sp.apow[1];
    sp.apow.resize(e + 1);
    for (unsigned k = 2; k <= e; ++k)
      sp.apow[k] = ap_power(sp.p, k, a1);
  }
  // Large-prime cache covering odd p <= cache_n_.
  uint64_t want_n = std::min<uint64_t>(max_n, 2 * cfg_.cache_entries + 1);
  if (want_n > cache_n_) {
    uint64_t slots = want_n >= 3 ? (want_n - 1) / 2 : 0;
    auto fresh = std::make_unique<std::atomic<int32_t>[]>(slots);
    uint64_t old_slots = cache_n_ >= 3 ? (cache_n_ - 1) / 2 : 0;
    for (uint64_t i = 0; i < old_slots; ++i)
      fresh[i].store(cache_[i].load(std::memory_order_relaxed),
                     std::memory_order_relaxed);
    for (uint64_t i = old_slots; i < slots; ++i)
      fresh[i].store(kUnknown, std::memory_order_relaxed);
    cache_ = std::move(fresh);
    cache_n_ = want_n;
  }
}

void CoefficientEngine::produce_block(uint64_t lo, uint64_t hi,
                                      int32_t* out) const {
  if (lo < 1 || hi <= lo || hi > max_n_ + 1)
    throw InternalError("produce_block: range not prepared");
  size_t len = hi - lo;
  std::vector<int64_t> acc(len, 1);
  std::vector<uint32_t> rem(len);
  for (size_t i = 0; i < len; ++i) rem[i] = static_cast<uint32_t>(lo + i);
  uint64_t bound = isqrt_u64(hi - 1);
  for (const auto& sp : small_) {
    uint64_t p = sp.p;
    if (p > bound) break;
    for (uint64_t m = ((lo + p - 1) / p) * p; m < hi; m += p) {
      size_t i = m - lo;
      unsigned e = 0;
      while (rem[i] % p == 0) {
        rem[i] /= p;
        ++e;
      }
      acc[i] *= sp.apow[e];
    }
  }
  for (size_t i = 0; i < len; ++i) {
    if (rem[i] != 1) acc[i] *= ap(rem[i]);
    if (acc[i] > INT32_MAX || acc[i] < INT32_MIN + 1)
      throw InternalError("produce_block: coefficient overflow");
    out[i] = static_cast<int32_t>(acc[i]);
  }
}

int64_t CoefficientEngine::an(uint64_t n) const {
  if (n == 0) throw ValidationError("an: n must be positive");
  if (n >= kMaxN) throw ValidationError("an: n beyond supported range");
  int64_t result = 1;
  uint64_t m = n;
  const auto& primes = primes_below(46342);  // covers sqrt(2^31)
  for (uint32_t p : primes) {
    if (static_cast<uint64_t>(p) * p > m) break;
    if (m % p == 0) {
      unsigned e = 0;
      while (m % p == 0) {
        m /= p;
        ++e;
      }
      result *= ap_power(p, e, ap(p));
    }
  }
  if (m > 1) result *= ap(m);  // leftover prime
  return result;
}

LSeriesJob::LSeriesJob(const IsogenyClass& cls, const LSeriesConfig& cfg)
    : cls_(cls),
      cfg_(cfg),
      engine_(cls, cfg),
      x_(0L, cfg.digits),
      sum_(0L, cfg.digits),
      pow_(1L, cfg.digits) {
  if (cfg_.block == 0) cfg_.block = 1 << 20;
  if (cfg_.step == 0) cfg_.step = 10'000'000;
  BigReal n(cls.n_value(), cfg_.digits);
  BigReal two_pi = BigReal::pi(cfg_.digits) * BigReal(2L, cfg_.digits);
  x_ = (-(two_pi / n.sqrt())).exp();
}

BigReal LSeriesJob::partial_sum() const { return sum_; }

BigReal LSeriesJob::value() const { return sum_ * BigReal(2L, cfg_.digits); }

namespace {

// Accumulate one block of coefficients into (sum, pow); strictly ascending n.
void accumulate_block(mpfr_ptr sum, mpfr_ptr pow, mpfr_srcptr x, uint64_t lo,
                      uint64_t hi, const int32_t* a, mpfr_ptr tmp) {
  for (uint64_t n = lo; n < hi; ++n) {
    mpfr_mul(pow, pow, x, MPFR_RNDN);
    int32_t an = a[n - lo];
    if (an == 0) continue;
    mpfr_mul_si(tmp, pow, an, MPFR_RNDN);
    mpfr_div_ui(tmp, tmp, static_cast<unsigned long>(n), MPFR_RNDN);
    mpfr_add(sum, sum, tmp, MPFR_RNDN);
  }
}

}  // namespace

void LSeriesJob::advance_to(uint64_t n_target) {
  if (n_target <= n_done_) return;
  engine_.ensure(n_target);
  uint64_t lo = n_done_ + 1, hi = n_target + 1;
  BigReal tmp(0L, cfg_.digits);

  uint64_t nblocks = (hi - lo + cfg_.block - 1) / cfg_.block;
  auto block_range = [&](uint64_t k) {
    uint64_t blo = lo + k * cfg_.block;
    uint64_t bhi = std::min(hi, blo + cfg_.block);
    return std::make_pair(blo, bhi);
  };

  if (cfg_.threads <= 1 || nblocks <= 1) {
    std::vector<int32_t> buf;
    for (uint64_t k = 0; k < nblocks; ++k) {
      auto [blo, bhi] = block_range(k);
      buf.resize(bhi - blo);
      engine_.produce_block(blo, bhi, buf.data());
      accumulate_block(sum_.raw(), pow_.raw(), x_.raw(), blo, bhi, buf.data(),
                       tmp.raw());
    }
  } else {
    std::mutex mu;
    std::condition_variable cv_prod, cv_cons;
    std::map<uint64_t, std::vector<int32_t>> ready;
    std::atomic<uint64_t> next{0};
    uint64_t want = 0;
    const size_t cap = cfg_.threads + 2;
    std::exception_ptr worker_error;

    unsigned nw = std::min<uint64_t>(cfg_.threads, nblocks);
    std::vector<std::thread> workers;
    workers.reserve(nw);
    for (unsigned w = 0; w < nw; ++w) {
      workers.emplace_back([&] {
        try {
          for (;;) {
            uint64_t k = next.fetch_add(1);
            if (k >= nblocks) return;
            auto [blo, bhi] = block_range(k);
            std::vector<int32_t> buf(bhi - blo);
            engine_.produce_block(blo, bhi, buf.data());
            std::unique_lock lk(mu);
            cv_prod.wait(lk, [&] {
              return ready.size() < cap || k == want || worker_error;
            });
            if (worker_error) return;
            ready.emplace(k, std::move(buf));
            cv_cons.notify_all();
          }
        } catch (...) {
          std::scoped_lock lk(mu);
          if (!worker_error) worker_error = std::current_exception();
          cv_cons.notify_all();
          cv_prod.notify_all();
        }
      });
    }
    for (uint64_t k = 0; k < nblocks; ++k) {
      std::vector<int32_t> buf;
      {
        std::unique_lock lk(mu);
        cv_cons.wait(lk, [&] { return ready.count(k) || worker_error; });
        if (worker_error) break;
        buf = std::move(ready[k]);
        ready.erase(k);
        want = k + 1;
        cv_prod.notify_all();
      }
      auto [blo, bhi] = block_range(k);
      accumulate_block(sum_.raw(), pow_.raw(), x_.raw(), blo, bhi, buf.data(),
                       tmp.raw());
    }
    for (auto& th : workers) th.join();
    if (worker_error) std::rethrow_exception(worker_error);
  }
  n_done_ = n_target;
}

void LSeriesJob::serialize_state(std::string& sum_hex,
                                 std::string& pow_hex) const {
  sum_hex = sum_.hex();
  pow_hex = pow_.hex();
}

void LSeriesJob::restore_state(uint64_t n_done, const std::string& sum_hex,
                               const std::string& pow_hex) {
  BigReal s = BigReal::from_hex(sum_hex);
  BigReal p = BigReal::from_hex(pow_hex);
  if (s.precision_bits() != sum_.precision_bits() ||
      p.precision_bits() != pow_.precision_bits())
    throw ResumeError("checkpoint precision does not match configuration");
  sum_ = std::move(s);
  pow_ = std::move(p);
  n_done_ = n_done;
}

void StoppingWindow::push(double y) {
  ys_.push_back(y);
  while (ys_.size() > span_) ys_.pop_front();
}

bool StoppingWindow::converged(long long* integer_out) const {
  if (ys_.size() < span_) return false;
  long long target = std::llround(ys_.back());
  if (target < 0) return false;
  for (double y : ys_)
    if (std::abs(y - static_cast<double>(target)) >= tol_) return false;
  if (integer_out) *integer_out = target;
  return true;
}

namespace {

std::string fmt_double_hex(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

}  // namespace

void checkpoint_save(const std::string& path, const LSeriesJob& job,
                     const StoppingWindow& window) {
  std::string sum_hex, pow_hex;
  job.serialize_state(sum_hex, pow_hex);
  std::ostringstream os;
  const IsogenyClass& cls = job.cls();
  os << "shabc-checkpoint 1\n";
  os << "a " << cls.triple.a.str() << "\n";
  os << "b " << cls.triple.b.str() << "\n";
  os << "c " << cls.triple.c.str() << "\n";
  os << "q " << cls.q.str() << "\n";
  os << "class " << cls.hash << "\n";
  os << "digits " << job.config().digits << "\n";
  os << "step " << job.config().step << "\n";
  os << "n " << job.n_done() << "\n";
  os << "x " << job.x().hex() << "\n";
  os << "sum " << sum_hex << "\n";
  os << "pow " << pow_hex << "\n";
  os << "window";
  for (double y : window.values()) os << " " << fmt_double_hex(y);
  os << "\n";
  os << "end\n";
  std::string body = os.str();

  std::string tmp = path + ".tmp";
  FILE* f = std::fopen(tmp.c_str(), "w");
  if (!f) throw Error("checkpoint: cannot write " + tmp);
  if (std::fwrite(body.data(), 1, body.size(), f) != body.size()) {
    std::fclose(f);
    throw Error("checkpoint: short write to " + tmp);
  }
  std::fflush(f);
  fsync(fileno(f));
  std::fclose(f);
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw Error("checkpoint: rename failed for " + path);
}

CheckpointData checkpoint_read(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ResumeError("checkpoint: cannot open " + path);
  CheckpointData d;
  std::string line;
  bool saw_magic = false, saw_end = false;
  while (std::getline(in, line)) {
    if (!saw_magic) {
      if (line != "shabc-checkpoint 1")
        throw ResumeError("checkpoint: unrecognised header");
      saw_magic = true;
      continue;
    }
    if (line == "end") {
      saw_end = true;
      break;
    }
    auto sp = line.find(' ');
    std::string key = line.substr(0, sp);
    std::string val = sp == std::string::npos ? "" : line.substr(sp + 1);
    if (key == "a") d.a = val;
    else if (key == "b") d.b = val;
    else if (key == "c") d.c = val;
    else if (key == "q") d.q = val;
    else if (key == "class") d.hash = val;
    else if (key == "digits") d.digits = static_cast<unsigned>(std::stoul(val));
    else if (key == "step") d.step = std::stoull(val);
    else if (key == "n") d.n_done = std::stoull(val);
    else if (key == "x") d.x_hex = val;
    else if (key == "sum") d.sum_hex = val;
    else if (key == "pow") d.pow_hex = val;
    else if (key == "window") {
      std::istringstream ws(val);
      std::string tok;
      while (ws >> tok) d.window.push_back(std::strtod(tok.c_str(), nullptr));
    } else {
      throw ResumeError("checkpoint: unknown field '" + key + "'");
    }
  }
  if (!saw_magic || !saw_end || d.hash.empty() || d.sum_hex.empty() ||
      d.pow_hex.empty() || d.x_hex.empty() || d.digits == 0)
    throw ResumeError("checkpoint: truncated or incomplete file");
  return d;
}

void checkpoint_apply(const CheckpointData& data, LSeriesJob& job,
                      StoppingWindow& window) {
  if (data.hash != job.cls().hash)
    throw ResumeError("checkpoint: class hash mismatch");
  if (data.digits != job.config().digits)
    throw ResumeError("checkpoint: precision mismatch");
  if (data.step != job.config().step)
    throw ResumeError("checkpoint: step mismatch");
  BigReal x = BigReal::from_hex(data.x_hex);
  if (x.precision_bits() != job.x().precision_bits() || x != job.x())
    throw ResumeError("checkpoint: series ratio mismatch");
  job.restore_state(data.n_done, data.sum_hex, data.pow_hex);
  window.clear();
  for (double y : data.window) window.push(y);
}

}  // namespace shabc
