#ifndef SHABC_POINTCOUNT_HPP
#define SHABC_POINTCOUNT_HPP

#include <cstdint>

namespace shabc {

// y^2 = x^3 + a2 x^2 + a4 x + a6 over F_p; p an odd prime, model nonsingular
// mod p, coefficients already reduced mod p.
struct CurveModP {
  uint64_t p = 0, a2 = 0, a4 = 0, a6 = 0;
};

// Trace of Frobenius a(p) = p + 1 - #E(F_p).

// Character sum over all x: O(p) time, O(p) bits workspace.  Intended for
// p below ~2^26.
int64_t ap_naive(const CurveModP& e);

// Baby-step giant-step order finding on the curve and its quadratic twist.
// `order_divisor` is a known divisor of the group order valid for the curve
// and for every quadratic twist (from rational 2-torsion visible in the
// model: 4 when the cubic splits over Q, 2 when a6 = 0).  `salt` varies the
// deterministic sampling sequence.
int64_t ap_bsgs(const CurveModP& e, unsigned order_divisor = 1,
                uint64_t salt = 0);

}  // namespace shabc

#endif
