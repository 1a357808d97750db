#ifndef SHABC_TRIPLES_HPP
#define SHABC_TRIPLES_HPP

#include "shabc/bigreal.hpp"
#include "shabc/factored.hpp"
#include "shabc/factorize.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace shabc {

// Coprime positive a + b = c with a < b, all three fully factored.
struct AbcTriple {
  FactoredInteger a, b, c;
  FactoredInteger rad;  // rad(abc), square-free

  std::string str() const;  // "a=...  b=...  c=..."
};

// Builds and validates a triple from factored a and c; b = c - a is
// factorized (or taken from `b_known`, which is then checked against c - a).
AbcTriple make_triple(const FactoredInteger& a, const FactoredInteger& c,
                      const std::optional<FactoredInteger>& b_known = {},
                      const FactorBudget& budget = {});

// Radical of a product of factored integers.
FactoredInteger radical_of(const std::vector<const FactoredInteger*>& parts);

// Quality lambda = log c / log rad(abc) and merit
// (lambda - 1)^2 * log(rad) * log(log(rad)).
BigReal lambda_quality(const AbcTriple& t);
BigReal merit(const AbcTriple& t);

struct TripleFileIssue {
  int line = 0;
  std::string message;
};

struct TripleList {
  std::vector<AbcTriple> triples;
  std::vector<TripleFileIssue> issues;
};

// Lines of the form "a=<factored> c=<factored> [b=<factored>]"; '#' starts a
// comment; blank lines skipped.  Invalid lines are collected with their line
// numbers.  Throws ValidationError if the stream yields no valid triple.
TripleList load_triple_list(std::istream& in);
TripleList load_triple_file(const std::string& path);

}  // namespace shabc

#endif
