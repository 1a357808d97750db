#include "shabc/triples.hpp"

#include <fstream>
#include <sstream>

namespace shabc {

std::string AbcTriple::str() const {
  return "a=" + a.str() + "  b=" + b.str() + "  c=" + c.str();
}

FactoredInteger radical_of(const std::vector<const FactoredInteger*>& parts) {
  FactoredInteger r;
  for (const auto* f : parts) r = r * f->radical();
  // Products of radicals of coprime parts stay square-free; for the general
  // case flatten exponents again.
  return r.radical();
}

AbcTriple make_triple(const FactoredInteger& a, const FactoredInteger& c,
                      const std::optional<FactoredInteger>& b_known,
                      const FactorBudget& budget) {
  if (a.sign() < 0 || c.sign() < 0)
    throw ValidationError("triple: a and c must be positive");
  mpz_class bv = c.value() - a.value();
  if (bv <= 0) throw ValidationError("triple: requires c > a");
  if (bv <= a.value())
    throw ValidationError("triple: requires a < b = c - a");
  FactoredInteger b;
  if (b_known) {
    if (b_known->value() != bv)
      throw ValidationError("triple: supplied b does not equal c - a");
    b = *b_known;
  } else {
    b = factorize(bv, budget);
  }
  mpz_class g;
  mpz_gcd(g.get_mpz_t(), a.value().get_mpz_t(), c.value().get_mpz_t());
  if (g != 1) throw ValidationError("triple: a and c are not coprime");
  AbcTriple t{a, b, c, radical_of({&a, &b, &c})};
  return t;
}

BigReal lambda_quality(const AbcTriple& t) {
  BigReal lc{t.c.value()};
  BigReal lr{t.rad.value()};
  return lc.log() / lr.log();
}

BigReal merit(const AbcTriple& t) {
  BigReal lam = lambda_quality(t);
  BigReal logr = BigReal(t.rad.value()).log();
  BigReal one(1L);
  BigReal d = lam - one;
  return d * d * logr * logr.log();
}

namespace {

bool parse_line(const std::string& line, AbcTriple& out, std::string& err) {
  std::string body = line;
  if (auto h = body.find('#'); h != std::string::npos) body.resize(h);
  // Collect key=value fields; values run to the next key or end of line.
  std::optional<std::string> fa, fb, fc;
  size_t pos = 0;
  auto ws = [&](size_t p) {
    while (p < body.size() && (body[p] == ' ' || body[p] == '\t')) ++p;
    return p;
  };
  pos = ws(pos);
  if (pos >= body.size()) return false;  // blank: not an error, not a triple
  while (pos < body.size()) {
    char key = body[pos];
    if ((key != 'a' && key != 'b' && key != 'c') || pos + 1 >= body.size() ||
        body[pos + 1] != '=') {
      err = "expected a=, b= or c= field";
      return false;
    }
    pos += 2;
    size_t start = pos;
    while (pos < body.size()) {
      if ((body[pos] == 'a' || body[pos] == 'b' || body[pos] == 'c') &&
          pos + 1 < body.size() && body[pos + 1] == '=' &&
          (body[pos - 1] == ' ' || body[pos - 1] == '\t'))
        break;
      ++pos;
    }
    std::string value = body.substr(start, pos - start);
    while (!value.empty() && (value.back() == ' ' || value.back() == '\t'))
      value.pop_back();
    if (value.empty()) {
      err = std::string("empty value for '") + key + "='";
      return false;
    }
    auto& slot = key == 'a' ? fa : (key == 'b' ? fb : fc);
    if (slot) {
      err = std::string("duplicate field '") + key + "='";
      return false;
    }
    slot = value;
  }
  if (!fa || !fc) {
    err = "line must provide a= and c=";
    return false;
  }
  try {
    FactoredInteger a = parse_factored(*fa);
    FactoredInteger c = parse_factored(*fc);
    std::optional<FactoredInteger> b;
    if (fb) b = parse_factored(*fb);
    out = make_triple(a, c, b);
    return true;
  } catch (const Error& e) {
    err = e.what();
    return false;
  }
}

}  // namespace

TripleList load_triple_list(std::istream& in) {
  TripleList out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    AbcTriple t;
    std::string err;
    if (parse_line(line, t, err)) {
      out.triples.push_back(std::move(t));
    } else if (!err.empty()) {
      out.issues.push_back({lineno, err});
    }
  }
  if (out.triples.empty()) {
    std::string msg = "triple list: no valid entries";
    for (const auto& iss : out.issues)
      msg += "\n  line " + std::to_string(iss.line) + ": " + iss.message;
    throw ValidationError(msg);
  }
  return out;
}

TripleList load_triple_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("triple list: cannot open " + path);
  return load_triple_list(in);
}

}  // namespace shabc
