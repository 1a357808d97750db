#include "shabc/pipeline.hpp"

#include "shabc/factorize.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

namespace shabc {

using nlohmann::json;

namespace {

// Signed snapping coordinate y = sign(sha) sqrt(|sha|)/2^t.
double y_coordinate(const IsogenyClass& cls, const BigReal& sha) {
  BigReal a = sha.abs().sqrt();
  for (int i = 0; i < cls.t; ++i) a /= BigReal(2L);
  double v = a.to_double();
  return sha.sign() < 0 ? -v : v;
}

}  // namespace

std::vector<Candidate> scan(const std::vector<AbcTriple>& triples,
                            const PipelineConfig& cfg) {
  std::vector<Candidate> out;
  BigReal one(1L, cfg.series.digits);
  for (uint64_t qa = 1; qa <= cfg.q_max; ++qa) {
    FactoredInteger qf;
    try {
      qf = factorize(mpz_class(static_cast<unsigned long>(qa)));
    } catch (const FactorizationError&) {
      continue;
    }
    if (!qf.square_free()) continue;
    for (int sign = +1; sign >= -1; sign -= 2) {
      FactoredInteger q = sign < 0 ? qf.negate() : qf;
      for (size_t ti = 0; ti < triples.size(); ++ti) {
        const AbcTriple& tr = triples[ti];
        IsogenyClass cls;
        try {
          cls = build_class(tr, q);
        } catch (const InternalError& e) {
          // A class whose central coefficients break the expected pattern
          // (typically positive rank) is flagged and skipped, not fatal.
          std::cerr << "flagged: triple " << ti << " q=" << q.value() << ": "
                    << e.what() << "\n";
          continue;
        }
        BigReal gl = g_over_l(cls, cfg.series.digits);
        double gl_d = gl.to_double();
        if (gl_d < cfg.gl_min) continue;
        Candidate cand;
        cand.triple_index = ti;
        cand.q = q;
        cand.g_over_l = gl_d;
        cand.t = cls.t;
        cand.s = cls.s;
        cand.hash = cls.hash;
        cand.q_divides_rad =
            FactoredInteger::gcd(q, tr.rad).value() == q.abs_value();
        // L = 1 horizon: sha -> period factor, G -> g/L.
        BigReal sha1 = period_factor(cls, cls.k_star, cfg.series.digits);
        cand.projected_sha_root = std::sqrt(std::max(0.0, sha1.to_double()));
        try {
          cand.projected_burden = burden(cls, sha1, gl, one, cfg.K).burden;
        } catch (const ValidationError&) {
          cand.projected_burden = 0;  // tail target already below one term
        }
        if (cand.projected_burden > cfg.burden_max) continue;
        out.push_back(std::move(cand));
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const Candidate& x, const Candidate& y) {
    if (x.g_over_l != y.g_over_l) return x.g_over_l > y.g_over_l;
    if (x.q_divides_rad != y.q_divides_rad) return x.q_divides_rad;
    if (x.q.abs_value() != y.q.abs_value())
      return x.q.abs_value() < y.q.abs_value();
    return x.triple_index < y.triple_index;
  });
  return out;
}

namespace {

void ledger_step(const PipelineConfig& cfg, const IsogenyClass& cls,
                 const StepInfo& info) {
  if (cfg.ledger_path.empty()) return;
  json j{{"event", "step"},
         {"class", cls.hash},
         {"n", info.n},
         {"step", info.step_index},
         {"L", info.l_estimate},
         {"y", info.y}};
  ledger_append(cfg.ledger_path, j.dump());
}

void ledger_done(const PipelineConfig& cfg, const IsogenyClass& cls,
                 const RunOutcome& out) {
  if (cfg.ledger_path.empty()) return;
  json j{{"event", "done"},
         {"class", cls.hash},
         {"status", static_cast<int>(out.status)},
         {"n", out.n_processed},
         {"reason", out.stop_reason}};
  if (out.status == RunStatus::Converged) {
    j["root"] = out.run.root;
    j["L"] = out.run.l_value.str(12);
    j["G"] = out.run.g_value.str(12);
  }
  ledger_append(cfg.ledger_path, j.dump());
}

}  // namespace

RunOutcome run_class(const IsogenyClass& cls, const PipelineConfig& cfg,
                     const std::optional<std::string>& resume_from,
                     const StepCallback& on_step) {
  LSeriesJob job(cls, cfg.series);
  StoppingWindow window;
  if (resume_from) {
    CheckpointData data = checkpoint_read(*resume_from);
    checkpoint_apply(data, job, window);
  }
  const unsigned digits = cfg.series.digits;
  const uint64_t step = cfg.series.step;
  BigReal period = period_factor(cls, cls.k_star, digits);
  BigReal sqrt_n = BigReal(cls.n_value(), digits).sqrt();

  std::string ckpt_path;
  if (!cfg.checkpoint_dir.empty())
    ckpt_path = cfg.checkpoint_dir + "/" + cls.hash + ".ckpt";

  RunOutcome out;
  unsigned step_index = static_cast<unsigned>(job.n_done() / step);
  for (;;) {
    uint64_t n_next = (job.n_done() / step + 1) * step;
    if (cfg.max_terms != 0 && n_next > cfg.max_terms) {
      out.status = RunStatus::TermCapReached;
      out.stop_reason = "term cap " + std::to_string(cfg.max_terms) +
                        " reached without convergence";
      break;
    }
    job.advance_to(n_next);
    ++step_index;
    BigReal l_est = job.value();
    BigReal sha_est = l_est * period;
    double y = y_coordinate(cls, sha_est);
    window.push(y);

    StepInfo info{job.n_done(), step_index, l_est.to_double(), y};
    ledger_step(cfg, cls, info);
    if (on_step) on_step(info);
    if (!ckpt_path.empty()) checkpoint_save(ckpt_path, job, window);

    long long integer = 0;
    if (window.converged(&integer)) {
      if (integer == 0) {
        out.status = RunStatus::RankSuspect;
        out.stop_reason =
            "sha estimate pinned at zero: vanishing central value "
            "(positive rank suspected)";
        break;
      }
      SnapResult snap = snap_sha(cls, sha_est);
      if (!snap.ok || snap.integer != integer)
        throw InternalError("run: window and snap disagree");
      out.status = RunStatus::Converged;
      out.run.n_stop = job.n_done();
      out.run.steps = step_index;
      out.run.l_value = l_est;
      out.run.sha_value = sha_est;
      out.run.root = snap.root;
      BigReal root2 = BigReal(mpz_class(static_cast<long>(snap.root)) * static_cast<long>(snap.root), digits);
      out.run.g_value = root2 / sqrt_n;
      break;
    }

    if (cfg.burden_recheck_steps != 0 &&
        step_index % cfg.burden_recheck_steps == 0 && l_est.sign() > 0 &&
        sha_est.sign() > 0) {
      BigReal g_est = sha_est / sqrt_n;
      try {
        long long b = burden(cls, sha_est, g_est, l_est, cfg.K).burden;
        out.last_burden = b;
        if (b > cfg.burden_max) {
          out.status = RunStatus::BudgetExceeded;
          out.stop_reason = "burden " + std::to_string(b) +
                            " exceeds limit " + std::to_string(cfg.burden_max);
          break;
        }
      } catch (const ValidationError&) {
        // Tail target already inside one term; convergence is imminent.
      }
    }
  }
  out.n_processed = job.n_done();
  out.steps = step_index;
  ledger_done(cfg, cls, out);
  return out;
}

RoughResult rough_estimate(const IsogenyClass& cls, const PipelineConfig& cfg,
                           const std::vector<uint64_t>& stages,
                           double l_floor) {
  LSeriesJob job(cls, cfg.series);
  RoughResult r;
  for (uint64_t stage : stages) {
    job.advance_to(stage);
    r.n_reached = job.n_done();
    r.l_estimate = job.value().to_double();
    if (r.l_estimate < l_floor) {
      r.promoted = false;
      return r;
    }
  }
  r.promoted = true;
  return r;
}

std::vector<KnownClassRow> load_known_classes(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("known classes: cannot open " + path);
  json j;
  in >> j;
  std::vector<KnownClassRow> rows;
  for (const auto& e : j) {
    KnownClassRow r;
    r.sha_root = e.at("sha_root").get<long long>();
    r.c = e.at("c").get<std::string>();
    r.a = e.at("a").get<std::string>();
    r.q = e.at("q").get<long long>();
    r.k = e.at("k").get<int>();
    r.l6 = e.at("L").get<std::string>();
    r.g6 = e.at("G").get<std::string>();
    r.s = e.at("s").get<int>();
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<KnownClassRow> filter_rows(const std::vector<KnownClassRow>& rows,
                                       const ReportFilter& f) {
  auto canon = [](const std::string& s) { return parse_factored(s).str(); };
  std::optional<std::string> want_c, want_a;
  if (f.c_equals) want_c = canon(*f.c_equals);
  if (f.a_equals) want_a = canon(*f.a_equals);
  std::vector<KnownClassRow> out;
  for (const auto& r : rows) {
    if (f.min_root && r.sha_root < *f.min_root) continue;
    if (f.min_g && std::stod(r.g6) <= *f.min_g) continue;
    if (want_c && canon(r.c) != *want_c) continue;
    if (want_a && canon(r.a) != *want_a) continue;
    out.push_back(r);
  }
  std::sort(out.begin(), out.end(),
            [](const KnownClassRow& x, const KnownClassRow& y) {
              return x.sha_root > y.sha_root;
            });
  return out;
}

std::string format_rows(const std::vector<KnownClassRow>& rows,
                        ReportFormat fmt) {
  std::ostringstream os;
  switch (fmt) {
    case ReportFormat::Text:
      for (const auto& r : rows)
        os << r.sha_root << "^2, " << r.c << ", " << r.a << ", " << r.q << ", "
           << r.k << ", " << r.l6 << ", " << r.g6 << "\n";
      break;
    case ReportFormat::Csv: {
      os << "sha_root,c,a,q,k,L,G\n";
      for (const auto& r : rows)
        os << r.sha_root << ",\"" << r.c << "\",\"" << r.a << "\"," << r.q
           << "," << r.k << "," << r.l6 << "," << r.g6 << "\n";
      break;
    }
    case ReportFormat::Json: {
      json arr = json::array();
      for (const auto& r : rows)
        arr.push_back(json{{"sha_root", r.sha_root},
                           {"c", r.c},
                           {"a", r.a},
                           {"q", r.q},
                           {"k", r.k},
                           {"L", r.l6},
                           {"G", r.g6},
                           {"s", r.s}});
      os << arr.dump(2) << "\n";
      break;
    }
  }
  return os.str();
}

void ledger_append(const std::string& path, const std::string& json_line) {
  int fd = ::open(path.c_str(), O_CREAT | O_WRONLY | O_APPEND, 0644);
  if (fd < 0) throw Error("ledger: cannot open " + path);
  if (::flock(fd, LOCK_EX) != 0) {
    ::close(fd);
    throw Error("ledger: cannot lock " + path);
  }
  std::string line = json_line + "\n";
  ssize_t w = ::write(fd, line.data(), line.size());
  ::flock(fd, LOCK_UN);
  ::close(fd);
  if (w != static_cast<ssize_t>(line.size()))
    throw Error("ledger: short write to " + path);
}

}  // namespace shabc
