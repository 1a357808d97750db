// Command-line front end: triple analysis, class inspection, candidate
// scanning, L-series runs with checkpoint/resume, and dataset reports.

#include "shabc/pipeline.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <iostream>

namespace {

using namespace shabc;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitValidation = 2;
constexpr int kExitRankSuspect = 3;
constexpr int kExitBudget = 4;

struct CommonArgs {
  std::string a, b, c, q;
};

AbcTriple triple_from(const CommonArgs& args) {
  FactoredInteger fa = parse_factored(args.a);
  FactoredInteger fc = parse_factored(args.c);
  std::optional<FactoredInteger> fb;
  if (!args.b.empty()) fb = parse_factored(args.b);
  return make_triple(fa, fc, fb);
}

// Twists may be given factored ("5 139 151") or as a plain integer.
FactoredInteger parse_twist(const std::string& s) {
  try {
    return parse_factored(s);
  } catch (const ValidationError&) {
    mpz_class v;
    if (v.set_str(s, 10) != 0)
      throw ValidationError("twist '" + s + "' is neither factored nor an integer");
    return factorize(v);
  }
}

IsogenyClass class_from(const CommonArgs& args) {
  if (args.q.empty()) throw ValidationError("missing twist --q");
  return build_class(triple_from(args), parse_twist(args.q));
}

ReportFormat parse_format(const std::string& s) {
  if (s == "text") return ReportFormat::Text;
  if (s == "csv") return ReportFormat::Csv;
  if (s == "json") return ReportFormat::Json;
  throw ValidationError("unknown output format '" + s + "'");
}

const char* kind_name(ReductionKind k) {
  switch (k) {
    case ReductionKind::Good: return "good";
    case ReductionKind::SplitMult: return "split";
    case ReductionKind::NonsplitMult: return "nonsplit";
    case ReductionKind::Additive: return "additive";
  }
  return "?";
}

int cmd_triple(const CommonArgs& args) {
  AbcTriple t = triple_from(args);
  std::cout << t.str() << "\n";
  std::cout << "rad    " << t.rad.str() << " = " << t.rad.value().get_str()
            << "\n";
  std::cout << "lambda " << lambda_quality(t).str_sig_fixed(6) << "\n";
  std::cout << "merit  " << merit(t).str_sig_fixed(6) << "\n";
  return kExitOk;
}

int cmd_inspect(const CommonArgs& args, unsigned digits) {
  IsogenyClass cls = class_from(args);
  std::cout << "triple   " << cls.triple.str() << "\n";
  std::cout << "twist q  " << cls.q.str() << "\n";
  std::cout << "class    " << cls.hash << "\n";
  for (int k = 0; k < 4; ++k)
    std::cout << "curve " << k + 1 << "  " << cls.curves[k].str() << "\n";
  std::cout << "N        " << cls.conductor.str() << " = "
            << cls.n_value().get_str() << "\n";
  std::cout << "s        " << cls.s << "\n";
  for (const auto& [p, locals] : cls.local) {
    if (locals[0].f == 0 && p == 2) {
      std::cout << "p=" << p.get_str() << "  good";
      std::cout << "  a(2)=" << cls.a2_good << "\n";
      continue;
    }
    std::cout << "p=" << p.get_str();
    for (int k = 0; k < 4; ++k)
      std::cout << "  [" << locals[k].kodaira << " f=" << locals[k].f
                << " c=" << locals[k].c << " " << kind_name(locals[k].kind)
                << "]";
    std::cout << "\n";
  }
  std::cout << "prodc    ";
  for (int k = 0; k < 4; ++k)
    std::cout << cls.tamagawa[k].get_str() << (k < 3 ? " " : "\n");
  std::cout << "u        ";
  for (int k = 0; k < 4; ++k)
    std::cout << cls.scale[k].get_str() << (k < 3 ? " " : "\n");
  std::cout << "T        ";
  for (int k = 0; k < 4; ++k)
    std::cout << cls.torsion[k] << (k < 3 ? " " : "\n");
  std::cout << "C        ";
  for (int k = 0; k < 4; ++k)
    std::cout << cls.cvals[k].get_str() << (k < 3 ? " " : "\n");
  std::cout << "k*       " << cls.k_star << "\n";
  std::cout << "t        " << cls.t << "\n";
  std::cout << "alpha    " << class_alpha(cls, digits).str(12) << "\n";
  std::cout << "agm      " << agm(BigReal(1L, digits), class_alpha(cls, digits)).str(12)
            << "\n";
  std::cout << "g/L      " << g_over_l(cls, digits).str_sig_fixed(6) << "\n";
  return kExitOk;
}

int cmd_scan(const std::string& triples_path, const PipelineConfig& cfg,
             ReportFormat fmt, size_t top) {
  TripleList list = load_triple_file(triples_path);
  for (const auto& iss : list.issues)
    std::cerr << "warning: line " << iss.line << ": " << iss.message << "\n";
  std::vector<Candidate> cands = scan(list.triples, cfg);
  if (top != 0 && cands.size() > top) cands.resize(top);
  if (fmt == ReportFormat::Json) {
    json arr = json::array();
    for (const auto& c : cands) {
      arr.push_back(json{{"triple", list.triples[c.triple_index].str()},
                         {"q", c.q.str()},
                         {"g_over_l", c.g_over_l},
                         {"projected_sha_root", c.projected_sha_root},
                         {"projected_burden", c.projected_burden},
                         {"t", c.t},
                         {"s", c.s},
                         {"q_divides_rad", c.q_divides_rad},
                         {"class", c.hash}});
    }
    std::cout << arr.dump(2) << "\n";
  } else {
    for (const auto& c : cands) {
      std::printf("g/L=%-12.6g q=%-12s burden=%-10lld root~%.3g %s %s\n",
                  c.g_over_l, c.q.str().c_str(), c.projected_burden,
                  c.projected_sha_root, c.q_divides_rad ? "q|r" : "   ",
                  list.triples[c.triple_index].str().c_str());
    }
  }
  return kExitOk;
}

int finish_run(const IsogenyClass& cls, const RunOutcome& out,
               ReportFormat fmt, const mpz_class& sha_prime_threshold) {
  switch (out.status) {
    case RunStatus::Converged: {
      ReportRow row = make_report(cls, out.run);
      if (fmt == ReportFormat::Json) {
        ShaFactors fac = sha_prime_factors(out.run.root, sha_prime_threshold);
        json j{{"row", row.str()},
               {"sha_root", out.run.root},
               {"sha_root_factored", fac.root.str()},
               {"n_stop", out.run.n_stop},
               {"steps", out.run.steps},
               {"L", out.run.l_value.str(12)},
               {"G", out.run.g_value.str(12)},
               {"class", cls.hash}};
        json large = json::array();
        for (const auto& p : fac.large) large.push_back(p.get_str());
        j["large_sha_primes"] = large;
        std::cout << j.dump(2) << "\n";
      } else {
        std::cout << row.str() << "\n";
        ShaFactors fac = sha_prime_factors(out.run.root, sha_prime_threshold);
        std::cout << "sha root " << out.run.root << " = " << fac.root.str()
                  << "  (n=" << out.run.n_stop << ")\n";
        for (const auto& p : fac.large)
          std::cout << "large sha prime: " << p.get_str() << "\n";
      }
      return kExitOk;
    }
    case RunStatus::RankSuspect:
      std::cerr << "aborted: " << out.stop_reason << "\n";
      return kExitRankSuspect;
    case RunStatus::BudgetExceeded:
    case RunStatus::TermCapReached:
      std::cerr << "aborted: " << out.stop_reason << "\n";
      return kExitBudget;
  }
  return kExitInternal;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"twisted Frey isogeny classes: analytic third-descent orders"};
  app.require_subcommand(1);

  CommonArgs args;
  PipelineConfig cfg;
  std::string out_fmt = "text";
  std::string triples_path, dataset_path, checkpoint_path;
  size_t top = 0;
  bool quiet = false;
  std::vector<uint64_t> stages{10'000'000, 100'000'000};
  double l_floor = 1.0;

  auto add_perf = [&](CLI::App* sub) {
    sub->add_option("--precision", cfg.series.digits,
                    "working precision, decimal digits")
        ->envname("SHABC_PRECISION");
    sub->add_option("--step", cfg.series.step, "stopping-rule step length")
        ->envname("SHABC_STEP");
    sub->add_option("--block", cfg.series.block, "sieve block length")
        ->envname("SHABC_BLOCK");
    sub->add_option("--threads", cfg.series.threads, "block producer threads")
        ->envname("SHABC_THREADS");
    sub->add_option("--naive-bound", cfg.series.naive_bound,
                    "character-sum counting below this prime")
        ->envname("SHABC_NAIVE_BOUND");
    sub->add_option("--cache-entries", cfg.series.cache_entries,
                    "prime-coefficient cache slots")
        ->envname("SHABC_CACHE_ENTRIES");
    sub->add_option("--K", cfg.K, "tail safety factor")->envname("SHABC_K");
    sub->add_option("--burden-max", cfg.burden_max, "work-budget abort limit")
        ->envname("SHABC_BURDEN_MAX");
    sub->add_option("--max-terms", cfg.max_terms,
                    "hard cap on series terms (0 = unlimited)")
        ->envname("SHABC_MAX_TERMS");
    sub->add_option("--checkpoint-dir", cfg.checkpoint_dir,
                    "directory for per-class checkpoints")
        ->envname("SHABC_CHECKPOINT_DIR");
    sub->add_option("--ledger", cfg.ledger_path, "JSONL progress ledger")
        ->envname("SHABC_LEDGER");
    sub->add_flag("--quiet", quiet, "suppress per-step progress");
    sub->add_option("--out", out_fmt, "output format: text, csv, json")
        ->envname("SHABC_OUT");
  };
  auto add_abc = [&](CLI::App* sub, bool with_q) {
    sub->add_option("--a", args.a, "factored a, e.g. \"2^2 11\"")->required();
    sub->add_option("--c", args.c, "factored c, e.g. \"5^9 139^6\"")
        ->required();
    sub->add_option("--b", args.b, "factored b = c - a (optional, verified)");
    if (with_q)
      sub->add_option("--q", args.q, "square-free twist, e.g. \"-2 3 7\"")
          ->required();
  };

  CLI::App* sc_triple = app.add_subcommand("triple", "validate an abc triple");
  add_abc(sc_triple, false);

  CLI::App* sc_inspect =
      app.add_subcommand("inspect", "reduction data of a twisted class");
  add_abc(sc_inspect, true);
  sc_inspect->add_option("--precision", cfg.series.digits, "decimal digits")
      ->envname("SHABC_PRECISION");

  CLI::App* sc_scan =
      app.add_subcommand("scan", "rank twist candidates for a triple list");
  sc_scan->add_option("--triples", triples_path, "triple list file")
      ->required();
  sc_scan->add_option("--qmax", cfg.q_max, "twist bound |q| <= qmax")
      ->envname("SHABC_QMAX");
  sc_scan->add_option("--gl-min", cfg.gl_min, "keep g/L above this")
      ->envname("SHABC_GL_MIN");
  sc_scan->add_option("--burden-max", cfg.burden_max, "drop above this burden")
      ->envname("SHABC_BURDEN_MAX");
  sc_scan->add_option("--top", top, "keep only the best entries");
  sc_scan->add_option("--out", out_fmt, "output format: text, json")
      ->envname("SHABC_OUT");

  CLI::App* sc_rough =
      app.add_subcommand("rough", "staged low-cost screen of one class");
  add_abc(sc_rough, true);
  sc_rough->add_option("--stages", stages, "stage boundaries (terms)");
  sc_rough->add_option("--l-floor", l_floor, "demote below this L estimate");
  add_perf(sc_rough);

  CLI::App* sc_run = app.add_subcommand("run", "full analytic evaluation");
  add_abc(sc_run, true);
  add_perf(sc_run);

  CLI::App* sc_resume =
      app.add_subcommand("resume", "continue a checkpointed run");
  sc_resume->add_option("--checkpoint", checkpoint_path, "checkpoint file")
      ->required();
  add_perf(sc_resume);

  CLI::App* sc_report =
      app.add_subcommand("report", "filter and print class tables");
  sc_report->add_option("--dataset", dataset_path, "known classes JSON")
      ->required();
  ReportFilter filter;
  long long min_root = -1;
  double min_g = -1;
  std::string f_c, f_a;
  sc_report->add_option("--min-root", min_root, "minimum sha root");
  sc_report->add_option("--min-g", min_g, "strict lower bound on G");
  sc_report->add_option("--c", f_c, "exact factored c filter");
  sc_report->add_option("--a", f_a, "exact factored a filter");
  sc_report->add_option("--out", out_fmt, "output format: text, csv, json")
      ->envname("SHABC_OUT");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (sc_triple->parsed()) return cmd_triple(args);
    if (sc_inspect->parsed()) return cmd_inspect(args, cfg.series.digits);
    if (sc_scan->parsed())
      return cmd_scan(triples_path, cfg, parse_format(out_fmt), top);
    if (sc_rough->parsed()) {
      IsogenyClass cls = class_from(args);
      RoughResult r = rough_estimate(cls, cfg, stages, l_floor);
      std::cout << (r.promoted ? "promoted" : "demoted") << " n="
                << r.n_reached << " L~" << r.l_estimate << "\n";
      return kExitOk;
    }
    if (sc_run->parsed() || sc_resume->parsed()) {
      std::optional<std::string> resume_from;
      IsogenyClass cls = [&] {
        if (sc_run->parsed()) return class_from(args);
        CheckpointData data = checkpoint_read(checkpoint_path);
        CommonArgs ck{data.a, data.b, data.c, data.q};
        resume_from = checkpoint_path;
        return class_from(ck);
      }();
      StepCallback cb;
      if (!quiet)
        cb = [](const StepInfo& info) {
          std::fprintf(stderr, "step %u  n=%llu  L~%.9g  y~%.6f\n",
                       info.step_index,
                       static_cast<unsigned long long>(info.n),
                       info.l_estimate, info.y);
        };
      RunOutcome out = run_class(cls, cfg, resume_from, cb);
      return finish_run(cls, out, parse_format(out_fmt),
                        cfg.sha_prime_threshold);
    }
    if (sc_report->parsed()) {
      if (min_root >= 0) filter.min_root = min_root;
      if (min_g >= 0) filter.min_g = min_g;
      if (!f_c.empty()) filter.c_equals = f_c;
      if (!f_a.empty()) filter.a_equals = f_a;
      auto rows = filter_rows(load_known_classes(dataset_path), filter);
      std::cout << format_rows(rows, parse_format(out_fmt));
      return kExitOk;
    }
  } catch (const ResumeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const FactorizationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const InternalError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitValidation;
}
