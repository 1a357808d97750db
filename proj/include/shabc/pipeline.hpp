#ifndef SHABC_PIPELINE_HPP
#define SHABC_PIPELINE_HPP

#include "shabc/lseries.hpp"
#include "shabc/sha.hpp"
#include "shabc/triples.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace shabc {

struct RankSuspectError : Error {
  using Error::Error;
};
struct BudgetError : Error {
  using Error::Error;
};

struct PipelineConfig {
  LSeriesConfig series;
  double K = 4.0;
  double gl_min = 0.5;            // scan keeps candidates with g/L above this
  long long burden_max = 1'000'000;
  uint64_t q_max = 1000;          // scan twist bound |q| <= q_max
  std::string checkpoint_dir;     // empty: no checkpoints
  std::string ledger_path;        // empty: no progress ledger (JSONL)
  mpz_class sha_prime_threshold = 19861;
  unsigned burden_recheck_steps = 10;
  uint64_t max_terms = 0;         // 0: unlimited; else hard n cap
};

// ---- scan -----------------------------------------------------------------

struct Candidate {
  size_t triple_index = 0;
  FactoredInteger q;
  double g_over_l = 0.0;
  double projected_sha_root = 0.0;  // sqrt(g/L * sqrt(N)), the L = 1 horizon
  long long projected_burden = 0;
  int t = 0;
  int s = 0;
  bool q_divides_rad = false;
  std::string hash;
};

// Enumerates square-free twists |q| <= q_max (both signs) for every triple,
// builds each class, and keeps candidates with g/L >= gl_min and projected
// burden <= burden_max, sorted by descending g/L.
std::vector<Candidate> scan(const std::vector<AbcTriple>& triples,
                            const PipelineConfig& cfg);

// ---- run ------------------------------------------------------------------

enum class RunStatus { Converged, RankSuspect, BudgetExceeded, TermCapReached };

struct StepInfo {
  uint64_t n = 0;
  unsigned step_index = 0;
  double l_estimate = 0.0;
  double y = 0.0;
};

struct RunOutcome {
  RunStatus status = RunStatus::Converged;
  ConvergedRun run;                  // valid when status == Converged
  uint64_t n_processed = 0;
  unsigned steps = 0;
  long long last_burden = 0;
  std::string stop_reason;
};

using StepCallback = std::function<void(const StepInfo&)>;

// Full evaluation loop with the stopping rule, periodic burden re-checks,
// optional checkpointing, and the JSONL ledger.  `resume_from` restores a
// checkpoint file before continuing.
RunOutcome run_class(const IsogenyClass& cls, const PipelineConfig& cfg,
                     const std::optional<std::string>& resume_from = {},
                     const StepCallback& on_step = {});

// Two-stage cheap screen: advance to each stage boundary and demote the
// candidate when the partial L estimate stays below l_floor.
struct RoughResult {
  bool promoted = false;
  uint64_t n_reached = 0;
  double l_estimate = 0.0;
};
RoughResult rough_estimate(const IsogenyClass& cls, const PipelineConfig& cfg,
                           const std::vector<uint64_t>& stages,
                           double l_floor = 1.0);

// ---- report ---------------------------------------------------------------

struct KnownClassRow {
  long long sha_root = 0;
  std::string c, a;
  long long q = 0;
  int k = 0;
  std::string l6, g6;  // published 6-digit strings
  int s = 0;
};

std::vector<KnownClassRow> load_known_classes(const std::string& path);

struct ReportFilter {
  std::optional<long long> min_root;
  std::optional<double> min_g;
  std::optional<std::string> c_equals;
  std::optional<std::string> a_equals;
};

std::vector<KnownClassRow> filter_rows(const std::vector<KnownClassRow>& rows,
                                       const ReportFilter& f);

enum class ReportFormat { Text, Csv, Json };
std::string format_rows(const std::vector<KnownClassRow>& rows,
                        ReportFormat fmt);

// Appends one JSON line under an exclusive flock; creates the file if needed.
void ledger_append(const std::string& path, const std::string& json_line);

}  // namespace shabc

#endif
