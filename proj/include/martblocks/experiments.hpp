#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "martblocks/nc.hpp"
#include "martblocks/prob.hpp"
#include "martblocks/rng.hpp"

// Random-instance generation, experiment orchestration, and report
// emission. Every kind draws its instances from the generators below,
// validates them, checks one module property per trial, and emits one row.
// Reports are byte-stable for a fixed spec: trials use per-index RNG
// streams and are merged in instance order, so the worker count never
// shows in the output.

namespace martblocks {

// kind is one of: norm-equiv, step2-constant, duality-p2, median-lemma,
// weak-atom, lp-oracle, nc-step2. points doubles as the matrix dimension
// for the nc kinds and is capped at 8 there and for lp-oracle.
struct ExperimentSpec {
  std::string kind;
  int trials = 0;
  std::uint64_t seed = 0;
  int points = 16;  // <= 64
  int depth = 4;    // <= 6
  double p = 2.0;   // duality exactness exponent; 2 is the only supported value
};

struct ReportRow {
  int instance_id = 0;
  double lhs = 0;
  double rhs = 0;
  double ratio = 0;  // lhs/rhs, 0 when rhs is 0
  bool pass = false;
};

struct ExperimentSummary {
  int trials = 0;
  int passes = 0;
  double max_ratio = 0;
};

struct ExperimentRun {
  std::vector<ReportRow> rows;
  ExperimentSummary summary;
};

// Refining chain: one block at level 1, then each block splits in two with
// probability 0.8 per level (uniform shuffled cut). Weights are a
// symmetric Dirichlet(2) draw. Requires points >= depth >= 1.
FiltrationPtr gen_filtration(Rng& rng, int points, int depth);
FiltrationPtr gen_filtration(std::uint64_t seed, int points, int depth);

// iid standard normal values
Rv gen_rv(Rng& rng, const SpacePtr& space);

// nonempty union of level-k blocks (each kept with probability 1/2)
std::vector<int> gen_level_set(Rng& rng, const Filtration& F, int k);

using NCFiltrationPtr = std::shared_ptr<const NCFiltration>;

// Level 1 is always the scalars. The rest of the chain is either pinchings
// by a coarsening diagonal partition or partial traces over a divisor
// chain, optionally conjugated by one Haar-ish unitary frame (QR of a
// Ginibre matrix).
NCFiltrationPtr gen_nc_filtration(Rng& rng, int dim, int depth);

Op gen_nc_hermitian(Rng& rng, int n);
Op gen_nc_unitary(Rng& rng, int n);

// Spectral projection of E_k(random Hermitian) above a random eigenvalue
// cut, so the result lies in the level-k algebra exactly.
Op gen_nc_projection(Rng& rng, const NCFiltration& F, int k);

// Throws std::invalid_argument on an unknown kind, out-of-bounds sizes, or
// a duality request at an exponent other than 2.
void validate_spec(const ExperimentSpec& spec);

ExperimentRun run_experiment(const ExperimentSpec& spec);

// format "csv" (fixed header instance_id,lhs,rhs,ratio,pass) or "json"
// (array of row objects). Bit-stable given identical rows.
std::string emit_report(const std::vector<ReportRow>& rows, const std::string& format);

std::vector<ReportRow> rows_from_json(const std::string& text);

}  // namespace martblocks
