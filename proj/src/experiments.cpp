#include "martblocks/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "martblocks/atoms.hpp"
#include "martblocks/medians.hpp"
#include "martblocks/norms.hpp"
#include "martblocks/serialize.hpp"

namespace martblocks {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// value <= bound up to the shared relative slack
bool leq(double value, double bound, double tol = 1e-9) {
  return value <= bound + tol * std::max(1.0, bound);
}

template <typename T>
void shuffle_vec(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i)
    std::swap(v[i - 1], v[static_cast<std::size_t>(rng.below(i))]);
}

double ratio_of(double lhs, double rhs) { return rhs > 0 ? lhs / rhs : 0.0; }

int clamp_depth(const ExperimentSpec& spec, int lo, int hi) {
  return std::max(lo, std::min({spec.depth, hi, spec.points}));
}

// ---------------------------------------------------------------------------
// per-kind trial bodies
// ---------------------------------------------------------------------------

ReportRow trial_norm_equiv(const ExperimentSpec& spec, Rng& rng) {
  auto F = gen_filtration(rng, spec.points, std::min(spec.depth, spec.points));
  Rv f = gen_rv(rng, F->space());
  auto [lhs, rhs] = bmo_equiv_gap(f, *F);
  ReportRow row;
  row.lhs = lhs;
  row.rhs = rhs;
  row.ratio = ratio_of(lhs, rhs);
  row.pass = leq(lhs, rhs) && leq(rhs, 3.0 * lhs);
  return row;
}

ReportRow trial_step2(const ExperimentSpec& spec, Rng& rng) {
  int depth = clamp_depth(spec, 2, 6);
  auto F = gen_filtration(rng, spec.points, depth);
  int k = rng.range(2, depth);
  std::vector<int> A0;
  for (int i = 0; i < F->points(); ++i)
    if (rng.coin(0.4)) A0.push_back(i);
  if (A0.empty()) A0.push_back(static_cast<int>(rng.below(F->points())));

  AtomicBlock block = decompose_delta_indicator(A0, *F, k, 2.0);
  Rv chi = zero_rv(F->space());
  for (int i : A0) chi.values[i] = 1.0;
  Rv delta = mart_diff(chi, *F, k);

  ReportRow row;
  row.lhs = block.cost();
  row.rhs = F->space()->measure(A0);
  row.ratio = ratio_of(row.lhs, row.rhs);
  row.pass = validate_block(block, *F).ok &&
             linf_norm(rv_sub(block_sum(block, *F), delta)) <= 1e-9 && row.ratio <= 6.0 + 1e-9;
  return row;
}

ReportRow trial_duality(const ExperimentSpec& spec, Rng& rng) {
  ReportRow row;
  row.pass = true;
  auto consider = [&row](double lhs, double rhs) {
    row.pass = row.pass && leq(lhs, rhs);
    if (ratio_of(lhs, rhs) >= row.ratio) {
      row.lhs = lhs;
      row.rhs = rhs;
      row.ratio = ratio_of(lhs, rhs);
    }
  };

  auto F = gen_filtration(rng, spec.points, std::min(spec.depth, spec.points));
  Rv f = gen_rv(rng, F->space());
  Rv phi = gen_rv(rng, F->space());
  DecompositionReport rep = decompose_H1_to_blocks(f, *F, 2.0);
  for (const auto& b : rep.blocks) {
    auto [lhs, rhs] = duality_bound_check_p2(b, phi, *F);
    consider(lhs, rhs);
  }

  int dim = std::max(2, std::min(spec.points, 8));
  int depth = std::max(2, std::min(spec.depth, 4));
  auto Fn = gen_nc_filtration(rng, dim, depth);
  int k = rng.range(2, depth);
  Op proj = gen_nc_projection(rng, *Fn, k);
  NCBlock blk = decompose_delta_projection(proj, *Fn, k);
  Op phin = gen_nc_hermitian(rng, dim);
  auto [nl, nr] = nc_duality_bound_check_p2(blk, phin, *Fn);
  consider(nl, nr);
  if (rng.coin()) {
    NCBlock s1;
    s1.sigma1 = true;
    s1.sigma1_values = nc_cond_exp(gen_nc_hermitian(rng, dim), *Fn, 1);
    auto [sl, sr] = nc_duality_bound_check_p2(s1, phin, *Fn);
    consider(sl, sr);
  }
  return row;
}

ReportRow trial_median_lemma(const ExperimentSpec& spec, Rng& rng) {
  int depth = std::min(spec.depth, spec.points);
  auto F = gen_filtration(rng, spec.points, depth);
  Rv f = gen_rv(rng, F->space());
  int k = rng.range(1, depth);
  std::vector<int> A = gen_level_set(rng, *F, k);

  auto [lhsRv, ok] = cm_lemma_check(f, *F, k, A);
  double lo = 2.0;
  for (int i : A) lo = std::min(lo, lhsRv.values[i]);

  // the defining inequalities on every level-k block
  Rv alpha = cond_median(f, *F, k);
  bool median_ok = true;
  for (int b = 0; b < F->block_count(k); ++b) {
    double below = 0, above = 0, total = 0;
    for (int i : F->block_points(k, b)) {
      double w = F->space()->weight(i);
      total += w;
      if (f.values[i] < alpha.values[i]) below += w;
      if (f.values[i] > alpha.values[i]) above += w;
    }
    double half = total / 2 + 1e-12 * std::max(1.0, total);
    median_ok = median_ok && below <= half && above <= half;
  }

  ReportRow row;
  row.lhs = lo;
  row.rhs = 0.5;
  row.ratio = ratio_of(lo, 0.5);
  row.pass = ok && median_ok;
  return row;
}

ReportRow trial_weak_atom(const ExperimentSpec& spec, Rng& rng) {
  int depth = clamp_depth(spec, 2, 6);
  auto F = gen_filtration(rng, spec.points, depth);
  int k = rng.range(2, depth);
  int cell = static_cast<int>(rng.below(F->block_count(k)));
  std::vector<int> A = F->block_points(k, cell);
  Rv xi = zero_rv(F->space());
  for (int i = 0; i < F->points(); ++i) xi.values[i] = rng.uniform(-1.0, 1.0);

  WeakAtomSplit split = weak_atom_split(xi, A, *F, k);

  Rv chix = zero_rv(F->space());
  for (int i : A) chix.values[i] = xi.values[i];
  double muA = F->space()->measure(A);
  Rv w = rv_scale(rv_sub(cond_exp(chix, *F, k), cond_exp(chix, *F, k - 1)), 1.0 / muA);

  bool ok = linf_norm(rv_sub(rv_add(split.a1, split.a2), w)) <= 1e-9;
  ok = ok && linf_norm(rv_sub(block_sum(split.block, *F), w)) <= 1e-9;
  ok = ok && validate_block(split.block, *F).ok;
  // pointwise bounds |a1| <= 1/mu(B\A), |a2| <= 2/mu(A)
  std::vector<int> B = F->block_points(k - 1, F->block_of(k - 1, A[0]));
  double muBmA = F->space()->measure(B) - muA;
  if (muBmA > 0) ok = ok && leq(linf_norm(split.a1), 1.0 / muBmA);
  ok = ok && leq(linf_norm(split.a2), 2.0 / muA);

  ReportRow row;
  row.lhs = split.certificate;
  row.rhs = 6.0;
  row.ratio = ratio_of(row.lhs, row.rhs);
  row.pass = ok && leq(split.certificate, 6.0);
  return row;
}

ReportRow trial_lp_oracle(const ExperimentSpec& spec, Rng& rng) {
  int depth = std::min({spec.depth, 4, spec.points});
  auto F = gen_filtration(rng, spec.points, depth);
  Rv f = gen_rv(rng, F->space());

  double lp = atb_norm_lp(f, *F);
  DecompositionReport rep = decompose_H1_to_blocks(f, *F, kInf);
  double ub = rep.cost;
  double l1 = lp_norm(f, 1.0);

  bool ok = leq(l1, lp, 1e-7) && leq(lp, ub, 1e-7);
  // gauge axioms on the same instance
  double c = rng.uniform(0.25, 4.0);
  double lp_scaled = atb_norm_lp(rv_scale(f, c), *F);
  ok = ok && std::fabs(lp_scaled - c * lp) <= 1e-7 * std::max(1.0, c * lp);
  Rv g = gen_rv(rng, F->space());
  double lp_g = atb_norm_lp(g, *F);
  double lp_sum = atb_norm_lp(rv_add(f, g), *F);
  ok = ok && leq(lp_sum, lp + lp_g, 1e-7);

  ReportRow row;
  row.lhs = lp;
  row.rhs = ub;
  row.ratio = ratio_of(lp, ub);
  row.pass = ok;
  return row;
}

ReportRow trial_nc_step2(const ExperimentSpec& spec, Rng& rng) {
  int dim = spec.points;
  int depth = std::max(2, std::min(spec.depth, 4));
  auto Fn = gen_nc_filtration(rng, dim, depth);
  int k = rng.range(2, depth);
  Op proj = gen_nc_projection(rng, *Fn, k);
  NCBlock blk = decompose_delta_projection(proj, *Fn, k);

  Op delta = nc_cond_exp(proj, *Fn, k) - nc_cond_exp(proj, *Fn, k - 1);
  ReportRow row;
  row.lhs = blk.cost();
  row.rhs = nc_trace(proj).real();
  row.ratio = ratio_of(row.lhs, row.rhs);
  bool recon = (nc_block_sum(blk, *Fn) - delta).norm() <= 1e-9;
  bool cost_ok = row.rhs > 0 ? row.ratio <= 6.0 + 1e-9 : row.lhs <= 1e-12;
  row.pass = validate_nc_block(blk, *Fn).ok && recon && cost_ok;
  return row;
}

ReportRow run_one(const ExperimentSpec& spec, int t) {
  Rng rng = Rng::stream(spec.seed, static_cast<std::uint64_t>(t));
  ReportRow row;
  if (spec.kind == "norm-equiv")
    row = trial_norm_equiv(spec, rng);
  else if (spec.kind == "step2-constant")
    row = trial_step2(spec, rng);
  else if (spec.kind == "duality-p2")
    row = trial_duality(spec, rng);
  else if (spec.kind == "median-lemma")
    row = trial_median_lemma(spec, rng);
  else if (spec.kind == "weak-atom")
    row = trial_weak_atom(spec, rng);
  else if (spec.kind == "lp-oracle")
    row = trial_lp_oracle(spec, rng);
  else
    row = trial_nc_step2(spec, rng);
  row.instance_id = t;
  return row;
}

int thread_cap() {
  unsigned hw = std::thread::hardware_concurrency();
  int cap = hw ? static_cast<int>(hw) : 1;
  if (const char* env = std::getenv("MARTBLOCKS_THREADS")) {
    int v = std::atoi(env);
    if (v >= 1) cap = v;
  }
  return cap;
}

}  // namespace

FiltrationPtr gen_filtration(Rng& rng, int points, int depth) {
  if (depth < 1 || points < depth) throw std::invalid_argument("need points >= depth >= 1");
  if (points > 64 || depth > 6) throw std::invalid_argument("size bounds exceeded");
  std::vector<double> w(static_cast<std::size_t>(points));
  double s = 0;
  for (auto& x : w) {
    x = rng.exponential() + rng.exponential() + 1e-9;  // symmetric Dirichlet(2)
    s += x;
  }
  for (auto& x : w) x /= s;
  auto space = std::make_shared<WeightedSpace>(std::move(w));

  std::vector<std::vector<std::vector<int>>> parts(1);
  parts[0].emplace_back(points);
  std::iota(parts[0][0].begin(), parts[0][0].end(), 0);
  for (int k = 2; k <= depth; ++k) {
    std::vector<std::vector<int>> next;
    for (auto blk : parts.back()) {
      if (blk.size() >= 2 && rng.coin(0.8)) {
        shuffle_vec(blk, rng);
        int cut = rng.range(1, static_cast<int>(blk.size()) - 1);
        next.emplace_back(blk.begin(), blk.begin() + cut);
        next.emplace_back(blk.begin() + cut, blk.end());
      } else {
        next.push_back(std::move(blk));
      }
    }
    parts.push_back(std::move(next));
  }
  std::vector<std::vector<int>> levels;
  for (const auto& level : parts) {
    std::vector<int> ids(static_cast<std::size_t>(points));
    for (std::size_t b = 0; b < level.size(); ++b)
      for (int i : level[b]) ids[static_cast<std::size_t>(i)] = static_cast<int>(b);
    levels.push_back(std::move(ids));
  }
  return std::make_shared<Filtration>(space, std::move(levels));
}

FiltrationPtr gen_filtration(std::uint64_t seed, int points, int depth) {
  Rng rng(seed);
  return gen_filtration(rng, points, depth);
}

Rv gen_rv(Rng& rng, const SpacePtr& space) {
  Rv f = zero_rv(space);
  for (auto& v : f.values) v = rng.normal();
  return f;
}

std::vector<int> gen_level_set(Rng& rng, const Filtration& F, int k) {
  std::vector<int> keep;
  for (int b = 0; b < F.block_count(k); ++b)
    if (rng.coin()) keep.push_back(b);
  if (keep.empty()) keep.push_back(static_cast<int>(rng.below(F.block_count(k))));
  std::vector<int> pts;
  for (int b : keep) {
    const auto& p = F.block_points(k, b);
    pts.insert(pts.end(), p.begin(), p.end());
  }
  std::sort(pts.begin(), pts.end());
  return pts;
}

Op gen_nc_hermitian(Rng& rng, int n) {
  Op g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = std::complex<double>(rng.normal(), rng.normal());
  return (g + g.adjoint()) / 2.0;
}

Op gen_nc_unitary(Rng& rng, int n) {
  Op g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = std::complex<double>(rng.normal(), rng.normal());
  Eigen::HouseholderQR<Op> qr(g);
  Op q = qr.householderQ();
  // fix the phases so the factor is unique given g
  Op r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < n; ++i) {
    std::complex<double> d = r(i, i);
    if (std::abs(d) > 0) q.col(i) *= d / std::abs(d);
  }
  return q;
}

NCFiltrationPtr gen_nc_filtration(Rng& rng, int dim, int depth) {
  if (dim < 1 || dim > 8) throw std::invalid_argument("dimension bounds exceeded");
  if (depth < 1 || depth > 6) throw std::invalid_argument("depth bounds exceeded");
  std::vector<NCLevel> levels;
  levels.push_back(TensorLevel{1, dim});  // scalars first, always
  if (depth >= 2) {
    if (rng.coin(0.6)) {
      // coarsening diagonal partitions: finest at level 2, one part at the top
      std::vector<std::vector<std::vector<int>>> chain(1);
      chain[0].emplace_back(dim);
      std::iota(chain[0][0].begin(), chain[0][0].end(), 0);
      for (int d = depth - 1; d >= 2; --d) {
        std::vector<std::vector<int>> next;
        for (auto blk : chain.back()) {
          if (blk.size() >= 2 && rng.coin(0.7)) {
            shuffle_vec(blk, rng);
            int cut = rng.range(1, static_cast<int>(blk.size()) - 1);
            next.emplace_back(blk.begin(), blk.begin() + cut);
            next.emplace_back(blk.begin() + cut, blk.end());
          } else {
            next.push_back(std::move(blk));
          }
        }
        chain.push_back(std::move(next));
      }
      for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
        PinchLevel pin;
        for (const auto& blk : *it) {
          Op p = Op::Zero(dim, dim);
          for (int i : blk) p(i, i) = 1.0;
          pin.projections.push_back(std::move(p));
        }
        levels.push_back(std::move(pin));
      }
    } else {
      // divisor chain a_2 | a_3 | ... | a_depth = dim
      std::vector<int> a(static_cast<std::size_t>(depth + 1), dim);
      for (int d = depth - 1; d >= 2; --d) {
        std::vector<int> divs;
        for (int v = 1; v <= a[static_cast<std::size_t>(d + 1)]; ++v)
          if (a[static_cast<std::size_t>(d + 1)] % v == 0) divs.push_back(v);
        a[static_cast<std::size_t>(d)] = divs[rng.below(divs.size())];
      }
      for (int d = 2; d <= depth; ++d)
        levels.push_back(TensorLevel{a[static_cast<std::size_t>(d)],
                                     dim / a[static_cast<std::size_t>(d)]});
    }
  }
  std::optional<Op> frame;
  if (rng.coin()) frame = gen_nc_unitary(rng, dim);
  return std::make_shared<NCFiltration>(dim, std::move(levels), std::move(frame));
}

Op gen_nc_projection(Rng& rng, const NCFiltration& F, int k) {
  const int n = F.dim();
  for (int attempt = 0; attempt < 8; ++attempt) {
    Op m = F.apply(k, gen_nc_hermitian(rng, n));
    Eigen::SelfAdjointEigenSolver<Op> es(m);
    const auto& ev = es.eigenvalues();
    if (ev[n - 1] - ev[0] < 1e-9) continue;
    int cut = rng.range(1, n - 1);
    double thr = (ev[cut - 1] + ev[cut]) / 2.0;
    // a cut through a degenerate eigenvalue would leave the level's algebra
    if (thr - ev[cut - 1] < 1e-9 || ev[cut] - thr < 1e-9) continue;
    return spectral_proj_interval(m, thr, ev[n - 1] + 1.0);
  }
  return Op::Identity(n, n);
}

void validate_spec(const ExperimentSpec& spec) {
  static const char* kinds[] = {"norm-equiv", "step2-constant", "duality-p2", "median-lemma",
                                "weak-atom",  "lp-oracle",      "nc-step2"};
  bool known = false;
  for (const char* k : kinds) known = known || spec.kind == k;
  if (!known) throw std::invalid_argument("unknown experiment kind: " + spec.kind);
  if (spec.trials < 0) throw std::invalid_argument("negative trial count");
  if (spec.points < 2 || spec.points > 64) throw std::invalid_argument("points out of bounds");
  if (spec.depth < 1 || spec.depth > 6) throw std::invalid_argument("depth out of bounds");
  if ((spec.kind == "lp-oracle" || spec.kind == "nc-step2") && spec.points > 8)
    throw std::invalid_argument(spec.kind + " instances cap at 8 points");
  if (spec.kind == "duality-p2" && std::fabs(spec.p - 2.0) > 1e-12)
    throw std::invalid_argument("duality experiments are exact at p = 2 only");
}

ExperimentRun run_experiment(const ExperimentSpec& spec) {
  validate_spec(spec);
  ExperimentRun run;
  run.rows.resize(static_cast<std::size_t>(spec.trials));
  int workers = std::min(thread_cap(), std::max(spec.trials, 1));
  if (workers <= 1) {
    for (int t = 0; t < spec.trials; ++t) run.rows[static_cast<std::size_t>(t)] = run_one(spec, t);
  } else {
    std::atomic<int> next{0};
    std::exception_ptr err;
    std::mutex err_mu;
    auto work = [&] {
      try {
        for (int t = next.fetch_add(1); t < spec.trials; t = next.fetch_add(1))
          run.rows[static_cast<std::size_t>(t)] = run_one(spec, t);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (!err) err = std::current_exception();
      }
    };
    std::vector<std::thread> pool;
    for (int i = 0; i < workers; ++i) pool.emplace_back(work);
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
  }
  run.summary.trials = spec.trials;
  for (const auto& r : run.rows) {
    run.summary.passes += r.pass ? 1 : 0;
    if (std::isfinite(r.ratio)) run.summary.max_ratio = std::max(run.summary.max_ratio, r.ratio);
  }
  return run;
}

std::string emit_report(const std::vector<ReportRow>& rows, const std::string& format) {
  if (format == "csv") {
    std::string out = "instance_id,lhs,rhs,ratio,pass\n";
    for (const auto& r : rows) {
      out += std::to_string(r.instance_id);
      out += ',';
      out += format_double(r.lhs);
      out += ',';
      out += format_double(r.rhs);
      out += ',';
      out += format_double(r.ratio);
      out += ',';
      out += r.pass ? '1' : '0';
      out += '\n';
    }
    return out;
  }
  if (format == "json") {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rows) {
      nlohmann::json o;
      o["instance_id"] = r.instance_id;
      o["lhs"] = r.lhs;
      o["rhs"] = r.rhs;
      o["ratio"] = r.ratio;
      o["pass"] = r.pass;
      arr.push_back(std::move(o));
    }
    return dump_json(arr);
  }
  throw std::invalid_argument("unknown report format: " + format);
}

std::vector<ReportRow> rows_from_json(const std::string& text) {
  nlohmann::json arr = nlohmann::json::parse(text);
  std::vector<ReportRow> rows;
  for (const auto& o : arr) {
    ReportRow r;
    r.instance_id = o.at("instance_id").get<int>();
    r.lhs = o.at("lhs").get<double>();
    r.rhs = o.at("rhs").get<double>();
    r.ratio = o.at("ratio").get<double>();
    r.pass = o.at("pass").get<bool>();
    rows.push_back(r);
  }
  return rows;
}

}  // namespace martblocks
