#include "martblocks/serialize.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace martblocks {

using nlohmann::json;

namespace {

json values_to_json(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(x);
  return a;
}

std::vector<double> values_from_json(const json& a) {
  if (!a.is_array()) throw std::invalid_argument("expected an array of numbers");
  std::vector<double> out;
  out.reserve(a.size());
  for (const auto& x : a) out.push_back(x.get<double>());
  return out;
}

json exponent_to_json(double p) { return std::isinf(p) ? json("inf") : json(p); }

double exponent_from_json(const json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "inf") return std::numeric_limits<double>::infinity();
    throw std::invalid_argument("unknown exponent tag");
  }
  return j.get<double>();
}

}  // namespace

json filtration_to_json(const Filtration& F) {
  json j;
  j["weights"] = values_to_json(F.space()->weights());
  json levels = json::array();
  for (int k = 1; k <= F.depth(); ++k) levels.push_back(F.level_ids(k));
  j["levels"] = levels;
  return j;
}

FiltrationPtr filtration_from_json(const json& j) {
  if (!j.contains("weights") || !j.contains("levels"))
    throw std::invalid_argument("missing weights or levels");
  auto space = std::make_shared<WeightedSpace>(values_from_json(j.at("weights")));
  std::vector<std::vector<int>> levels;
  for (const auto& L : j.at("levels")) levels.push_back(L.get<std::vector<int>>());
  return std::make_shared<Filtration>(space, std::move(levels));
}

json rv_to_json(const Rv& f, const Filtration& F) {
  json j = filtration_to_json(F);
  j["values"] = values_to_json(f.values);
  return j;
}

std::pair<Rv, FiltrationPtr> rv_from_json(const json& j) {
  auto F = filtration_from_json(j);
  if (!j.contains("values")) throw std::invalid_argument("missing values");
  auto vals = values_from_json(j.at("values"));
  if (static_cast<int>(vals.size()) != F->points())
    throw std::invalid_argument("values do not match the space");
  return {Rv(F->space(), std::move(vals)), F};
}

json block_to_json(const AtomicBlock& b) {
  json j;
  if (b.sigma1) {
    j["kind"] = "sigma1";
    j["values"] = values_to_json(b.sigma1_values.values);
    return j;
  }
  j["kind"] = "cancel";
  j["k"] = b.k;
  json terms = json::array();
  for (const auto& [lam, s] : b.terms) {
    json t;
    t["lambda"] = lam;
    t["k_j"] = s.k_j;
    t["support"] = s.A;
    t["values"] = values_to_json(s.values.values);
    t["p"] = exponent_to_json(s.norm_p);
    t["measure_exp"] = s.measure_exp;
    terms.push_back(std::move(t));
  }
  j["terms"] = std::move(terms);
  return j;
}

AtomicBlock block_from_json(const json& j, const SpacePtr& space) {
  AtomicBlock b;
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "sigma1") {
    b.sigma1 = true;
    b.sigma1_values = Rv(space, values_from_json(j.at("values")));
    return b;
  }
  if (kind != "cancel") throw std::invalid_argument("unknown block kind");
  b.k = j.at("k").get<int>();
  for (const auto& t : j.at("terms")) {
    Subatom s;
    s.k_block = b.k;
    s.k_j = t.at("k_j").get<int>();
    s.A = t.at("support").get<std::vector<int>>();
    s.values = Rv(space, values_from_json(t.at("values")));
    s.norm_p = exponent_from_json(t.at("p"));
    s.measure_exp = t.at("measure_exp").get<double>();
    b.terms.emplace_back(t.at("lambda").get<double>(), std::move(s));
  }
  return b;
}

json report_to_json(const DecompositionReport& r, const Filtration& F) {
  json j;
  j["cost"] = r.cost;
  json blocks = json::array();
  for (const auto& b : r.blocks) blocks.push_back(block_to_json(b));
  j["blocks"] = std::move(blocks);
  j["residual"] = values_to_json(r.residual.values);
  j["residual_sup"] = linf_norm(r.residual);
  j["space"] = filtration_to_json(F);
  return j;
}

std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

}  // namespace martblocks
