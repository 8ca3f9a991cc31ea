// attack.hpp — edge-perturbation plans: the centrality×similarity attack,
// the Random and DICE baselines, and the degree/distance quantile
// injection experiments.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "structack/centrality.hpp"
#include "structack/graph.hpp"
#include "structack/similarity.hpp"

namespace structack {

struct AttackPlan {
  std::string attack_name;
  EdgeSet edges_to_add;
  EdgeSet edges_to_remove;  // used by DICE only
  std::int64_t budget = 0;  // k = floor(rate · m) on the clean graph
  double rate = 0.0;
  std::uint64_t seed = 0;
  // Perturbations abandoned during collision repair (budget under-spend).
  int dropped = 0;
};

std::int64_t attack_budget(const Graph& g, double rate);

struct StructackOptions {
  double katz_alpha = 0.85;
  int katz_iterations = 100;
  // Rescales alpha to 0.85 / lambda_max so the series converges; default
  // keeps the plain truncated sum even outside the convergence radius.
  bool katz_spectral_rescale = false;
};

// Selection: the 2k lowest-centrality nodes split in order (U1 = lowest k).
// Linking: min-cost perfect matching on the U1×U2 similarity block, then
// matched pairs become new edges. A matched pair that already exists is
// re-linked greedily to the least-similar still-free U2 node; failing
// that, the perturbation is dropped.
AttackPlan structack_attack(const Graph& g, CentralityMeasure centrality, SimilarityMeasure similarity,
                     double rate, std::uint64_t seed, const StructackOptions& options = {});

// k uniformly sampled distinct absent non-self pairs.
AttackPlan random_attack(const Graph& g, double rate, std::uint64_t seed);

// Per perturbation, a fair coin picks between removing a random
// intra-label edge and adding a random absent inter-label pair; an
// exhausted category falls back to the other.
AttackPlan dice_attack(const Graph& g, double rate, std::uint64_t seed);

// Nodes sorted by (degree, id) and cut into 10 near-equal subsets
// (remainder spread over the first ones); k edges sampled uniformly
// between subset `decile_i` and subset `decile_j` (0-based).
AttackPlan degree_quantile_injection(const Graph& g, int decile_i, int decile_j, double rate,
                                     std::uint64_t seed);

// Per edge: sample a node u, rank all other nodes by (hop distance, id)
// with unreachable treated as distance n, cut into 10 subsets, and link u
// to a random member of subset `trial` (1-based). Existing edges are
// resampled, up to 100 tries per edge.
AttackPlan distance_quantile_injection(const Graph& g, int trial, double rate,
                                       std::uint64_t seed);

// The 10 degree subsets, each sorted ascending by id.
std::vector<std::vector<NodeId>> degree_deciles(const Graph& g);

// The 10 distance subsets around `source` (source itself excluded).
std::vector<std::vector<NodeId>> distance_deciles(const Graph& g, NodeId source);

// Removals applied first, then additions; attributes carried over.
Graph apply_plan(const Graph& g, const AttackPlan& plan);

void to_json(nlohmann::json& j, const AttackPlan& plan);
void from_json(const nlohmann::json& j, AttackPlan& plan);

}  // namespace structack
