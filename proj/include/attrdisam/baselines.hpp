#pragma once

#include <cstdint>
#include <vector>

#include "attrdisam/pomdp.hpp"
#include "attrdisam/rng.hpp"

namespace attrdisam {

struct BaselineConfig {
  /// Question budget n_q; at the budget the policy grasps argmax b.
  int max_questions = 5;
  double belief_threshold = 0.8;

  void validate() const;
};

/// Uniformly random object id in [0, n).
int rand_sel(int n, std::uint64_t seed);

/// Grasps argmax b once it reaches the threshold or the budget is spent,
/// otherwise picks one of the three Attr-POMDP questions uniformly.
Action rand_ask_policy(const Belief& b, const BaselineConfig& cfg, int questions_asked, Rng& rng);
Action rand_ask_policy(const Belief& b, const BaselineConfig& cfg, int questions_asked,
                       std::uint64_t seed);

/// FETCH-style space: AskPoint and Grasp for every object.
class PointOnlyActionSpace final : public ActionSpace {
 public:
  void actions(std::span<const double> belief, std::vector<Action>& out) const override;
  void leaf_actions(std::span<const double> belief, std::vector<Action>& out) const override;
};

/// INGRESS-style space: the point-only actions plus, for every object, a
/// polar question about its most likely color and most likely cell.
class PerObjectAttrActionSpace final : public ActionSpace {
 public:
  explicit PerObjectAttrActionSpace(const GroundingResult& g);
  void actions(std::span<const double> belief, std::vector<Action>& out) const override;
  void leaf_actions(std::span<const double> belief, std::vector<Action>& out) const override;

 private:
  std::vector<Action> semantic_;
};

PlanResult point_only_pomdp_plan(const Belief& b, const GroundingResult& g, const PlannerConfig& cfg);
PlanResult per_object_attr_pomdp_plan(const Belief& b, const GroundingResult& g,
                                      const PlannerConfig& cfg);

}  // namespace attrdisam
