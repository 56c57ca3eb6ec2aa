#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>

#include "attrdisam/baselines.hpp"
#include "attrdisam/pomdp.hpp"

namespace attrdisam {

struct DecisionContext {
  const Belief& belief;
  const GroundingResult& grounding;
  int questions_asked = 0;
  /// Seed for any randomness the policy needs at this step.
  std::uint64_t seed = 0;
};

struct Decision {
  Action action;
  std::uint64_t expansions = 0;
};

/// A disambiguation policy. Implementations hold only configuration, so one
/// instance may serve concurrent episodes.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::string_view name() const = 0;
  virtual Decision decide(const DecisionContext& ctx) const = 0;
};

/// attr_pomdp | rand_ask | rand_sel | point_only | per_object_attr
std::span<const std::string_view> policy_names();

/// Throws Error{Config} listing the valid names when `name` is unknown.
std::unique_ptr<Policy> make_policy(std::string_view name, const PlannerConfig& planner,
                                    const BaselineConfig& baseline);

}  // namespace attrdisam
