#include "attrdisam/policy.hpp"

#include <array>

#include "attrdisam/error.hpp"

namespace attrdisam {

namespace {

constexpr std::array<std::string_view, 5> kPolicyNames{"attr_pomdp", "rand_ask", "rand_sel",
                                                       "point_only", "per_object_attr"};

class AttrPomdpPolicy final : public Policy {
 public:
  explicit AttrPomdpPolicy(PlannerConfig cfg) : cfg_(cfg) {}
  std::string_view name() const override { return kPolicyNames[0]; }
  Decision decide(const DecisionContext& ctx) const override {
    const PlanResult r = plan(ctx.belief, ctx.grounding, cfg_);
    return {r.action, r.expansions};
  }

 private:
  PlannerConfig cfg_;
};

class RandAskPolicy final : public Policy {
 public:
  explicit RandAskPolicy(BaselineConfig cfg) : cfg_(cfg) {}
  std::string_view name() const override { return kPolicyNames[1]; }
  Decision decide(const DecisionContext& ctx) const override {
    return {rand_ask_policy(ctx.belief, cfg_, ctx.questions_asked, ctx.seed), 0};
  }

 private:
  BaselineConfig cfg_;
};

class RandSelPolicy final : public Policy {
 public:
  std::string_view name() const override { return kPolicyNames[2]; }
  Decision decide(const DecisionContext& ctx) const override {
    return {Action::grasp(rand_sel(static_cast<int>(ctx.belief.size()), ctx.seed)), 0};
  }
};

/// Expectimax baselines; they grasp argmax b once the question budget is spent.
class BudgetedSearchPolicy final : public Policy {
 public:
  using Planner = PlanResult (*)(const Belief&, const GroundingResult&, const PlannerConfig&);

  BudgetedSearchPolicy(std::string_view name, Planner planner, PlannerConfig cfg, BaselineConfig budget)
      : name_(name), planner_(planner), cfg_(cfg), budget_(budget) {}

  std::string_view name() const override { return name_; }
  Decision decide(const DecisionContext& ctx) const override {
    if (ctx.questions_asked >= budget_.max_questions) {
      return {Action::grasp(static_cast<int>(ctx.belief.argmax())), 0};
    }
    const PlanResult r = planner_(ctx.belief, ctx.grounding, cfg_);
    return {r.action, r.expansions};
  }

 private:
  std::string_view name_;
  Planner planner_;
  PlannerConfig cfg_;
  BaselineConfig budget_;
};

}  // namespace

std::span<const std::string_view> policy_names() { return kPolicyNames; }

std::unique_ptr<Policy> make_policy(std::string_view name, const PlannerConfig& planner,
                                    const BaselineConfig& baseline) {
  planner.validate();
  baseline.validate();
  if (name == "attr_pomdp") return std::make_unique<AttrPomdpPolicy>(planner);
  if (name == "rand_ask") return std::make_unique<RandAskPolicy>(baseline);
  if (name == "rand_sel") return std::make_unique<RandSelPolicy>();
  if (name == "point_only") {
    return std::make_unique<BudgetedSearchPolicy>(kPolicyNames[3], &point_only_pomdp_plan, planner,
                                                  baseline);
  }
  if (name == "per_object_attr") {
    return std::make_unique<BudgetedSearchPolicy>(kPolicyNames[4], &per_object_attr_pomdp_plan,
                                                  planner, baseline);
  }
  std::string valid;
  for (auto n : kPolicyNames) valid += (valid.empty() ? "" : ", ") + std::string(n);
  throw Error(ErrorKind::Config, "unknown policy '" + std::string(name) + "' (valid: " + valid + ")");
}

}  // namespace attrdisam
