#include "attrdisam/baselines.hpp"

#include <algorithm>

#include "attrdisam/error.hpp"

namespace attrdisam {

void BaselineConfig::validate() const {
  if (max_questions < 1) throw Error(ErrorKind::Config, "n_q must be >= 1");
  if (!(belief_threshold > 0.0 && belief_threshold < 1.0)) {
    throw Error(ErrorKind::Config, "belief_threshold must be in (0,1)");
  }
}

int rand_sel(int n, std::uint64_t seed) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "rand_sel needs n >= 1");
  Rng rng = make_rng(seed, Stream::Policy);
  return static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(n)));
}

Action rand_ask_policy(const Belief& b, const BaselineConfig& cfg, int questions_asked, Rng& rng) {
  const auto xb = static_cast<int>(b.argmax());
  if (b.probs[static_cast<std::size_t>(xb)] >= cfg.belief_threshold ||
      questions_asked >= cfg.max_questions) {
    return Action::grasp(xb);
  }
  switch (uniform_index(rng, 3)) {
    case 0: return Action::ask_attr(Concept::Color);
    case 1: return Action::ask_attr(Concept::Location);
    default: return Action::ask_point(xb);
  }
}

Action rand_ask_policy(const Belief& b, const BaselineConfig& cfg, int questions_asked,
                       std::uint64_t seed) {
  Rng rng = make_rng(seed, Stream::Policy);
  return rand_ask_policy(b, cfg, questions_asked, rng);
}

void PointOnlyActionSpace::actions(std::span<const double> belief, std::vector<Action>& out) const {
  const int n = static_cast<int>(belief.size());
  out.clear();
  for (int i = 0; i < n; ++i) out.push_back(Action::grasp(i));
  for (int i = 0; i < n; ++i) out.push_back(Action::ask_point(i));
}

void PointOnlyActionSpace::leaf_actions(std::span<const double> belief,
                                        std::vector<Action>& out) const {
  out.clear();
  for (int i = 0; i < static_cast<int>(belief.size()); ++i) out.push_back(Action::grasp(i));
}

PerObjectAttrActionSpace::PerObjectAttrActionSpace(const GroundingResult& g) {
  for (Concept c : {Concept::Color, Concept::Location}) {
    const AttributeMatrix& m = g.matrix(c);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const auto row = m.row(i);
      const auto v = std::max_element(row.begin(), row.end()) - row.begin();
      semantic_.push_back(Action::ask_obj_attr(static_cast<int>(i), c, static_cast<int>(v)));
    }
  }
}

void PerObjectAttrActionSpace::actions(std::span<const double> belief,
                                       std::vector<Action>& out) const {
  const int n = static_cast<int>(belief.size());
  out.clear();
  for (int i = 0; i < n; ++i) out.push_back(Action::grasp(i));
  out.insert(out.end(), semantic_.begin(), semantic_.end());
  for (int i = 0; i < n; ++i) out.push_back(Action::ask_point(i));
}

void PerObjectAttrActionSpace::leaf_actions(std::span<const double> belief,
                                            std::vector<Action>& out) const {
  out.clear();
  for (int i = 0; i < static_cast<int>(belief.size()); ++i) out.push_back(Action::grasp(i));
}

PlanResult point_only_pomdp_plan(const Belief& b, const GroundingResult& g, const PlannerConfig& cfg) {
  return search(b, g, cfg, PointOnlyActionSpace{});
}

PlanResult per_object_attr_pomdp_plan(const Belief& b, const GroundingResult& g,
                                      const PlannerConfig& cfg) {
  return search(b, g, cfg, PerObjectAttrActionSpace{g});
}

}  // namespace attrdisam
