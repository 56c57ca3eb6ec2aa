#pragma once

#include <array>
#include <random>
#include <vector>

#include "attrdisam/grounding.hpp"
#include "attrdisam/pomdp.hpp"
#include "brute_force_expectimax.hpp"

namespace testsupport {

using attrdisam::AttributeMatrix;
using attrdisam::Concept;
using attrdisam::GroundingResult;

inline GroundingResult make_grounding(const std::vector<std::vector<double>>& color,
                                      const std::vector<std::vector<double>>& loc,
                                      std::vector<double> scores = {}) {
  const std::size_t n = color.size();
  GroundingResult g;
  g.object_ids.resize(n);
  for (std::size_t i = 0; i < n; ++i) g.object_ids[i] = static_cast<int>(i);
  g.scores = scores.empty() ? std::vector<double>(n, 1.0) : std::move(scores);
  g.color_matrix = AttributeMatrix(Concept::Color, n);
  g.loc_matrix = AttributeMatrix(Concept::Location, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < 10; ++k) g.color_matrix.row(i)[k] = color[i][k];
    for (std::size_t k = 0; k < 9; ++k) g.loc_matrix.row(i)[k] = loc[i][k];
  }
  return g;
}

inline std::vector<double> one_hot(std::size_t size, std::size_t k) {
  std::vector<double> v(size, 0.0);
  v[k] = 1.0;
  return v;
}

/// Random simplex row with `support` non-zero entries drawn from the first
/// `width` columns; sparse rows make zero-evidence branches common.
inline std::vector<double> random_row(std::mt19937_64& rng, std::size_t size, std::size_t width,
                                      std::size_t support) {
  std::vector<double> v(size, 0.0);
  std::uniform_int_distribution<std::size_t> col(0, width - 1);
  std::exponential_distribution<double> w(1.0);
  double sum = 0.0;
  for (std::size_t s = 0; s < support; ++s) {
    const double x = w(rng);
    v[col(rng)] += x;
    sum += x;
  }
  for (double& x : v) x /= sum;
  return v;
}

inline std::vector<double> random_belief(std::mt19937_64& rng, std::size_t n, bool allow_zero) {
  std::vector<double> b(n);
  std::exponential_distribution<double> w(1.0);
  std::bernoulli_distribution drop(allow_zero ? 0.25 : 0.0);
  double sum = 0.0;
  for (auto& x : b) {
    x = drop(rng) ? 0.0 : w(rng);
    sum += x;
  }
  if (sum == 0.0) {
    b[0] = 1.0;
    sum = 1.0;
  }
  for (auto& x : b) x /= sum;
  return b;
}

inline oracle::Problem to_problem(const GroundingResult& g, const attrdisam::PlannerConfig& cfg) {
  oracle::Problem p;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto c = g.color_matrix.row(i);
    const auto l = g.loc_matrix.row(i);
    p.color.emplace_back(c.begin(), c.end());
    p.loc.emplace_back(l.begin(), l.end());
  }
  p.cost_attr = cfg.rewards.ask_attr;
  p.cost_point = cfg.rewards.ask_point;
  p.r_correct = cfg.rewards.grasp_correct;
  p.r_wrong = cfg.rewards.grasp_wrong;
  p.truth = cfg.truthfulness;
  p.gamma = cfg.discount;
  return p;
}

/// Oracle choice expressed as a library action.
inline attrdisam::Action to_action(const oracle::Choice& c) {
  using attrdisam::Action;
  const Concept concept_kind = c.attribute == 0 ? Concept::Color : Concept::Location;
  switch (c.type) {
    case 0: return Action::grasp(c.object);
    case 1: return Action::ask_attr(concept_kind);
    case 2: return Action::ask_point(c.object);
    default: return Action::ask_obj_attr(c.object, concept_kind, c.value);
  }
}

inline attrdisam::Belief belief_of(std::vector<double> p) {
  attrdisam::Belief b;
  b.probs = std::move(p);
  return b;
}

}  // namespace testsupport
