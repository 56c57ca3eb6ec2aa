#include "attrdisam/pomdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "attrdisam/error.hpp"
#include "attrdisam/rng.hpp"
#include "io.hpp"

namespace attrdisam {

namespace {

constexpr double kZeroEvidence = 1e-300;
// Values closer than this are ties; the earlier action in the space wins.
constexpr double kTieTolerance = 1e-12;

}  // namespace

std::size_t Belief::argmax() const {
  if (probs.empty()) throw Error(ErrorKind::InvalidArgument, "empty belief");
  std::size_t best = 0;
  for (std::size_t i = 1; i < probs.size(); ++i) {
    if (probs[i] > probs[best]) best = i;
  }
  return best;
}

Belief init_belief(std::span<const double> scores) {
  if (scores.empty()) throw Error(ErrorKind::InvalidArgument, "init_belief needs at least one score");
  Belief b;
  b.probs.resize(scores.size());
  double z = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!std::isfinite(scores[i])) throw Error(ErrorKind::InvalidArgument, "non-finite score");
    b.probs[i] = std::max(scores[i], 0.0);
    z += b.probs[i];
  }
  if (z > 0.0) {
    for (double& p : b.probs) p /= z;
  } else {
    std::fill(b.probs.begin(), b.probs.end(), 1.0 / static_cast<double>(scores.size()));
  }
  return b;
}

std::string describe(const Action& a) {
  switch (a.kind) {
    case ActionKind::Grasp: return "Grasp(" + std::to_string(a.object) + ")";
    case ActionKind::AskAttr: return "AskAttr(" + std::string(to_string(a.attribute)) + ")";
    case ActionKind::AskPoint: return "AskPoint(" + std::to_string(a.object) + ")";
    case ActionKind::AskObjAttr:
      return "AskObjAttr(" + std::to_string(a.object) + "," + std::string(to_string(a.attribute)) +
             "=" + std::string(vocabulary_word(a.attribute, static_cast<std::size_t>(a.value))) + ")";
  }
  return "?";
}

std::string describe(const Observation& o) {
  if (o.kind == ObservationKind::Polar) return o.positive ? "yes" : "no";
  return std::string(vocabulary_word(o.attribute, static_cast<std::size_t>(o.value)));
}

void PlannerConfig::validate() const {
  auto bad = [](const std::string& m) { throw Error(ErrorKind::Config, "planner config: " + m); };
  if (depth < 1) bad("depth must be >= 1");
  if (!(discount > 0.0 && discount <= 1.0)) bad("discount must be in (0,1]");
  if (!(truthfulness > 0.5 && truthfulness <= 1.0)) bad("truthfulness must be in (0.5,1]");
  if (observation_samples < 0) bad("observation_samples must be >= 0");
}

namespace {

void check_compatible(const Action& a, const Observation& o) {
  auto fail = [&] {
    throw Error(ErrorKind::IncompatibleObservation,
                "observation '" + describe(o) + "' cannot answer " + describe(a));
  };
  switch (a.kind) {
    case ActionKind::Grasp: fail(); break;
    case ActionKind::AskAttr:
      if (o.kind != ObservationKind::AttrWord || o.attribute != a.attribute || o.value < 0 ||
          static_cast<std::size_t>(o.value) >= vocabulary_size(a.attribute)) {
        fail();
      }
      break;
    case ActionKind::AskPoint:
    case ActionKind::AskObjAttr:
      if (o.kind != ObservationKind::Polar) fail();
      break;
  }
}

double polar_prob(double p_positive, bool positive) {
  return positive ? p_positive : 1.0 - p_positive;
}

// p(o | x, a) without argument checks.
double likelihood(const GroundingResult& g, std::size_t x, const Action& a, const Observation& o,
                  double truthfulness) {
  switch (a.kind) {
    case ActionKind::AskAttr:
      return g.matrix(a.attribute).at(x, static_cast<std::size_t>(o.value));
    case ActionKind::AskPoint: {
      const bool is_pointed = x == static_cast<std::size_t>(a.object);
      return polar_prob(is_pointed ? truthfulness : 1.0 - truthfulness, o.positive);
    }
    case ActionKind::AskObjAttr: {
      const double e = g.matrix(a.attribute).at(x, static_cast<std::size_t>(a.value));
      return polar_prob(truthfulness * e + (1.0 - truthfulness) * (1.0 - e), o.positive);
    }
    case ActionKind::Grasp: break;
  }
  return 0.0;
}

void check_action(const Action& a, std::size_t n) {
  if (a.kind == ActionKind::Grasp || a.kind == ActionKind::AskPoint ||
      a.kind == ActionKind::AskObjAttr) {
    if (a.object < 0 || static_cast<std::size_t>(a.object) >= n) {
      throw Error(ErrorKind::InvalidArgument, describe(a) + " names an unknown object");
    }
  }
  if (a.kind == ActionKind::AskObjAttr &&
      (a.value < 0 || static_cast<std::size_t>(a.value) >= vocabulary_size(a.attribute))) {
    throw Error(ErrorKind::InvalidArgument, "attribute value out of range");
  }
}

}  // namespace

double observation_prob(const GroundingResult& g, std::size_t x, const Action& a,
                        const Observation& o, double truthfulness) {
  check_compatible(a, o);
  check_action(a, g.size());
  if (x >= g.size()) throw Error(ErrorKind::InvalidArgument, "object index out of range");
  return likelihood(g, x, a, o, truthfulness);
}

std::vector<Observation> observation_space(const Action& a) {
  std::vector<Observation> out;
  switch (a.kind) {
    case ActionKind::AskAttr:
      for (std::size_t v = 0; v < vocabulary_size(a.attribute); ++v) {
        out.push_back(Observation::attr_word(a.attribute, static_cast<int>(v)));
      }
      break;
    case ActionKind::AskPoint:
    case ActionKind::AskObjAttr:
      out = {Observation::polar(true), Observation::polar(false)};
      break;
    case ActionKind::Grasp: break;
  }
  return out;
}

BeliefUpdate update_belief(const Belief& b, const GroundingResult& g, const Action& a,
                           const Observation& o, double truthfulness) {
  check_compatible(a, o);
  check_action(a, g.size());
  if (b.size() != g.size()) throw Error(ErrorKind::InvalidArgument, "belief/grounding size mismatch");
  BeliefUpdate out{b, false};
  double z = 0.0;
  for (std::size_t x = 0; x < b.size(); ++x) {
    out.belief.probs[x] = likelihood(g, x, a, o, truthfulness) * b.probs[x];
    z += out.belief.probs[x];
  }
  if (z <= kZeroEvidence) {
    out.belief = b;
    out.zero_evidence = true;
    return out;
  }
  for (double& p : out.belief.probs) p /= z;
  out.belief.t = b.t + 1;
  return out;
}

namespace {

std::size_t argmax_of(std::span<const double> b) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < b.size(); ++i) {
    if (b[i] > b[best]) best = i;
  }
  return best;
}

}  // namespace

void AttrActionSpace::actions(std::span<const double> belief, std::vector<Action>& out) const {
  const int xb = static_cast<int>(argmax_of(belief));
  out.assign({Action::grasp(xb), Action::ask_attr(Concept::Color),
              Action::ask_attr(Concept::Location), Action::ask_point(xb)});
}

void AttrActionSpace::leaf_actions(std::span<const double> belief, std::vector<Action>& out) const {
  out.assign({Action::grasp(static_cast<int>(argmax_of(belief)))});
}

std::vector<Action> action_space(const Belief& b) {
  if (b.probs.empty()) throw Error(ErrorKind::InvalidArgument, "empty belief");
  std::vector<Action> out;
  AttrActionSpace{}.actions(b.probs, out);
  return out;
}

namespace {

class TreeSearch {
 public:
  TreeSearch(const GroundingResult& g, const PlannerConfig& cfg, const ActionSpace& space,
             const NodeVisitor* visit = nullptr)
      : g_(g), cfg_(cfg), space_(space), visit_(visit), n_(g.size()),
        rng_(make_rng(cfg.sampling_seed, Stream::Sampling)) {
    // Value-major copies of the attribute matrices: column v is contiguous.
    for (Concept c : {Concept::Color, Concept::Location}) {
      const AttributeMatrix& m = g.matrix(c);
      auto& col = columns_[static_cast<std::size_t>(c)];
      col.resize(m.cols() * n_);
      for (std::size_t x = 0; x < n_; ++x) {
        for (std::size_t v = 0; v < m.cols(); ++v) col[v * n_ + x] = m.at(x, v);
      }
    }
    std::vector<Action> leaves;
    space.leaf_actions(std::vector<double>(n_, 1.0 / static_cast<double>(n_)), leaves);
    leaf_width_ = leaves.size();
    const auto levels = static_cast<std::size_t>(cfg.depth) + 2;
    child_.assign(levels, std::vector<double>(n_));
    actions_.resize(levels);
    weights_.resize(levels);
  }

  std::uint64_t expansions() const noexcept { return expansions_; }

  double value(std::span<const double> b, int depth) {
    if (visit_) (*visit_)(b, depth);
    auto& acts = actions_[static_cast<std::size_t>(depth)];
    if (depth == 0) {
      space_.leaf_actions(b, acts);
    } else {
      space_.actions(b, acts);
    }
    double best = -std::numeric_limits<double>::infinity();
    // Index loop: q() refills deeper levels' buffers, never this one.
    for (std::size_t i = 0; i < acts.size(); ++i) {
      const double v = q(b, acts[i], depth);
      if (v > best + kTieTolerance) best = v;
    }
    return best;
  }

  double q(std::span<const double> b, const Action& a, int depth) {
    ++expansions_;
    const RewardModel& r = cfg_.rewards;
    if (a.kind == ActionKind::Grasp) {
      const double p = b[static_cast<std::size_t>(a.object)];
      return p * r.grasp_correct + (1.0 - p) * r.grasp_wrong;
    }
    const std::size_t n_obs = a.kind == ActionKind::AskAttr ? vocabulary_size(a.attribute) : 2;
    auto& child = child_[static_cast<std::size_t>(depth)];
    double future = 0.0;
    if (depth == 1 && cfg_.observation_samples == 0 && !visit_) {
      // Children are leaves worth their best grasp. Weighted by the evidence
      // z, that is peak * (correct - wrong) + z * wrong with peak the largest
      // unnormalized posterior entry, so no posterior is materialized.
      for (std::size_t o = 0; o < n_obs; ++o) {
        const auto [z, peak] = evidence_and_peak(b, a, o);
        expansions_ += leaf_width_;
        if (z > kZeroEvidence) future += peak * (r.grasp_correct - r.grasp_wrong) + z * r.grasp_wrong;
      }
    } else if (cfg_.observation_samples == 0) {
      for (std::size_t o = 0; o < n_obs; ++o) {
        const double z = fill_child(b, a, o, child);
        future += z * value(child, depth - 1);
      }
    } else {
      auto& w = weights_[static_cast<std::size_t>(depth)];
      w.resize(n_obs);
      double total = 0.0;
      for (std::size_t o = 0; o < n_obs; ++o) {
        w[o] = fill_child(b, a, o, child);
        total += w[o];
      }
      for (int s = 0; s < cfg_.observation_samples; ++s) {
        double u = uniform01(rng_) * total;
        std::size_t o = 0;
        while (o + 1 < n_obs && u >= w[o]) u -= w[o++];
        fill_child(b, a, o, child);
        future += value(child, depth - 1);
      }
      future = future / cfg_.observation_samples * total;
    }
    return r.question_cost(a) + cfg_.discount * future;
  }

 private:
  template <class Fn>
  void for_each_likelihood(const Action& a, std::size_t o, Fn&& fn) const {
    const double t = cfg_.truthfulness;
    switch (a.kind) {
      case ActionKind::AskAttr: {
        const double* col = columns_[static_cast<std::size_t>(a.attribute)].data() + o * n_;
        for (std::size_t x = 0; x < n_; ++x) fn(x, col[x]);
        break;
      }
      case ActionKind::AskPoint: {
        const double hit = o == 0 ? t : 1.0 - t;
        const double miss = 1.0 - hit;
        for (std::size_t x = 0; x < n_; ++x) fn(x, x == static_cast<std::size_t>(a.object) ? hit : miss);
        break;
      }
      case ActionKind::AskObjAttr: {
        const double* col = columns_[static_cast<std::size_t>(a.attribute)].data() +
                            static_cast<std::size_t>(a.value) * n_;
        for (std::size_t x = 0; x < n_; ++x) {
          const double p_pos = t * col[x] + (1.0 - t) * (1.0 - col[x]);
          fn(x, o == 0 ? p_pos : 1.0 - p_pos);
        }
        break;
      }
      case ActionKind::Grasp: break;
    }
  }

  std::pair<double, double> evidence_and_peak(std::span<const double> b, const Action& a,
                                              std::size_t o) const {
    double z = 0.0;
    double peak = 0.0;
    for_each_likelihood(a, o, [&](std::size_t x, double l) {
      const double w = l * b[x];
      z += w;
      peak = std::max(peak, w);
    });
    return {z, peak};
  }

  // Writes the posterior for observation index `o` into `out` and returns
  // the evidence p(o | b, a). Zero-evidence branches keep the prior.
  double fill_child(std::span<const double> b, const Action& a, std::size_t o,
                    std::vector<double>& out) const {
    double z = 0.0;
    for_each_likelihood(a, o, [&](std::size_t x, double l) {
      out[x] = l * b[x];
      z += out[x];
    });
    if (z <= kZeroEvidence) {
      std::copy(b.begin(), b.end(), out.begin());
      return 0.0;
    }
    for (double& p : out) p /= z;
    return z;
  }

  const GroundingResult& g_;
  const PlannerConfig& cfg_;
  const ActionSpace& space_;
  const NodeVisitor* visit_;
  std::size_t n_;
  Rng rng_;
  std::array<std::vector<double>, 2> columns_;
  std::vector<std::vector<double>> child_;
  std::vector<std::vector<Action>> actions_;
  std::vector<std::vector<double>> weights_;
  std::uint64_t expansions_ = 0;
  std::size_t leaf_width_ = 1;
};

void check_inputs(const Belief& b, const GroundingResult& g, const PlannerConfig& cfg) {
  cfg.validate();
  if (b.size() == 0 || b.size() != g.size()) {
    throw Error(ErrorKind::InvalidArgument, "belief/grounding size mismatch");
  }
  for (double p : b.probs) {
    if (!std::isfinite(p) || p < 0.0) throw Error(ErrorKind::InvalidArgument, "invalid belief entry");
  }
}

}  // namespace

namespace {

PlanResult run_search(const Belief& b, const GroundingResult& g, const PlannerConfig& cfg,
                      const ActionSpace& space, const NodeVisitor* visit) {
  check_inputs(b, g, cfg);
  TreeSearch tree(g, cfg, space, visit);
  std::vector<Action> root;
  space.actions(b.probs, root);
  PlanResult result;
  result.value = -std::numeric_limits<double>::infinity();
  for (const Action& a : root) {
    const double v = tree.q(b.probs, a, cfg.depth);
    result.values.push_back({a, v});
    if (v > result.value + kTieTolerance) {
      result.value = v;
      result.action = a;
    }
  }
  result.expansions = tree.expansions();
  return result;
}

}  // namespace

PlanResult search(const Belief& b, const GroundingResult& g, const PlannerConfig& cfg,
                  const ActionSpace& space) {
  return run_search(b, g, cfg, space, nullptr);
}

PlanResult search(const Belief& b, const GroundingResult& g, const PlannerConfig& cfg,
                  const ActionSpace& space, const NodeVisitor& visit) {
  return run_search(b, g, cfg, space, &visit);
}

double expected_return(const Belief& b, const GroundingResult& g, const Action& a,
                       int depth_remaining, const PlannerConfig& cfg, const ActionSpace& space) {
  check_inputs(b, g, cfg);
  check_action(a, g.size());
  if (depth_remaining < 1) throw Error(ErrorKind::InvalidArgument, "depth_remaining must be >= 1");
  PlannerConfig local = cfg;
  local.depth = std::max(cfg.depth, depth_remaining);
  TreeSearch tree(g, local, space);
  return tree.q(b.probs, a, depth_remaining);
}

double expected_return(const Belief& b, const GroundingResult& g, const Action& a,
                       int depth_remaining, const PlannerConfig& cfg) {
  return expected_return(b, g, a, depth_remaining, cfg, AttrActionSpace{});
}

PlanResult plan(const Belief& b, const GroundingResult& g, const PlannerConfig& cfg) {
  return search(b, g, cfg, AttrActionSpace{});
}

nlohmann::json to_json(const Action& a) {
  switch (a.kind) {
    case ActionKind::Grasp: return {{"type", "grasp"}, {"object", a.object}};
    case ActionKind::AskAttr: return {{"type", "ask_attr"}, {"concept", to_string(a.attribute)}};
    case ActionKind::AskPoint: return {{"type", "ask_point"}, {"object", a.object}};
    case ActionKind::AskObjAttr:
      return {{"type", "ask_obj_attr"},
              {"object", a.object},
              {"concept", to_string(a.attribute)},
              {"value", vocabulary_word(a.attribute, static_cast<std::size_t>(a.value))}};
  }
  return {};
}

namespace {

Concept concept_field(const nlohmann::json& j) {
  const auto c = j.at("concept").get<std::string>();
  if (c == "color") return Concept::Color;
  if (c == "location") return Concept::Location;
  throw Error(ErrorKind::Schema, "unknown attribute '" + c + "'");
}

int value_field(const nlohmann::json& j, Concept c) {
  const auto word = j.at("value").get<std::string>();
  const auto idx = c == Concept::Color ? ColorVocab::index_of(word) : LocationGrid::index_of(word);
  if (!idx) throw Error(ErrorKind::Schema, "unknown " + std::string(to_string(c)) + " value '" + word + "'");
  return static_cast<int>(*idx);
}

}  // namespace

Action action_from_json(const nlohmann::json& j) {
  return detail::with_schema_errors("action", [&] {
    const auto type = j.at("type").get<std::string>();
    if (type == "grasp") return Action::grasp(j.at("object").get<int>());
    if (type == "ask_attr") return Action::ask_attr(concept_field(j));
    if (type == "ask_point") return Action::ask_point(j.at("object").get<int>());
    if (type == "ask_obj_attr") {
      const Concept c = concept_field(j);
      return Action::ask_obj_attr(j.at("object").get<int>(), c, value_field(j, c));
    }
    throw Error(ErrorKind::Schema, "unknown action type '" + type + "'");
  });
}

Observation observation_from_json(const nlohmann::json& j) {
  return detail::with_schema_errors("observation", [&] {
    const auto type = j.at("type").get<std::string>();
    if (type == "polar") return Observation::polar(j.at("positive").get<bool>());
    if (type == "attr_word") {
      const Concept c = concept_field(j);
      return Observation::attr_word(c, value_field(j, c));
    }
    throw Error(ErrorKind::Schema, "unknown observation type '" + type + "'");
  });
}

nlohmann::json to_json(const Observation& o) {
  if (o.kind == ObservationKind::Polar) return {{"type", "polar"}, {"positive", o.positive}};
  return {{"type", "attr_word"},
          {"concept", to_string(o.attribute)},
          {"value", vocabulary_word(o.attribute, static_cast<std::size_t>(o.value))}};
}

}  // namespace attrdisam
