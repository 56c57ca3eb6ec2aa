#include "attrdisam/session.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>

#include "attrdisam/error.hpp"
#include "attrdisam/rng.hpp"
#include "io.hpp"

namespace attrdisam {

EpisodeRecord run_episode(const Scene& scene, const GroundingResult& grounding, const Policy& policy,
                          const UserModel& user, const EpisodeOptions& options, std::uint64_t seed) {
  validate(scene);
  validate(grounding);
  if (grounding.size() != scene.size()) {
    throw Error(ErrorKind::InvalidArgument, "grounding does not match the scene");
  }
  EpisodeRecord rec;
  rec.policy = std::string(policy.name());
  rec.seed = seed;
  rec.target_id = scene.target_id;

  Belief belief = init_belief(grounding.scores);
  for (int step = 0;; ++step) {
    if (step >= options.step_limit) {
      throw Error(ErrorKind::StepLimitExceeded,
                  "no grasp after " + std::to_string(options.step_limit) + " steps");
    }
    const DecisionContext ctx{belief, grounding, rec.n_questions,
                              derive_seed(seed, Stream::Policy, static_cast<std::uint64_t>(step))};
    const auto t0 = std::chrono::steady_clock::now();
    const Decision d = policy.decide(ctx);
    const auto t1 = std::chrono::steady_clock::now();

    EpisodeStep s;
    s.belief = belief;
    s.action = d.action;
    s.expansions = d.expansions;
    s.planning_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();

    if (d.action.kind == ActionKind::Grasp) {
      rec.grasped = d.action.object;
      rec.correct = d.action.object == scene.target_id;
      s.reward = options.rewards.grasp_reward(rec.correct);
      rec.total_reward += s.reward;
      rec.steps.push_back(std::move(s));
      break;
    }

    const Observation o = respond(scene, d.action, user,
                                  derive_seed(seed, Stream::User, static_cast<std::uint64_t>(step)));
    BeliefUpdate u = update_belief(belief, grounding, d.action, o, options.model_truthfulness);
    s.observation = o;
    s.zero_evidence = u.zero_evidence;
    s.reward = options.rewards.question_cost(d.action);
    rec.flagged = rec.flagged || u.zero_evidence;
    rec.total_reward += s.reward;
    rec.steps.push_back(std::move(s));
    ++rec.n_questions;
    belief = std::move(u.belief);
  }
  return rec;
}

EpisodeRecord run_episode(const Scene& scene, const NoiseConfig& noise, const Policy& policy,
                          const UserModel& user, const EpisodeOptions& options, std::uint64_t seed) {
  const GroundingResult g = simulate_grounding(scene, noise, derive_seed(seed, Stream::Grounding));
  return run_episode(scene, g, policy, user, options, seed);
}

nlohmann::json to_json(const EpisodeRecord& record, bool include_timing) {
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& s : record.steps) {
    nlohmann::json js{{"belief", s.belief.probs},
                      {"action", to_json(s.action)},
                      {"observation", s.observation ? to_json(*s.observation) : nlohmann::json()},
                      {"reward", s.reward},
                      {"expansions", s.expansions}};
    if (s.zero_evidence) js["zero_evidence"] = true;
    if (include_timing) js["planning_ms"] = s.planning_ms;
    steps.push_back(std::move(js));
  }
  return {{"scene_ref", record.scene_ref},
          {"policy", record.policy},
          {"seed", record.seed},
          {"outcome", record.correct ? "correct" : "wrong"},
          {"grasped", record.grasped},
          {"target_id", record.target_id},
          {"n_questions", record.n_questions},
          {"total_reward", record.total_reward},
          {"flagged", record.flagged},
          {"steps", std::move(steps)}};
}

std::array<std::size_t, 2> top_attribute_values(Concept c, const GroundingResult& g, const Belief& b) {
  const AttributeMatrix& m = g.matrix(c);
  std::vector<double> mass(m.cols(), 0.0);
  for (std::size_t x = 0; x < g.size(); ++x) {
    for (std::size_t v = 0; v < m.cols(); ++v) mass[v] += b.probs[x] * m.at(x, v);
  }
  std::vector<std::size_t> order(m.cols());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t z) { return mass[a] > mass[z]; });
  return {order[0], order[1]};
}

std::string render_question(const Action& a, const GroundingResult& g, const Belief& b) {
  switch (a.kind) {
    case ActionKind::AskAttr: {
      const auto top = top_attribute_values(a.attribute, g, b);
      return "what is the " + std::string(to_string(a.attribute)) + " of your target, " +
             std::string(vocabulary_word(a.attribute, top[0])) + " or " +
             std::string(vocabulary_word(a.attribute, top[1])) + "?";
    }
    case ActionKind::AskPoint:
      return "do you mean this one? (pointing at object " + std::to_string(a.object) + ")";
    case ActionKind::AskObjAttr: {
      const auto word = std::string(vocabulary_word(a.attribute, static_cast<std::size_t>(a.value)));
      return a.attribute == Concept::Color ? "is your target " + word + "?"
                                         : "is your target in the " + word + "?";
    }
    case ActionKind::Grasp: break;
  }
  throw Error(ErrorKind::InvalidArgument, "render_question needs a question, got " + describe(a));
}

std::vector<std::string> question_options(const Action& a, const GroundingResult& g, const Belief& b) {
  if (a.kind == ActionKind::AskAttr) {
    const auto top = top_attribute_values(a.attribute, g, b);
    return {std::string(vocabulary_word(a.attribute, top[0])),
            std::string(vocabulary_word(a.attribute, top[1]))};
  }
  return {"yes", "no"};
}

// ---------------------------------------------------------------------------
// Live sessions

struct SessionManager::Session {
  struct Exchange {
    Action action;
    std::string question;
    std::vector<std::string> answers;
    std::optional<Observation> observation;
    std::vector<double> belief_after;
  };

  std::mutex mutex;
  std::string id;
  Scene scene;
  GroundingResult grounding;
  std::unique_ptr<Policy> policy;
  Belief belief;
  std::vector<Exchange> transcript;
  std::optional<Action> pending;
  bool reprompted = false;
  bool done = false;
  bool flagged = false;
  int questions = 0;
  double total_reward = 0.0;
  int grasped = -1;
  std::uint64_t seed = 0;
};

namespace {

SceneGenConfig generator_from_json(const nlohmann::json& j, SceneGenConfig c) {
  return detail::with_schema_errors("generator", [&] {
    if (j.contains("n_objects")) c.n_objects = j["n_objects"].get<int>();
    if (j.contains("n_categories")) c.n_categories = j["n_categories"].get<int>();
    if (j.contains("n_colors")) c.n_colors = j["n_colors"].get<int>();
    if (j.contains("ambiguity_class")) {
      c.ambiguity = ambiguity_from_string(j["ambiguity_class"].get<std::string>());
    }
    if (j.contains("min_separation")) c.min_separation = j["min_separation"].get<double>();
    if (j.contains("multi_color_prob")) c.multi_color_prob = j["multi_color_prob"].get<double>();
    if (j.contains("relation_query_prob")) c.relation_query_prob = j["relation_query_prob"].get<double>();
    if (j.contains("location_query_prob")) c.location_query_prob = j["location_query_prob"].get<double>();
    if (j.contains("distinct_colors")) c.distinct_colors = j["distinct_colors"].get<bool>();
    if (j.contains("colors")) c.colors = j["colors"].get<std::vector<std::string>>();
    if (j.contains("categories")) c.categories = j["categories"].get<std::vector<std::string>>();
    return c;
  });
}

}  // namespace

SessionManager::SessionManager(SessionSettings settings) : settings_(std::move(settings)) {
  settings_.planner.validate();
  settings_.baseline.validate();
  settings_.user.validate();
}

SessionManager::~SessionManager() = default;

std::shared_ptr<SessionManager::Session> SessionManager::find(const std::string& session_id) const {
  std::lock_guard lock(mutex_);
  auto it = sessions_.find(session_id);
  if (it == sessions_.end()) throw Error(ErrorKind::UnknownSession, "unknown session '" + session_id + "'");
  return it->second;
}

namespace {

using Session = SessionManager::Session;

void advance(Session& s, const SessionSettings& settings) {
  Decision d;
  if (s.questions + 1 >= settings.step_limit) {
    d.action = Action::grasp(static_cast<int>(s.belief.argmax()));
  } else {
    const DecisionContext ctx{s.belief, s.grounding, s.questions,
                              derive_seed(s.seed, Stream::Policy,
                                          static_cast<std::uint64_t>(s.questions))};
    d = s.policy->decide(ctx);
  }
  s.reprompted = false;
  if (d.action.kind == ActionKind::Grasp) {
    s.pending.reset();
    s.done = true;
    s.grasped = d.action.object;
    s.total_reward += settings.planner.rewards.grasp_reward(s.grasped == s.scene.target_id);
    return;
  }
  s.pending = d.action;
  s.transcript.push_back({d.action, render_question(d.action, s.grounding, s.belief), {}, {}, {}});
}

nlohmann::json snapshot(const Session& s) {
  nlohmann::json out{{"session_id", s.id},
                     {"status", s.done ? "done" : "awaiting_answer"},
                     {"belief", s.belief.probs},
                     {"scene", to_json(s.scene)},
                     {"n_questions", s.questions}};
  if (s.pending) {
    nlohmann::json q{{"text", s.transcript.back().question},
                     {"action", to_json(*s.pending)},
                     {"options", question_options(*s.pending, s.grounding, s.belief)}};
    if (s.pending->kind == ActionKind::AskPoint) q["pointed_object"] = s.pending->object;
    out["question"] = std::move(q);
  }
  if (s.done) {
    out["result"] = {{"grasped", s.grasped},
                     {"target_id", s.scene.target_id},
                     {"correct", s.grasped == s.scene.target_id},
                     {"total_reward", s.total_reward},
                     {"n_questions", s.questions}};
  }
  if (s.flagged) out["flagged"] = true;
  return out;
}

}  // namespace

nlohmann::json SessionManager::start(const nlohmann::json& request) {
  auto s = std::make_shared<Session>();
  detail::with_schema_errors("session request", [&] {
    s->seed = request.value("seed", std::uint64_t{0});
    if (request.contains("scene")) {
      s->scene = scene_from_json(request.at("scene"));
    } else {
      const auto gen = generator_from_json(request.value("generator", nlohmann::json::object()),
                                           settings_.scene);
      s->scene = generate_scene(gen, s->seed);
    }
    if (request.contains("grounding")) {
      s->grounding = grounding_from_json(request.at("grounding"));
      if (s->grounding.size() != s->scene.size()) {
        throw Error(ErrorKind::Validation, "grounding does not match the scene");
      }
    } else {
      s->grounding = simulate_grounding(s->scene, settings_.noise,
                                        derive_seed(s->seed, Stream::Grounding));
    }
    s->policy = make_policy(request.value("policy", std::string("attr_pomdp")), settings_.planner,
                            settings_.baseline);
    return 0;
  });
  s->belief = init_belief(s->grounding.scores);
  {
    std::lock_guard lock(mutex_);
    s->id = "s" + std::to_string(next_id_++);
    sessions_[s->id] = s;
  }
  std::lock_guard lock(s->mutex);
  advance(*s, settings_);
  return snapshot(*s);
}

nlohmann::json SessionManager::answer(const std::string& session_id, std::string_view text) {
  auto s = find(session_id);
  std::lock_guard lock(s->mutex);
  if (s->done) throw Error(ErrorKind::SessionDone, "session '" + session_id + "' is finished");

  Action asked = *s->pending;
  std::optional<Observation> o = parse_response(text, asked, settings_.user);
  if (!o && asked.kind == ActionKind::AskAttr) {
    // An attribute answer about the other attribute is still evidence.
    const Concept other = asked.attribute == Concept::Color ? Concept::Location : Concept::Color;
    if ((o = parse_attribute(text, other))) asked = Action::ask_attr(other);
  }
  auto& ex = s->transcript.back();
  ex.answers.emplace_back(text);
  if (!o && !s->reprompted) {
    s->reprompted = true;
    auto out = snapshot(*s);
    out["reprompt"] = true;
    out["message"] = "Sorry, I did not catch that. " + ex.question;
    return out;
  }
  if (o) {
    BeliefUpdate u = update_belief(s->belief, s->grounding, asked, *o, settings_.planner.truthfulness);
    s->flagged = s->flagged || u.zero_evidence;
    s->belief = std::move(u.belief);
  }
  ex.observation = o;
  ex.belief_after = s->belief.probs;
  s->total_reward += settings_.planner.rewards.question_cost(*s->pending);
  ++s->questions;
  advance(*s, settings_);
  return snapshot(*s);
}

nlohmann::json SessionManager::history(const std::string& session_id) const {
  auto s = find(session_id);
  std::lock_guard lock(s->mutex);
  nlohmann::json out = snapshot(*s);
  nlohmann::json transcript = nlohmann::json::array();
  for (const auto& ex : s->transcript) {
    transcript.push_back({{"question", ex.question},
                          {"action", to_json(ex.action)},
                          {"answers", ex.answers},
                          {"observation", ex.observation ? to_json(*ex.observation) : nlohmann::json()},
                          {"belief_after", ex.belief_after}});
  }
  out["transcript"] = std::move(transcript);
  return out;
}

}  // namespace attrdisam
