#include "attrdisam/attrdisam.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>
#include <vector>

#include "attrdisam/bench.hpp"
#include "attrdisam/config.hpp"
#include "attrdisam/error.hpp"
#include "attrdisam/session.hpp"
#include "io.hpp"

using namespace attrdisam;

struct ad_config {
  Settings settings;
};
struct ad_scene {
  Scene scene;
};
struct ad_grounding {
  GroundingResult grounding;
};
struct ad_suite {
  SceneSuite suite;
};
struct ad_report {
  BenchmarkReport report;
};
struct ad_sessions {
  explicit ad_sessions(SessionSettings s) : manager(std::move(s)) {}
  SessionManager manager;
};

namespace {

thread_local std::string g_last_error;

ad_status status_of(ErrorKind k) { return static_cast<ad_status>(static_cast<int>(k) + 1); }

template <class Fn>
ad_status guarded(Fn&& fn) {
  g_last_error.clear();
  try {
    fn();
    return AD_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return status_of(e.kind());
  } catch (const nlohmann::json::exception& e) {
    g_last_error = e.what();
    return AD_ERR_SCHEMA;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return AD_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return AD_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return AD_ERR_INTERNAL;
  }
}

void require(const void* p, const char* name) {
  if (p == nullptr) throw Error(ErrorKind::InvalidArgument, std::string(name) + " must not be NULL");
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void emit(char** out, const std::string& s) {
  require(out, "out");
  *out = dup(s);
}

const Settings& settings_or_default(const ad_config* cfg) {
  static const Settings defaults;
  return cfg ? cfg->settings : defaults;
}

std::vector<std::string> split_policies(const char* csv) {
  require(csv, "policies");
  std::vector<std::string> out;
  std::string cur;
  for (const char* p = csv;; ++p) {
    if (*p == ',' || *p == '\0') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
      if (*p == '\0') break;
    } else if (*p != ' ') {
      cur += *p;
    }
  }
  if (out.empty()) throw Error(ErrorKind::Config, "at least one policy is required");
  return out;
}

Belief belief_from(const double* probs, std::size_t n, std::size_t expected) {
  require(probs, "probs");
  if (n != expected) {
    throw Error(ErrorKind::InvalidArgument, "belief has " + std::to_string(n) + " entries, grounding has " +
                                                std::to_string(expected));
  }
  Belief b;
  b.probs.assign(probs, probs + n);
  double sum = 0.0;
  for (double p : b.probs) {
    if (!(p >= 0.0)) throw Error(ErrorKind::InvalidArgument, "belief entries must be >= 0");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw Error(ErrorKind::InvalidArgument, "belief must sum to 1");
  return b;
}

template <class Handle, class Fn>
ad_status make_handle(Handle** out, Fn&& fn) {
  return guarded([&] {
    require(out, "out");
    *out = nullptr;
    *out = new Handle{fn()};
  });
}

}  // namespace

extern "C" {

const char* ad_version(void) { return "0.1.0"; }

const char* ad_status_name(ad_status status) {
  switch (status) {
    case AD_OK: return "ok";
    case AD_ERR_INTERNAL: return "internal";
    default: break;
  }
  const int k = static_cast<int>(status) - 1;
  if (k >= 0 && k <= static_cast<int>(ErrorKind::Io)) return to_string(static_cast<ErrorKind>(k)).data();
  return "unknown";
}

const char* ad_last_error(void) { return g_last_error.c_str(); }

void ad_string_free(char* s) { std::free(s); }

ad_status ad_policy_names(char** out) {
  return guarded([&] {
    std::string s;
    for (auto n : policy_names()) s += (s.empty() ? "" : ",") + std::string(n);
    emit(out, s);
  });
}

ad_status ad_vocabulary(const char* attribute, char** out) {
  return guarded([&] {
    require(attribute, "attribute");
    const std::string_view a = attribute;
    if (a != "color" && a != "location") {
      throw Error(ErrorKind::InvalidArgument, "unknown attribute '" + std::string(a) + "'");
    }
    const Concept c = a == "color" ? Concept::Color : Concept::Location;
    std::string s;
    for (std::size_t i = 0; i < vocabulary_size(c); ++i) {
      s += (s.empty() ? "" : ",") + std::string(vocabulary_word(c, i));
    }
    emit(out, s);
  });
}

ad_status ad_config_new(ad_config** out) {
  return make_handle(out, [] { return Settings{}; });
}

ad_status ad_config_load(const char* path, ad_config** out) {
  return make_handle(out, [&] {
    require(path, "path");
    return load_settings(path);
  });
}

ad_status ad_config_set(ad_config* cfg, const char* key, const char* value) {
  return guarded([&] {
    require(cfg, "cfg");
    require(key, "key");
    require(value, "value");
    Settings trial = cfg->settings;
    apply_setting(trial, key, value);
    cfg->settings = std::move(trial);
  });
}

ad_status ad_config_validate(const ad_config* cfg) {
  return guarded([&] {
    require(cfg, "cfg");
    cfg->settings.validate();
  });
}

ad_status ad_config_to_json(const ad_config* cfg, char** out) {
  return guarded([&] { emit(out, to_json(settings_or_default(cfg)).dump(2)); });
}

void ad_config_free(ad_config* cfg) { delete cfg; }

ad_status ad_scene_generate(const ad_config* cfg, uint64_t seed, ad_scene** out) {
  return make_handle(out, [&] { return generate_scene(settings_or_default(cfg).scene, seed); });
}

ad_status ad_scene_from_json(const char* json, ad_scene** out) {
  return make_handle(out, [&] {
    require(json, "json");
    return scene_from_json(detail::parse_json(json, "scene"));
  });
}

ad_status ad_scene_load(const char* path, ad_scene** out) {
  return make_handle(out, [&] {
    require(path, "path");
    return load_scene(path);
  });
}

ad_status ad_scene_save(const ad_scene* scene, const char* path) {
  return guarded([&] {
    require(scene, "scene");
    require(path, "path");
    save_scene(scene->scene, path);
  });
}

ad_status ad_scene_to_json(const ad_scene* scene, char** out) {
  return guarded([&] {
    require(scene, "scene");
    emit(out, to_json(scene->scene).dump());
  });
}

ad_status ad_scene_size(const ad_scene* scene, size_t* out) {
  return guarded([&] {
    require(scene, "scene");
    require(out, "out");
    *out = scene->scene.size();
  });
}

void ad_scene_free(ad_scene* scene) { delete scene; }

ad_status ad_grounding_simulate(const ad_scene* scene, const ad_config* cfg, uint64_t seed,
                                ad_grounding** out) {
  return make_handle(out, [&] {
    require(scene, "scene");
    return simulate_grounding(scene->scene, settings_or_default(cfg).noise, seed);
  });
}

ad_status ad_grounding_from_json(const char* json, ad_grounding** out) {
  return make_handle(out, [&] {
    require(json, "json");
    return grounding_from_json(detail::parse_json(json, "grounding"));
  });
}

ad_status ad_grounding_load(const char* path, ad_grounding** out) {
  return make_handle(out, [&] {
    require(path, "path");
    return load_grounding(path);
  });
}

ad_status ad_grounding_save(const ad_grounding* g, const char* path) {
  return guarded([&] {
    require(g, "grounding");
    require(path, "path");
    save_grounding(g->grounding, path);
  });
}

ad_status ad_grounding_to_json(const ad_grounding* g, char** out) {
  return guarded([&] {
    require(g, "grounding");
    emit(out, to_json(g->grounding).dump());
  });
}

ad_status ad_grounding_size(const ad_grounding* g, size_t* out) {
  return guarded([&] {
    require(g, "grounding");
    require(out, "out");
    *out = g->grounding.size();
  });
}

void ad_grounding_free(ad_grounding* g) { delete g; }

ad_status ad_init_belief(const double* scores, size_t n, double* out_probs) {
  return guarded([&] {
    require(scores, "scores");
    require(out_probs, "out_probs");
    const Belief b = init_belief(std::span<const double>(scores, n));
    std::copy(b.probs.begin(), b.probs.end(), out_probs);
  });
}

ad_status ad_plan(const ad_grounding* g, const ad_config* cfg, const char* policy, const double* probs,
                  size_t n, int questions_asked, uint64_t seed, char** out) {
  return guarded([&] {
    require(g, "grounding");
    require(policy, "policy");
    const Settings& s = settings_or_default(cfg);
    const Belief b = belief_from(probs, n, g->grounding.size());
    const auto p = make_policy(policy, s.planner, s.baseline);
    const Decision d = p->decide({b, g->grounding, questions_asked, seed});
    emit(out, nlohmann::json{{"action", to_json(d.action)}, {"expansions", d.expansions}}.dump());
  });
}

ad_status ad_update_belief(const ad_grounding* g, const ad_config* cfg, const double* probs, size_t n,
                           const char* action_json, const char* observation_json, double* out_probs,
                           int* zero_evidence) {
  return guarded([&] {
    require(g, "grounding");
    require(action_json, "action_json");
    require(observation_json, "observation_json");
    require(out_probs, "out_probs");
    const Belief b = belief_from(probs, n, g->grounding.size());
    const Action a = action_from_json(detail::parse_json(action_json, "action"));
    const Observation o = observation_from_json(detail::parse_json(observation_json, "observation"));
    const BeliefUpdate u = update_belief(b, g->grounding, a, o, settings_or_default(cfg).planner.truthfulness);
    std::copy(u.belief.probs.begin(), u.belief.probs.end(), out_probs);
    if (zero_evidence) *zero_evidence = u.zero_evidence ? 1 : 0;
  });
}

ad_status ad_episode_run(const ad_scene* scene, const ad_config* cfg, const char* policy, uint64_t seed,
                         int include_timing, char** out) {
  return guarded([&] {
    require(scene, "scene");
    require(policy, "policy");
    const BenchSettings s = settings_or_default(cfg).bench();
    const auto p = make_policy(policy, s.planner, s.baseline);
    const EpisodeRecord r = run_episode(scene->scene, s.noise, *p, s.user, s.episode_options(), seed);
    emit(out, to_json(r, include_timing != 0).dump());
  });
}

ad_status ad_suite_generate(const ad_config* cfg, uint64_t seed, ad_suite** out) {
  return make_handle(out, [&] {
    const Settings& s = settings_or_default(cfg);
    SuiteConfig sc = s.suite;
    sc.scene = s.scene;
    return generate_suite(sc, seed);
  });
}

ad_status ad_suite_load(const char* path, ad_suite** out) {
  return make_handle(out, [&] {
    require(path, "path");
    return load_suite(path);
  });
}

ad_status ad_suite_save(const ad_suite* suite, const char* path) {
  return guarded([&] {
    require(suite, "suite");
    require(path, "path");
    save_suite(suite->suite, path);
  });
}

ad_status ad_suite_to_json(const ad_suite* suite, char** out) {
  return guarded([&] {
    require(suite, "suite");
    emit(out, to_json(suite->suite).dump());
  });
}

ad_status ad_suite_size(const ad_suite* suite, size_t* out) {
  return guarded([&] {
    require(suite, "suite");
    require(out, "out");
    *out = suite->suite.scenes.size();
  });
}

void ad_suite_free(ad_suite* suite) { delete suite; }

ad_status ad_suite_run(const ad_suite* suite, const ad_config* cfg, const char* policies, uint64_t seed,
                       ad_report** out) {
  return make_handle(out, [&] {
    require(suite, "suite");
    const auto names = split_policies(policies);
    return run_suite(suite->suite, names, settings_or_default(cfg).bench(), seed);
  });
}

ad_status ad_report_csv(const ad_report* report, int include_timing, char** out) {
  return guarded([&] {
    require(report, "report");
    emit(out, to_csv(report->report, include_timing != 0));
  });
}

ad_status ad_report_json(const ad_report* report, int include_timing, char** out) {
  return guarded([&] {
    require(report, "report");
    emit(out, to_json(report->report, include_timing != 0).dump(2) + "\n");
  });
}

ad_status ad_report_records_jsonl(const ad_report* report, int include_timing, char** out) {
  return guarded([&] {
    require(report, "report");
    emit(out, records_jsonl(report->report, include_timing != 0));
  });
}

void ad_report_free(ad_report* report) { delete report; }

ad_status ad_scaling_run(const ad_config* cfg, const int* n_values, size_t count, const char* policies,
                         uint64_t seed, int scenes_per_n, int format, int include_timing, char** out) {
  return guarded([&] {
    if (count > 0) require(n_values, "n_values");
    if (format != 0 && format != 1) throw Error(ErrorKind::InvalidArgument, "format must be 0 (csv) or 1 (json)");
    const auto names = split_policies(policies);
    const std::vector<int> ns(n_values, n_values + count);
    const auto rows = scaling_experiment(ns, names, settings_or_default(cfg).bench(), seed, scenes_per_n);
    emit(out, format == 0 ? scaling_to_csv(rows, include_timing != 0)
                          : scaling_to_json(rows, include_timing != 0).dump(2) + "\n");
  });
}

ad_status ad_sessions_new(const ad_config* cfg, ad_sessions** out) {
  return guarded([&] {
    require(out, "out");
    *out = nullptr;
    *out = new ad_sessions(settings_or_default(cfg).session());
  });
}

ad_status ad_session_start(ad_sessions* sessions, const char* request_json, char** out) {
  return guarded([&] {
    require(sessions, "sessions");
    require(request_json, "request_json");
    emit(out, sessions->manager.start(detail::parse_json(request_json, "request")).dump());
  });
}

ad_status ad_session_answer(ad_sessions* sessions, const char* session_id, const char* text, char** out) {
  return guarded([&] {
    require(sessions, "sessions");
    require(session_id, "session_id");
    require(text, "text");
    emit(out, sessions->manager.answer(session_id, text).dump());
  });
}

ad_status ad_session_get(const ad_sessions* sessions, const char* session_id, char** out) {
  return guarded([&] {
    require(sessions, "sessions");
    require(session_id, "session_id");
    emit(out, sessions->manager.history(session_id).dump());
  });
}

void ad_sessions_free(ad_sessions* sessions) { delete sessions; }

}  // extern "C"
