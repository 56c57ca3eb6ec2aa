// Command-line front end. Everything goes through the C interface of
// libattrdisam so the tool exercises the same surface other bindings use.

#include <attrdisam/attrdisam.h>

#include <CLI11.hpp>
#include <httplib.h>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using Json = nlohmann::json;

struct Failure {
  ad_status status;
  std::string message;
};

void check(ad_status st) {
  if (st != AD_OK) throw Failure{st, ad_last_error()};
}

std::string take(char* s) {
  std::string out(s ? s : "");
  ad_string_free(s);
  return out;
}

template <class T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using Config = std::unique_ptr<ad_config, Deleter<ad_config, ad_config_free>>;
using Scene = std::unique_ptr<ad_scene, Deleter<ad_scene, ad_scene_free>>;
using Suite = std::unique_ptr<ad_suite, Deleter<ad_suite, ad_suite_free>>;
using Report = std::unique_ptr<ad_report, Deleter<ad_report, ad_report_free>>;
using Sessions = std::unique_ptr<ad_sessions, Deleter<ad_sessions, ad_sessions_free>>;

struct Globals {
  std::string config_path;
  std::vector<std::string> overrides;
  std::uint64_t seed = 0;
};

Config make_config(const Globals& g) {
  ad_config* raw = nullptr;
  if (g.config_path.empty()) check(ad_config_new(&raw));
  else check(ad_config_load(g.config_path.c_str(), &raw));
  Config cfg(raw);
  for (const auto& kv : g.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw Failure{AD_ERR_CONFIG, "--set expects key=value, got '" + kv + "'"};
    check(ad_config_set(cfg.get(), kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str()));
  }
  check(ad_config_validate(cfg.get()));
  return cfg;
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw Failure{AD_ERR_IO, "cannot write " + path};
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

// ---- subcommands ---------------------------------------------------------

struct GenOptions {
  std::string out;
  int n_scenes = -1;
  bool single = false;
};

void cmd_gen(const Globals& g, const GenOptions& o) {
  Config cfg = make_config(g);
  if (o.n_scenes >= 0) check(ad_config_set(cfg.get(), "suite.n_scenes", std::to_string(o.n_scenes).c_str()));
  if (o.single) {
    ad_scene* raw = nullptr;
    check(ad_scene_generate(cfg.get(), g.seed, &raw));
    Scene scene(raw);
    if (o.out.empty() || o.out == "-") {
      char* s = nullptr;
      check(ad_scene_to_json(scene.get(), &s));
      std::cout << Json::parse(take(s)).dump(2) << "\n";
    } else {
      check(ad_scene_save(scene.get(), o.out.c_str()));
    }
    return;
  }
  ad_suite* raw = nullptr;
  check(ad_suite_generate(cfg.get(), g.seed, &raw));
  Suite suite(raw);
  if (o.out.empty() || o.out == "-") {
    char* s = nullptr;
    check(ad_suite_to_json(suite.get(), &s));
    std::cout << take(s) << "\n";
  } else {
    check(ad_suite_save(suite.get(), o.out.c_str()));
    std::size_t n = 0;
    check(ad_suite_size(suite.get(), &n));
    std::cerr << "wrote " << n << " scenes to " << o.out << "\n";
  }
}

struct RunOptions {
  std::string policies = "attr_pomdp,rand_ask,rand_sel,point_only,per_object_attr";
  std::string scenes;
  std::string out;
  std::string records;
  std::string format;
  bool no_timing = false;
};

void cmd_run(const Globals& g, const RunOptions& o) {
  Config cfg = make_config(g);
  ad_suite* raw = nullptr;
  if (o.scenes.empty()) check(ad_suite_generate(cfg.get(), g.seed, &raw));
  else check(ad_suite_load(o.scenes.c_str(), &raw));
  Suite suite(raw);

  ad_report* rep = nullptr;
  check(ad_suite_run(suite.get(), cfg.get(), o.policies.c_str(), g.seed, &rep));
  Report report(rep);
  const int timing = o.no_timing ? 0 : 1;

  std::string format = o.format;
  if (format.empty()) format = ends_with(o.out, ".json") ? "json" : "csv";
  char* text = nullptr;
  check(format == "json" ? ad_report_json(report.get(), timing, &text)
                         : ad_report_csv(report.get(), timing, &text));
  write_output(o.out, take(text));
  if (!o.records.empty()) {
    char* lines = nullptr;
    check(ad_report_records_jsonl(report.get(), timing, &lines));
    write_output(o.records, take(lines));
  }
}

struct ScaleOptions {
  std::vector<int> n_values{5, 10, 20, 50};
  std::string policies = "attr_pomdp,point_only";
  int scenes_per_n = 5;
  std::string out;
  std::string format;
  bool no_timing = false;
};

void cmd_scale(const Globals& g, const ScaleOptions& o) {
  Config cfg = make_config(g);
  const std::string format = !o.format.empty() ? o.format : ends_with(o.out, ".json") ? "json" : "csv";
  char* text = nullptr;
  check(ad_scaling_run(cfg.get(), o.n_values.data(), o.n_values.size(), o.policies.c_str(), g.seed,
                       o.scenes_per_n, format == "json" ? 1 : 0, o.no_timing ? 0 : 1, &text));
  write_output(o.out, take(text));
}

struct EpisodeOptions {
  std::string scene;
  std::string policy = "attr_pomdp";
  bool no_timing = false;
};

void cmd_episode(const Globals& g, const EpisodeOptions& o) {
  Config cfg = make_config(g);
  ad_scene* raw = nullptr;
  if (o.scene.empty()) check(ad_scene_generate(cfg.get(), g.seed, &raw));
  else check(ad_scene_load(o.scene.c_str(), &raw));
  Scene scene(raw);
  char* text = nullptr;
  check(ad_episode_run(scene.get(), cfg.get(), o.policy.c_str(), g.seed, o.no_timing ? 0 : 1, &text));
  std::cout << Json::parse(take(text)).dump(2) << "\n";
}

int http_status(ad_status st) {
  switch (st) {
    case AD_ERR_UNKNOWN_SESSION: return 404;
    case AD_ERR_SESSION_DONE: return 409;
    case AD_ERR_INTERNAL:
    case AD_ERR_IO: return 500;
    default: return 400;
  }
}

void reply(httplib::Response& res, const std::function<std::string()>& fn) {
  res.set_header("Access-Control-Allow-Origin", "*");
  try {
    res.set_content(fn(), "application/json");
  } catch (const Failure& f) {
    res.status = http_status(f.status);
    res.set_content(Json{{"error", ad_status_name(f.status)}, {"message", f.message}}.dump(),
                    "application/json");
  } catch (const Json::exception& e) {
    res.status = 400;
    res.set_content(Json{{"error", "schema"}, {"message", e.what()}}.dump(), "application/json");
  }
}

struct ServeOptions {
  std::string host = "127.0.0.1";
  int port = 8080;
};

void cmd_serve(const Globals& g, const ServeOptions& o) {
  Config cfg = make_config(g);
  ad_sessions* raw = nullptr;
  check(ad_sessions_new(cfg.get(), &raw));
  Sessions sessions(raw);

  httplib::Server server;
  server.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Origin", "*");
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });
  server.Get("/health", [](const httplib::Request&, httplib::Response& res) {
    reply(res, [] { return Json{{"status", "ok"}, {"version", ad_version()}}.dump(); });
  });
  server.Get("/policies", [](const httplib::Request&, httplib::Response& res) {
    reply(res, [] {
      char* s = nullptr;
      check(ad_policy_names(&s));
      Json names = Json::array();
      std::stringstream in(take(s));
      for (std::string n; std::getline(in, n, ',');) names.push_back(n);
      return names.dump();
    });
  });
  server.Post("/session", [&](const httplib::Request& req, httplib::Response& res) {
    reply(res, [&] {
      const std::string body = req.body.empty() ? "{}" : req.body;
      char* s = nullptr;
      check(ad_session_start(sessions.get(), body.c_str(), &s));
      return take(s);
    });
  });
  server.Post(R"(/session/([A-Za-z0-9_-]+)/answer)", [&](const httplib::Request& req, httplib::Response& res) {
    reply(res, [&] {
      const Json body = Json::parse(req.body);
      if (!body.is_object() || !body.contains("text") || !body["text"].is_string()) {
        throw Failure{AD_ERR_SCHEMA, "body must be {\"text\": string}"};
      }
      const std::string text = body["text"].get<std::string>();
      char* s = nullptr;
      check(ad_session_answer(sessions.get(), req.matches[1].str().c_str(), text.c_str(), &s));
      return take(s);
    });
  });
  server.Get(R"(/session/([A-Za-z0-9_-]+))", [&](const httplib::Request& req, httplib::Response& res) {
    reply(res, [&] {
      char* s = nullptr;
      check(ad_session_get(sessions.get(), req.matches[1].str().c_str(), &s));
      return take(s);
    });
  });

  std::cerr << "listening on http://" << o.host << ":" << o.port << "\n";
  if (!server.listen(o.host, o.port)) {
    throw Failure{AD_ERR_IO, "cannot listen on " + o.host + ":" + std::to_string(o.port)};
  }
}

struct ReplOptions {
  std::string scene;
  std::string policy = "attr_pomdp";
  bool reveal = false;
};

void print_turn(const Json& state) {
  const auto& belief = state["belief"];
  std::cout << "belief:";
  for (std::size_t i = 0; i < belief.size(); ++i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, " %zu=%.3f", i, belief[i].get<double>());
    std::cout << buf;
  }
  std::cout << "\n";
  if (state.contains("message")) std::cout << state["message"].get<std::string>() << "\n";
  if (state["status"] == "done") {
    const auto& r = state["result"];
    std::cout << "grasping object " << r["grasped"] << " ("
              << (r["correct"].get<bool>() ? "correct" : "wrong, target was " + r["target_id"].dump())
              << "), " << r["n_questions"] << " questions, reward " << r["total_reward"] << "\n";
    return;
  }
  const auto& q = state["question"];
  std::cout << "robot: " << q["text"].get<std::string>() << "\n";
  if (!q["options"].empty()) std::cout << "       options: " << q["options"].dump() << "\n";
}

void cmd_repl(const Globals& g, const ReplOptions& o) {
  Config cfg = make_config(g);
  ad_sessions* raw = nullptr;
  check(ad_sessions_new(cfg.get(), &raw));
  Sessions sessions(raw);

  Json request{{"seed", g.seed}, {"policy", o.policy}};
  if (!o.scene.empty()) {
    ad_scene* sc = nullptr;
    check(ad_scene_load(o.scene.c_str(), &sc));
    Scene scene(sc);
    char* s = nullptr;
    check(ad_scene_to_json(scene.get(), &s));
    request["scene"] = Json::parse(take(s));
  }
  char* s = nullptr;
  check(ad_session_start(sessions.get(), request.dump().c_str(), &s));
  Json state = Json::parse(take(s));

  char* vocab = nullptr;
  check(ad_vocabulary("color", &vocab));
  std::vector<std::string> color_names;
  std::stringstream words(take(vocab));
  for (std::string w; std::getline(words, w, ',');) color_names.push_back(w);

  std::cout << "query: \"" << state["scene"]["query"].get<std::string>() << "\"\n";
  for (const auto& obj : state["scene"]["objects"]) {
    std::string colors;
    const auto& dist = obj["color_dist"];
    for (std::size_t k = 0; k < dist.size() && k < color_names.size(); ++k) {
      if (dist[k].get<double>() >= 0.2) colors += (colors.empty() ? "" : "/") + color_names[k];
    }
    char where[64];
    std::snprintf(where, sizeof where, "(%.2f, %.2f)", obj["center"][0].get<double>(),
                  obj["center"][1].get<double>());
    std::cout << "  object " << obj["id"] << ": " << colors << " " << obj["category"].get<std::string>()
              << " at " << where << "\n";
  }
  if (o.reveal) std::cout << "(target is object " << state["scene"]["target_id"] << ")\n";
  print_turn(state);
  const std::string id = state["session_id"].get<std::string>();
  std::string line;
  while (state["status"] != "done") {
    std::cout << "you> " << std::flush;
    if (!std::getline(std::cin, line) || line == "quit" || line == "exit") break;
    check(ad_session_answer(sessions.get(), id.c_str(), line.c_str(), &s));
    state = Json::parse(take(s));
    print_turn(state);
  }
}

void cmd_show_config(const Globals& g) {
  Config cfg = make_config(g);
  char* s = nullptr;
  check(ad_config_to_json(cfg.get(), &s));
  std::cout << take(s) << "\n";
}

int exit_code(ad_status st) {
  return st == AD_ERR_CONFIG || st == AD_ERR_INVALID_ARGUMENT ? 2 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interactive object disambiguation: scene suites, benchmarks and live sessions"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(ad_version()));

  Globals g;
  app.add_option("--config", g.config_path, "Settings file (key = value lines or JSON)")
      ->check(CLI::ExistingFile);
  app.add_option("--set", g.overrides, "Override a setting, e.g. --set reward.ask_point=-0.5");
  app.add_option("--seed", g.seed, "Random seed")->capture_default_str();

  GenOptions gen;
  auto* gen_cmd = app.add_subcommand("gen-scenes", "Generate a scene suite (or one scene with --single)");
  gen_cmd->add_option("-o,--out", gen.out, "Output file (stdout if omitted)");
  gen_cmd->add_option("-n,--n-scenes", gen.n_scenes, "Number of scenes in the suite");
  gen_cmd->add_flag("--single", gen.single, "Write a single scene built from the scene.* settings");

  RunOptions run;
  auto* run_cmd = app.add_subcommand("run", "Run policies over a scene suite and report");
  run_cmd->add_option("--policies", run.policies, "Comma-separated policy names")->capture_default_str();
  run_cmd->add_option("--scenes", run.scenes, "Suite file from gen-scenes (generated from settings if omitted)");
  run_cmd->add_option("-o,--out", run.out, "Report file; .json selects JSON, otherwise CSV");
  run_cmd->add_option("--format", run.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  run_cmd->add_option("--records", run.records, "Write per-episode records as JSON lines");
  run_cmd->add_flag("--no-timing", run.no_timing, "Omit wall-clock columns so reruns are byte-identical");

  ScaleOptions scale;
  auto* scale_cmd = app.add_subcommand("scale", "Planning cost of the first decision versus scene size");
  scale_cmd->add_option("--n", scale.n_values, "Scene sizes, ascending")->delimiter(',')->capture_default_str();
  scale_cmd->add_option("--policies", scale.policies, "Comma-separated policy names")->capture_default_str();
  scale_cmd->add_option("--scenes-per-n", scale.scenes_per_n, "Scenes per size")->capture_default_str();
  scale_cmd->add_option("-o,--out", scale.out, "Output file; .json selects JSON, otherwise CSV");
  scale_cmd->add_option("--format", scale.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  scale_cmd->add_flag("--no-timing", scale.no_timing, "Omit wall-clock columns");

  EpisodeOptions episode;
  auto* ep_cmd = app.add_subcommand("episode", "Run one simulated episode and print its record");
  ep_cmd->add_option("--scene", episode.scene, "Scene file (generated from settings if omitted)");
  ep_cmd->add_option("--policy", episode.policy, "Policy name")->capture_default_str();
  ep_cmd->add_flag("--no-timing", episode.no_timing, "Omit planning times");

  ServeOptions serve;
  auto* serve_cmd = app.add_subcommand("serve", "HTTP+JSON session service");
  serve_cmd->add_option("--host", serve.host, "Bind address")->capture_default_str();
  serve_cmd->add_option("--port", serve.port, "Port")->capture_default_str()->check(CLI::Range(1, 65535));

  ReplOptions repl;
  auto* repl_cmd = app.add_subcommand("repl", "Answer the robot's questions yourself");
  repl_cmd->add_option("--scene", repl.scene, "Scene file (generated from settings if omitted)");
  repl_cmd->add_option("--policy", repl.policy, "Policy name")->capture_default_str();
  repl_cmd->add_flag("--reveal", repl.reveal, "Print the target id up front");

  auto* cfg_cmd = app.add_subcommand("show-config", "Print every setting and its effective value");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*gen_cmd) cmd_gen(g, gen);
    else if (*run_cmd) cmd_run(g, run);
    else if (*scale_cmd) cmd_scale(g, scale);
    else if (*ep_cmd) cmd_episode(g, episode);
    else if (*serve_cmd) cmd_serve(g, serve);
    else if (*repl_cmd) cmd_repl(g, repl);
    else if (*cfg_cmd) cmd_show_config(g);
  } catch (const Failure& f) {
    std::cerr << "error (" << ad_status_name(f.status) << "): " << f.message << "\n";
    return exit_code(f.status);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
