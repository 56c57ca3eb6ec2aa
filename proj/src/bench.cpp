#include "attrdisam/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <sstream>
#include <thread>

#include "attrdisam/error.hpp"
#include "attrdisam/rng.hpp"
#include "io.hpp"

namespace attrdisam {

void SuiteConfig::validate() const {
  auto bad = [](const std::string& m) { throw Error(ErrorKind::Config, "suite config: " + m); };
  if (n_scenes < 0) bad("n_scenes must be >= 0");
  if (n_min < 1 || n_max < n_min) bad("need 1 <= n_min <= n_max");
  for (double f : {frac_category_only, frac_no_prior, frac_unambiguous}) {
    if (!(f >= 0.0)) bad("ambiguity fractions must be >= 0");
  }
  if (std::abs(frac_category_only + frac_no_prior + frac_unambiguous - 1.0) > 1e-9) {
    bad("ambiguity fractions must sum to 1");
  }
}

SceneSuite generate_suite(const SuiteConfig& config, std::uint64_t seed) {
  config.validate();
  SceneSuite suite;
  const auto total = static_cast<double>(config.n_scenes);
  for (int i = 0; i < config.n_scenes; ++i) {
    // Deterministic quota per class rather than a random draw.
    const double pos = (i + 0.5) / total;
    SceneGenConfig sc = config.scene;
    if (pos < config.frac_category_only) {
      sc.ambiguity = AmbiguityClass::CategoryOnly;
    } else if (pos < config.frac_category_only + config.frac_no_prior) {
      sc.ambiguity = AmbiguityClass::NoPrior;
    } else {
      sc.ambiguity = AmbiguityClass::Unambiguous;
    }
    Rng rng = make_rng(seed, Stream::Suite, static_cast<std::uint64_t>(i));
    sc.n_objects = config.n_min +
                   static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(
                                                           config.n_max - config.n_min + 1)));
    suite.scenes.push_back(generate_scene(sc, rng()));
  }
  return suite;
}

nlohmann::json to_json(const SceneSuite& suite) {
  nlohmann::json scenes = nlohmann::json::array();
  for (const auto& s : suite.scenes) scenes.push_back(to_json(s));
  return {{"scenes", std::move(scenes)}};
}

SceneSuite suite_from_json(const nlohmann::json& j) {
  return detail::with_schema_errors("suite", [&] {
    SceneSuite suite;
    for (const auto& s : j.at("scenes")) suite.scenes.push_back(scene_from_json(s));
    return suite;
  });
}

SceneSuite load_suite(const std::filesystem::path& path) {
  return suite_from_json(detail::parse_json(detail::read_text_file(path), path.string()));
}

void save_suite(const SceneSuite& suite, const std::filesystem::path& path) {
  detail::write_text_file(path, to_json(suite).dump(1) + "\n");
}

EpisodeOptions BenchSettings::episode_options() const {
  return {planner.truthfulness, planner.rewards, step_limit};
}

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t episode_seed(std::uint64_t suite_seed, std::size_t scene_index) {
  return derive_seed(suite_seed, Stream::Suite, 0x8000'0000ULL + scene_index);
}

namespace {

nlohmann::json settings_json(const BenchSettings& s) {
  const auto& r = s.planner.rewards;
  return {{"noise",
           {{"score_sigma", s.noise.score_sigma},
            {"kappa", s.noise.dirichlet_kappa},
            {"location_sigma", s.noise.location_sigma},
            {"lambda", s.noise.lambda},
            {"neutral_score", s.noise.neutral_score},
            {"weights", {s.noise.weights.subject, s.noise.weights.location, s.noise.weights.relation}}}},
          {"planner",
           {{"depth", s.planner.depth},
            {"discount", s.planner.discount},
            {"truthfulness", s.planner.truthfulness},
            {"observation_samples", s.planner.observation_samples},
            {"sampling_seed", s.planner.sampling_seed},
            {"rewards", {r.ask_attr, r.ask_point, r.grasp_correct, r.grasp_wrong}}}},
          {"baseline", {{"n_q", s.baseline.max_questions}, {"threshold", s.baseline.belief_threshold}}},
          {"user",
           {{"truthfulness", s.user.truthfulness},
            {"color_mode", static_cast<int>(s.user.color_mode)},
            {"location_mode", static_cast<int>(s.user.location_mode)},
            {"positive_words", s.user.positive_words},
            {"negative_words", s.user.negative_words}}},
          {"step_limit", s.step_limit}};
}

std::string scene_ref(std::size_t i) {
  std::string digits = std::to_string(i);
  return "scene-" + std::string(digits.size() < 5 ? 5 - digits.size() : 0, '0') + digits;
}

double percentile95(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const auto rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(v.size())));
  return v[std::max<std::size_t>(rank, 1) - 1];
}

std::string num(double x) { return nlohmann::json(x).dump(); }

}  // namespace

std::vector<PolicyRow> aggregate(std::vector<EpisodeRecord> records,
                                 std::span<const std::string> policies) {
  std::sort(records.begin(), records.end(), [](const EpisodeRecord& a, const EpisodeRecord& b) {
    return std::tie(a.policy, a.scene_ref, a.seed) < std::tie(b.policy, b.scene_ref, b.seed);
  });
  std::vector<PolicyRow> rows;
  for (const auto& name : policies) {
    PolicyRow row;
    row.policy = name;
    long questions = 0;
    std::vector<double> times;
    for (const auto& r : records) {
      if (r.policy != name) continue;
      ++row.n_episodes;
      row.n_correct += r.correct ? 1 : 0;
      questions += r.n_questions;
      for (const auto& s : r.steps) times.push_back(s.planning_ms);
    }
    if (row.n_episodes > 0) {
      row.accuracy = static_cast<double>(row.n_correct) / row.n_episodes;
      row.mean_questions = static_cast<double>(questions) / row.n_episodes;
    }
    if (!times.empty()) {
      double sum = 0.0;
      for (double t : times) sum += t;
      row.mean_planning_ms = sum / static_cast<double>(times.size());
      row.p95_planning_ms = percentile95(std::move(times));
    }
    rows.push_back(std::move(row));
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const PolicyRow& a, const PolicyRow& b) { return a.accuracy > b.accuracy; });
  return rows;
}

BenchmarkReport run_suite(const SceneSuite& suite, std::span<const std::string> policies,
                          const BenchSettings& settings, std::uint64_t seed) {
  if (policies.empty()) throw Error(ErrorKind::Config, "at least one policy is required");
  std::vector<std::unique_ptr<Policy>> impls;
  for (const auto& p : policies) impls.push_back(make_policy(p, settings.planner, settings.baseline));
  settings.user.validate();

  const std::size_t n_scenes = suite.scenes.size();
  const std::size_t n_tasks = n_scenes * impls.size();
  std::vector<EpisodeRecord> records(n_tasks);
  std::vector<std::exception_ptr> errors(n_tasks);
  std::atomic<std::size_t> next{0};
  const EpisodeOptions options = settings.episode_options();

  auto worker = [&] {
    for (std::size_t t; (t = next.fetch_add(1)) < n_tasks;) {
      const std::size_t pi = t / std::max<std::size_t>(n_scenes, 1);
      const std::size_t si = t % std::max<std::size_t>(n_scenes, 1);
      try {
        records[t] = run_episode(suite.scenes[si], settings.noise, *impls[pi], settings.user,
                                 options, episode_seed(seed, si));
        records[t].scene_ref = scene_ref(si);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    }
  };
  unsigned threads = settings.threads ? settings.threads : std::thread::hardware_concurrency();
  threads = std::clamp<unsigned>(threads, 1, static_cast<unsigned>(std::max<std::size_t>(n_tasks, 1)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
  }

  for (std::size_t t = 0; t < n_tasks; ++t) {
    if (!errors[t]) continue;
    const std::string where = "scene " + std::to_string(t % n_scenes) + " (" + policies[t / n_scenes] + ")";
    try {
      std::rethrow_exception(errors[t]);
    } catch (const Error& e) {
      throw Error(e.kind(), where + ": " + e.what());
    }
  }

  BenchmarkReport report;
  report.seed = seed;
  nlohmann::json identity{{"suite", to_json(suite)}, {"settings", settings_json(settings)}};
  report.config_hash = fnv1a64(identity.dump());
  report.rows = aggregate(records, policies);
  report.records = std::move(records);
  return report;
}

std::string to_csv(const BenchmarkReport& report, bool include_timing) {
  std::ostringstream out;
  out << "policy,n_episodes,accuracy,mean_questions,mean_planning_ms,p95_planning_ms\n";
  for (const auto& r : report.rows) {
    out << r.policy << ',' << r.n_episodes << ',' << num(r.accuracy) << ',' << num(r.mean_questions)
        << ',';
    if (include_timing) out << num(r.mean_planning_ms) << ',' << num(r.p95_planning_ms);
    else out << ',';
    out << '\n';
  }
  return out.str();
}

nlohmann::json to_json(const BenchmarkReport& report, bool include_timing) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"policy", r.policy},
                    {"n_episodes", r.n_episodes},
                    {"accuracy", r.accuracy},
                    {"mean_questions", r.mean_questions},
                    {"mean_planning_ms", include_timing ? nlohmann::json(r.mean_planning_ms) : nlohmann::json()},
                    {"p95_planning_ms", include_timing ? nlohmann::json(r.p95_planning_ms) : nlohmann::json()}});
  }
  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(report.config_hash));
  return {{"rows", std::move(rows)}, {"config_hash", hash}, {"seed", report.seed}};
}

std::string records_jsonl(const BenchmarkReport& report, bool include_timing) {
  std::string out;
  for (const auto& r : report.records) out += to_json(r, include_timing).dump() + "\n";
  return out;
}

std::vector<ScalingRow> scaling_experiment(std::span<const int> n_values,
                                           std::span<const std::string> policies,
                                           const BenchSettings& settings, std::uint64_t seed,
                                           int scenes_per_n) {
  if (!std::is_sorted(n_values.begin(), n_values.end())) {
    throw Error(ErrorKind::Config, "n_values must be ascending");
  }
  if (scenes_per_n < 1) throw Error(ErrorKind::Config, "scenes_per_n must be >= 1");
  std::vector<std::unique_ptr<Policy>> impls;
  for (const auto& p : policies) impls.push_back(make_policy(p, settings.planner, settings.baseline));

  std::vector<ScalingRow> rows;
  for (int n : n_values) {
    if (n < 1) throw Error(ErrorKind::Config, "scene sizes must be >= 1");
    std::vector<Scene> scenes;
    std::vector<GroundingResult> groundings;
    for (int k = 0; k < scenes_per_n; ++k) {
      SceneGenConfig sc;
      sc.n_objects = n;
      sc.ambiguity = AmbiguityClass::NoPrior;
      sc.min_separation = std::min(sc.min_separation, 0.5 / std::sqrt(static_cast<double>(n)));
      const std::uint64_t s = derive_seed(seed, Stream::Suite, static_cast<std::uint64_t>(n) * 1000 + k);
      scenes.push_back(generate_scene(sc, s));
      groundings.push_back(simulate_grounding(scenes.back(), settings.noise, s));
    }
    for (const auto& policy : impls) {
      ScalingRow row;
      row.n = n;
      row.policy = std::string(policy->name());
      double expansions = 0.0;
      double ms = 0.0;
      for (int k = 0; k < scenes_per_n; ++k) {
        const Belief b = init_belief(groundings[static_cast<std::size_t>(k)].scores);
        const DecisionContext ctx{b, groundings[static_cast<std::size_t>(k)], 0,
                                  derive_seed(seed, Stream::Policy, static_cast<std::uint64_t>(k))};
        const auto t0 = std::chrono::steady_clock::now();
        const Decision d = policy->decide(ctx);
        const auto t1 = std::chrono::steady_clock::now();
        expansions += static_cast<double>(d.expansions);
        ms += std::chrono::duration<double, std::milli>(t1 - t0).count();
        ++row.n_decisions;
      }
      row.mean_expansions = expansions / row.n_decisions;
      row.mean_planning_ms = ms / row.n_decisions;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::string scaling_to_csv(std::span<const ScalingRow> rows, bool include_timing) {
  std::ostringstream out;
  out << "n,policy,n_decisions,mean_expansions,mean_planning_ms\n";
  for (const auto& r : rows) {
    out << r.n << ',' << r.policy << ',' << r.n_decisions << ',' << num(r.mean_expansions) << ',';
    if (include_timing) out << num(r.mean_planning_ms);
    out << '\n';
  }
  return out.str();
}

nlohmann::json scaling_to_json(std::span<const ScalingRow> rows, bool include_timing) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : rows) {
    out.push_back({{"n", r.n},
                   {"policy", r.policy},
                   {"n_decisions", r.n_decisions},
                   {"mean_expansions", r.mean_expansions},
                   {"mean_planning_ms", include_timing ? nlohmann::json(r.mean_planning_ms) : nlohmann::json()}});
  }
  return out;
}

}  // namespace attrdisam
