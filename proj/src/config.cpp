#include "attrdisam/config.hpp"

#include <charconv>
#include <functional>

#include "attrdisam/error.hpp"
#include "io.hpp"

namespace attrdisam {

BenchSettings Settings::bench() const {
  BenchSettings b;
  b.noise = noise;
  b.planner = planner;
  b.baseline = baseline;
  b.user = user;
  b.step_limit = step_limit;
  b.threads = threads;
  return b;
}

SessionSettings Settings::session() const {
  return {scene, noise, planner, baseline, user, step_limit};
}

void Settings::validate() const {
  planner.validate();
  baseline.validate();
  user.validate();
  suite.validate();
  if (step_limit < 1) throw Error(ErrorKind::Config, "step_limit must be >= 1");
  if (!(noise.lambda > 0.0)) throw Error(ErrorKind::Config, "lambda must be > 0");
  for (double v : {noise.score_sigma, noise.location_sigma}) {
    if (!(v >= 0.0)) throw Error(ErrorKind::Config, "noise magnitudes must be >= 0");
  }
}

namespace {

using Json = nlohmann::json;

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view want) {
  throw Error(ErrorKind::Config, "invalid value '" + std::string(value) + "' for " + std::string(key) +
                                     " (expected " + std::string(want) + ")");
}

double to_double(std::string_view key, std::string_view v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) bad_value(key, v, "a number");
  return out;
}

long long to_int(std::string_view key, std::string_view v) {
  long long out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) bad_value(key, v, "an integer");
  return out;
}

bool to_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  bad_value(key, v, "true or false");
}

std::vector<std::string> to_list(std::string_view v) {
  std::vector<std::string> out;
  while (!v.empty()) {
    const auto comma = v.find(',');
    const auto item = trim(v.substr(0, comma));
    if (!item.empty()) out.emplace_back(item);
    if (comma == std::string_view::npos) break;
    v.remove_prefix(comma + 1);
  }
  return out;
}

struct Entry {
  const char* key;
  std::function<void(Settings&, std::string_view key, std::string_view value)> set;
  std::function<Json(const Settings&)> get;
};

template <typename Field>
Entry real(const char* key, Field field) {
  return {key, [field](Settings& s, auto k, auto v) { field(s) = to_double(k, v); },
          [field](const Settings& s) { return Json(field(const_cast<Settings&>(s))); }};
}

template <typename Field>
Entry integer(const char* key, Field field) {
  return {key,
          [field](Settings& s, auto k, auto v) {
            using T = std::remove_reference_t<decltype(field(s))>;
            const long long x = to_int(k, v);
            if constexpr (std::is_unsigned_v<T>) {
              if (x < 0) bad_value(k, v, "a non-negative integer");
            }
            field(s) = static_cast<T>(x);
          },
          [field](const Settings& s) { return Json(field(const_cast<Settings&>(s))); }};
}

template <typename Field>
Entry list(const char* key, Field field) {
  return {key, [field](Settings& s, auto, auto v) { field(s) = to_list(v); },
          [field](const Settings& s) { return Json(field(const_cast<Settings&>(s))); }};
}

const std::vector<Entry>& entries() {
  static const std::vector<Entry> table = [] {
    std::vector<Entry> t;
    // Shorthands that set more than one field.
    t.push_back({"lambda",
                 [](Settings& s, auto k, auto v) {
                   s.noise.lambda = to_double(k, v);
                   s.user.location_lambda = s.noise.lambda;
                 },
                 [](const Settings& s) { return Json(s.noise.lambda); }});
    t.push_back({"truthfulness",
                 [](Settings& s, auto k, auto v) {
                   s.planner.truthfulness = to_double(k, v);
                   s.user.truthfulness = s.planner.truthfulness;
                 },
                 [](const Settings& s) { return Json(s.planner.truthfulness); }});
    t.push_back(integer("depth", [](Settings& s) -> auto& { return s.planner.depth; }));
    t.push_back(real("discount", [](Settings& s) -> auto& { return s.planner.discount; }));
    t.push_back(integer("n_q", [](Settings& s) -> auto& { return s.baseline.max_questions; }));
    t.push_back(real("belief_threshold", [](Settings& s) -> auto& { return s.baseline.belief_threshold; }));
    t.push_back(integer("step_limit", [](Settings& s) -> auto& { return s.step_limit; }));
    t.push_back(integer("threads", [](Settings& s) -> auto& { return s.threads; }));

    t.push_back(real("noise.score_sigma", [](Settings& s) -> auto& { return s.noise.score_sigma; }));
    t.push_back(real("noise.kappa", [](Settings& s) -> auto& { return s.noise.dirichlet_kappa; }));
    t.push_back(real("noise.location_sigma", [](Settings& s) -> auto& { return s.noise.location_sigma; }));
    t.push_back(real("noise.lambda", [](Settings& s) -> auto& { return s.noise.lambda; }));
    t.push_back(real("noise.neutral_score", [](Settings& s) -> auto& { return s.noise.neutral_score; }));
    t.push_back(real("noise.weight.subject", [](Settings& s) -> auto& { return s.noise.weights.subject; }));
    t.push_back(real("noise.weight.location", [](Settings& s) -> auto& { return s.noise.weights.location; }));
    t.push_back(real("noise.weight.relation", [](Settings& s) -> auto& { return s.noise.weights.relation; }));

    t.push_back(real("reward.ask_attr", [](Settings& s) -> auto& { return s.planner.rewards.ask_attr; }));
    t.push_back(real("reward.ask_point", [](Settings& s) -> auto& { return s.planner.rewards.ask_point; }));
    t.push_back(real("reward.grasp_correct", [](Settings& s) -> auto& { return s.planner.rewards.grasp_correct; }));
    t.push_back(real("reward.grasp_wrong", [](Settings& s) -> auto& { return s.planner.rewards.grasp_wrong; }));

    t.push_back(integer("planner.depth", [](Settings& s) -> auto& { return s.planner.depth; }));
    t.push_back(real("planner.discount", [](Settings& s) -> auto& { return s.planner.discount; }));
    t.push_back(real("planner.truthfulness", [](Settings& s) -> auto& { return s.planner.truthfulness; }));
    t.push_back(integer("planner.observation_samples",
                        [](Settings& s) -> auto& { return s.planner.observation_samples; }));
    t.push_back(integer("planner.sampling_seed", [](Settings& s) -> auto& { return s.planner.sampling_seed; }));

    t.push_back(integer("baseline.n_q", [](Settings& s) -> auto& { return s.baseline.max_questions; }));
    t.push_back(real("baseline.belief_threshold",
                     [](Settings& s) -> auto& { return s.baseline.belief_threshold; }));

    t.push_back(real("user.truthfulness", [](Settings& s) -> auto& { return s.user.truthfulness; }));
    t.push_back(real("user.location_lambda", [](Settings& s) -> auto& { return s.user.location_lambda; }));
    t.push_back({"user.color_mode",
                 [](Settings& s, auto k, auto v) {
                   if (v == "sample") s.user.color_mode = ColorResponseMode::SampleTrueDist;
                   else if (v == "argmax") s.user.color_mode = ColorResponseMode::ArgmaxTrueDist;
                   else bad_value(k, v, "sample or argmax");
                 },
                 [](const Settings& s) {
                   return Json(s.user.color_mode == ColorResponseMode::SampleTrueDist ? "sample" : "argmax");
                 }});
    t.push_back({"user.location_mode",
                 [](Settings& s, auto k, auto v) {
                   if (v == "nearest") s.user.location_mode = LocationResponseMode::NearestCell;
                   else if (v == "sample") s.user.location_mode = LocationResponseMode::SampleSoftmax;
                   else bad_value(k, v, "nearest or sample");
                 },
                 [](const Settings& s) {
                   return Json(s.user.location_mode == LocationResponseMode::NearestCell ? "nearest" : "sample");
                 }});
    t.push_back(list("user.positive_words", [](Settings& s) -> auto& { return s.user.positive_words; }));
    t.push_back(list("user.negative_words", [](Settings& s) -> auto& { return s.user.negative_words; }));

    t.push_back(integer("scene.n_objects", [](Settings& s) -> auto& { return s.scene.n_objects; }));
    t.push_back(integer("scene.n_categories", [](Settings& s) -> auto& { return s.scene.n_categories; }));
    t.push_back(integer("scene.n_colors", [](Settings& s) -> auto& { return s.scene.n_colors; }));
    t.push_back(real("scene.min_separation", [](Settings& s) -> auto& { return s.scene.min_separation; }));
    t.push_back(real("scene.multi_color_prob", [](Settings& s) -> auto& { return s.scene.multi_color_prob; }));
    t.push_back(real("scene.relation_query_prob",
                     [](Settings& s) -> auto& { return s.scene.relation_query_prob; }));
    t.push_back(real("scene.location_query_prob",
                     [](Settings& s) -> auto& { return s.scene.location_query_prob; }));
    t.push_back({"scene.distinct_colors",
                 [](Settings& s, auto k, auto v) { s.scene.distinct_colors = to_bool(k, v); },
                 [](const Settings& s) { return Json(s.scene.distinct_colors); }});
    t.push_back({"scene.ambiguity",
                 [](Settings& s, auto k, auto v) {
                   try {
                     s.scene.ambiguity = ambiguity_from_string(v);
                   } catch (const Error&) {
                     bad_value(k, v, "unambiguous, category_only or no_prior");
                   }
                 },
                 [](const Settings& s) { return Json(std::string(to_string(s.scene.ambiguity))); }});
    t.push_back(list("scene.colors", [](Settings& s) -> auto& { return s.scene.colors; }));
    t.push_back(list("scene.categories", [](Settings& s) -> auto& { return s.scene.categories; }));

    t.push_back(integer("suite.n_scenes", [](Settings& s) -> auto& { return s.suite.n_scenes; }));
    t.push_back(integer("suite.n_min", [](Settings& s) -> auto& { return s.suite.n_min; }));
    t.push_back(integer("suite.n_max", [](Settings& s) -> auto& { return s.suite.n_max; }));
    t.push_back(real("suite.frac_category_only",
                     [](Settings& s) -> auto& { return s.suite.frac_category_only; }));
    t.push_back(real("suite.frac_no_prior", [](Settings& s) -> auto& { return s.suite.frac_no_prior; }));
    t.push_back(real("suite.frac_unambiguous", [](Settings& s) -> auto& { return s.suite.frac_unambiguous; }));
    return t;
  }();
  return table;
}

std::string scalar_text(const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_array()) {
    std::string out;
    for (const auto& item : v) {
      if (!out.empty()) out += ',';
      out += scalar_text(item);
    }
    return out;
  }
  return v.dump();
}

void flatten(const Json& j, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& out) {
  for (const auto& [k, v] : j.items()) {
    const std::string key = prefix.empty() ? k : prefix + "." + k;
    if (v.is_object()) {
      flatten(v, key, out);
    } else if (v.is_null()) {
      throw Error(ErrorKind::Config, "null value for " + key);
    } else {
      out.emplace_back(key, scalar_text(v));
    }
  }
}

}  // namespace

void apply_setting(Settings& s, std::string_view key, std::string_view value) {
  value = trim(value);
  for (const auto& e : entries()) {
    if (key == e.key) {
      e.set(s, key, value);
      return;
    }
  }
  throw Error(ErrorKind::Config, "unknown config key '" + std::string(key) + "'");
}

void apply_settings_json(Settings& s, const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorKind::Config, "config JSON must be an object");
  std::vector<std::pair<std::string, std::string>> flat;
  flatten(j, "", flat);
  for (const auto& [k, v] : flat) apply_setting(s, k, v);
}

void apply_settings_text(Settings& s, std::string_view text, std::string_view origin) {
  if (const auto t = trim(text); !t.empty() && t.front() == '{') {
    const Json j = Json::parse(t.begin(), t.end(), nullptr, false);
    if (j.is_discarded()) throw Error(ErrorKind::Config, std::string(origin) + ": malformed JSON");
    apply_settings_json(s, j);
    return;
  }
  int line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorKind::Config,
                  std::string(origin) + ":" + std::to_string(line_no) + ": expected key = value");
    }
    try {
      apply_setting(s, trim(line.substr(0, eq)), line.substr(eq + 1));
    } catch (const Error& e) {
      throw Error(ErrorKind::Config, std::string(origin) + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

Settings load_settings(const std::filesystem::path& path) {
  Settings s;
  std::string text;
  try {
    text = detail::read_text_file(path);
  } catch (const Error& e) {
    throw Error(ErrorKind::Config, e.what());
  }
  apply_settings_text(s, text, path.string());
  s.validate();
  return s;
}

std::vector<std::string> setting_keys() {
  std::vector<std::string> out;
  for (const auto& e : entries()) out.emplace_back(e.key);
  return out;
}

nlohmann::json to_json(const Settings& s) {
  Json out = Json::object();
  for (const auto& e : entries()) out[e.key] = e.get(s);
  return out;
}

}  // namespace attrdisam
