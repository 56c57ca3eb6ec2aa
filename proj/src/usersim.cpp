#include "attrdisam/usersim.hpp"

#include <algorithm>

#include "attrdisam/error.hpp"
#include "attrdisam/grounding.hpp"
#include "text.hpp"

namespace attrdisam {

void UserModel::validate() const {
  if (!(truthfulness > 0.5 && truthfulness <= 1.0)) {
    throw Error(ErrorKind::Config, "user truthfulness must be in (0.5,1]");
  }
  if (!(location_lambda > 0.0)) throw Error(ErrorKind::Config, "user location_lambda must be > 0");
  for (const auto& w : positive_words) {
    if (std::find(negative_words.begin(), negative_words.end(), w) != negative_words.end()) {
      throw Error(ErrorKind::Config, "word '" + w + "' is both positive and negative");
    }
  }
}

namespace {

template <std::size_t N>
std::size_t sample_index(const std::array<double, N>& p, Rng& rng) {
  double u = uniform01(rng);
  std::size_t last = 0;
  for (std::size_t k = 0; k < N; ++k) {
    if (p[k] <= 0.0) continue;
    last = k;
    if (u < p[k]) return k;
    u -= p[k];
  }
  return last;
}

template <std::size_t N>
std::size_t argmax_index(const std::array<double, N>& p) {
  return static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin());
}

bool flip(bool truth, double truthfulness, Rng& rng) {
  return uniform01(rng) < truthfulness ? truth : !truth;
}

}  // namespace

Observation respond(const Scene& scene, const Action& a, const UserModel& user, Rng& rng) {
  const SceneObject& target = scene.target();
  switch (a.kind) {
    case ActionKind::AskAttr: {
      if (a.attribute == Concept::Color) {
        const auto v = user.color_mode == ColorResponseMode::SampleTrueDist
                           ? sample_index(target.color_dist, rng)
                           : argmax_index(target.color_dist);
        return Observation::attr_word(Concept::Color, static_cast<int>(v));
      }
      const auto v = user.location_mode == LocationResponseMode::NearestCell
                         ? nearest_cell(target.center)
                         : sample_index(location_state_vector(target.center, user.location_lambda),
                                        rng);
      return Observation::attr_word(Concept::Location, static_cast<int>(v));
    }
    case ActionKind::AskPoint:
      return Observation::polar(flip(a.object == scene.target_id, user.truthfulness, rng));
    case ActionKind::AskObjAttr: {
      bool holds;
      if (a.attribute == Concept::Color) {
        holds = uniform01(rng) < target.color_dist[static_cast<std::size_t>(a.value)];
      } else {
        holds = nearest_cell(target.center) == static_cast<std::size_t>(a.value);
      }
      return Observation::polar(flip(holds, user.truthfulness, rng));
    }
    case ActionKind::Grasp: break;
  }
  throw Error(ErrorKind::InvalidArgument, "respond() needs a question, got " + describe(a));
}

Observation respond(const Scene& scene, const Action& a, const UserModel& user, std::uint64_t seed) {
  Rng rng = make_rng(seed, Stream::User);
  return respond(scene, a, user, rng);
}

std::optional<Observation> parse_attribute(std::string_view text, Concept attribute) {
  const auto tokens = detail::tokenize(text);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (attribute == Concept::Color) {
      if (auto c = ColorVocab::index_of(tokens[i])) {
        return Observation::attr_word(Concept::Color, static_cast<int>(*c));
      }
    } else if (auto m = detail::match_cell(tokens, i, true)) {
      return Observation::attr_word(Concept::Location, static_cast<int>(m->cell));
    }
  }
  return std::nullopt;
}

std::optional<Observation> parse_response(std::string_view text, const Action& expected,
                                          const UserModel& user) {
  switch (expected.kind) {
    case ActionKind::AskAttr:
      return parse_attribute(text, expected.attribute);
    case ActionKind::AskPoint:
    case ActionKind::AskObjAttr: {
      auto has = [](const std::vector<std::string>& words, const std::string& t) {
        return std::find(words.begin(), words.end(), t) != words.end();
      };
      for (const auto& t : detail::tokenize(text)) {
        if (has(user.positive_words, t)) return Observation::polar(true);
        if (has(user.negative_words, t)) return Observation::polar(false);
      }
      return std::nullopt;
    }
    case ActionKind::Grasp: break;
  }
  return std::nullopt;
}

}  // namespace attrdisam
