#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "attrdisam/pomdp.hpp"
#include "attrdisam/rng.hpp"
#include "attrdisam/scene.hpp"

namespace attrdisam {

enum class ColorResponseMode { SampleTrueDist, ArgmaxTrueDist };
enum class LocationResponseMode { NearestCell, SampleSoftmax };

struct UserModel {
  double truthfulness = 0.99;
  ColorResponseMode color_mode = ColorResponseMode::SampleTrueDist;
  LocationResponseMode location_mode = LocationResponseMode::NearestCell;
  /// Only used by LocationResponseMode::SampleSoftmax.
  double location_lambda = 5.0;
  std::vector<std::string> positive_words{"yes", "yeah", "yep", "correct", "right", "sure"};
  std::vector<std::string> negative_words{"no", "nope", "wrong", "not"};

  void validate() const;
};

/// Simulated answer of a user who knows the scene's target.
Observation respond(const Scene& scene, const Action& a, const UserModel& user, Rng& rng);
Observation respond(const Scene& scene, const Action& a, const UserModel& user, std::uint64_t seed);

/// Keyword parse of a free-text answer to `expected`. nullopt means the text
/// held no usable keyword. The result is always compatible with `expected`.
std::optional<Observation> parse_response(std::string_view text, const Action& expected,
                                          const UserModel& user);

/// First attribute word of `attribute` in `text`, including two-word cell
/// names ("top left") and single side words ("left").
std::optional<Observation> parse_attribute(std::string_view text, Concept attribute);

}  // namespace attrdisam
