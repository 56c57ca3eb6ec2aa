#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace attrdisam {

inline constexpr std::size_t kNumColors = 10;
inline constexpr std::size_t kNumCells = 9;

enum class Concept { Color, Location };

std::string_view to_string(Concept c) noexcept;
std::size_t vocabulary_size(Concept c) noexcept;

/// Fixed color vocabulary; the index of a name is its column in the color
/// attribute matrix.
struct ColorVocab {
  static constexpr std::array<std::string_view, kNumColors> values{
      "red", "green", "blue", "yellow", "orange", "purple", "pink", "brown", "black", "white"};

  static std::optional<std::size_t> index_of(std::string_view name) noexcept;
};

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

/// 3x3 partition of the unit square, row-major from the top-left. y grows
/// downward as in image coordinates.
struct LocationGrid {
  static constexpr std::array<std::string_view, kNumCells> cells{
      "top-left",    "top-middle",    "top-right",
      "middle-left", "middle-middle", "middle-right",
      "bottom-left", "bottom-middle", "bottom-right"};

  static constexpr std::array<Point, kNumCells> cell_centers{{
      {1.0 / 6, 1.0 / 6}, {0.5, 1.0 / 6}, {5.0 / 6, 1.0 / 6},
      {1.0 / 6, 0.5},     {0.5, 0.5},     {5.0 / 6, 0.5},
      {1.0 / 6, 5.0 / 6}, {0.5, 5.0 / 6}, {5.0 / 6, 5.0 / 6},
  }};

  static std::optional<std::size_t> index_of(std::string_view name) noexcept;
};

std::string_view vocabulary_word(Concept c, std::size_t index);

struct Box {
  double x0 = 0.0;
  double y0 = 0.0;
  double x1 = 0.0;
  double y1 = 0.0;

  bool contains(Point p) const noexcept { return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1; }
  double area() const noexcept { return (x1 - x0) * (y1 - y0); }

  friend bool operator==(const Box&, const Box&) = default;
};

double intersection_over_union(const Box& a, const Box& b) noexcept;

using ColorDist = std::array<double, kNumColors>;

struct SceneObject {
  int id = 0;
  Point center;
  Box bbox;
  ColorDist color_dist{};
  std::string category;

  friend bool operator==(const SceneObject&, const SceneObject&) = default;
};

enum class AmbiguityClass { Unambiguous, CategoryOnly, NoPrior };

std::string_view to_string(AmbiguityClass c) noexcept;
AmbiguityClass ambiguity_from_string(std::string_view s);

struct Scene {
  std::vector<SceneObject> objects;
  int target_id = 0;
  std::string query;
  AmbiguityClass ambiguity = AmbiguityClass::NoPrior;

  std::size_t size() const noexcept { return objects.size(); }
  const SceneObject& target() const { return objects.at(static_cast<std::size_t>(target_id)); }

  friend bool operator==(const Scene&, const Scene&) = default;
};

/// Throws Error{Validation} when any scene or object invariant is violated.
void validate(const Scene& scene);

struct SceneGenConfig {
  int n_objects = 9;
  int n_categories = 3;
  int n_colors = 5;
  AmbiguityClass ambiguity = AmbiguityClass::CategoryOnly;
  double min_separation = 0.18;
  double multi_color_prob = 0.15;
  double relation_query_prob = 0.0;
  /// Share of unambiguous queries of the form "the cup on the top-left".
  double location_query_prob = 0.0;
  /// Assign pairwise distinct colors (needs n_objects <= palette size).
  bool distinct_colors = false;
  /// Explicit palettes; when empty they are drawn from the vocabularies.
  std::vector<std::string> colors;
  std::vector<std::string> categories;
};

inline constexpr int kPlacementAttempts = 10'000;

/// Deterministic in (config, seed). Throws Error{ConfigInfeasible} when the
/// objects cannot be placed with the requested separation.
Scene generate_scene(const SceneGenConfig& config, std::uint64_t seed);

const std::vector<std::string>& default_categories();

/// Euclidean distance from `center` to each cell center, in LocationGrid order.
std::array<double, kNumCells> grid_distances(Point center);
std::size_t nearest_cell(Point center);

nlohmann::json to_json(const Scene& scene);
Scene scene_from_json(const nlohmann::json& j);
Scene load_scene(const std::filesystem::path& path);
void save_scene(const Scene& scene, const std::filesystem::path& path);

}  // namespace attrdisam
