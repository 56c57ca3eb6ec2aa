#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "attrdisam/scene.hpp"

namespace attrdisam {

/// Row-stochastic n x m matrix: row i is object i's distribution over the
/// values of one attribute (m = 10 for color, 9 for location).
class AttributeMatrix {
 public:
  AttributeMatrix() = default;
  AttributeMatrix(Concept attribute, std::size_t rows);

  Concept attribute() const noexcept { return concept_; }
  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return vocabulary_size(concept_); }

  double at(std::size_t object, std::size_t value) const { return data_[object * cols() + value]; }
  std::span<const double> row(std::size_t object) const {
    return {data_.data() + object * cols(), cols()};
  }
  std::span<double> row(std::size_t object) { return {data_.data() + object * cols(), cols()}; }

  friend bool operator==(const AttributeMatrix&, const AttributeMatrix&) = default;

 private:
  Concept concept_ = Concept::Color;
  std::size_t rows_ = 0;
  std::vector<double> data_;
};

struct GroundingResult {
  std::vector<int> object_ids;
  std::vector<double> scores;
  AttributeMatrix color_matrix{Concept::Color, 0};
  AttributeMatrix loc_matrix{Concept::Location, 0};

  std::size_t size() const noexcept { return scores.size(); }
  const AttributeMatrix& matrix(Concept c) const noexcept {
    return c == Concept::Color ? color_matrix : loc_matrix;
  }

  friend bool operator==(const GroundingResult&, const GroundingResult&) = default;
};

/// Checks arity, finiteness and that every matrix row is on the simplex to 1e-9.
void validate(const GroundingResult& g);

struct ColorStateVector {
  ColorDist values{};
  /// Set when the input carried no mass and the uniform fallback was used.
  bool degenerate = false;
};

/// Normalizes predicted color probabilities onto the simplex (L1).
ColorStateVector color_state_vector(std::span<const double, kNumColors> raw);

/// softmax(-lambda * grid_distances(center)).
std::array<double, kNumCells> location_state_vector(Point center, double lambda);

struct ScoreWeights {
  double subject = 0.5;
  double location = 0.3;
  double relation = 0.2;
};

struct NoiseConfig {
  /// Standard deviation of the additive Gaussian score noise.
  double score_sigma = 0.15;
  /// Dirichlet concentration for the color rows; <= 0 disables perturbation.
  double dirichlet_kappa = 50.0;
  /// Standard deviation of the Gaussian jitter on object centers.
  double location_sigma = 0.02;
  double lambda = 5.0;
  /// Score every object receives for a query that names nothing.
  double neutral_score = 0.5;
  ScoreWeights weights;

  /// Same scale parameters with all perturbations switched off.
  NoiseConfig without_noise() const {
    NoiseConfig c = *this;
    c.score_sigma = 0.0;
    c.dirichlet_kappa = 0.0;
    c.location_sigma = 0.0;
    return c;
  }
};

/// What the surrogate grounder understands of a query string.
struct QueryParse {
  enum class Relation { LeftOf, RightOf, Behind };

  std::optional<std::size_t> color;
  std::optional<std::string> category;
  std::optional<std::size_t> cell;
  std::optional<Relation> relation;
  std::optional<std::string> anchor_category;

  bool empty() const noexcept { return !color && !category && !cell && !relation; }
};

QueryParse parse_query(std::string_view query, std::span<const std::string> categories);

/// Noisy stand-in for a learned grounding model; deterministic given seed.
GroundingResult simulate_grounding(const Scene& scene, const NoiseConfig& noise, std::uint64_t seed);

nlohmann::json to_json(const GroundingResult& g);
/// Rows within 1e-6 of stochastic are renormalized; others are rejected.
GroundingResult grounding_from_json(const nlohmann::json& j);
GroundingResult load_grounding(const std::filesystem::path& path);
void save_grounding(const GroundingResult& g, const std::filesystem::path& path);

}  // namespace attrdisam
