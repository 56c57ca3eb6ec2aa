#include "attrdisam/scene.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "attrdisam/error.hpp"
#include "attrdisam/rng.hpp"
#include "io.hpp"

namespace attrdisam {

std::string_view to_string(Concept c) noexcept {
  return c == Concept::Color ? "color" : "location";
}

std::size_t vocabulary_size(Concept c) noexcept {
  return c == Concept::Color ? kNumColors : kNumCells;
}

std::optional<std::size_t> ColorVocab::index_of(std::string_view name) noexcept {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] == name) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> LocationGrid::index_of(std::string_view name) noexcept {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (cells[i] == name) return i;
  }
  return std::nullopt;
}

std::string_view vocabulary_word(Concept c, std::size_t index) {
  if (index >= vocabulary_size(c)) {
    throw Error(ErrorKind::InvalidArgument, "vocabulary index out of range");
  }
  return c == Concept::Color ? ColorVocab::values[index] : LocationGrid::cells[index];
}

double intersection_over_union(const Box& a, const Box& b) noexcept {
  const double w = std::min(a.x1, b.x1) - std::max(a.x0, b.x0);
  const double h = std::min(a.y1, b.y1) - std::max(a.y0, b.y0);
  if (w <= 0.0 || h <= 0.0) return 0.0;
  const double inter = w * h;
  return inter / (a.area() + b.area() - inter);
}

std::string_view to_string(AmbiguityClass c) noexcept {
  switch (c) {
    case AmbiguityClass::Unambiguous: return "unambiguous";
    case AmbiguityClass::CategoryOnly: return "category_only";
    case AmbiguityClass::NoPrior: return "no_prior";
  }
  return "no_prior";
}

AmbiguityClass ambiguity_from_string(std::string_view s) {
  if (s == "unambiguous") return AmbiguityClass::Unambiguous;
  if (s == "category_only") return AmbiguityClass::CategoryOnly;
  if (s == "no_prior") return AmbiguityClass::NoPrior;
  throw Error(ErrorKind::Schema, "unknown ambiguity_class '" + std::string(s) + "'");
}

namespace {

bool in_unit_square(Point p) noexcept {
  return std::isfinite(p.x) && std::isfinite(p.y) && p.x >= 0.0 && p.x <= 1.0 && p.y >= 0.0 &&
         p.y <= 1.0;
}

void fail(const std::string& msg) { throw Error(ErrorKind::Validation, msg); }

}  // namespace

void validate(const Scene& scene) {
  const auto n = scene.objects.size();
  if (n == 0) fail("scene has no objects");
  if (scene.target_id < 0 || static_cast<std::size_t>(scene.target_id) >= n) {
    fail("target_id " + std::to_string(scene.target_id) + " out of range for " +
         std::to_string(n) + " objects");
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto& obj = scene.objects[i];
    const auto tag = "object " + std::to_string(i);
    if (obj.id != static_cast<int>(i)) fail(tag + ": ids must be contiguous 0..n-1");
    const Box& b = obj.bbox;
    if (!(in_unit_square({b.x0, b.y0}) && in_unit_square({b.x1, b.y1})) || b.x0 > b.x1 ||
        b.y0 > b.y1) {
      fail(tag + ": bbox outside the unit square");
    }
    if (!in_unit_square(obj.center) || !b.contains(obj.center)) fail(tag + ": center outside bbox");
    double sum = 0.0;
    for (double p : obj.color_dist) {
      if (!std::isfinite(p) || p < 0.0 || p > 1.0) fail(tag + ": color_dist entry outside [0,1]");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) fail(tag + ": color_dist does not sum to 1");
  }
}

std::array<double, kNumCells> grid_distances(Point center) {
  if (!in_unit_square(center)) {
    throw Error(ErrorKind::Domain, "center outside the unit square");
  }
  std::array<double, kNumCells> d{};
  for (std::size_t k = 0; k < kNumCells; ++k) {
    const Point c = LocationGrid::cell_centers[k];
    d[k] = std::hypot(center.x - c.x, center.y - c.y);
  }
  return d;
}

std::size_t nearest_cell(Point center) {
  const auto d = grid_distances(center);
  return static_cast<std::size_t>(std::min_element(d.begin(), d.end()) - d.begin());
}

const std::vector<std::string>& default_categories() {
  static const std::vector<std::string> cats{"cup",  "apple",  "can",    "bottle", "box",
                                             "bowl", "banana", "marker", "sponge", "toy"};
  return cats;
}

namespace {

template <class T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[uniform_index(rng, i)]);
  }
}

std::size_t primary_color(const ColorDist& d) {
  return static_cast<std::size_t>(std::max_element(d.begin(), d.end()) - d.begin());
}

void check_config(const SceneGenConfig& c) {
  auto bad = [](const std::string& m) { throw Error(ErrorKind::Config, "scene config: " + m); };
  if (c.n_objects < 1) bad("n_objects must be >= 1");
  if (c.colors.empty() && (c.n_colors < 1 || c.n_colors > static_cast<int>(kNumColors))) {
    bad("n_colors must be in [1,10]");
  }
  if (c.categories.empty() &&
      (c.n_categories < 1 || c.n_categories > static_cast<int>(default_categories().size()))) {
    bad("n_categories must be in [1," + std::to_string(default_categories().size()) + "]");
  }
  if (!(c.min_separation >= 0.0)) bad("min_separation must be >= 0");
  for (double p : {c.multi_color_prob, c.relation_query_prob, c.location_query_prob}) {
    if (!(p >= 0.0 && p <= 1.0)) bad("probabilities must be in [0,1]");
  }
  for (const auto& name : c.colors) {
    if (!ColorVocab::index_of(name)) bad("unknown color '" + name + "'");
  }
}

std::vector<Point> place_centers(int n, double separation, double half, Rng& rng) {
  const double lo = half;
  const double hi = 1.0 - half;
  if (lo > hi) {
    throw Error(ErrorKind::ConfigInfeasible, "objects do not fit inside the unit square");
  }
  std::vector<Point> centers;
  centers.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    bool placed = false;
    for (int attempt = 0; attempt < kPlacementAttempts && !placed; ++attempt) {
      const Point p{lo + (hi - lo) * uniform01(rng), lo + (hi - lo) * uniform01(rng)};
      placed = std::all_of(centers.begin(), centers.end(), [&](Point q) {
        return std::hypot(p.x - q.x, p.y - q.y) >= separation;
      });
      if (placed) centers.push_back(p);
    }
    if (!placed) {
      throw Error(ErrorKind::ConfigInfeasible,
                  "could not place object " + std::to_string(i) + " of " + std::to_string(n) +
                      " with separation " + std::to_string(separation) + " after " +
                      std::to_string(kPlacementAttempts) + " attempts");
    }
  }
  return centers;
}

std::string relation_phrase(const SceneObject& target, const SceneObject& anchor) {
  const double dx = target.center.x - anchor.center.x;
  const double dy = target.center.y - anchor.center.y;
  if (std::abs(dy) > std::abs(dx) && dy < 0.0) return "behind";
  return dx < 0.0 ? "left of" : "right of";
}

}  // namespace

Scene generate_scene(const SceneGenConfig& config, std::uint64_t seed) {
  check_config(config);
  Rng rng = make_rng(seed, Stream::Scene);
  const auto n = static_cast<std::size_t>(config.n_objects);

  std::vector<std::size_t> palette;
  if (!config.colors.empty()) {
    for (const auto& c : config.colors) palette.push_back(*ColorVocab::index_of(c));
  } else {
    std::vector<std::size_t> all(kNumColors);
    std::iota(all.begin(), all.end(), 0);
    shuffle(all, rng);
    palette.assign(all.begin(), all.begin() + config.n_colors);
  }
  std::vector<std::string> cats = config.categories;
  if (cats.empty()) {
    auto all = default_categories();
    shuffle(all, rng);
    cats.assign(all.begin(), all.begin() + config.n_categories);
  }
  if (config.distinct_colors && n > palette.size()) {
    throw Error(ErrorKind::ConfigInfeasible, "distinct_colors needs n_objects <= palette size");
  }

  const double half = config.min_separation / (2.0 * std::sqrt(2.0));
  const auto centers = place_centers(config.n_objects, config.min_separation, half, rng);

  std::vector<std::size_t> color_order(palette.size());
  std::iota(color_order.begin(), color_order.end(), 0);
  if (config.distinct_colors) shuffle(color_order, rng);

  Scene scene;
  scene.ambiguity = config.ambiguity;
  scene.objects.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& obj = scene.objects[i];
    obj.id = static_cast<int>(i);
    obj.center = centers[i];
    obj.bbox = {centers[i].x - half, centers[i].y - half, centers[i].x + half, centers[i].y + half};
    obj.category = cats[uniform_index(rng, cats.size())];
    const std::size_t pi = config.distinct_colors ? color_order[i]
                                                  : uniform_index(rng, palette.size());
    obj.color_dist.fill(0.0);
    obj.color_dist[palette[pi]] = 1.0;
    if (palette.size() > 1 && uniform01(rng) < config.multi_color_prob) {
      std::size_t second = uniform_index(rng, palette.size() - 1);
      if (second >= pi) ++second;
      const double w = 0.2 + 0.25 * uniform01(rng);
      obj.color_dist[palette[pi]] = 1.0 - w;
      obj.color_dist[palette[second]] = w;
    }
  }
  scene.target_id = static_cast<int>(uniform_index(rng, n));
  const SceneObject& target = scene.objects[static_cast<std::size_t>(scene.target_id)];

  switch (config.ambiguity) {
    case AmbiguityClass::NoPrior:
      scene.query = "";
      break;
    case AmbiguityClass::CategoryOnly:
      scene.query = "the " + target.category;
      break;
    case AmbiguityClass::Unambiguous: {
      if (n > 1 && uniform01(rng) < config.relation_query_prob) {
        std::size_t anchor = uniform_index(rng, n - 1);
        if (anchor >= static_cast<std::size_t>(scene.target_id)) ++anchor;
        scene.query = "the " + target.category + " " +
                      relation_phrase(target, scene.objects[anchor]) + " the " +
                      scene.objects[anchor].category;
        break;
      }
      if (config.location_query_prob > 0.0 && cats.size() > 1 &&
          uniform01(rng) < config.location_query_prob) {
        const std::size_t cell = nearest_cell(target.center);
        const auto tpos = static_cast<std::size_t>(
            std::find(cats.begin(), cats.end(), target.category) - cats.begin());
        for (auto& obj : scene.objects) {
          if (obj.id == scene.target_id || obj.category != target.category ||
              nearest_cell(obj.center) != cell) {
            continue;
          }
          std::size_t k = uniform_index(rng, cats.size() - 1);
          if (k >= tpos) ++k;
          obj.category = cats[k];
        }
        scene.query = "the " + target.category + " on the " + std::string(LocationGrid::cells[cell]);
        break;
      }
      // Make the (primary color, category) pair unique to the target.
      const std::size_t tcolor = primary_color(target.color_dist);
      for (auto& obj : scene.objects) {
        if (obj.id == scene.target_id || obj.category != target.category ||
            primary_color(obj.color_dist) != tcolor) {
          continue;
        }
        if (palette.size() > 1 && !config.distinct_colors) {
          std::size_t k = uniform_index(rng, palette.size() - 1);
          const auto tpos = static_cast<std::size_t>(
              std::find(palette.begin(), palette.end(), tcolor) - palette.begin());
          if (k >= tpos) ++k;
          obj.color_dist.fill(0.0);
          obj.color_dist[palette[k]] = 1.0;
        } else if (cats.size() > 1) {
          std::size_t k = uniform_index(rng, cats.size() - 1);
          const auto tpos = static_cast<std::size_t>(
              std::find(cats.begin(), cats.end(), target.category) - cats.begin());
          if (k >= tpos) ++k;
          obj.category = cats[k];
        } else {
          throw Error(ErrorKind::ConfigInfeasible,
                      "cannot make the target unique with one color and one category");
        }
      }
      scene.query = "the " + std::string(ColorVocab::values[tcolor]) + " " + target.category;
      break;
    }
  }
  validate(scene);
  return scene;
}

nlohmann::json to_json(const Scene& scene) {
  nlohmann::json objects = nlohmann::json::array();
  for (const auto& o : scene.objects) {
    objects.push_back({{"id", o.id},
                       {"center", {o.center.x, o.center.y}},
                       {"bbox", {o.bbox.x0, o.bbox.y0, o.bbox.x1, o.bbox.y1}},
                       {"color_dist", o.color_dist},
                       {"category", o.category}});
  }
  return {{"objects", std::move(objects)},
          {"target_id", scene.target_id},
          {"query", scene.query},
          {"ambiguity_class", to_string(scene.ambiguity)}};
}

namespace {

template <std::size_t N>
std::array<double, N> fixed_array(const nlohmann::json& j, std::string_view field) {
  if (!j.is_array() || j.size() != N) {
    throw Error(ErrorKind::Schema, std::string(field) + " must be an array of " +
                                       std::to_string(N) + " numbers");
  }
  std::array<double, N> out{};
  for (std::size_t i = 0; i < N; ++i) out[i] = j.at(i).get<double>();
  return out;
}

}  // namespace

Scene scene_from_json(const nlohmann::json& j) {
  Scene scene = detail::with_schema_errors("scene", [&] {
    Scene s;
    for (const auto& jo : j.at("objects")) {
      SceneObject o;
      o.id = jo.at("id").get<int>();
      const auto c = fixed_array<2>(jo.at("center"), "center");
      o.center = {c[0], c[1]};
      const auto b = fixed_array<4>(jo.at("bbox"), "bbox");
      o.bbox = {b[0], b[1], b[2], b[3]};
      o.color_dist = fixed_array<kNumColors>(jo.at("color_dist"), "color_dist");
      o.category = jo.at("category").get<std::string>();
      s.objects.push_back(std::move(o));
    }
    s.target_id = j.at("target_id").get<int>();
    s.query = j.at("query").get<std::string>();
    s.ambiguity = ambiguity_from_string(j.at("ambiguity_class").get<std::string>());
    return s;
  });
  validate(scene);
  return scene;
}

Scene load_scene(const std::filesystem::path& path) {
  return scene_from_json(detail::parse_json(detail::read_text_file(path), path.string()));
}

void save_scene(const Scene& scene, const std::filesystem::path& path) {
  detail::write_text_file(path, to_json(scene).dump(2) + "\n");
}

}  // namespace attrdisam
