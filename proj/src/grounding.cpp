#include "attrdisam/grounding.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "attrdisam/error.hpp"
#include "attrdisam/rng.hpp"
#include "io.hpp"
#include "text.hpp"

namespace attrdisam {

AttributeMatrix::AttributeMatrix(Concept attribute, std::size_t rows)
    : concept_(attribute), rows_(rows), data_(rows * vocabulary_size(attribute), 0.0) {}

void validate(const GroundingResult& g) {
  auto fail = [](const std::string& m) { throw Error(ErrorKind::Validation, "grounding: " + m); };
  const std::size_t n = g.scores.size();
  if (n == 0) fail("no objects");
  if (g.object_ids.size() != n) fail("object_ids and scores differ in length");
  if (std::set<int>(g.object_ids.begin(), g.object_ids.end()).size() != n) {
    fail("object_ids are not unique");
  }
  for (double s : g.scores) {
    if (!std::isfinite(s)) fail("non-finite score");
  }
  for (const AttributeMatrix* m : {&g.color_matrix, &g.loc_matrix}) {
    if (m->rows() != n) fail(std::string(to_string(m->attribute())) + " matrix row count != n");
    for (std::size_t i = 0; i < n; ++i) {
      double sum = 0.0;
      for (double v : m->row(i)) {
        if (!std::isfinite(v) || v < 0.0) fail("negative or non-finite matrix entry");
        sum += v;
      }
      if (std::abs(sum - 1.0) > 1e-9) fail("matrix row " + std::to_string(i) + " is not stochastic");
    }
  }
}

ColorStateVector color_state_vector(std::span<const double, kNumColors> raw) {
  ColorStateVector out;
  double norm = 0.0;
  for (double v : raw) {
    if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
      throw Error(ErrorKind::Domain, "color probabilities must lie in [0,1]");
    }
    norm += v;
  }
  if (std::all_of(raw.begin(), raw.end(), [](double v) { return v <= 1e-12; })) {
    out.values.fill(1.0 / kNumColors);
    out.degenerate = true;
    return out;
  }
  for (std::size_t k = 0; k < kNumColors; ++k) out.values[k] = raw[k] / norm;
  return out;
}

std::array<double, kNumCells> location_state_vector(Point center, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw Error(ErrorKind::Domain, "lambda must be a positive finite number");
  }
  const auto d = grid_distances(center);
  const double dmin = *std::min_element(d.begin(), d.end());
  std::array<double, kNumCells> p{};
  double z = 0.0;
  for (std::size_t k = 0; k < kNumCells; ++k) {
    p[k] = std::exp(-lambda * (d[k] - dmin));
    z += p[k];
  }
  for (double& v : p) v /= z;
  return p;
}

QueryParse parse_query(std::string_view query, std::span<const std::string> categories) {
  const auto tokens = detail::tokenize(query);
  QueryParse q;
  auto category_at = [&](std::size_t i) -> std::optional<std::string> {
    for (const auto& c : categories) {
      const auto ct = detail::tokenize(c);
      if (ct.empty() || i + ct.size() > tokens.size()) continue;
      if (std::equal(ct.begin(), ct.end(), tokens.begin() + static_cast<std::ptrdiff_t>(i))) {
        return c;
      }
    }
    return std::nullopt;
  };

  std::size_t rel_at = tokens.size();
  std::size_t rel_len = 0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const bool of_next = i + 1 < tokens.size() && tokens[i + 1] == "of";
    if (tokens[i] == "left" && of_next) {
      q.relation = QueryParse::Relation::LeftOf;
    } else if (tokens[i] == "right" && of_next) {
      q.relation = QueryParse::Relation::RightOf;
    } else if (tokens[i] == "behind") {
      q.relation = QueryParse::Relation::Behind;
    } else {
      continue;
    }
    rel_at = i;
    rel_len = tokens[i] == "behind" ? 1 : 2;
    break;
  }

  for (std::size_t i = 0; i < rel_at; ++i) {
    if (!q.color) {
      if (auto c = ColorVocab::index_of(tokens[i])) {
        q.color = *c;
        continue;
      }
    }
    if (!q.cell) {
      if (auto m = detail::match_cell(tokens, i, false); m && i + m->consumed <= rel_at) {
        q.cell = m->cell;
        i += m->consumed - 1;
        continue;
      }
    }
    if (!q.category) q.category = category_at(i);
  }
  if (q.relation) {
    for (std::size_t i = rel_at + rel_len; i < tokens.size() && !q.anchor_category; ++i) {
      q.anchor_category = category_at(i);
    }
    if (!q.anchor_category) q.relation.reset();
  }
  return q;
}

namespace {

std::size_t primary_color(const ColorDist& d) {
  return static_cast<std::size_t>(std::max_element(d.begin(), d.end()) - d.begin());
}

bool relation_holds(QueryParse::Relation r, const SceneObject& obj, const SceneObject& anchor) {
  switch (r) {
    case QueryParse::Relation::LeftOf: return obj.center.x < anchor.center.x;
    case QueryParse::Relation::RightOf: return obj.center.x > anchor.center.x;
    case QueryParse::Relation::Behind: return obj.center.y < anchor.center.y;
  }
  return false;
}

double agreement(bool match) { return match ? 1.0 : -1.0; }

double surrogate_score(const Scene& scene, const SceneObject& obj, const QueryParse& q,
                       const NoiseConfig& noise) {
  if (q.empty()) return noise.neutral_score;
  double s = 0.0;
  if (q.color || q.category) {
    const bool cat_ok = !q.category || obj.category == *q.category;
    const bool color_ok = !q.color || primary_color(obj.color_dist) == *q.color;
    s += noise.weights.subject * agreement(cat_ok && color_ok);
  }
  if (q.cell) s += noise.weights.location * agreement(nearest_cell(obj.center) == *q.cell);
  if (q.relation) {
    const bool ok = std::any_of(scene.objects.begin(), scene.objects.end(), [&](const auto& a) {
      return a.id != obj.id && a.category == *q.anchor_category &&
             relation_holds(*q.relation, obj, a);
    });
    s += noise.weights.relation * agreement(ok);
  }
  return s;
}

ColorDist dirichlet_perturb(const ColorDist& truth, double kappa, Rng& rng) {
  if (kappa <= 0.0) return truth;
  ColorDist out{};
  double sum = 0.0;
  for (std::size_t k = 0; k < kNumColors; ++k) {
    if (truth[k] <= 0.0) continue;
    std::gamma_distribution<double> gamma(kappa * truth[k], 1.0);
    out[k] = gamma(rng);
    sum += out[k];
  }
  if (!(sum > 0.0)) return truth;
  for (double& v : out) v /= sum;
  return out;
}

}  // namespace

GroundingResult simulate_grounding(const Scene& scene, const NoiseConfig& noise, std::uint64_t seed) {
  validate(scene);
  const std::size_t n = scene.size();
  Rng rng = make_rng(seed, Stream::Grounding);
  std::normal_distribution<double> gauss(0.0, 1.0);

  std::vector<std::string> categories;
  for (const auto& o : scene.objects) {
    if (std::find(categories.begin(), categories.end(), o.category) == categories.end()) {
      categories.push_back(o.category);
    }
  }
  const QueryParse q = parse_query(scene.query, categories);

  GroundingResult g;
  g.object_ids.resize(n);
  g.scores.resize(n);
  g.color_matrix = AttributeMatrix(Concept::Color, n);
  g.loc_matrix = AttributeMatrix(Concept::Location, n);
  for (std::size_t i = 0; i < n; ++i) {
    const SceneObject& obj = scene.objects[i];
    g.object_ids[i] = obj.id;

    double s = surrogate_score(scene, obj, q, noise);
    // An empty query carries no evidence, so every object keeps the same score.
    if (noise.score_sigma > 0.0 && !q.empty()) s += noise.score_sigma * gauss(rng);
    g.scores[i] = std::clamp(s, -1.0, 1.0);

    const ColorDist raw = dirichlet_perturb(obj.color_dist, noise.dirichlet_kappa, rng);
    const auto color = color_state_vector(raw);
    std::copy(color.values.begin(), color.values.end(), g.color_matrix.row(i).begin());

    Point c = obj.center;
    if (noise.location_sigma > 0.0) {
      c.x = std::clamp(c.x + noise.location_sigma * gauss(rng), 0.0, 1.0);
      c.y = std::clamp(c.y + noise.location_sigma * gauss(rng), 0.0, 1.0);
    }
    const auto loc = location_state_vector(c, noise.lambda);
    std::copy(loc.begin(), loc.end(), g.loc_matrix.row(i).begin());
  }
  return g;
}

nlohmann::json to_json(const GroundingResult& g) {
  auto rows = [](const AttributeMatrix& m) {
    nlohmann::json out = nlohmann::json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
      const auto r = m.row(i);
      out.push_back(std::vector<double>(r.begin(), r.end()));
    }
    return out;
  };
  return {{"object_ids", g.object_ids},
          {"scores", g.scores},
          {"color_matrix", rows(g.color_matrix)},
          {"loc_matrix", rows(g.loc_matrix)}};
}

namespace {

AttributeMatrix matrix_from_json(const nlohmann::json& j, Concept attribute) {
  const std::string name = attribute == Concept::Color ? "color_matrix" : "loc_matrix";
  if (!j.is_array()) throw Error(ErrorKind::Schema, name + " must be an array of rows");
  AttributeMatrix m(attribute, j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& row = j[i];
    if (!row.is_array() || row.size() != m.cols()) {
      throw Error(ErrorKind::Schema,
                  name + " row " + std::to_string(i) + " must have " + std::to_string(m.cols()) +
                      " entries");
    }
    auto out = m.row(i);
    double sum = 0.0;
    for (std::size_t k = 0; k < m.cols(); ++k) {
      out[k] = row[k].get<double>();
      if (!std::isfinite(out[k]) || out[k] < 0.0) {
        throw Error(ErrorKind::Validation, name + " has a negative or non-finite entry");
      }
      sum += out[k];
    }
    if (std::abs(sum - 1.0) > 1e-6) {
      throw Error(ErrorKind::Validation, name + " row " + std::to_string(i) + " sums to " +
                                             std::to_string(sum));
    }
    // Rows already stochastic to rounding error are kept bit-exact.
    if (std::abs(sum - 1.0) > 1e-12) {
      for (double& v : out) v /= sum;
    }
  }
  return m;
}

}  // namespace

GroundingResult grounding_from_json(const nlohmann::json& j) {
  GroundingResult g = detail::with_schema_errors("grounding", [&] {
    GroundingResult r;
    r.object_ids = j.at("object_ids").get<std::vector<int>>();
    r.scores = j.at("scores").get<std::vector<double>>();
    r.color_matrix = matrix_from_json(j.at("color_matrix"), Concept::Color);
    r.loc_matrix = matrix_from_json(j.at("loc_matrix"), Concept::Location);
    return r;
  });
  validate(g);
  return g;
}

GroundingResult load_grounding(const std::filesystem::path& path) {
  return grounding_from_json(detail::parse_json(detail::read_text_file(path), path.string()));
}

void save_grounding(const GroundingResult& g, const std::filesystem::path& path) {
  detail::write_text_file(path, to_json(g).dump(2) + "\n");
}

}  // namespace attrdisam
