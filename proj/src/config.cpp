#include "relmix/config.hpp"

#include <fstream>
#include <sstream>

#include "relmix/rng.hpp"

namespace relmix {

namespace {

[[noreturn]] void fail_at(const std::string& path, const std::string& what) {
  throw InputError("at " + path + ": " + what);
}

const Json& field(const Json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) fail_at(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail_at(path, "missing field '" + key + "'");
  return *it;
}

std::string kind_of(const Json& j, const std::string& path) {
  const Json& k = field(j, "kind", path);
  if (!k.is_string()) fail_at(path + "/kind", "expected a string");
  return k.get<std::string>();
}

Index index_from_json(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) fail_at(path, "expected an integer");
  return j.get<Index>();
}

std::vector<Index> index_list(const Json& j, const std::string& path) {
  if (!j.is_array()) fail_at(path, "expected an array");
  std::vector<Index> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(index_from_json(j[i], path + "/" + std::to_string(i)));
  return out;
}

std::vector<Matrix> matrix_list(const Json& j, Index d, const std::string& path) {
  if (!j.is_array()) fail_at(path, "expected an array of matrices");
  std::vector<Matrix> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string p = path + "/" + std::to_string(i);
    Matrix m = matrix_from_json(j[i], p);
    if (m.rows() != d || m.cols() != d) fail_at(p, "expected a " + std::to_string(d) + "x" + std::to_string(d) + " matrix");
    out.push_back(std::move(m));
  }
  return out;
}

struct AlgebraInfo {
  MatrixStarAlgebra algebra;
  std::vector<Index> block_sizes;  // empty unless block diagonal
};

AlgebraInfo parse_algebra(const Json& j, Index d, const std::string& path) {
  const std::string kind = kind_of(j, path);
  AlgebraInfo info;
  if (kind == "full") {
    info.algebra = full_algebra(d);
    info.block_sizes = {d};
  } else if (kind == "block_diagonal") {
    info.block_sizes = index_list(field(j, "sizes", path), path + "/sizes");
    Index total = 0;
    for (Index s : info.block_sizes) {
      if (s <= 0) fail_at(path + "/sizes", "block sizes must be positive");
      total += s;
    }
    if (total != d) fail_at(path + "/sizes", "block sizes sum to " + std::to_string(total) + ", not " + std::to_string(d));
    info.algebra = block_diagonal_algebra(info.block_sizes);
  } else if (kind == "generated") {
    info.algebra = generate_algebra(matrix_list(field(j, "matrices", path), d, path + "/matrices"), d);
  } else {
    fail_at(path + "/kind", "unknown algebra kind '" + kind + "'");
  }
  return info;
}

AutomorphismSpec parse_automorphism(const Json& j, const AlgebraInfo& info, Index d, const std::string& path) {
  const std::string kind = kind_of(j, path);
  try {
    if (kind == "identity") return identity_automorphism(info.algebra);
    if (kind == "inner") {
      return inner_automorphism(info.algebra, matrix_from_json(field(j, "unitary", path), path + "/unitary"));
    }
    if (kind == "block_permutation") {
      if (info.block_sizes.empty()) fail_at(path, "block_permutation needs a full or block_diagonal algebra");
      return block_permutation_automorphism(info.algebra, info.block_sizes,
                                            index_list(field(j, "perm", path), path + "/perm"));
    }
    if (kind == "compose") {
      const Json& list = field(j, "list", path);
      if (!list.is_array() || list.empty()) fail_at(path + "/list", "expected a non-empty array");
      std::vector<AutomorphismSpec> parts;
      for (std::size_t i = 0; i < list.size(); ++i) {
        parts.push_back(parse_automorphism(list[i], info, d, path + "/list/" + std::to_string(i)));
      }
      return compose(info.algebra, parts);
    }
  } catch (const InputError& e) {
    const std::string msg = e.what();
    if (msg.rfind("at ", 0) == 0) throw;
    fail_at(path, msg);
  }
  fail_at(path + "/kind", "unknown automorphism kind '" + kind + "'");
}

}  // namespace

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(Json::array({m(i, j).real(), m(i, j).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const Json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) fail_at(path, "expected a non-empty array of rows");
  const std::size_t n = j.size();
  std::size_t cols = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::string rp = path + "/" + std::to_string(i);
    if (!j[i].is_array()) fail_at(rp, "expected a row array");
    if (i == 0) cols = j[i].size();
    if (j[i].size() != cols || cols == 0) fail_at(rp, "rows have different lengths");
  }
  Matrix m(static_cast<Index>(n), static_cast<Index>(cols));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < cols; ++k) {
      const Json& e = j[i][k];
      const std::string ep = path + "/" + std::to_string(i) + "/" + std::to_string(k);
      Complex z;
      if (e.is_number()) {
        z = e.get<double>();
      } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
        z = Complex(e[0].get<double>(), e[1].get<double>());
      } else {
        fail_at(ep, "expected a number or [re, im]");
      }
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) fail_at(ep, "non-finite entry");
      m(static_cast<Index>(i), static_cast<Index>(k)) = z;
    }
  }
  return m;
}

SystemConfig parse_config(const Json& doc) {
  SystemConfig cfg;
  cfg.document = doc;
  if (!doc.is_object()) fail_at("/", "expected an object");
  if (doc.contains("schema_version")) {
    const Json& v = doc["schema_version"];
    if (!v.is_number_integer() || v.get<int>() != kSchemaVersion) {
      fail_at("/schema_version", "unsupported schema version (expected " + std::to_string(kSchemaVersion) + ")");
    }
  }
  cfg.name = doc.contains("name") && doc["name"].is_string() ? doc["name"].get<std::string>() : "unnamed";
  const Index d = index_from_json(field(doc, "ambient_dim", "/"), "/ambient_dim");
  if (d <= 0 || d > 8) fail_at("/ambient_dim", "must be between 1 and 8");

  const AlgebraInfo info = parse_algebra(field(doc, "algebra", "/"), d, "/algebra");
  const double cd = closure_defect(info.algebra);
  if (cd > 1e-8) fail_at("/algebra", "not closed under products and adjoints");

  StateSpec state;
  {
    const Json& s = field(doc, "state", "/");
    const std::string kind = kind_of(s, "/state");
    Matrix density;
    if (kind == "normalized_trace") {
      density = Matrix::Identity(d, d) / static_cast<double>(d);
    } else if (kind == "density") {
      density = matrix_from_json(field(s, "matrix", "/state"), "/state/matrix");
    } else {
      fail_at("/state/kind", "unknown state kind '" + kind + "'");
    }
    try {
      state = validate_state(info.algebra, density);
    } catch (const ValidationError& e) {
      throw ValidationError(std::string("at /state: ") + e.what());
    } catch (const InputError& e) {
      throw InputError(std::string("at /state: ") + e.what());
    }
  }

  AutomorphismSpec alpha = parse_automorphism(field(doc, "automorphism", "/"), info, d, "/automorphism");
  try {
    alpha = validate_automorphism(info.algebra, alpha, state);
  } catch (const ValidationError& e) {
    throw ValidationError(std::string("at /automorphism: ") + e.what());
  }
  cfg.system = SystemSpec{info.algebra, state, alpha};

  const Json& sub = field(doc, "subsystem", "/");
  cfg.subsystem_kind = kind_of(sub, "/subsystem");
  if (cfg.subsystem_kind == "trivial") {
    cfg.subsystem = scalar_algebra(d);
  } else if (cfg.subsystem_kind == "full") {
    cfg.subsystem = info.algebra;
  } else if (cfg.subsystem_kind == "fixed_algebra") {
    cfg.subsystem = fixed_algebra(info.algebra, alpha);
  } else if (cfg.subsystem_kind == "generated") {
    cfg.subsystem = generate_algebra(matrix_list(field(sub, "matrices", "/subsystem"), d, "/subsystem/matrices"), d);
  } else {
    fail_at("/subsystem/kind", "unknown subsystem kind '" + cfg.subsystem_kind + "'");
  }
  try {
    (void)make_subsystem(cfg.system, cfg.subsystem);
  } catch (const ValidationError& e) {
    throw ValidationError(std::string("at /subsystem: ") + e.what());
  }
  return cfg;
}

SystemConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read config file '" + path + "'");
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw InputError("malformed JSON in '" + path + "': " + e.what());
  }
  return parse_config(doc);
}

namespace {

Json base_doc(const std::string& name, Index d) {
  Json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["name"] = name;
  doc["ambient_dim"] = d;
  return doc;
}

Matrix diag(std::initializer_list<Complex> entries) {
  Vector v(static_cast<Index>(entries.size()));
  Index i = 0;
  for (const auto& e : entries) v(i++) = e;
  return v.asDiagonal();
}

}  // namespace

std::vector<Json> hand_instances() {
  std::vector<Json> out;
  const Json rotation = {{"kind", "inner"}, {"unitary", matrix_to_json(diag({1.0, Complex(0.0, 1.0)}))}};
  {
    Json doc = base_doc("M2/full/Ad(diag(1,i))", 2);
    doc["algebra"] = {{"kind", "full"}};
    doc["state"] = {{"kind", "normalized_trace"}};
    doc["automorphism"] = rotation;
    doc["subsystem"] = {{"kind", "full"}};
    out.push_back(doc);
  }
  {
    Json doc = base_doc("M2/diag/Ad(diag(1,i))", 2);
    doc["algebra"] = {{"kind", "full"}};
    doc["state"] = {{"kind", "normalized_trace"}};
    doc["automorphism"] = rotation;
    doc["subsystem"] = {{"kind", "generated"}, {"matrices", Json::array({matrix_to_json(diag({1.0, 0.0}))})}};
    out.push_back(doc);
  }
  {
    Json doc = base_doc("C2/trivial/swap", 2);
    doc["algebra"] = {{"kind", "block_diagonal"}, {"sizes", {1, 1}}};
    doc["state"] = {{"kind", "normalized_trace"}};
    doc["automorphism"] = {{"kind", "block_permutation"}, {"perm", {1, 0}}};
    doc["subsystem"] = {{"kind", "trivial"}};
    out.push_back(doc);
  }
  return out;
}

Json random_system(std::uint64_t seed, Index max_dim) {
  if (max_dim < 1) throw InputError("random_system: max_dim must be positive");
  Rng rng(seed);
  const Index d = 1 + static_cast<Index>(rng.below(static_cast<std::uint64_t>(max_dim)));
  std::vector<Index> sizes;
  for (Index left = d; left > 0;) {
    const Index s = 1 + static_cast<Index>(rng.below(static_cast<std::uint64_t>(left)));
    sizes.push_back(s);
    left -= s;
  }

  // A same-size pair of blocks that may be swapped.
  std::vector<std::pair<std::size_t, std::size_t>> swappable;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    for (std::size_t j = i + 1; j < sizes.size(); ++j) {
      if (sizes[i] == sizes[j]) swappable.emplace_back(i, j);
    }
  }
  const bool do_swap = !swappable.empty() && rng.below(2) == 0;
  const auto swap_pair = do_swap ? swappable[rng.below(swappable.size())] : std::pair<std::size_t, std::size_t>{0, 0};

  // Block weights, equal on the swapped pair so the state stays invariant.
  std::vector<double> weights(sizes.size());
  const bool uniform = rng.below(2) == 0;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    weights[i] = uniform ? static_cast<double>(sizes[i]) : 0.5 + rng.uniform();
  }
  if (do_swap) weights[swap_pair.second] = weights[swap_pair.first];
  double total = 0.0;
  for (double w : weights) total += w;

  Matrix density = Matrix::Zero(d, d);
  Matrix u = Matrix::Zero(d, d);
  Index offset = 0;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const Index s = sizes[i];
    density.block(offset, offset, s, s) =
        Matrix::Identity(s, s) * (weights[i] / total / static_cast<double>(s));
    if (rng.below(3) == 0) {
      Matrix phases = Matrix::Zero(s, s);
      for (Index k = 0; k < s; ++k) phases(k, k) = std::polar(1.0, 2.0 * std::numbers::pi * rng.uniform());
      u.block(offset, offset, s, s) = phases;
    } else {
      u.block(offset, offset, s, s) = haar_unitary(rng, s);
    }
    offset += s;
  }

  Json doc = base_doc("random seed " + std::to_string(seed), d);
  if (sizes.size() == 1) {
    doc["algebra"] = {{"kind", "full"}};
  } else {
    doc["algebra"] = {{"kind", "block_diagonal"}, {"sizes", sizes}};
  }
  if (uniform) {
    doc["state"] = {{"kind", "normalized_trace"}};
  } else {
    doc["state"] = {{"kind", "density"}, {"matrix", matrix_to_json(density)}};
  }
  const Json inner = {{"kind", "inner"}, {"unitary", matrix_to_json(u)}};
  if (do_swap) {
    std::vector<Index> perm(sizes.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<Index>(i);
    std::swap(perm[swap_pair.first], perm[swap_pair.second]);
    doc["automorphism"] = {{"kind", "compose"},
                           {"list", Json::array({inner, {{"kind", "block_permutation"}, {"perm", perm}}})}};
  } else {
    doc["automorphism"] = inner;
  }

  const std::uint64_t recipe = rng.below(4);
  if (recipe == 0) {
    doc["subsystem"] = {{"kind", "trivial"}};
  } else if (recipe == 1) {
    doc["subsystem"] = {{"kind", "full"}};
  } else if (recipe == 2) {
    doc["subsystem"] = {{"kind", "fixed_algebra"}};
  } else {
    // Algebra generated by the alpha-orbit of a random diagonal element.
    doc["subsystem"] = {{"kind", "fixed_algebra"}};
    const SystemConfig base = parse_config(doc);
    Matrix h = Matrix::Zero(d, d);
    for (Index k = 0; k < d; ++k) h(k, k) = rng.gaussian();
    const auto orbit = alpha_orbit(base.system.alpha, h, base.system.algebra.dim());
    Json mats = Json::array();
    for (const auto& x : orbit) mats.push_back(matrix_to_json(x));
    Json candidate = doc;
    candidate["subsystem"] = {{"kind", "generated"}, {"matrices", mats}};
    try {
      (void)parse_config(candidate);
      doc = candidate;
    } catch (const InputError&) {
      // numerically borderline orbit: keep the fixed algebra
    }
  }
  return doc;
}

}  // namespace relmix
