#include "relmix/vnalg.hpp"

#include <algorithm>
#include <random>

#include <unsupported/Eigen/KroneckerProduct>

namespace relmix {

MatrixStarAlgebra::MatrixStarAlgebra(Index d, Matrix columns) : d_(d), cols_(std::move(columns)) {
  if (cols_.rows() != d_ * d_) throw InputError("MatrixStarAlgebra: basis has wrong length");
  basis_.reserve(static_cast<std::size_t>(cols_.cols()));
  for (Index j = 0; j < cols_.cols(); ++j) basis_.push_back(unvectorize(cols_.col(j), d_));
}

MatrixStarAlgebra MatrixStarAlgebra::from_span(Index d, std::span<const Matrix> elements, double tol) {
  Matrix cols(d * d, static_cast<Index>(elements.size()));
  for (std::size_t j = 0; j < elements.size(); ++j) {
    if (elements[j].rows() != d || elements[j].cols() != d) {
      throw InputError("MatrixStarAlgebra: element " + std::to_string(j) + " is not " + std::to_string(d) +
                       "x" + std::to_string(d));
    }
    cols.col(static_cast<Index>(j)) = vectorize(elements[j]);
  }
  return MatrixStarAlgebra(d, orthonormalize(cols, tol).basis);
}

double closure_defect(const MatrixStarAlgebra& a) {
  double worst = a.membership_residual(Matrix::Identity(a.ambient_dim(), a.ambient_dim()));
  for (const auto& x : a.basis()) {
    worst = std::max(worst, a.membership_residual(x.adjoint()));
    for (const auto& y : a.basis()) worst = std::max(worst, a.membership_residual(x * y));
  }
  return worst;
}

MatrixStarAlgebra full_algebra(Index d) {
  return MatrixStarAlgebra(d, Matrix::Identity(d * d, d * d));
}

MatrixStarAlgebra scalar_algebra(Index d) {
  Matrix col = vectorize(Matrix::Identity(d, d)) / std::sqrt(static_cast<double>(d));
  return MatrixStarAlgebra(d, col);
}

MatrixStarAlgebra block_diagonal_algebra(const std::vector<Index>& sizes) {
  if (sizes.empty()) throw InputError("block_diagonal_algebra: no blocks");
  Index d = 0;
  for (Index s : sizes) {
    if (s <= 0) throw InputError("block_diagonal_algebra: block sizes must be positive");
    d += s;
  }
  std::vector<Matrix> units;
  Index offset = 0;
  for (Index s : sizes) {
    for (Index j = 0; j < s; ++j) {
      for (Index i = 0; i < s; ++i) {
        Matrix e = Matrix::Zero(d, d);
        e(offset + i, offset + j) = 1.0;
        units.push_back(std::move(e));
      }
    }
    offset += s;
  }
  return MatrixStarAlgebra::from_span(d, units);
}

namespace {

// Two pseudo-random combinations of `elements` (fixed seed). With their
// adjoints they generically generate the same *-algebra as the full set;
// callers verify the result and fall back to the full set.
std::vector<Matrix> compressed_generators(std::span<const Matrix> elements) {
  std::vector<Matrix> out;
  if (elements.empty()) return out;
  std::mt19937_64 rng(0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (int r = 0; r < 2; ++r) {
    Matrix x = Matrix::Zero(elements.front().rows(), elements.front().cols());
    for (const auto& e : elements) x += Complex(unif(rng), unif(rng)) * e;
    out.push_back(std::move(x));
  }
  return out;
}

// Breadth-first closure of {1} under left multiplication by gens and their
// adjoints. Returns orthonormal vectorized basis columns.
Matrix close_under_products(std::span<const Matrix> gens, Index d, double tol) {
  std::vector<Matrix> all;
  for (const auto& g : gens) {
    all.push_back(g);
    all.push_back(g.adjoint());
  }
  Matrix q = vectorize(Matrix::Identity(d, d)) / std::sqrt(static_cast<double>(d));
  std::vector<Matrix> frontier{unvectorize(q.col(0), d)};
  double scale = 1.0;
  while (!frontier.empty() && !all.empty() && q.cols() < d * d) {
    Matrix cand(d * d, static_cast<Index>(all.size() * frontier.size()));
    Index c = 0;
    for (const auto& g : all) {
      for (const auto& x : frontier) {
        cand.col(c) = vectorize(g * x);
        scale = std::max(scale, cand.col(c).norm());
        ++c;
      }
    }
    for (int pass = 0; pass < 2; ++pass) cand -= q * (q.adjoint() * cand);
    Matrix fresh(d * d, 0);
    for (Index j = 0; j < cand.cols(); ++j) {
      Vector r = cand.col(j);
      for (int pass = 0; pass < 2; ++pass) {
        if (fresh.cols() > 0) r -= fresh * (fresh.adjoint() * r);
      }
      const double nr = r.norm();
      if (nr > tol * scale) {
        fresh.conservativeResize(Eigen::NoChange, fresh.cols() + 1);
        fresh.col(fresh.cols() - 1) = r / nr;
      }
    }
    frontier.clear();
    for (Index j = 0; j < fresh.cols(); ++j) frontier.push_back(unvectorize(fresh.col(j), d));
    Matrix grown(d * d, q.cols() + fresh.cols());
    grown << q, fresh;
    q = std::move(grown);
  }
  return q;
}

Matrix commutant_null_space(std::span<const Matrix> elements, Index d) {
  const Matrix id = Matrix::Identity(d, d);
  Matrix stacked(static_cast<Index>(elements.size()) * d * d, d * d);
  Index row = 0;
  double scale = 0.0;
  for (const auto& b : elements) {
    // vec(XB - BX) = (B^T (x) I - I (x) B) vec(X)
    stacked.middleRows(row, d * d) =
        Matrix(Eigen::kroneckerProduct(b.transpose(), id)) - Matrix(Eigen::kroneckerProduct(id, b));
    row += d * d;
    scale = std::max(scale, b.norm());
  }
  // near-scalar elements give a commutator matrix made of rounding noise
  return null_space(stacked, kRankTol, kRankTol * scale);
}

}  // namespace

MatrixStarAlgebra generate_algebra(std::span<const Matrix> generators, Index d, double tol) {
  for (std::size_t i = 0; i < generators.size(); ++i) {
    if (generators[i].rows() != d || generators[i].cols() != d) {
      throw InputError("generate_algebra: generator " + std::to_string(i) + " is not " + std::to_string(d) +
                       "x" + std::to_string(d));
    }
    require_finite(generators[i], "generate_algebra");
  }
  if (generators.size() > 3) {
    const auto small = compressed_generators(generators);
    MatrixStarAlgebra candidate(d, close_under_products(small, d, tol));
    bool ok = true;
    for (const auto& g : generators) ok = ok && candidate.contains(g, 1e-8);
    if (ok) return candidate;
  }
  return MatrixStarAlgebra(d, close_under_products(generators, d, tol));
}

MatrixStarAlgebra commutant(const MatrixStarAlgebra& algebra) {
  const Index d = algebra.ambient_dim();
  if (algebra.dim() > 3) {
    std::vector<Matrix> small = compressed_generators(algebra.basis());
    const std::size_t n = small.size();
    for (std::size_t i = 0; i < n; ++i) small.push_back(small[i].adjoint());
    MatrixStarAlgebra candidate(d, commutant_null_space(small, d));
    double worst = 0.0;
    for (const auto& x : candidate.basis()) {
      for (const auto& b : algebra.basis()) worst = std::max(worst, max_abs(x * b - b * x));
    }
    if (worst <= 1e-8) return candidate;
  }
  return MatrixStarAlgebra(d, commutant_null_space(algebra.basis(), d));
}

MatrixStarAlgebra intersection(const MatrixStarAlgebra& a, const MatrixStarAlgebra& b) {
  Matrix joined(a.basis_columns().rows(), a.dim() + b.dim());
  joined << a.basis_columns(), -b.basis_columns();
  const Matrix ns = null_space(joined, kRankTol);
  const Matrix common = a.basis_columns() * ns.topRows(a.dim());
  return MatrixStarAlgebra(a.ambient_dim(), orthonormalize(common).basis);
}

StateSpec validate_state(const MatrixStarAlgebra& a, const Matrix& density, double tol) {
  const Index d = a.ambient_dim();
  if (density.rows() != d || density.cols() != d) {
    throw InputError("state: density must be " + std::to_string(d) + "x" + std::to_string(d));
  }
  require_finite(density, "state density");
  const double herm = max_abs(density - density.adjoint());
  if (herm > tol) throw ValidationError("state not Hermitian (|rho - rho*| = " + std::to_string(herm) + ")");
  const Complex tr = density.trace();
  if (std::abs(tr - Complex(1.0, 0.0)) > tol) {
    throw ValidationError("state trace is " + std::to_string(tr.real()) + ", expected 1");
  }
  const double min_ev = hermitian_eigen(density).values.minCoeff();
  if (min_ev <= tol) {
    throw ValidationError("state not faithful (minimum eigenvalue " + std::to_string(min_ev) + ")");
  }
  StateSpec s{(density + density.adjoint()) / 2.0, true};
  for (const auto& x : a.basis()) {
    for (const auto& y : a.basis()) {
      if (std::abs(s(x * y) - s(y * x)) > tol) {
        s.is_trace = false;
        return s;
      }
    }
  }
  return s;
}

const char* to_string(AutomorphismKind k) {
  switch (k) {
    case AutomorphismKind::identity: return "identity";
    case AutomorphismKind::inner: return "inner";
    case AutomorphismKind::block_permutation: return "block_permutation";
    case AutomorphismKind::composition: return "composition";
    case AutomorphismKind::linear_map: return "linear_map";
  }
  return "?";
}

Vector AutomorphismSpec::apply_coords(const Vector& c, int n) const {
  Vector out = c;
  if (n >= 0) {
    for (int i = 0; i < n; ++i) out = map * out;
  } else {
    const Matrix inv = inverse(map);
    for (int i = 0; i < -n; ++i) out = inv * out;
  }
  return out;
}

namespace {

AutomorphismSpec from_images(const MatrixStarAlgebra& a, const std::vector<Matrix>& images, AutomorphismKind kind) {
  AutomorphismSpec s;
  s.kind = kind;
  s.domain = a.basis_columns();
  s.ambient_dim = a.ambient_dim();
  s.map = Matrix(a.dim(), a.dim());
  for (Index j = 0; j < a.dim(); ++j) {
    const auto& img = images[static_cast<std::size_t>(j)];
    if (img.rows() != a.ambient_dim() || img.cols() != a.ambient_dim()) {
      throw InputError("automorphism: image of basis element " + std::to_string(j) + " has wrong size");
    }
    s.map.col(j) = a.coords(img);
    s.image_defect = std::max(s.image_defect, a.membership_residual(img));
  }
  return s;
}

}  // namespace

AutomorphismSpec identity_automorphism(const MatrixStarAlgebra& a) {
  AutomorphismSpec s;
  s.kind = AutomorphismKind::identity;
  s.domain = a.basis_columns();
  s.ambient_dim = a.ambient_dim();
  s.map = Matrix::Identity(a.dim(), a.dim());
  s.implementing = Matrix(Matrix::Identity(a.ambient_dim(), a.ambient_dim()));
  return s;
}

AutomorphismSpec spatial_automorphism(const MatrixStarAlgebra& a, const Matrix& v, AutomorphismKind kind) {
  if (v.rows() != a.ambient_dim() || v.cols() != a.ambient_dim()) {
    throw InputError("automorphism: implementing matrix must be " + std::to_string(a.ambient_dim()) + "x" +
                     std::to_string(a.ambient_dim()));
  }
  require_finite(v, "automorphism unitary");
  std::vector<Matrix> images;
  for (const auto& b : a.basis()) images.push_back(v * b * v.adjoint());
  auto s = from_images(a, images, kind);
  s.implementing = v;
  return s;
}

AutomorphismSpec inner_automorphism(const MatrixStarAlgebra& a, const Matrix& u) {
  return spatial_automorphism(a, u, AutomorphismKind::inner);
}

AutomorphismSpec block_permutation_automorphism(const MatrixStarAlgebra& a, const std::vector<Index>& sizes,
                                                const std::vector<Index>& perm) {
  if (perm.size() != sizes.size()) throw InputError("block_permutation: perm length != number of blocks");
  std::vector<Index> offsets(sizes.size(), 0);
  for (std::size_t i = 1; i < sizes.size(); ++i) offsets[i] = offsets[i - 1] + sizes[i - 1];
  std::vector<bool> seen(sizes.size(), false);
  const Index d = a.ambient_dim();
  Matrix v = Matrix::Zero(d, d);
  for (std::size_t i = 0; i < perm.size(); ++i) {
    const Index t = perm[i];
    if (t < 0 || static_cast<std::size_t>(t) >= sizes.size() || seen[static_cast<std::size_t>(t)]) {
      throw InputError("block_permutation: perm is not a permutation");
    }
    const auto ti = static_cast<std::size_t>(t);
    seen[ti] = true;
    if (sizes[ti] != sizes[i]) {
      throw InputError("block_permutation: block " + std::to_string(i) + " and block " + std::to_string(t) +
                       " differ in size");
    }
    for (Index k = 0; k < sizes[i]; ++k) v(offsets[ti] + k, offsets[i] + k) = 1.0;
  }
  return spatial_automorphism(a, v, AutomorphismKind::block_permutation);
}

AutomorphismSpec linear_map_automorphism(const MatrixStarAlgebra& a, const std::vector<Matrix>& images) {
  if (static_cast<Index>(images.size()) != a.dim()) throw InputError("linear map: need one image per basis element");
  return from_images(a, images, AutomorphismKind::linear_map);
}

AutomorphismSpec compose(const MatrixStarAlgebra& a, const std::vector<AutomorphismSpec>& parts) {
  AutomorphismSpec s = identity_automorphism(a);
  s.kind = AutomorphismKind::composition;
  for (const auto& p : parts) {
    if (p.map.rows() != a.dim() || p.map.cols() != a.dim()) {
      throw InputError("compose: part defined on a different algebra");
    }
    s.map = p.map * s.map;
    s.image_defect = std::max(s.image_defect, p.image_defect);
    if (s.implementing && p.implementing) {
      s.implementing = Matrix(*p.implementing * *s.implementing);
    } else {
      s.implementing.reset();
    }
  }
  return s;
}

AutomorphismSpec validate_automorphism(const MatrixStarAlgebra& a, const AutomorphismSpec& spec,
                                       const StateSpec& state, double tol) {
  auto fail = [](const std::string& what) { throw ValidationError("automorphism rejected: " + what); };
  if (spec.map.rows() != a.dim() || spec.map.cols() != a.dim()) fail("map defined on a different algebra");
  if (spec.image_defect > tol) {
    fail("images leave the algebra (residual " + std::to_string(spec.image_defect) + ")");
  }
  if (spec.kind == AutomorphismKind::inner && spec.implementing && !a.contains(*spec.implementing, tol)) {
    fail("inner unitary is not an element of the algebra");
  }
  if (spec.implementing) {
    const double du = unitarity_defect(*spec.implementing);
    if (du > tol) fail("implementing matrix not unitary (|V*V - I| = " + std::to_string(du) + ")");
  }
  const auto& basis = a.basis();
  std::vector<Matrix> img;
  img.reserve(basis.size());
  for (const auto& b : basis) img.push_back(spec.apply(b));
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const double star = max_abs(spec.apply(basis[i].adjoint()) - img[i].adjoint());
    if (star > tol) fail("alpha(x*) != alpha(x)* at basis element " + std::to_string(i));
    for (std::size_t j = 0; j < basis.size(); ++j) {
      const double mult = max_abs(spec.apply(basis[i] * basis[j]) - img[i] * img[j]);
      if (mult > tol) {
        fail("alpha(xy) != alpha(x)alpha(y) at basis pair (" + std::to_string(i) + ", " + std::to_string(j) +
             "), residual " + std::to_string(mult));
      }
    }
    if (std::abs(state(img[i]) - state(basis[i])) > tol) {
      fail("mu(alpha(x)) != mu(x) at basis element " + std::to_string(i));
    }
  }
  if (a.dim() > 0 && singular_values(spec.map).minCoeff() <= tol) fail("map is not invertible");
  return spec;
}

SystemSpec make_system(MatrixStarAlgebra a, const Matrix& density, const AutomorphismSpec& alpha, double tol) {
  const double cd = closure_defect(a);
  if (cd > 1e-8) {
    throw ValidationError("algebra not closed under products/adjoints (defect " + std::to_string(cd) + ")");
  }
  StateSpec s = validate_state(a, density, tol);
  AutomorphismSpec al = validate_automorphism(a, alpha, s, tol);
  return SystemSpec{std::move(a), std::move(s), std::move(al)};
}

bool modular_invariance_check(const MatrixStarAlgebra& f, const StateSpec& state, double tol) {
  if (state.is_trace) return true;
  const Matrix rho_inv = inverse(state.density);
  for (const auto& x : f.basis()) {
    if (!f.contains(state.density * x * rho_inv, tol)) return false;
  }
  return true;
}

Subsystem make_subsystem(const SystemSpec& sys, const MatrixStarAlgebra& f, double tol) {
  if (f.ambient_dim() != sys.d()) throw InputError("subsystem: ambient dimension mismatch");
  if (!f.contains_unit(tol)) throw ValidationError("subsystem does not contain the unit");
  const double inc = inclusion_residual(f, sys.algebra);
  if (inc > 1e-8) {
    throw ValidationError("subsystem not contained in the algebra (residual " + std::to_string(inc) + ")");
  }
  const double cd = closure_defect(f);
  if (cd > 1e-8) throw ValidationError("subsystem not a *-subalgebra (defect " + std::to_string(cd) + ")");
  Matrix phi(f.dim(), f.dim());
  for (Index j = 0; j < f.dim(); ++j) {
    const Matrix img = sys.alpha.apply(f.element(j));
    if (!f.contains(img, 1e-8)) {
      throw ValidationError("subsystem not invariant under alpha (basis element " + std::to_string(j) + ")");
    }
    phi.col(j) = f.coords(img);
  }
  if (f.dim() > 0 && singular_values(phi).minCoeff() <= tol) {
    throw ValidationError("alpha does not map the subsystem onto itself");
  }
  if (!modular_invariance_check(f, sys.state, 1e-8)) {
    throw ValidationError("subsystem is not invariant under the modular group of the state");
  }
  StateSpec lambda = sys.state;
  if (!lambda.is_trace) {
    // the restriction of a non-tracial state can still be tracial
    lambda.is_trace = true;
    for (const auto& x : f.basis()) {
      for (const auto& y : f.basis()) {
        if (std::abs(lambda(x * y) - lambda(y * x)) > tol) lambda.is_trace = false;
      }
    }
  }
  return Subsystem{f, lambda, phi};
}

MatrixStarAlgebra fixed_algebra(const MatrixStarAlgebra& a, const AutomorphismSpec& alpha, double tol) {
  const Matrix m = alpha.map - Matrix::Identity(a.dim(), a.dim());
  const RealVector sv = singular_values(m);
  const double smax = sv.size() > 0 ? sv(0) : 0.0;
  const Matrix ns = null_space(m, 0.0, tol * std::max(1.0, smax));
  MatrixStarAlgebra out(a.ambient_dim(), orthonormalize(Matrix(a.basis_columns() * ns)).basis);
  const double cd = closure_defect(out);
  if (cd > 1e-7) throw InternalError("fixed algebra not closed (defect " + std::to_string(cd) + ")");
  return out;
}

std::vector<Matrix> alpha_orbit(const AutomorphismSpec& alpha, const Matrix& h, Index max_len) {
  std::vector<Matrix> orbit;
  SpanBuilder span(h.size());
  Matrix x = h;
  for (Index n = 0; n <= max_len; ++n) {
    if (!span.add(vectorize(x))) break;
    orbit.push_back(x);
    x = alpha.apply(x);
  }
  return orbit;
}

}  // namespace relmix
