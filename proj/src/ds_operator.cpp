#include "ncerg/ds_operator.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "ncerg/rng.hpp"

namespace ncerg {

namespace {

void validate_unitary(const AlgebraPtr& algebra, const OperatorElement& u, const char* who) {
  if (!same_algebra(u, OperatorElement::zero(algebra)))
    throw std::invalid_argument(std::string(who) + ": unitary lives in a different algebra");
  for (const auto& b : u.blocks()) {
    CMatrix gram = matmul(b, b.adjoint());
    gram -= CMatrix::identity(b.dim());
    if (gram.max_abs() > 1e-10)
      throw std::invalid_argument(std::string(who) + ": matrix is not unitary to 1e-10");
  }
}

void validate_recipe(const AlgebraPtr& algebra, const DSRecipe& recipe) {
  if (std::holds_alternative<UnitaryConjugation>(recipe)) {
    validate_unitary(algebra, std::get<UnitaryConjugation>(recipe).u, "UnitaryConjugation");
  } else if (std::holds_alternative<MixedUnitary>(recipe)) {
    const auto& mu = std::get<MixedUnitary>(recipe);
    if (mu.terms.empty()) throw std::invalid_argument("MixedUnitary: no terms");
    double total = 0.0;
    for (const auto& t : mu.terms) {
      if (!(t.p > 0.0)) throw std::invalid_argument("MixedUnitary: probabilities must be > 0");
      total += t.p;
      validate_unitary(algebra, t.u, "MixedUnitary");
    }
    if (std::abs(total - 1.0) > 1e-12)
      throw std::invalid_argument("MixedUnitary: probabilities must sum to 1 (tol 1e-12)");
  } else if (std::holds_alternative<PermutationConjugation>(recipe)) {
    const auto& pc = std::get<PermutationConjugation>(recipe);
    const std::size_t n = algebra->total_dim();
    if (pc.perm.size() != n)
      throw std::invalid_argument("PermutationConjugation: permutation length mismatch");
    std::vector<bool> seen(n, false);
    for (std::size_t v : pc.perm) {
      if (v >= n || seen[v])
        throw std::invalid_argument("PermutationConjugation: not a permutation");
      seen[v] = true;
    }
    // must map each block's index range onto itself
    std::size_t off = 0;
    for (const auto& b : algebra->blocks()) {
      for (std::size_t i = off; i < off + b.dim; ++i)
        if (pc.perm[i] < off || pc.perm[i] >= off + b.dim)
          throw std::invalid_argument("PermutationConjugation: permutation crosses blocks");
      off += b.dim;
    }
  } else if (std::holds_alternative<BlockConditionalExpectation>(recipe)) {
    const auto& ce = std::get<BlockConditionalExpectation>(recipe);
    if (ce.cell_sizes.size() != algebra->block_count())
      throw std::invalid_argument("BlockConditionalExpectation: partition count mismatch");
    for (std::size_t i = 0; i < ce.cell_sizes.size(); ++i) {
      std::size_t total = 0;
      for (std::size_t c : ce.cell_sizes[i]) {
        if (c == 0) throw std::invalid_argument("BlockConditionalExpectation: empty cell");
        total += c;
      }
      if (total != algebra->blocks()[i].dim)
        throw std::invalid_argument("BlockConditionalExpectation: cells do not tile the block");
    }
  } else if (std::holds_alternative<Composition>(recipe)) {
    const auto& comp = std::get<Composition>(recipe);
    if (comp.factors.empty()) throw std::invalid_argument("Composition: no factors");
    for (const auto& f : comp.factors)
      if (!(*f.algebra() == *algebra))
        throw std::invalid_argument("Composition: factor algebra mismatch");
  }
}

}  // namespace

DSOperator::DSOperator(AlgebraPtr algebra, DSRecipe recipe) : algebra_(std::move(algebra)) {
  if (!algebra_) throw std::invalid_argument("DSOperator: null algebra");
  validate_recipe(algebra_, recipe);
  recipe_ = std::make_shared<const DSRecipe>(std::move(recipe));
}

OperatorElement DSOperator::apply(const OperatorElement& x) const {
  if (!same_algebra(x, OperatorElement::zero(algebra_)))
    throw std::invalid_argument("DSOperator::apply: algebra mismatch");

  struct Visitor {
    const AlgebraPtr& algebra;
    const OperatorElement& x;

    OperatorElement operator()(const UnitaryConjugation& r) const {
      std::vector<CMatrix> blocks;
      blocks.reserve(x.blocks().size());
      for (std::size_t i = 0; i < x.blocks().size(); ++i)
        blocks.push_back(conjugate_by(r.u.blocks()[i], x.blocks()[i]));
      return OperatorElement(algebra, std::move(blocks));
    }

    OperatorElement operator()(const MixedUnitary& r) const {
      OperatorElement acc = OperatorElement::zero(algebra);
      for (const auto& t : r.terms) {
        OperatorElement term = Visitor{algebra, x}(UnitaryConjugation{t.u});
        acc += cplx(t.p) * term;
      }
      return acc;
    }

    OperatorElement operator()(const PermutationConjugation& r) const {
      // inverse positions: inv[perm[i]] = i
      std::vector<std::size_t> inv(r.perm.size());
      for (std::size_t i = 0; i < r.perm.size(); ++i) inv[r.perm[i]] = i;
      std::vector<CMatrix> blocks;
      blocks.reserve(x.blocks().size());
      std::size_t off = 0;
      for (const auto& bx : x.blocks()) {
        const std::size_t d = bx.dim();
        CMatrix out(d);
        for (std::size_t i = 0; i < d; ++i)
          for (std::size_t j = 0; j < d; ++j)
            out(i, j) = bx(inv[off + i] - off, inv[off + j] - off);
        blocks.push_back(std::move(out));
        off += d;
      }
      return OperatorElement(algebra, std::move(blocks));
    }

    OperatorElement operator()(const BlockConditionalExpectation& r) const {
      std::vector<CMatrix> blocks;
      blocks.reserve(x.blocks().size());
      for (std::size_t bi = 0; bi < x.blocks().size(); ++bi) {
        const CMatrix& bx = x.blocks()[bi];
        const std::size_t d = bx.dim();
        // cell index per coordinate
        std::vector<std::size_t> cell(d);
        std::size_t pos = 0;
        for (std::size_t ci = 0; ci < r.cell_sizes[bi].size(); ++ci)
          for (std::size_t k = 0; k < r.cell_sizes[bi][ci]; ++k) cell[pos++] = ci;
        CMatrix out(d);
        for (std::size_t i = 0; i < d; ++i)
          for (std::size_t j = 0; j < d; ++j)
            if (cell[i] == cell[j]) out(i, j) = bx(i, j);
        blocks.push_back(std::move(out));
      }
      return OperatorElement(algebra, std::move(blocks));
    }

    OperatorElement operator()(const Composition& r) const {
      OperatorElement cur = x;
      for (const auto& f : r.factors) cur = f.apply(cur);
      return cur;
    }
  };

  return std::visit(Visitor{algebra_, x}, *recipe_);
}

LinearMap scaling_hook(double factor) {
  return [factor](const OperatorElement& x) { return cplx(factor) * x; };
}

DSVerification verify_ds_plus(const LinearMap& map, const AlgebraPtr& algebra,
                              std::uint64_t sample_count, double tol, std::uint64_t seed) {
  if (sample_count < 1) throw std::invalid_argument("verify_ds_plus: sample_count must be >= 1");
  Rng rng(seed);
  DSVerification rep;
  rep.samples = sample_count;
  rep.tol = tol;
  rep.min_positive_eig = std::numeric_limits<double>::infinity();
  for (std::uint64_t s = 0; s < sample_count; ++s) {
    const OperatorElement x = rng.element(algebra);
    const OperatorElement tx = map(x);
    const double n1 = schatten_norm(x, 1.0);
    const double ninf = operator_norm(x);
    if (n1 > 0.0) rep.max_ratio_l1 = std::max(rep.max_ratio_l1, schatten_norm(tx, 1.0) / n1);
    if (ninf > 0.0) rep.max_ratio_op = std::max(rep.max_ratio_op, operator_norm(tx) / ninf);

    const OperatorElement a = rng.positive(algebra);
    rep.min_positive_eig = std::min(rep.min_positive_eig, min_eigenvalue(map(a)));
  }
  rep.passed = rep.max_ratio_l1 <= 1.0 + tol && rep.max_ratio_op <= 1.0 + tol &&
               rep.min_positive_eig >= -tol;
  return rep;
}

DSVerification verify_ds_plus(const DSOperator& op, std::uint64_t sample_count, double tol,
                              std::uint64_t seed) {
  return verify_ds_plus([&op](const OperatorElement& x) { return op.apply(x); }, op.algebra(),
                        sample_count, tol, seed);
}

CMatrix block_superoperator(const DSOperator& op, std::size_t block_index) {
  const AlgebraPtr& algebra = op.algebra();
  if (block_index >= algebra->block_count())
    throw std::invalid_argument("block_superoperator: block index out of range");
  const std::size_t d = algebra->blocks()[block_index].dim;
  CMatrix s(d * d);
  OperatorElement basis = OperatorElement::zero(algebra);
  for (std::size_t r = 0; r < d; ++r) {
    for (std::size_t c = 0; c < d; ++c) {
      basis.blocks()[block_index](r, c) = 1.0;
      const OperatorElement img = op.apply(basis);
      basis.blocks()[block_index](r, c) = 0.0;
      const CMatrix& ib = img.blocks()[block_index];
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) s(i * d + j, r * d + c) = ib(i, j);
    }
  }
  return s;
}

FixedSpaceProjector::FixedSpaceProjector(const DSOperator& op) : algebra_(op.algebra()) {
  // For a doubly stochastic recipe the superoperator S is a Hilbert-Schmidt
  // contraction, so its fixed vectors coincide with the eigenvalue-1
  // eigenspace of the Hermitian part (S + S^*)/2, and the ergodic projection
  // is the orthogonal projection onto that eigenspace.
  constexpr double kWindow = 1e-8;
  for (std::size_t bi = 0; bi < algebra_->block_count(); ++bi) {
    const CMatrix s = block_superoperator(op, bi);
    const std::size_t n = s.dim();
    const CMatrix k = hermitian_part(s);
    const auto eg = ncerg::eigh(k);
    CMatrix sel(n);
    for (std::size_t j = 0; j < n; ++j)
      if (std::abs(eg.eigenvalues[j] - 1.0) <= kWindow)
        for (std::size_t i = 0; i < n; ++i) sel(i, j) = eg.eigenvectors(i, j);
    block_projectors_.push_back(matmul(sel, sel.adjoint()));
  }
}

OperatorElement FixedSpaceProjector::operator()(const OperatorElement& x) const {
  if (!same_algebra(x, OperatorElement::zero(algebra_)))
    throw std::invalid_argument("FixedSpaceProjector: algebra mismatch");
  std::vector<CMatrix> blocks;
  blocks.reserve(x.blocks().size());
  for (std::size_t bi = 0; bi < x.blocks().size(); ++bi) {
    const CMatrix& bx = x.blocks()[bi];
    const std::size_t d = bx.dim();
    const CMatrix& proj = block_projectors_[bi];
    CMatrix out(d);
    for (std::size_t i = 0; i < d * d; ++i) {
      cplx acc = 0.0;
      for (std::size_t j = 0; j < d * d; ++j) {
        const cplx pij = proj(i, j);
        if (pij == cplx(0.0)) continue;
        acc += pij * bx(j / d, j % d);
      }
      out(i / d, i % d) = acc;
    }
    blocks.push_back(std::move(out));
  }
  return OperatorElement(x.algebra(), std::move(blocks));
}

FixedSpaceProjector fixed_space_projector(const DSOperator& op) {
  return FixedSpaceProjector(op);
}

}  // namespace ncerg
