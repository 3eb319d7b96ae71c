#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "cstar/decompose.hpp"
#include "symbolic_support.hpp"
#include "test_support.hpp"

namespace cstar {
namespace {

MatrixWitness toeplitz_witness(int J, std::size_t depth) {
  const auto candidates = toeplitz_candidates(J);
  const auto built = build_witness(std::span<const StarPolynomial>(candidates), 1e-12, depth);
  return evaluate_witness(built.witness.elements, depth, 1e-10);
}

/// Diagonal of 2 - 2^{-|w|} over the truncation: Phi(diag x)(iw) = x_w / n with n = 2.
Operator psi_of_identity_closed_form(std::size_t depth) {
  const FockTruncation fock(2, depth);
  Operator out(fock.dim());
  for (std::size_t i = 0; i < fock.dim(); ++i)
    out(i, i) = 2.0 - std::ldexp(1.0, -static_cast<int>(fock.words()[i].size()));
  return out;
}

/// Naive b a b^* with explicit index loops.
Operator naive_phi(const Operator& a, const std::vector<Operator>& family) {
  const std::size_t d = a.dim();
  Operator out(d);
  for (const auto& b : family)
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j)
        for (std::size_t k = 0; k < d; ++k)
          for (std::size_t l = 0; l < d; ++l) out(i, j) += b(i, k) * a(k, l) * std::conj(b(j, l));
  return out;
}

TEST(ApplyPhi, ZeroMapsToZero) {
  const auto w = standard_isometry_witness(2, 2, 1e-10);
  EXPECT_EQ(op_norm(apply_phi(Operator::zero(7), w)), 0.0);
}

TEST(ApplyPhi, SymbolicStandardWitnessOnUnit) {
  const auto w = standard_isometry_witness(2);
  const auto image = apply_phi(StarPolynomial::unit(2), w);
  EXPECT_TRUE(equals(image, parse_star_poly("0.5*(s1 s1* + s2 s2*)", 2), 1e-15));
}

TEST(ApplyPhi, TruncatedIdentityBruteForce) {
  const auto w = standard_isometry_witness(2, 2, 1e-10);
  const Operator image = apply_phi(Operator::identity(7), w);
  const double expected[] = {0, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5};
  EXPECT_LE(max_abs_diff(image, Operator::diagonal(expected)), 1e-15);
  EXPECT_LE(max_abs_diff(image, naive_phi(Operator::identity(7), w.elements)), 1e-15);
}

TEST(ApplyPhi, MatchesNaiveOnRandomInput) {
  std::mt19937_64 rng(2);
  const auto w = toeplitz_witness(2, 3);
  const Operator a = testing::random_operator(w.elements.front().dim(), rng);
  EXPECT_LE(max_abs_diff(apply_phi(a, w), naive_phi(a, w.elements)), 1e-13);
}

TEST(ApplyPhi, NormOfImageOfUnitIsEta2) {
  const auto w = toeplitz_witness(2, 4);
  EXPECT_NEAR(op_norm(apply_phi(Operator::identity(w.elements.front().dim()), w)), w.report.eta2, 1e-14);
}

TEST(ApplyPhi, Contraction) {
  std::mt19937_64 rng(3);
  for (const auto& w : {standard_isometry_witness(2, 3, 1e-10), toeplitz_witness(2, 4), standard_isometry_witness(3, 2, 1e-10)}) {
    for (int trial = 0; trial < 10; ++trial) {
      const Operator a = testing::random_operator(w.elements.front().dim(), rng);
      EXPECT_LE(op_norm(apply_phi(a, w)), w.report.eta2 * op_norm(a) + 1e-10);
    }
  }
}

TEST(ApplyPhi, DimensionMismatch) {
  const auto w = standard_isometry_witness(2, 2, 1e-10);
  EXPECT_THROW(apply_phi(Operator::identity(3), w), Error);
}

TEST(Neumann, ZeroInputTakesNoIterations) {
  const auto w = standard_isometry_witness(2, 3, 1e-10);
  const auto sol = solve_psi_neumann(Operator::zero(15), w, 1e-10);
  EXPECT_EQ(sol.info.iterations, 0u);
  EXPECT_EQ(op_norm(sol.psi), 0.0);
}

TEST(Neumann, PsiOfIdentityClosedForm) {
  const auto w = standard_isometry_witness(2, 3, 1e-10);
  const auto sol = solve_psi_neumann(Operator::identity(15), w, 1e-14);
  EXPECT_LE(max_abs_diff(sol.psi, psi_of_identity_closed_form(3)), 1e-12);
  // brute-force partial sums with the naive map agree
  Operator naive = Operator::identity(15), term = Operator::identity(15);
  for (std::size_t k = 0; k < sol.info.iterations; ++k) {
    term = naive_phi(term, w.elements);
    naive += term;
  }
  EXPECT_LE(max_abs_diff(sol.psi, naive), 1e-13);
}

TEST(Neumann, IterationCountForHalfContraction) {
  // smallest K with 2^{-(K+1)} * 2 <= 1e-10
  EXPECT_EQ(neumann_iterations_needed(0.5, 1.0, 1e-10), 34u);
  const auto w = standard_isometry_witness(2, 2, 1e-10);
  const auto sol = solve_psi_neumann(Operator::identity(7), w, 1e-10);
  EXPECT_EQ(sol.info.iterations, 34u);
  EXPECT_LE(sol.info.tail_bound, 1e-10);
  EXPECT_NEAR(sol.info.tail_bound, std::pow(0.5, 35) * 2.0, 1e-24);
}

TEST(Neumann, NormBoundAndPositivity) {
  std::mt19937_64 rng(4);
  const auto w = toeplitz_witness(2, 3);
  for (int trial = 0; trial < 5; ++trial) {
    const Operator a = testing::random_psd(w.elements.front().dim(), rng);
    const auto sol = solve_psi_neumann(a, w, 1e-12);
    EXPECT_LE(op_norm(sol.psi), op_norm(a) / (1.0 - w.report.eta2) * (1 + 1e-12));
    const auto pos = positivity_check(sol.psi, 1e-9);
    EXPECT_TRUE(pos.is_psd);
    EXPECT_GE(pos.min_eig, -1e-10 * op_norm(sol.psi));
  }
}

TEST(Neumann, Errors) {
  std::vector<Operator> family(2, Operator::identity(2) * Complex(1.0));
  const auto bad = check_witness(family, 1e-10);
  try {
    solve_psi_neumann(Operator::identity(2), bad, 1e-10);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotContractive);
  }
  const auto w = standard_isometry_witness(2, 2, 1e-10);
  try {
    solve_psi_neumann(Operator::identity(7), w, 1e-10, 10);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MaxIterExceeded);
  }
}

TEST(Direct, ZeroInput) {
  const auto w = standard_isometry_witness(2, 2, 1e-10);
  EXPECT_EQ(op_norm(solve_psi_direct(Operator::zero(7), w).psi), 0.0);
}

TEST(Direct, PsiOfIdentityClosedForm) {
  const auto w = standard_isometry_witness(2, 2, 1e-10);
  const auto sol = solve_psi_direct(Operator::identity(7), w);
  EXPECT_LE(max_abs_diff(sol.psi, psi_of_identity_closed_form(2)), 1e-13);
  EXPECT_EQ(sol.info.method, SolverMethod::Direct);
}

TEST(Direct, AgreesWithNeumannOnRandomHermitian) {
  std::mt19937_64 rng(5);
  const auto w = standard_isometry_witness(2, 2, 1e-10);
  const Operator a = testing::random_hermitian(7, rng);
  const auto direct = solve_psi_direct(a, w);
  const auto neumann = solve_psi_neumann(a, w, 1e-12);
  EXPECT_LE(op_norm(direct.psi - neumann.psi), 1e-10);
}

TEST(Direct, SolverAgreementAcrossWitnesses) {
  std::mt19937_64 rng(6);
  const std::vector<MatrixWitness> witnesses{standard_isometry_witness(3, 2, 1e-10), toeplitz_witness(2, 3),
                                             standard_isometry_witness(4, 2, 1e-10)};
  for (const auto& w : witnesses) {
    const Operator a = testing::random_hermitian(w.elements.front().dim(), rng);
    const auto direct = solve_psi_direct(a, w);
    const auto neumann = solve_psi_neumann(a, w, 1e-12);
    EXPECT_LE(op_norm(direct.psi - neumann.psi), 1e-10) << "dim " << a.dim();
  }
}

TEST(Direct, Errors) {
  const auto w = standard_isometry_witness(2, 3, 1e-10);
  try {
    solve_psi_direct(Operator::identity(15), w, 10);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SizeLimitExceeded);
  }
}

TEST(DecomposeElement, IdentityOnTruncatedStandardWitness) {
  const auto w = standard_isometry_witness(2, 3, 1e-10);
  const Operator a = Operator::identity(15);
  const auto result = decompose_element(a, w, {.eps = 1e-10});
  ASSERT_EQ(result.pairs.size(), 2u);
  ASSERT_TRUE(result.residual_interior_norm.has_value());
  EXPECT_LE(*result.residual_interior_norm, 1e-8);
  EXPECT_LE(result.trace_defect, 1e-9);
  // residual lives on the boundary words (length 3)
  const FockTruncation fock(2, 3);
  for (std::size_t i = 0; i < 15; ++i)
    for (std::size_t j = 0; j < 15; ++j)
      if (fock.words()[i].size() < 3 && fock.words()[j].size() < 3) {
        EXPECT_LE(std::abs(result.residual(i, j)), 1e-9);
      }
  // trace obstruction: |tr a| / dim = 1
  EXPECT_GE(result.residual_norm, 1.0 - 1e-9);
}

TEST(DecomposeElement, PairOrientation) {
  std::mt19937_64 rng(7);
  const auto w = standard_isometry_witness(2, 2, 1e-10);
  const Operator a = testing::random_hermitian(7, rng);
  const auto result = decompose_element(a, w);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(max_abs_diff(result.pairs[i].x, adjoint(w.elements[i])), 0.0);
    EXPECT_LE(max_abs_diff(result.pairs[i].y, w.elements[i] * result.psi_a), 1e-15);
    EXPECT_FALSE(result.pairs[i].self_adjoint_form);
  }
}

TEST(DecomposeElement, RandomHermitianOnToeplitzWitness) {
  std::mt19937_64 rng(8);
  const auto w = toeplitz_witness(2, 5);
  for (int trial = 0; trial < 3; ++trial) {
    const Operator a = testing::random_hermitian(w.elements.front().dim(), rng);
    const auto result = decompose_element(a, w, {.eps = 1e-10});
    EXPECT_EQ(result.pairs.size(), 5u);
    EXPECT_LE(*result.residual_interior_norm, 1e-8);
    EXPECT_LE(result.trace_defect, 1e-9 * double(a.dim()));
    EXPECT_GE(result.residual_norm, std::abs(trace(a)) / double(a.dim()) - 1e-9);
  }
}

TEST(DecomposeElement, DirectSolverPath) {
  std::mt19937_64 rng(9);
  const auto w = toeplitz_witness(2, 3);
  const Operator a = testing::random_operator(w.elements.front().dim(), rng);
  const auto direct = decompose_element(a, w, {.solver = SolverMethod::Direct});
  const auto neumann = decompose_element(a, w, {.eps = 1e-12});
  EXPECT_EQ(direct.solver.method, SolverMethod::Direct);
  EXPECT_LE(*direct.residual_interior_norm, 1e-10);
  EXPECT_LE(op_norm(direct.psi_a - neumann.psi_a), 1e-10);
}

TEST(DecomposePositive, ZeroInput) {
  const auto w = standard_isometry_witness(2, 2, 1e-10);
  const auto result = decompose_positive(Operator::zero(7), w);
  for (const auto& pair : result.pairs) {
    EXPECT_EQ(op_norm(pair.x), 0.0);
    EXPECT_TRUE(pair.self_adjoint_form);
  }
  EXPECT_EQ(result.residual_norm, 0.0);
}

TEST(DecomposePositive, IdentityOnTruncatedStandardWitness) {
  const auto w = standard_isometry_witness(2, 3, 1e-10);
  const auto result = decompose_positive(Operator::identity(15), w);
  for (const auto& pair : result.pairs) {
    const Operator c = commutator(pair.x, pair.y);
    EXPECT_LE(op_norm(c - adjoint(c)), 1e-12);
    EXPECT_EQ(max_abs_diff(pair.y, adjoint(pair.x)), 0.0);
  }
  EXPECT_LE(*result.residual_interior_norm, 1e-8);
}

TEST(DecomposePositive, RandomPsdOnToeplitzWitness) {
  std::mt19937_64 rng(10);
  const auto w = toeplitz_witness(2, 3);
  ASSERT_EQ(w.elements.front().dim(), 15u);
  for (int trial = 0; trial < 3; ++trial) {
    const Operator a = testing::random_psd(15, rng);
    const auto result = decompose_positive(a, w);
    EXPECT_GE(positivity_check(result.psi_a, 1e-9).min_eig, -1e-10);
    for (const auto& pair : result.pairs) {
      const Operator c = commutator(pair.x, pair.y);
      EXPECT_LE(op_norm(c - adjoint(c)), 1e-12 * (1 + op_norm(c)));
    }
    EXPECT_LE(result.trace_defect, 1e-9 * 15);
  }
}

TEST(DecomposePositive, RejectsIndefiniteInput) {
  const auto w = standard_isometry_witness(2, 2, 1e-10);
  Operator a = Operator::identity(7);
  a(3, 3) = -1.0;
  try {
    decompose_positive(a, w);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotPositive);
  }
}

TEST(Verify, SymbolicStandardWitnessIdentity) {
  // sum [b_i^*, b_i c] = c - Phi(c) whenever sum b_i^* b_i = 1
  const auto w = standard_isometry_witness(2);
  const auto c = StarPolynomial::unit(2);
  std::vector<CommutatorPair<StarPolynomial>> pairs;
  for (const auto& b : w.elements) pairs.push_back({adjoint(b), b * c, false});
  const auto a = c - apply_phi(c, w);
  EXPECT_TRUE(equals(a, parse_star_poly("1 - 0.5*(s1 s1* + s2 s2*)", 2), 1e-15));
  const auto report = verify_decomposition(a, std::span<const CommutatorPair<StarPolynomial>>(pairs));
  EXPECT_TRUE(report.residual.is_zero());
  EXPECT_EQ(report.residual_norm, 0.0);
  EXPECT_FALSE(report.trace_defect.has_value());
}

TEST(Verify, ReverseIdentityOnRandomPolynomials) {
  std::mt19937_64 rng(11);
  for (int n : {2, 3}) {
    const auto w = standard_isometry_witness(n);
    for (int trial = 0; trial < 50; ++trial) {
      const auto c = testing::random_polynomial(n, rng);
      StarPolynomial lhs(n);
      for (const auto& b : w.elements) lhs += commutator(adjoint(b), b * c);
      EXPECT_TRUE(equals(lhs, c - apply_phi(c, w), 1e-12));
    }
  }
}

TEST(Verify, MatchesEngineResidual) {
  std::mt19937_64 rng(12);
  const auto w = toeplitz_witness(2, 4);
  const Operator a = testing::random_operator(w.elements.front().dim(), rng);
  const auto result = decompose_element(a, w);
  const auto check = verify_decomposition(a, std::span<const CommutatorPair<Operator>>(result.pairs), w.interior_mask);
  EXPECT_LE(std::abs(check.residual_norm - result.residual_norm), 1e-12);
  EXPECT_LE(max_abs_diff(check.residual, result.residual), 1e-12);
  // independent recomputation with explicit products
  Operator total(a.dim());
  for (const auto& p : result.pairs) total += p.x * p.y - p.y * p.x;
  EXPECT_LE(max_abs_diff(a - total, result.residual), 1e-12);
}

TEST(Verify, EmptyPairs) {
  const auto report = verify_decomposition(Operator::zero(4), std::span<const CommutatorPair<Operator>>{});
  EXPECT_EQ(report.residual_norm, 0.0);
  EXPECT_EQ(*report.trace_defect, 0.0);
}

TEST(Verify, DimensionMismatch) {
  std::vector<CommutatorPair<Operator>> pairs{{Operator::identity(2), Operator::identity(2), false}};
  EXPECT_THROW(verify_decomposition(Operator::zero(3), std::span<const CommutatorPair<Operator>>(pairs)), Error);
}

TEST(TraceObstruction, ResidualNeverHidesTrace) {
  std::mt19937_64 rng(13);
  const auto w = standard_isometry_witness(2, 3, 1e-10);
  for (int trial = 0; trial < 5; ++trial) {
    const Operator a = testing::random_operator(15, rng);
    const auto result = decompose_element(a, w);
    EXPECT_GE(result.residual_norm, std::abs(trace(a)) / 15.0 - 1e-9);
  }
}

}  // namespace
}  // namespace cstar
