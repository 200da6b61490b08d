import itertools
from fractions import Fraction

import pytest

from poisson_nlie.constructions import (
    DimensionBudgetError,
    direct_sum,
    iterated_bracket,
    kernel_of_adjoint,
    leibniz_tensor_functor,
    poisson_quotient_tilde,
    random_poisson_n_lie,
    skew_defect_quotient,
    skew_defect_spans,
    tensor_poisson_n,
    truncated_power_algebra,
    unital_line,
    xu_tensor,
)
from poisson_nlie.finite_algebra import (
    StructAlgebra,
    _fundamental_holds,
    abelian_algebra,
    sv_to_dense,
    verify_axioms,
)
from poisson_nlie.subspaces import Subspace

F1 = Fraction(1)


def e(i):
    return {i: F1}


def two_dim_poisson():
    """Unital 2-dim Poisson algebra with zero bracket: 1, x with x^2 = 0."""
    return StructAlgebra(2, 2, {}, {(0, 0): e(0), (0, 1): e(1)})


def line_bracket_3():
    return StructAlgebra(3, 3, {(0, 1, 2): e(0)})


class TestTensorPoissonN:
    def test_unital_line_factor_is_identity(self, hypo):
        line = StructAlgebra(1, 4, {}, {(0, 0): e(0)})
        result = tensor_poisson_n(hypo, line)
        assert result.algebra.dim == hypo.dim
        assert dict(result.algebra.bracket_entries()) == dict(hypo.bracket_entries())
        assert dict(result.algebra.product_entries()) == dict(hypo.product_entries())

    def test_zero_product_factor_kills_everything(self, hypo):
        dead = StructAlgebra(2, 4)
        result = tensor_poisson_n(hypo, dead)
        assert not dict(result.algebra.bracket_entries())
        assert not dict(result.algebra.product_entries())

    def test_nilpotent_square_factor(self, hypo):
        B = StructAlgebra(2, 4, {}, {(0, 0): e(1)})
        result = tensor_poisson_n(hypo, B)
        assert result.algebra.dim == 14
        # the constructor asserted the verification suite already
        assert verify_axioms(result.algebra).all_pass

    def test_index_bookkeeping(self, hypo):
        B = StructAlgebra(2, 4, {}, {(0, 0): e(1)})
        result = tensor_poisson_n(hypo, B)
        a = result.index(3, 0)
        b = result.index(4, 0)
        value = result.algebra.product_basis(a, b)
        assert value == {result.index(6, 1): F1}  # (e4 x f1).(e5 x f1) = e7 x f2

    def test_rejects_nonzero_bracket_factor(self, hypo):
        bad = StructAlgebra(4, 4, {(0, 1, 2, 3): e(0)})
        with pytest.raises(ValueError):
            tensor_poisson_n(hypo, bad)


class TestXuTensor:
    def test_unital_factor_is_identity(self):
        P = two_dim_poisson()
        result = xu_tensor(P, unital_line())
        assert dict(result.algebra.product_entries()) == dict(P.product_entries())
        assert dict(result.algebra.bracket_entries()) == dict(P.bracket_entries())

    def test_abelian_factors_stay_abelian(self):
        P = StructAlgebra(2, 2)
        result = xu_tensor(P, P)
        assert not dict(result.algebra.bracket_entries())
        assert not dict(result.algebra.product_entries())

    def test_two_dim_square(self):
        P = two_dim_poisson()
        result = xu_tensor(P, P)
        assert result.algebra.dim == 4
        assert verify_axioms(result.algebra).all_pass

    def test_rejects_higher_arity(self, hypo):
        with pytest.raises(ValueError):
            xu_tensor(hypo, two_dim_poisson())


class TestIteratedBracket:
    def test_abelian_stays_abelian(self):
        result = iterated_bracket(StructAlgebra(2, 2), 3)
        assert not dict(result.bracket_entries())

    def test_two_dim_lie_nesting(self):
        L = StructAlgebra(2, 2, {(0, 1): e(1)})
        result = iterated_bracket(L, 3)
        assert result.bracket_basis((0, 0, 1)) == e(1)   # [e1,[e1,e2]]
        assert result.bracket_basis((0, 1, 0)) == {1: -F1}
        assert result.bracket_basis((0, 1, 1)) == {}     # inner [e2,e2] = 0
        report = verify_axioms(result)
        assert report.fundamental
        # a repeated-argument bracket with a nonzero value breaks skewness
        assert not report.skew and report.witnesses["skew"] == (0, 0, 1)

    def test_arity_guard(self, hypo):
        with pytest.raises(ValueError):
            iterated_bracket(hypo, 3)


class TestSkewDefectQuotient:
    def test_already_skew_gives_trivial_ideal(self, hypo):
        quo = skew_defect_quotient(StructAlgebra(
            hypo.dim, hypo.arity, dict(hypo.bracket_entries()),
            dict(hypo.product_entries())))
        assert quo.ideal.is_zero()
        assert quo.algebra.dim == hypo.dim

    def test_iterated_nesting_quotient(self):
        L = StructAlgebra(2, 2, {(0, 1): e(1)})
        nested = iterated_bracket(L, 3)
        quo = skew_defect_quotient(nested)
        assert verify_axioms(quo.algebra).all_pass
        # the skew defects really are the zero coset downstairs
        for vec in skew_defect_spans(nested):
            assert quo.ideal.contains(vec)

    def test_pipeline_from_xu_square(self):
        P = two_dim_poisson()
        tensored = xu_tensor(P, P)
        nested = iterated_bracket(tensored.algebra, 3)
        quo = skew_defect_quotient(nested)
        assert verify_axioms(quo.algebra).all_pass
        assert quo.algebra.dim >= 1


class TestLeibnizTensorFunctor:
    def test_abelian_gives_zero_bracket(self):
        L = abelian_algebra(2, 3)
        result = leibniz_tensor_functor(L)
        assert not dict(result.bracket_entries())

    def test_small_instance_exhaustive(self):
        L = line_bracket_3()
        result = leibniz_tensor_functor(L)
        assert result.dim == 9
        # Leibniz identity exhaustively (the constructor already asserted it)
        for x, y, z in itertools.product(range(9), repeat=3):
            assert _fundamental_holds(result, (x,), (y, z))

    def test_kernel_of_adjoint_is_a_leibniz_ideal(self):
        L = line_bracket_3()
        tilde = leibniz_tensor_functor(L)
        ker = kernel_of_adjoint(L)
        assert 0 < ker.dim < 9
        basis = [dict((i, c) for i, c in enumerate(row) if c) for row in ker.basis]
        for kv in basis:
            for j in range(9):
                left = tilde.bracket([kv, e(j)])
                right = tilde.bracket([e(j), kv])
                assert ker.contains(sv_to_dense(left, 9))
                assert ker.contains(sv_to_dense(right, 9))

    def test_budget_guard(self, hypo):
        L = StructAlgebra(7, 4, dict(hypo.bracket_entries()))
        with pytest.raises(DimensionBudgetError):
            leibniz_tensor_functor(L, budget=100)

    def test_large_instance_sampled(self, hypo):
        L = StructAlgebra(7, 4, dict(hypo.bracket_entries()))
        result = leibniz_tensor_functor(L)  # 343-dim, sampled identity check inside
        assert result.dim == 343
        ker = kernel_of_adjoint(L)
        assert ker.dim == 343 - 10  # ad has rank 10 on this fixture
        # ideal property spot-checked through the adjoint homomorphism rule
        import random
        rng = random.Random(5)
        basis = [dict((i, c) for i, c in enumerate(row) if c) for row in ker.basis]
        for _ in range(8):
            kv = rng.choice(basis)
            j = rng.randrange(343)
            assert ker.contains(sv_to_dense(result.bracket([kv, e(j)]), 343))
            assert ker.contains(sv_to_dense(result.bracket([e(j), kv]), 343))


class TestPoissonQuotientTilde:
    def test_abelian_quotient_is_the_full_power(self):
        P = abelian_algebra(2, 3)
        quo = poisson_quotient_tilde(P)
        assert quo.algebra.dim == 4
        assert verify_axioms(quo.algebra).all_pass

    def test_small_three_lie_instance(self):
        P = line_bracket_3()
        quo = poisson_quotient_tilde(P)
        assert quo.parent.dim == 9
        report = verify_axioms(quo.algebra)
        assert report.all_pass
        # the symmetrized-bracket generators sit inside Ker(ad)
        ker = kernel_of_adjoint(P)
        defects = Subspace.from_vectors(9, skew_defect_spans(
            leibniz_tensor_functor(P, with_product=True)))
        assert ker.contains_subspace(defects)

    def test_instance_with_products(self):
        # [e2,e3,e4] = e1 with e2.e2 = e1: the bracket value annihilates
        # everything, so the Leibniz rule survives the product
        P = StructAlgebra(4, 3, {(1, 2, 3): e(0)}, {(1, 1): e(0)})
        assert verify_axioms(P).all_pass
        quo = poisson_quotient_tilde(P)
        assert verify_axioms(quo.algebra).all_pass


class TestHelpers:
    def test_truncated_power_algebra(self):
        B = truncated_power_algebra(3)
        assert B.dim == 3
        assert B.product_basis(0, 1) == e(2)  # x.x^2 = x^3
        assert B.product_basis(1, 2) == {}
        unital = truncated_power_algebra(2, unital=True)
        assert unital.product_basis(0, 0) == e(0)
        assert verify_axioms(unital).all_pass

    def test_direct_sum(self):
        P = direct_sum(line_bracket_3(), line_bracket_3())
        assert P.dim == 6
        assert P.bracket_basis((3, 4, 5)) == {3: F1}
        assert verify_axioms(P).all_pass


class TestRandomInstances:
    def test_deterministic_and_verified(self):
        for seed in range(20):
            P1, desc1 = random_poisson_n_lie(seed)
            P2, desc2 = random_poisson_n_lie(seed)
            assert desc1 == desc2 and P1 == P2
            assert P1.dim <= 6 and P1.arity == 3
            assert verify_axioms(P1).all_pass

    def test_variety(self):
        descriptions = {random_poisson_n_lie(seed)[1] for seed in range(20)}
        assert len(descriptions) >= 4
