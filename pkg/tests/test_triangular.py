import numpy as np
import pytest

from conftest import random_hybrid_instance, random_nilpotent_instance

from kerneltri import (
    FiniteRankOperator,
    PreconditionError,
    TheoremViolationError,
    TriangularizationCertificate,
    assert_nilpotent_compressions,
    build_space,
    densify,
    eigenatom_peel,
    factor,
    increasing_spectrum_block_form,
    kernel_operator,
    max_kernel_projection,
    nilpotent_block_form,
    scc_triangularize,
    sharpness_example,
    sharpness_example_factors,
    verify_certificate,
    volterra_linear,
)


def atomic_operator(matrix):
    matrix = np.asarray(matrix, dtype=complex)
    return kernel_operator(build_space(0, range(2, matrix.shape[0] + 2)), matrix)


def finite_rank(matrix):
    return factor(atomic_operator(matrix))


class TestSccTriangularize:
    def test_already_triangular_gives_singletons(self):
        mat = np.zeros((3, 3))
        mat[0, 1] = 1.0
        mat[2, 2] = 5.0
        cert = scc_triangularize(atomic_operator(mat))
        assert cert.kind == "scc"
        assert all(len(b) == 1 for b in cert.blocks)
        assert cert.num_blocks == 3
        assert cert.residual == 0.0
        assert cert.multiplicity_free

    def test_all_ones_is_one_block(self):
        cert = scc_triangularize(atomic_operator(np.ones((3, 3))))
        assert cert.blocks == ((0, 1, 2),)
        assert cert.diagonal[0].kind == "irreducible"

    def test_topological_order_respects_arcs(self):
        # 2 -> 0 -> 1 forces block order (2,), (0,), (1,)
        mat = np.zeros((3, 3))
        mat[2, 0] = mat[0, 1] = 1.0
        cert = scc_triangularize(atomic_operator(mat))
        assert cert.blocks == ((2,), (0,), (1,))

    def test_tie_break_by_smallest_point(self):
        cert = scc_triangularize(atomic_operator(np.zeros((4, 4))))
        assert cert.blocks == ((0,), (1,), (2,), (3,))

    def test_two_cycle_merges(self):
        mat = np.zeros((3, 3))
        mat[0, 1] = mat[1, 0] = 1.0
        mat[1, 2] = 1.0
        cert = scc_triangularize(atomic_operator(mat))
        assert cert.blocks == ((0, 1), (2,))
        assert not cert.multiplicity_free

    def test_diagnosis_classes(self):
        space = build_space(1, [2])
        kernel = np.zeros((2, 2), dtype=complex)
        kernel[1, 1] = 3.0
        cert = scc_triangularize(kernel_operator(space, kernel))
        kinds = {d.kind for d in cert.diagonal}
        assert kinds == {"zero", "scalar"}
        scalar = next(d for d in cert.diagonal if d.kind == "scalar")
        assert scalar.value == pytest.approx(3.0)

    def test_eigenvalues_preserved_by_reordering(self):
        rng = np.random.default_rng(3)
        mat = rng.standard_normal((6, 6)) * (rng.random((6, 6)) < 0.4)
        K = atomic_operator(mat)
        cert = scc_triangularize(K)
        perm = [i for b in cert.blocks for i in b]
        reordered = mat[np.ix_(perm, perm)]
        a = np.sort_complex(np.linalg.eigvals(mat))
        b = np.sort_complex(np.linalg.eigvals(reordered))
        np.testing.assert_allclose(a, b, atol=1e-8)

    def test_verifier_accepts(self):
        rng = np.random.default_rng(4)
        mat = rng.standard_normal((5, 5)) * (rng.random((5, 5)) < 0.4)
        K = atomic_operator(mat)
        assert verify_certificate(K, scc_triangularize(K)).passed


class TestMaxKernelProjection:
    def test_sharpness_example_sides(self):
        kfr = sharpness_example_factors(2)
        assert max_kernel_projection(kfr, side="right").indices() == (0,)
        assert max_kernel_projection(kfr, side="left").indices() == (4,)

    def test_zero_kernel_takes_everything(self):
        space = build_space(0, [2, 3])
        kfr = FiniteRankOperator(
            space=space, F=np.zeros((2, 0)) + 0j, G=np.zeros((2, 0)) + 0j
        )
        assert max_kernel_projection(kfr).size == 2

    def test_invalid_side(self):
        with pytest.raises(PreconditionError):
            max_kernel_projection(sharpness_example_factors(1), side="middle")


class TestAssertNilpotentCompressions:
    def test_strictly_triangular_passes(self):
        assert_nilpotent_compressions(atomic_operator(np.triu(np.ones((4, 4)), 1)))

    def test_diagonal_entry_fails(self):
        with pytest.raises(PreconditionError):
            assert_nilpotent_compressions(atomic_operator(np.diag([1.0, 0.0])))

    def test_hidden_cycle_fails(self):
        # zero diagonal but a 2-cycle: compression on {0,1} has radius 1
        with pytest.raises(PreconditionError):
            assert_nilpotent_compressions(atomic_operator([[0, 1], [1, 0]]))

    def test_large_space_sampled_path(self):
        assert_nilpotent_compressions(volterra_linear(16))


class TestNilpotentBlockForm:
    def test_zero_operator_single_block(self):
        kfr = FiniteRankOperator(
            space=build_space(0, [2, 3]),
            F=np.zeros((2, 0)) + 0j,
            G=np.zeros((2, 0)) + 0j,
        )
        cert = nilpotent_block_form(kfr)
        assert cert.num_blocks == 1
        assert cert.rank == 0

    def test_rank_one_disjoint_supports(self):
        # k = f(x) g(y) with f on {1}, g on {0}: the only arc is 1 -> 0,
        # so point 1 must come first (its column is zero)
        mat = np.zeros((2, 2))
        mat[1, 0] = 1.0
        cert = nilpotent_block_form(finite_rank(mat))
        assert cert.rank == 1
        assert cert.blocks == ((1,), (0,))
        assert cert.diagonal[0].kind == "zero"
        assert cert.residual == 0.0

    def test_planted_three_block_chain(self):
        # strictly upper block form with ranks adding to 2
        mat = np.zeros((4, 4))
        mat[0, 2] = mat[1, 2] = 1.0
        mat[2, 3] = 1.0
        cert = nilpotent_block_form(finite_rank(mat))
        assert cert.rank == 2
        assert cert.num_blocks <= 3
        assert cert.residual == 0.0

    def test_random_instances_verify(self):
        rng = np.random.default_rng(77)
        for _ in range(25):
            kfr, _ = random_nilpotent_instance(rng)
            cert = nilpotent_block_form(kfr)
            assert cert.num_blocks <= cert.rank + 1
            report = verify_certificate(densify(kfr), cert)
            assert report.passed, report.failures()

    def test_rejects_non_nilpotent_input(self):
        with pytest.raises(PreconditionError):
            nilpotent_block_form(finite_rank(np.diag([1.0, 0.0])))


class TestEigenatomPeel:
    def test_diagonal_atoms(self):
        K = atomic_operator(np.diag([2.0, 3.0]))
        peeled, G = eigenatom_peel(K)
        assert [(j, z.real) for j, z in peeled] == [(0, 2.0), (1, 3.0)]
        np.testing.assert_array_equal(G.kernel_values, np.zeros((2, 2)))

    def test_cells_do_not_peel(self):
        K = volterra_linear(8)
        peeled, G = eigenatom_peel(K)
        assert peeled == []
        np.testing.assert_array_equal(G.kernel_values, K.kernel_values)

    def test_mismatch_raises_with_details(self):
        # cell block holds eigenvalue 1 that no atom diagonal accounts for
        space = build_space(1, [2])
        kernel = np.array([[1.0, 0.0], [0.0, 0.0]], dtype=complex)
        with pytest.raises(TheoremViolationError) as err:
            eigenatom_peel(kernel_operator(space, kernel))
        assert "multiset" in str(err.value)

    def test_peel_order_follows_atom_ids(self):
        space = build_space(0, [9, 2])  # atom ids out of order
        K = kernel_operator(space, np.diag([5.0, 7.0]).astype(complex))
        peeled, _ = eigenatom_peel(K)
        # atom id 2 (point 1) precedes atom id 9 (point 0)
        assert [j for j, _ in peeled] == [1, 0]

    def test_random_hybrid_instances(self):
        rng = np.random.default_rng(88)
        for _ in range(25):
            K, lambdas = random_hybrid_instance(rng)
            peeled, G = eigenatom_peel(K)
            assert {j for j, _ in peeled} == set(lambdas)
            for j, z in peeled:
                assert z == pytest.approx(lambdas[j])
            if lambdas:
                assert np.abs(np.diag(G.kernel_values)[sorted(lambdas)]).max() == 0.0


class TestIncreasingSpectrumBlockForm:
    def test_scalar_atom_plus_nilpotent_cells(self):
        space = build_space(2, [2])
        kernel = np.zeros((3, 3), dtype=complex)
        kernel[0, 1] = 1.0
        kernel[2, 2] = 2.0
        K = kernel_operator(space, kernel)
        cert = increasing_spectrum_block_form(K)
        assert cert.kind == "increasing_spectrum"
        assert cert.num_blocks <= 2 * cert.rank + 1
        scalars = [d for d in cert.diagonal if d.kind == "scalar"]
        assert len(scalars) == 1 and scalars[0].value == pytest.approx(2.0)
        assert verify_certificate(K, cert).passed

    def test_sharpness_example_needs_full_bound(self):
        for n in (1, 2, 3):
            K = sharpness_example(n)
            cert = increasing_spectrum_block_form(K)
            assert cert.rank == n
            assert cert.num_blocks == 2 * n + 1
            assert cert.residual == 0.0
            # diagonal pattern alternates zero / scalar 1
            kinds = [d.kind for d in cert.diagonal]
            assert kinds == ["zero", "scalar"] * n + ["zero"]
            for d in cert.diagonal:
                if d.kind == "scalar":
                    assert d.value == pytest.approx(1.0)
            assert verify_certificate(K, cert).passed

    def test_random_hybrid_instances_verify(self):
        rng = np.random.default_rng(99)
        for _ in range(25):
            K, _ = random_hybrid_instance(rng)
            cert = increasing_spectrum_block_form(K)
            assert cert.num_blocks <= 2 * cert.rank + 1
            report = verify_certificate(K, cert)
            assert report.passed, report.failures()

    def test_rejects_unpeelable_spectrum(self):
        with pytest.raises(TheoremViolationError):
            increasing_spectrum_block_form(
                kernel_operator(build_space(1), np.array([[1.0 + 0j]]))
            )


class TestVerifyCertificate:
    def test_swapped_blocks_fail_residual(self):
        K = sharpness_example(2)
        cert = increasing_spectrum_block_form(K)
        tampered = TriangularizationCertificate(
            kind=cert.kind,
            blocks=tuple(reversed(cert.blocks)),
            diagonal=cert.diagonal,
            rank=cert.rank,
            bound=cert.bound,
            residual=cert.residual,
            tol=cert.tol,
            multiplicity_free=cert.multiplicity_free,
        )
        report = verify_certificate(K, tampered)
        assert not report.passed
        assert not report.checks["residual"].passed

    def test_non_partition_fails_fast(self):
        K = sharpness_example(1)
        cert = scc_triangularize(K)
        tampered = TriangularizationCertificate(
            kind="scc",
            blocks=cert.blocks[:-1],
            diagonal=cert.diagonal,
            rank=None,
            bound=None,
            residual=0.0,
            tol=cert.tol,
            multiplicity_free=False,
        )
        report = verify_certificate(K, tampered)
        assert not report.checks["partition"].passed
        assert list(report.checks) == ["partition"]

    def test_single_block_cert_always_triangular(self):
        rng = np.random.default_rng(12)
        K = atomic_operator(rng.standard_normal((4, 4)))
        cert = TriangularizationCertificate(
            kind="scc",
            blocks=(tuple(range(4)),),
            diagonal=(),
            rank=None,
            bound=None,
            residual=0.0,
            tol=1e-10,
            multiplicity_free=False,
        )
        assert verify_certificate(K, cert).passed

    def test_wrong_block_count_bound(self):
        # claim nilpotent_rank kind on a partition into singletons of a
        # rank-1 operator: 4 blocks > rank+1 = 2
        mat = np.zeros((4, 4))
        mat[0, 3] = 1.0
        K = atomic_operator(mat)
        cert = TriangularizationCertificate(
            kind="nilpotent_rank",
            blocks=((0,), (1,), (2,), (3,)),
            diagonal=(),
            rank=1,
            bound=2,
            residual=0.0,
            tol=1e-8,
            multiplicity_free=True,
        )
        report = verify_certificate(K, cert)
        assert not report.checks["block_count_bound"].passed

    def test_round_trip_through_dict(self):
        K = sharpness_example(2)
        cert = increasing_spectrum_block_form(K)
        again = TriangularizationCertificate.from_dict(cert.to_dict())
        assert again == cert
        assert verify_certificate(K, again).passed
