"""Core types: validation, verification, block taxonomy, degradation."""

import numpy as np
import pytest

from drtomo.model import (
    BinaryImage,
    BlockType,
    Instance,
    classify_block,
    degrade,
    make_exact_instance,
    perturb_instance,
    random_image,
    validate_instance,
    verify_solution,
)

from conftest import single_block_instance


def zero_instance(m=2, n=2):
    return Instance(
        k=2,
        epsilon=0,
        m=m,
        n=n,
        row_sums=(0,) * n,
        col_sums=(0,) * m,
        blocks=tuple((0,) * (m // 2) for _ in range(n // 2)),
        reliable=frozenset((2 * bu + 1, 2 * bv + 1) for bv in range(n // 2) for bu in range(m // 2)),
    )


class TestBinaryImage:
    def test_rejects_non_bits(self):
        with pytest.raises(ValueError):
            BinaryImage(np.array([[0, 2]]))

    def test_cartesian_addressing(self):
        img = BinaryImage.from_ones(3, 2, [(1, 1), (3, 2)])
        assert img.get(1, 1) == 1
        assert img.get(3, 2) == 1
        assert img.get(1, 2) == 0
        assert img.row_sums() == [1, 1]
        assert img.col_sums() == [1, 0, 1]

    def test_immutable(self):
        img = BinaryImage.zeros(2, 2)
        with pytest.raises(ValueError):
            img.a[0, 0] = 1

    def test_equality_and_hash(self):
        a = BinaryImage.from_ones(2, 2, [(1, 1)])
        b = BinaryImage.from_ones(2, 2, [(1, 1)])
        c = BinaryImage.from_ones(2, 2, [(2, 2)])
        assert a == b and hash(a) == hash(b)
        assert a != c


class TestValidateInstance:
    def test_zero_instance_valid(self):
        assert validate_instance(zero_instance()) == []

    def test_sum_mismatch_is_distinct_kind(self):
        inst = single_block_instance(0, (1, 0), (0, 0))
        errs = validate_instance(inst)
        assert [e.kind for e in errs] == ["sum-mismatch"]

    def test_dimension_error_for_non_multiple(self):
        inst = Instance(
            k=2, epsilon=0, m=3, n=2, row_sums=(0, 0), col_sums=(0, 0, 0),
            blocks=((0,),), reliable=frozenset(),
        )
        assert any(e.kind == "dimension" for e in validate_instance(inst))

    def test_value_range_checks(self):
        inst = single_block_instance(5, (0, 0), (0, 0))
        assert any(e.kind == "value" for e in validate_instance(inst))
        inst = Instance(
            k=2, epsilon=0, m=2, n=2, row_sums=(3, 0), col_sums=(2, 1),
            blocks=((3,),), reliable=frozenset({(1, 1)}),
        )
        assert any("row sum" in e.message for e in validate_instance(inst))

    def test_epsilon_zero_needs_full_reliability(self):
        inst = Instance(
            k=2, epsilon=0, m=2, n=2, row_sums=(0, 0), col_sums=(0, 0),
            blocks=((0,),), reliable=frozenset(),
        )
        assert any(e.kind == "reliability" for e in validate_instance(inst))

    def test_non_corner_reliable_point(self):
        inst = Instance(
            k=2, epsilon=1, m=2, n=2, row_sums=(0, 0), col_sums=(0, 0),
            blocks=((0,),), reliable=frozenset({(2, 2)}),
        )
        assert any(e.kind == "reliability" for e in validate_instance(inst))


class TestVerifySolution:
    def test_zero_against_zero(self):
        report = verify_solution(zero_instance(), BinaryImage.zeros(2, 2))
        assert report.satisfied

    def test_one_extra_one_hits_each_category_once(self):
        inst = zero_instance(4, 4)
        img = BinaryImage.from_ones(4, 4, [(2, 3)])
        report = verify_solution(inst, img)
        assert len(report.row_violations) == 1
        assert len(report.col_violations) == 1
        assert len(report.block_violations) == 1
        assert report.row_violations[0] == (3, 0, 1)
        assert report.col_violations[0] == (2, 0, 1)
        assert report.block_violations[0][0] == (1, 3)

    def test_dimension_mismatch_raises(self):
        with pytest.raises(ValueError):
            verify_solution(zero_instance(), BinaryImage.zeros(4, 4))

    def test_noisy_window(self):
        inst = single_block_instance(1, (2, 0), (1, 1), epsilon=1)
        two = BinaryImage.from_ones(2, 2, [(1, 1), (2, 1)])
        report = verify_solution(inst, two)
        assert report.satisfied  # block sum 2 sits inside [0, 2]
        exact = single_block_instance(1, (2, 0), (1, 1), epsilon=0)
        report = verify_solution(exact, two)
        assert report.block_violations and not report.row_violations


class TestClassifyBlock:
    def test_all_sixteen_patterns_round_trip(self):
        for t in BlockType:
            img = BinaryImage.from_ones(2, 2, [(1 + dx, 1 + dy) for dx, dy in t.cells])
            assert classify_block(img, (1, 1)) == t

    def test_main_diagonal_is_b33(self):
        img = BinaryImage.from_ones(4, 4, [(3, 3), (4, 4)])
        assert classify_block(img, (3, 3)) == BlockType.B33

    def test_bottom_row_pair_is_b1(self):
        img = BinaryImage.from_ones(2, 2, [(1, 1), (2, 1)])
        assert classify_block(img, (1, 1)) == BlockType.B1

    def test_empty(self):
        assert classify_block(BinaryImage.zeros(2, 2), (1, 1)) == BlockType.EMPTY

    def test_bad_corner_raises(self):
        img = BinaryImage.zeros(4, 4)
        for corner in [(2, 1), (1, 2), (5, 1), (0, 0)]:
            with pytest.raises(ValueError):
                classify_block(img, corner)

    def test_counts(self):
        assert BlockType.EMPTY.count == 0
        assert BlockType.A21.count == 1
        assert BlockType.B34.count == 2
        assert BlockType.C12.count == 3
        assert BlockType.FULL.count == 4


class TestDegrade:
    def test_all_ones(self):
        img = BinaryImage(np.ones((4, 4), dtype=np.uint8))
        gray = degrade(img, 2)
        assert gray.values == ((4, 4), (4, 4))
        assert gray.maxval == 4

    def test_single_one(self):
        img = BinaryImage.from_ones(4, 4, [(3, 4)])
        gray = degrade(img, 2)
        assert sum(map(sum, gray.values)) == 1
        assert gray.value(2, 2) == 1

    def test_divisibility_required(self):
        with pytest.raises(ValueError):
            degrade(BinaryImage.zeros(4, 4), 3)

    def test_matches_block_sums(self):
        img = random_image(8, 6, 0.5, 11)
        gray = degrade(img, 2)
        for bv in range(3):
            for bu in range(4):
                assert gray.value(bu + 1, bv + 1) == img.block_sum(2 * bu + 1, 2 * bv + 1, 2)


class TestMakeExactInstance:
    def test_zero_round_trip(self):
        img = BinaryImage.zeros(4, 4)
        inst = make_exact_instance(img, 2)
        assert inst == zero_instance(4, 4)

    def test_sums_equal_popcount(self):
        img = random_image(8, 8, 0.4, 3)
        inst = make_exact_instance(img, 2)
        assert sum(inst.row_sums) == sum(inst.col_sums) == img.popcount()

    def test_generating_image_always_verifies(self):
        for seed in range(10):
            img = random_image(6, 8, 0.5, seed)
            inst = make_exact_instance(img, 2)
            assert validate_instance(inst) == []
            assert verify_solution(inst, img).satisfied


class TestPerturbInstance:
    def base(self, seed=0):
        img = random_image(8, 8, 0.4, seed)
        inst = make_exact_instance(img, 2)
        return img, Instance(
            k=2, epsilon=1, m=8, n=8, row_sums=inst.row_sums, col_sums=inst.col_sums,
            blocks=inst.blocks, reliable=inst.reliable,
        )

    def test_fraction_zero_identity(self):
        _, inst = self.base()
        assert perturb_instance(inst, 0.0, 1) == inst

    def test_epsilon_zero_identity(self):
        img = random_image(8, 8, 0.4, 2)
        inst = make_exact_instance(img, 2)
        assert perturb_instance(inst, 1.0, 1) == inst

    def test_reproducible_and_original_still_verifies(self):
        img, inst = self.base(5)
        a = perturb_instance(inst, 0.5, 42)
        b = perturb_instance(inst, 0.5, 42)
        assert a == b
        assert len(a.reliable) == len(list(inst.corners())) - 8
        assert verify_solution(a, img).satisfied

    def test_bad_fraction_raises(self):
        _, inst = self.base()
        with pytest.raises(ValueError):
            perturb_instance(inst, 1.5, 0)


class TestRandomImage:
    def test_deterministic(self):
        assert random_image(10, 10, 0.3, 7) == random_image(10, 10, 0.3, 7)
        assert random_image(10, 10, 0.3, 7) != random_image(10, 10, 0.3, 8)

    def test_density_extremes(self):
        assert random_image(5, 5, 0.0, 0).popcount() == 0
        assert random_image(5, 5, 1.0, 0).popcount() == 25
