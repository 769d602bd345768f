from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from momentgap.arch import Architecture, ArchitectureError, Gate, hide_seek_C, hide_seek_Cprime
from momentgap.pigment import PigmentState, mix, run, trajectory


class TestMix:
    def test_two_site_mean(self):
        s = mix(PigmentState((Fraction(1), Fraction(0))), [0, 1])
        assert s.amounts == (Fraction(1, 2), Fraction(1, 2))

    def test_singleton_unchanged(self):
        s = PigmentState((Fraction(1), Fraction(2, 3)))
        assert mix(s, [1]) == s

    def test_conservation(self):
        s = PigmentState((Fraction(3, 7), Fraction(1, 3), Fraction(0)))
        assert mix(s, [0, 2]).total == s.total

    def test_empty_support(self):
        with pytest.raises(ArchitectureError):
            mix(PigmentState((Fraction(1),)), [])


class TestRun:
    def test_hide_seek_five_leaves_five_sixteenths(self):
        out = run(hide_seek_C(5), [1, 0, 0, 0, 0])
        assert out.amounts[0] == Fraction(5, 16)

    def test_censored_imbalance_is_inverse_square(self):
        out = run(hide_seek_Cprime(5), [1, 0, 0, 0, 0])
        assert out.amounts[0] - out.amounts[2] == Fraction(1, 16)

    def test_empty_architecture_is_identity(self):
        out = run(Architecture((2, 2), (), repeat=3), [1, 0])
        assert out.amounts == (Fraction(1), Fraction(0))

    def test_repeat_expands(self):
        a = Architecture((2, 2), (Gate({0, 1}),), repeat=4)
        assert run(a, [1, 0]).amounts == (Fraction(1, 2), Fraction(1, 2))

    def test_length_checked(self):
        with pytest.raises(ArchitectureError):
            run(hide_seek_C(4), [1, 0])

    def test_trajectory_steps(self):
        states = trajectory(hide_seek_C(5), [1, 0, 0, 0, 0])
        assert len(states) == 6
        assert states[-1] == run(hide_seek_C(5), [1, 0, 0, 0, 0])


class TestClosedFormSweeps:
    @pytest.mark.parametrize("n", list(range(4, 65, 6)) + [64])
    def test_full_circuit_quarter_law(self, n):
        out = run(hide_seek_C(n), [1] + [0] * (n - 1))
        # site-0 amount is 1/4 + 1/(4(n-1)), within 1/(n-1) of 1/4
        assert out.amounts[0] == Fraction(1, 4) + Fraction(1, 4 * (n - 1))
        assert abs(out.amounts[0] - Fraction(1, 4)) <= Fraction(1, n - 1)

    @pytest.mark.parametrize("n", list(range(3, 65, 5)) + [64])
    def test_censored_imbalance_exact(self, n):
        out = run(hide_seek_Cprime(n), [1] + [0] * (n - 1))
        assert out.amounts[0] - out.amounts[2] == Fraction(1, (n - 1) ** 2)


@settings(max_examples=60, deadline=None)
@given(
    amounts=st.lists(st.fractions(min_value=0, max_value=10), min_size=2, max_size=6),
    data=st.data(),
)
def test_mix_conserves_total(amounts, data):
    state = PigmentState(tuple(amounts))
    n = len(amounts)
    support = data.draw(
        st.sets(st.integers(0, n - 1), min_size=1, max_size=n)
    )
    assert mix(state, support).total == state.total
