"""Tests for surrogate base module."""

import numpy as np
import pytest

from therapy_saga.surrogates.base import TargetScaling, is_constant


def test_target_scaling_standardizes() -> None:
    """Forward scaling gives zero mean and unit variance."""
    y = np.array([10.0, 12.0, 17.0, 21.0])

    z = TargetScaling.fit(y).forward(y)

    assert z.mean() == pytest.approx(0.0, abs=1e-12)
    assert z.std() == pytest.approx(1.0)


def test_target_scaling_inverse_recovers_targets() -> None:
    """Inverse scaling maps standardized values back."""
    y = np.array([3.0, -1.0, 8.0])
    scaling = TargetScaling.fit(y)

    np.testing.assert_allclose(scaling.inverse(scaling.forward(y)), y)


def test_target_scaling_guards_constant_targets() -> None:
    """Constant targets keep a unit std."""
    scaling = TargetScaling.fit([5.0, 5.0, 5.0])

    assert scaling.mean == 5.0
    assert scaling.std == 1.0


def test_is_constant() -> None:
    """Detects constant and varying targets."""
    assert is_constant([2.0, 2.0])
    assert not is_constant([2.0, 2.5])
