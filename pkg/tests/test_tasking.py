import numpy as np
import pytest

from anyframe import TaskKind, classify_task, convert_prediction, make_task_channel
from anyframe.errors import InvalidInputError


def test_unit_interval_is_interpolation_inclusive():
    for t in (0.0, 0.25, 0.5, 1.0):
        assert classify_task(t) is TaskKind.INTERPOLATION


def test_outside_unit_interval_is_prediction():
    for t in (-3.0, -0.001, 1.001, 2.0, 4.0):
        assert classify_task(t) is TaskKind.PREDICTION


def test_classify_rejects_nonfinite():
    with pytest.raises(InvalidInputError):
        classify_task(float("nan"))


def test_task_channel_planes():
    interp = make_task_channel(TaskKind.INTERPOLATION, 3, 4)
    pred = make_task_channel(TaskKind.PREDICTION, 3, 4)
    assert interp.shape == (3, 4) and pred.shape == (3, 4)
    assert not interp.any()
    assert (pred == 1.0).all()
    assert interp.dtype == np.float64


def test_convert_leaves_forward_times_alone():
    a = np.zeros((2, 2))
    b = np.ones((2, 2))
    for t in (0.0, 0.5, 1.0, 2.0, 4.0):
        i0, i1, t2, converted = convert_prediction(a, b, t)
        assert i0 is a and i1 is b
        assert t2 == t
        assert converted is False


def test_convert_rewrites_backward_prediction():
    a = np.zeros((2, 2))
    b = np.ones((2, 2))
    i0, i1, t2, converted = convert_prediction(a, b, -1.0)
    assert i0 is b and i1 is a    # inputs swap
    assert t2 == 2.0              # t -> 1 - t
    assert converted is True
    _, _, t3, _ = convert_prediction(a, b, -0.5)
    assert t3 == 1.5


def test_convert_rejects_nonfinite():
    with pytest.raises(InvalidInputError):
        convert_prediction(np.zeros((2, 2)), np.zeros((2, 2)), float("inf"))
