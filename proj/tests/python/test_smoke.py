import math
import pathlib

import numpy as np
import pytest

import sda

CONFIG = pathlib.Path(__file__).resolve().parents[2] / "configs" / "default.json"


def test_penalty_of_sine():
    t = np.linspace(0.0, 1.0, 201)
    values = np.sin(2 * np.pi * t).reshape(-1, 1)
    assert abs(sda.penalty(values, 1) - 2 * math.pi**2) / (2 * math.pi**2) < 0.01


def test_eval_at_node():
    values = np.array([[0.0], [1.0], [4.0]])
    assert sda.eval(values, 0.5)[0] == 1.0
    assert sda.eval(values, 0.75)[0] == pytest.approx(2.5)


def test_fit_single_constant():
    times = np.array([0.1, 0.5, 0.9])
    targets = np.full((3, 2), 2.0)
    fit = sda.fit_single(times, targets, 3, order=2, lam=0.1, nodes=11)
    assert fit.shape == (11, 2)
    assert np.allclose(fit, 2.0)


def test_generate_and_solve():
    times, targets, labels = sda.generate(str(CONFIG), n=400)
    assert times.shape == (400,)
    assert targets.shape == (400, 2)
    res = sda.solve(times, targets, k=2, nodes=51, seed=1)
    assert res["converged"]
    assert len(res["tracks"]) == 2
    trace = res["objective_trace"]
    assert all(b <= a + 1e-10 for a, b in zip(trace, trace[1:]))
    again = sda.solve(times, targets, k=2, nodes=51, seed=1)
    assert again["objective_trace"] == trace
    assert sda.objective_empirical(res["tracks"], 2, times, targets, 1e-3) == pytest.approx(res["objective"])


def test_errors_map_to_exceptions():
    with pytest.raises(sda.SdaError):
        sda.penalty(np.zeros((3, 1)), 3)
    with pytest.raises(ValueError):
        sda.solve(np.array([0.5]), np.array([[1.0]]), k=2)
