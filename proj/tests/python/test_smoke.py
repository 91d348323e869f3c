import math

import numpy as np
import pytest

import symkawa


def test_expression_helpers():
    assert symkawa.normalize("(u+1)^2 - u^2 - 2*u - 1") == "0"
    assert symkawa.diff("t^3", "t") == "3*t^2"
    assert symkawa.is_zero("sin(x)^2 + cos(x)^2 - 1") == "PROBABLY_ZERO"
    assert symkawa.evaluate("arctan(t)", {"t": 1.0}) == pytest.approx(math.pi / 4, abs=1e-12)
    with pytest.raises(symkawa.InputError):
        symkawa.normalize("u + * x")


def test_symmetry_and_tables():
    pde = {"class": "nonlinear-gauged", "f": "u^2", "beta": "lambda", "sigma": "delta"}
    assert symkawa.is_symmetry(pde, "1; 0; 0") == "YES"
    assert symkawa.is_symmetry({"f": "u^2", "beta": "1", "sigma": "t"}, "1; 0; 0") == "NO"
    report = symkawa.verify_case(2, 4)
    assert report["pass"] and report["dimension"] == 3
    assert len(symkawa.table_cases(1)) == 10


def test_reducibility():
    r = symkawa.reducible({"f": "u^2", "alpha": "1", "beta": "1", "sigma": "t"})
    assert not r["reducible"]
    assert ("(σ/α)_t", "1", "NONZERO") in r["conditions"]


def test_solver_and_orbit():
    pde = {"class": "linear-gauged", "beta": "1", "sigma": "1"}
    L = 20 * math.pi
    gauss = lambda x: math.exp(-((x - L / 2) ** 2))
    times, values, length = symkawa.solve(pde, gauss, N=128)
    assert values.shape == (2, 128)
    assert np.isclose(values.sum(), 2 * sum(gauss(j * L / 128) for j in range(128)), rtol=1e-10)
    residual, drift = symkawa.orbit_residual(pde, gauss)
    assert residual < 1e-6 and drift < 1e-10
    perturbed = dict(pde, sigma="11/10")
    assert symkawa.orbit_residual(pde, gauss, second_leg=perturbed)[0] > 1e-3


def test_cli_in_process():
    code, out, _ = symkawa.run("verify-table", "--table", "2")
    assert code == 0 and "5/5 cases pass" in out
    assert symkawa.run("frobnicate")[0] == 2
