"""Group analysis of variable-coefficient generalized Kawahara equations."""

import json as _json

from . import _symkawa
from ._symkawa import Error, FormBroken, InputError, commutator, diff, evaluate, is_zero, normalize, table_cases

__version__ = _symkawa.__version__


def _pde(pde):
    return pde if isinstance(pde, str) else _json.dumps(pde)


def is_symmetry(pde, vf, seed=0):
    """Verdict "YES", "NO" or "PROBABLY" for the field "tau; xi; eta"."""
    return _symkawa.is_symmetry(_pde(pde), vf, seed)


def invariance_residual(pde, vf):
    return _symkawa.invariance_residual(_pde(pde), vf)


def verify_case(table, case, params=None):
    return _symkawa.verify_case(table, case, {k: str(v) for k, v in (params or {}).items()})


def reducible(pde):
    return _symkawa.reducible(_pde(pde))


def solve(pde, ic, **grid):
    """Returns (times, values[len(times), N], L)."""
    return _symkawa.solve(_pde(pde), ic, **grid)


def orbit_residual(pde, ic, second_leg=None, **options):
    """Returns (relative residual, mass drift)."""
    return _symkawa.orbit_residual(_pde(pde), ic, second_leg=_pde(second_leg) if second_leg else "", **options)


def run(*args):
    """Runs the command line tool in-process; returns (exit code, stdout, stderr)."""
    return _symkawa.run([str(a) for a in args])


__all__ = [
    "Error",
    "FormBroken",
    "InputError",
    "commutator",
    "diff",
    "evaluate",
    "invariance_residual",
    "is_symmetry",
    "is_zero",
    "normalize",
    "orbit_residual",
    "reducible",
    "run",
    "solve",
    "table_cases",
    "verify_case",
]
