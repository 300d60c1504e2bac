"""Change functions of the ABC index under the tree transformations, and tools to study them.

Every function is a plain real function of the degrees it mentions, so it
can be swept over real or integer grids with numpy. Around them sit the
numeric tools the threshold arguments need: root isolation by bisection,
analytic limits along an unbounded degree, grid sign certification,
lower envelopes of two functions, and the two parameter tables.

Limits use ``f(a, t) -> 1/sqrt(a)`` and ``f(t, 4) = 1/2 + 1/(2t) + O(1/t^2)``
as ``t -> inf``; terms of the form ``t * (f(t + s, a) - f(t, a))`` vanish.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from .errors import DomainError

ROOT_TOL = 1e-9
F21 = math.sqrt(0.5)  # f(2, 1), and f(2, b) for every b


def f(a, b):
    """Vectorized ``sqrt((a + b - 2) / (a b))``; domain checks live in :func:`eval_g`."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return np.sqrt((a + b - 2.0) / (a * b))


def _ceil_half(dx):
    return np.ceil((np.asarray(dx, dtype=float) - 1.0) / 2.0)


def _floor_half(dx):
    return np.floor((np.asarray(dx, dtype=float) - 1.0) / 2.0)


# -- change functions --------------------------------------------------------


def g1_prop(dz, delta, dy):
    """Moving one B_3 branch from x to its sibling y, with d(x) = d(y) + delta."""
    dx = dy + delta
    return (-f(dz, dx) + f(dz, dx - 1)
            - f(dz, dy) + f(dz, dy + 1)
            + (dx - 2) * (-f(dx, 4) + f(dx - 1, 4))
            - f(dx, 4) + f(dy + 1, 4)
            + (dy - 1) * (-f(dy, 4) + f(dy + 1, 4)))


def g2_prop(dy):
    """``g1_prop`` at its maximum over the siblings' admissible configuration, delta = 2."""
    return (-f(dy + 2, dy + 2) + f(dy + 2, dy + 1)
            - f(dy + 2, dy) + f(dy + 2, dy + 1)
            + dy * (-f(dy + 2, 4) + f(dy + 1, 4))
            - f(dy + 2, 4) + f(dy + 1, 4)
            + (dy - 1) * (-f(dy, 4) + f(dy + 1, 4)))


def g1_case1(dx, dy, dxi: Iterable[float]):
    """Bound for splitting x's children with the P_3 vertex (actual sibling degrees ``dxi``).

    The term of y's parent edge is left out, which is what makes this a bound.
    """
    c, fl = _ceil_half(dx), _floor_half(dx)
    dxi = np.asarray(list(dxi), dtype=float)
    return (-f(dy, dx) + f(dy + 1, c + 1)
            - F21 + f(dy + 1, fl + 1)
            + np.sum(-f(dy, dxi) + f(dy + 1, dxi))
            + c * (-f(dx, 4) + f(c + 1, 4))
            + fl * (-f(dx, 4) + f(fl + 1, 4)))


def g1o(dx, dy):
    return (-f(dy, dx) + f(dy + 1, dx / 2 + 0.5)
            - F21 + f(dy + 1, dx / 2 + 0.5)
            + (dy - 2) * (-f(dy, dx) + f(dy + 1, dx))
            + (dx - 1) * (-f(dx, 4) + f(dx / 2 + 0.5, 4)))


def g1e(dx, dy):
    return (-f(dy, dx) + f(dy + 1, dx / 2 + 1)
            - F21 + f(dy + 1, dx / 2)
            + (dy - 2) * (-f(dy, dx) + f(dy + 1, dx))
            + (dx / 2) * (-f(dx, 4) + f(dx / 2 + 1, 4))
            + (dx / 2 - 1) * (-f(dx, 4) + f(dx / 2, 4)))


def g1_parity(dx, dy):
    """``g1e`` for even integer ``dx``, ``g1o`` for odd."""
    dx = np.asarray(dx, dtype=float)
    return np.where(np.mod(dx, 2) == 0, g1e(dx, dy), g1o(dx, dy))


def t2_change(dx, dy, dw, others: Iterable[float]):
    """Exact change when w's children move to x; ``others`` are y's remaining neighbours."""
    s = dx + dw - 1
    others = np.asarray(list(others), dtype=float)
    return (np.sum(-f(dy, others) + f(dy - 1, others))
            - f(dy, dx) + f(dy - 1, s)
            - f(dy, dw) + f(5, 2)
            - f(dx, 4) + f(s, 5)
            + (dw - 1) * (-f(dw, 4) + f(s, 4))
            + (dx - 2) * (-f(dx, 4) + f(s, 4)))


def g2_case1(dx, dy):
    """Worst case of ``t2_change``: d(y_p) -> inf, d(x_i) = d(w) = d(x) + 1."""
    return (-1 / np.sqrt(dy) + 1 / np.sqrt(dy - 1)
            + (dy - 3) * (-f(dy, dx + 1) + f(dy - 1, dx + 1))
            - f(dy, dx) + f(dy - 1, 2 * dx - 1)
            - f(dy, dx + 1) + f(5, 2)
            - f(dx, 4) + f(2 * dx - 1, 5)
            + (2 * dx - 3) * (-f(dx, 4) + f(2 * dx - 1, 4)))


def g12(dx, dz, dxi, k):
    c, fl = _ceil_half(dx), _floor_half(dx)
    return (-f(dz, dx) + f(dz + 1, c + 1)
            - F21 + f(dz + 1, fl + 1)
            + (k - 1) * (-f(dz, dxi) + f(dz + 1, dxi))
            + (dz - k) * (-f(dz, 4) + f(dz + 1, 4))
            + c * (-f(dx, 4) + f(c + 1, 4))
            + fl * (-f(dx, 4) + f(fl + 1, 4)))


def g22(dx, dz, dxi, k):
    """Merging x into its big sibling x_{k-1}; every big sibling has degree ``dxi``."""
    s = dxi + dx - 1
    return ((k - 2) * (-f(dz, dxi) + f(dz - 1, dxi))
            + (dz - k) * (-f(dz, 4) + f(dz - 1, 4))
            - f(dz, dxi) + f(dz - 1, s)
            - f(dz, dx) + f(5, 2)
            - f(dx, 4) + f(s, 5)
            + (dxi - 1) * (-f(dxi, 4) + f(s, 4))
            + (dx - 2) * (-f(dx, 4) + f(s, 4)))


def g3(dx, dz):
    s = dz + dx - 2
    return ((dx - 2) * (-f(dx, 4) + f(s, 4))
            - f(dx, 4) + f(s, 5)
            - f(dz, dx) + f(5, 2)
            + (dz - 1) * (-f(dz, 4) + f(s, 4)))


def t4_targets(dx, dz):
    """Degrees of x, u and z after the three-way redistribution."""
    s = np.asarray(dx, dtype=float) + dz - 2
    return 3 * s / 10 + 1, 3 * s / 10 + 1, 4 * s / 10 + 2


def g41(dx, dz):
    nx_, nu, nz = t4_targets(dx, dz)
    return (-f(dx, dz) + f(nx_, nz)
            - F21 + f(nu, nz)
            + (nx_ - 1) * (-f(dx, 4) + f(nx_, 4))
            + (dx - nx_) * (-f(dx, 4) + f(nu, 4))
            + (nz - 2) * (-f(dz, 4) + f(nz, 4))
            + (dz - nz + 1) * (-f(dz, 4) + f(nu, 4)))


def g42(dx, dz):
    nx_, nu, nz = t4_targets(dx, dz)
    return (-f(dx, dz) + f(nx_, nz)
            - F21 + f(nu, nz)
            + (dx - 1) * (-f(dx, 4) + f(nx_, 4))
            + (nx_ - dx) * (-f(dz, 4) + f(nx_, 4))
            + (nz - 2) * (-f(dz, 4) + f(nz, 4))
            + (nu - 1) * (-f(dz, 4) + f(nu, 4)))


def g5(dx, dz):
    return (-f(dz, dx) + f(dz - 1, dx + 1)
            - f(dz, 4) + f(dx + 1, 4)
            + (dx - 1) * (-f(dx, 4) + f(dx + 1, 4))
            + (dz - 2) * (-f(dz, 4) + f(dz - 1, 4)))


def _g6(dz, hi, lo):
    return (hi * (-f(dz, 4) + f(hi + 1, 4))
            + lo * (-f(dz, 4) + f(lo + 1, 4))
            - F21 + f(hi + 1, lo + 1))


def g6(dz):
    """Splitting the centre of an improper Kragujevac tree (integer ceil/floor halves)."""
    dz = np.asarray(dz, dtype=float)
    return _g6(dz, np.ceil(dz / 2), np.floor(dz / 2))


def g6_even(dz):
    dz = np.asarray(dz, dtype=float)
    return _g6(dz, dz / 2, dz / 2)


def g6_odd(dz):
    dz = np.asarray(dz, dtype=float)
    return _g6(dz, (dz + 1) / 2, (dz - 1) / 2)


def appendix_g030(x, y, dx, dy):
    return -f(x, y) + f(x + dx, y - dy)


def appendix_g030_2(x, y, dx, dy):
    return -f(x, y) + f(x - dx, y + dy)


def appendix_g040(x):
    return (x - 2) * (-f(x, 4) + f(x - 1, 4))


def appendix_g050(x, c):
    return (x - 1) * (-f(x, 4) + f(x + c - 1, 4))


# -- analytic limits ---------------------------------------------------------


def _inv(a):
    return 1.0 / np.sqrt(np.asarray(a, dtype=float))


def _lim_g1o_dy(dx):
    return -_inv(dx) + 2 * _inv(dx / 2 + 0.5) - F21 + (dx - 1) * (-f(dx, 4) + f(dx / 2 + 0.5, 4))


def _lim_g1e_dy(dx):
    return (-_inv(dx) + _inv(dx / 2 + 1) + _inv(dx / 2) - F21
            + (dx / 2) * (-f(dx, 4) + f(dx / 2 + 1, 4))
            + (dx / 2 - 1) * (-f(dx, 4) + f(dx / 2, 4)))


def _lim_g1_parity_dy(dx):
    dx = np.asarray(dx, dtype=float)
    return np.where(np.mod(dx, 2) == 0, _lim_g1e_dy(dx), _lim_g1o_dy(dx))


def _lim_g2_case1_dy(dx):
    return (-_inv(dx) + _inv(2 * dx - 1)
            - _inv(dx + 1) + f(5, 2)
            - f(dx, 4) + f(2 * dx - 1, 5)
            + (2 * dx - 3) * (-f(dx, 4) + f(2 * dx - 1, 4)))


def _lim_g1_prop_dz(delta, dy):
    dx = dy + delta
    return (-_inv(dx) + _inv(dx - 1) - _inv(dy) + _inv(dy + 1)
            + (dx - 2) * (-f(dx, 4) + f(dx - 1, 4))
            - f(dx, 4) + f(dy + 1, 4)
            + (dy - 1) * (-f(dy, 4) + f(dy + 1, 4)))


def _lim_g12_dz(dx, dxi=None, k=None):
    # the (k-1) and (dz-k) sums are O(dz) terms of size O(1/dz^2)
    c, fl = _ceil_half(dx), _floor_half(dx)
    return (-_inv(dx) + _inv(c + 1) - F21 + _inv(fl + 1)
            + c * (-f(dx, 4) + f(c + 1, 4))
            + fl * (-f(dx, 4) + f(fl + 1, 4)))


def _lim_g22_dz(dx, dxi, k=None):
    s = dxi + dx - 1
    return (-_inv(dxi) + _inv(s) - _inv(dx) + f(5, 2)
            - f(dx, 4) + f(s, 5)
            + (dxi - 1) * (-f(dxi, 4) + f(s, 4))
            + (dx - 2) * (-f(dx, 4) + f(s, 4)))


def _lim_g3_dz(dx):
    return ((dx - 2) * (-f(dx, 4) + 0.5)
            - f(dx, 4) + _inv(5)
            - _inv(dx) + f(5, 2))


def _lim_g42_dz(dx):
    # d'(x), d'(u), d'(z) grow like 0.3, 0.3, 0.4 times d(z); with f(t, 4) - 1/2 ~ 1/(2t)
    # the three redistribution sums tend to (1-0.3)/2, (1-0.4)/2 and (1-0.3)/2
    return (-_inv(dx) - F21
            + (dx - 1) * (-f(dx, 4) + 0.5)
            + 0.35 + 0.30 + 0.35)


def _lim_g5_dz(dx):
    return (-_inv(dx) + _inv(dx + 1)
            - 0.5 + f(dx + 1, 4)
            + (dx - 1) * (-f(dx, 4) + f(dx + 1, 4)))


def _lim_g6(_=None):
    # hi, lo ~ dz/2: dz * (f(dz/2 + 1, 4) - f(dz, 4)) -> 1 - 1/2
    return np.float64(0.5 - F21)


# -- registry ----------------------------------------------------------------


@dataclass(frozen=True)
class GFun:
    name: str
    func: Callable
    params: tuple
    domain: Callable  # dict of arrays -> (mask, description)
    limits: dict = field(default_factory=dict)  # axis -> callable(**other params)
    label: str = ""

    @property
    def arity(self) -> int:
        return len(self.params)

    def __call__(self, *args, **kwargs):
        return self.func(*args, **kwargs)


def _dom(*conds):
    def check(p):
        mask = np.ones(np.broadcast(*[np.asarray(v) for v in p.values()]).shape, dtype=bool)
        texts = []
        for text, fn in conds:
            mask = mask & np.asarray(fn(p), dtype=bool)
            texts.append(text)
        return mask, "; ".join(texts)
    return check


def _t4_dom(which):
    def cond(p):
        nx_, nu, nz = t4_targets(p["dx"], p["dz"])
        ok = (p["dx"] >= 1) & (p["dz"] >= 1)
        if which == "g41":
            return ok & (nx_ < p["dx"]) & (nz <= p["dz"] + 1)
        return ok & (nx_ >= p["dx"])
    return cond


REGISTRY = {}


def _register(name, func, params, domain, limits=None, label=""):
    REGISTRY[name] = GFun(name, func, tuple(params), domain, dict(limits or {}), label)


_register("g1_prop", g1_prop, ("dz", "delta", "dy"),
          _dom(("dz >= 1", lambda p: p["dz"] >= 1), ("delta >= 0", lambda p: p["delta"] >= 0),
               ("dy + delta >= 2", lambda p: p["dy"] + p["delta"] >= 2), ("dy >= 1", lambda p: p["dy"] >= 1)),
          {"dz": _lim_g1_prop_dz}, "change under T (one B_3 moved between siblings)")
_register("g2_prop", g2_prop, ("dy",), _dom(("dy >= 1", lambda p: p["dy"] >= 1)),
          label="g1_prop at dz = dx = dy + 2")
_register("g1o", g1o, ("dx", "dy"),
          _dom(("dx >= 1", lambda p: p["dx"] >= 1), ("dy >= 1", lambda p: p["dy"] >= 1)),
          {"dy": _lim_g1o_dy}, "T1 bound, odd d(x)")
_register("g1e", g1e, ("dx", "dy"),
          _dom(("dx >= 2", lambda p: p["dx"] >= 2), ("dy >= 1", lambda p: p["dy"] >= 1)),
          {"dy": _lim_g1e_dy}, "T1 bound, even d(x)")
_register("g1_parity", g1_parity, ("dx", "dy"),
          _dom(("dx >= 2", lambda p: p["dx"] >= 2), ("dy >= 1", lambda p: p["dy"] >= 1)),
          {"dy": _lim_g1_parity_dy}, "g1e or g1o by parity of d(x)")
_register("g2_case1", g2_case1, ("dx", "dy"),
          _dom(("dx >= 1", lambda p: p["dx"] >= 1), ("dy >= 2", lambda p: p["dy"] >= 2)),
          {"dy": _lim_g2_case1_dy}, "T2 bound with d(y_p) -> inf")
_register("g12", g12, ("dx", "dz", "dxi", "k"),
          _dom(("dx >= 2", lambda p: p["dx"] >= 2), ("dxi >= 1", lambda p: p["dxi"] >= 1),
               ("1 <= k <= dz", lambda p: (p["k"] >= 1) & (p["k"] <= p["dz"]))),
          {"dz": _lim_g12_dz}, "T1 applied below the root")
_register("g22", g22, ("dx", "dz", "dxi", "k"),
          _dom(("dx >= 1", lambda p: p["dx"] >= 1), ("dxi >= 1", lambda p: p["dxi"] >= 1),
               ("dz >= 2", lambda p: p["dz"] >= 2),
               ("2 <= k <= dz", lambda p: (p["k"] >= 2) & (p["k"] <= p["dz"]))),
          {"dz": _lim_g22_dz}, "T2 applied below the root")
_register("g3", g3, ("dx", "dz"),
          _dom(("dx >= 2", lambda p: p["dx"] >= 2), ("dz >= 1", lambda p: p["dz"] >= 1)),
          {"dz": _lim_g3_dz}, "T3: x's children move up to z")
_register("g41", g41, ("dx", "dz"), _dom(("d'(x) < d(x), d'(z) <= d(z)+1", _t4_dom("g41"))),
          label="T4 with d'(x) < d(x)")
_register("g42", g42, ("dx", "dz"), _dom(("d'(x) >= d(x)", _t4_dom("g42"))),
          {"dz": _lim_g42_dz}, "T4 with d'(x) >= d(x)")
_register("g5", g5, ("dx", "dz"),
          _dom(("dx >= 1", lambda p: p["dx"] >= 1), ("dz >= 2", lambda p: p["dz"] >= 2)),
          {"dz": _lim_g5_dz}, "T5: one B_3 moves from z to x")
_register("g6", g6, ("dz",), _dom(("dz >= 1", lambda p: p["dz"] >= 1)),
          {"dz": _lim_g6}, "T6 at integer d(z)")
_register("g6_even", g6_even, ("dz",), _dom(("dz >= 1", lambda p: p["dz"] >= 1)),
          {"dz": _lim_g6}, "T6, even branch of the formula")
_register("g6_odd", g6_odd, ("dz",), _dom(("dz >= 1", lambda p: p["dz"] >= 1)),
          {"dz": _lim_g6}, "T6, odd branch of the formula")
_register("appendix_g030", appendix_g030, ("x", "y", "dx", "dy"),
          _dom(("x, y >= 2", lambda p: (p["x"] >= 2) & (p["y"] >= 2)),
               ("dx >= 0", lambda p: p["dx"] >= 0),
               ("0 <= dy < y, y - dy >= 1", lambda p: (p["dy"] >= 0) & (p["dy"] < p["y"]) & (p["y"] - p["dy"] >= 1))))
_register("appendix_g030_2", appendix_g030_2, ("x", "y", "dx", "dy"),
          _dom(("x, y >= 2", lambda p: (p["x"] >= 2) & (p["y"] >= 2)),
               ("dy >= 0", lambda p: p["dy"] >= 0),
               ("0 <= dx < x, x - dx >= 1", lambda p: (p["dx"] >= 0) & (p["dx"] < p["x"]) & (p["x"] - p["dx"] >= 1))))
_register("appendix_g040", appendix_g040, ("x",), _dom(("x >= 4", lambda p: p["x"] >= 4)))
_register("appendix_g050", appendix_g050, ("x", "c"),
          _dom(("x >= 4", lambda p: p["x"] >= 4), ("c > 0", lambda p: p["c"] > 0)))


def get(name) -> GFun:
    if isinstance(name, GFun):
        return name
    try:
        return REGISTRY[name]
    except KeyError:
        raise KeyError(f"unknown g-function {name!r}; known: {', '.join(sorted(REGISTRY))}") from None


# -- evaluation --------------------------------------------------------------


def _params_dict(g: GFun, params) -> dict:
    if isinstance(params, dict):
        missing = set(g.params) - set(params)
        if missing:
            raise DomainError(f"{g.name}: missing parameters {sorted(missing)}")
        return {k: params[k] for k in g.params}
    params = list(params)
    if len(params) != g.arity:
        raise DomainError(f"{g.name} takes {g.arity} parameters {g.params}, got {len(params)}")
    return dict(zip(g.params, params))


def eval_g(name, params) -> float:
    """Evaluate one g-function at a single parameter point, checking its domain."""
    g = get(name)
    p = {k: float(v) for k, v in _params_dict(g, params).items()}
    mask, text = g.domain({k: np.asarray(v) for k, v in p.items()})
    if not bool(np.all(mask)):
        raise DomainError(f"{g.name}{tuple(p.values())} outside domain: {text}")
    return float(g.func(**p))


def evaluate(name, **params):
    """Vectorized evaluation; returns (values, valid-mask)."""
    g = get(name)
    arrays = {k: np.asarray(params[k], dtype=float) for k in g.params}
    arrays = dict(zip(arrays, np.broadcast_arrays(*arrays.values())))
    mask, _ = g.domain(arrays)
    with np.errstate(invalid="ignore", divide="ignore"):
        values = g.func(**arrays)
    return np.where(mask, values, np.nan), mask


def limit_at_infinity(name, axis: str, fixed: dict) -> float:
    g = get(name)
    if axis not in g.limits:
        raise ValueError(f"no analytic limit registered for {g.name} along {axis}")
    others = {k: float(v) for k, v in fixed.items() if k != axis}
    return float(g.limits[axis](**others))


# -- roots -------------------------------------------------------------------


@dataclass(frozen=True)
class RootBracket:
    lo: float
    hi: float

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    @property
    def width(self) -> float:
        return self.hi - self.lo


def bisect(fn: Callable[[float], float], lo: float, hi: float, tol: float = ROOT_TOL) -> RootBracket:
    flo, fhi = fn(lo), fn(hi)
    if flo == 0:
        return RootBracket(lo, lo)
    if fhi == 0:
        return RootBracket(hi, hi)
    if np.sign(flo) == np.sign(fhi):
        raise ValueError(f"no sign change on [{lo}, {hi}]")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fm = fn(mid)
        if fm == 0:
            return RootBracket(mid, mid)
        if np.sign(fm) == np.sign(flo):
            lo, flo = mid, fm
        else:
            hi = mid
    return RootBracket(lo, hi)


def find_roots(name, axis: str, fixed: dict, bracket, samples: int = 20000,
               tol: float = ROOT_TOL) -> list:
    """Isolate every sign change of ``name`` along ``axis`` on ``bracket``."""
    g = get(name)
    lo, hi = float(bracket[0]), float(bracket[1])

    def fn(t):
        return eval_g(g, {**fixed, axis: t})

    grid = np.linspace(lo, hi, samples + 1)
    vals, mask = evaluate(g, **{**fixed, axis: grid})
    if not mask.all():
        raise DomainError(f"{g.name}: bracket [{lo}, {hi}] leaves the domain")
    roots = []
    signs = np.sign(vals)
    for i in range(samples):
        if signs[i] == 0:
            roots.append(RootBracket(grid[i], grid[i]))
        elif signs[i] * signs[i + 1] < 0:
            roots.append(bisect(fn, grid[i], grid[i + 1], tol))
    if signs[-1] == 0:
        roots.append(RootBracket(grid[-1], grid[-1]))
    return roots


# -- sign certification --------------------------------------------------------


@dataclass
class SignReport:
    function: str
    grid: str
    expect: str = "negative"
    n_points: int = 0
    n_violations: int = 0
    violations: list = field(default_factory=list)
    max_value: float = float("nan")
    min_value: float = float("nan")
    limits: list = field(default_factory=list)  # (fixed params, value)
    roots: list = field(default_factory=list)
    failing: list = field(default_factory=list)  # combos with a grid or limit violation

    @property
    def limit_ok(self) -> bool:
        return all(_sign_ok(v, self.expect) for _, v in self.limits)

    @property
    def certified(self) -> bool:
        return self.n_points > 0 and self.n_violations == 0 and self.limit_ok

    def summary(self) -> str:
        state = "certified" if self.certified else "NOT certified"
        return (f"{self.function} {self.expect} on {self.grid}: {state} "
                f"({self.n_points} points, {self.n_violations} violations, "
                f"max {self.max_value:.6g}, limits ok: {self.limit_ok})")


def _sign_ok(v, expect) -> bool:
    if expect == "negative":
        return v < 0
    if expect == "positive":
        return v > 0
    if expect == "nonpositive":
        return v <= 0
    if expect == "nonnegative":
        return v >= 0
    raise ValueError(f"unknown expectation {expect!r}")


def _expand_grid(spec: dict) -> dict:
    """Mesh the array-valued entries; callables are then computed from the mesh."""
    plain = {k: np.atleast_1d(np.asarray(v, dtype=float)) for k, v in spec.items() if not callable(v)}
    keys = list(plain)
    mesh = np.meshgrid(*[plain[k] for k in keys], indexing="ij") if keys else []
    out = {k: m.ravel() for k, m in zip(keys, mesh)}
    for k, v in spec.items():
        if callable(v):
            out[k] = np.asarray(v(out), dtype=float) * np.ones_like(next(iter(out.values())))
    return out


def _describe(spec: dict) -> str:
    parts = []
    for k, v in spec.items():
        if callable(v):
            parts.append(f"{k}=<{getattr(v, 'label', 'derived')}>")
        else:
            a = np.atleast_1d(np.asarray(v))
            parts.append(f"{k}={a[0]:g}" if a.size == 1 else f"{k}=[{a.min():g}..{a.max():g}]#{a.size}")
    return ", ".join(parts)


def _collect(report: SignReport, params: dict, values: np.ndarray, ok: np.ndarray, keep: int = 20):
    bad = ~ok
    report.n_points += int(values.size)
    report.n_violations += int(bad.sum())
    if values.size:
        report.max_value = float(np.nanmax([report.max_value, values.max()]))
        report.min_value = float(np.nanmin([report.min_value, values.min()]))
    for i in np.flatnonzero(bad)[: max(0, keep - len(report.violations))]:
        report.violations.append(({k: float(v[i]) for k, v in params.items()}, float(values[i])))


def certify_sign(name, grid: dict, expect: str = "negative", where: Callable = None,
                 limit_axis: str = None) -> SignReport:
    """Check the sign of ``name`` on a grid, optionally closing an unbounded axis by its limit.

    ``grid`` maps each parameter to a scalar, an array, or a callable of the
    already meshed parameters (for couplings such as ``k = dz - 2``).
    ``where`` masks out grid points that are not part of the claim.
    """
    g = get(name)
    report = SignReport(g.name, _describe(grid), expect)
    p = _expand_grid(grid)
    mask, text = g.domain(p)
    if where is not None:
        mask = mask & np.asarray(where(p), dtype=bool)
    sel = {k: v[mask] for k, v in p.items()}
    with np.errstate(invalid="ignore"):
        values = g.func(**sel) if mask.any() else np.array([])
    values = np.atleast_1d(values)
    ok = np.vectorize(lambda v: _sign_ok(v, expect), otypes=[bool])(values) if values.size else values.astype(bool)
    _collect(report, sel, values, ok)
    if limit_axis is not None:
        others = [k for k in g.params if k != limit_axis and not callable(grid.get(k))]
        combos = {tuple(sel[k][i] for k in others) for i in range(values.size)}
        for combo in sorted(combos):
            fixed = dict(zip(others, combo))
            report.limits.append((fixed, limit_at_infinity(g, limit_axis, fixed)))
    return report


def lower_envelope(fa, fb, axis: str, axis_values, combos: list, expect: str = "negative",
                   where: Callable = None, with_limit: bool = True, rows: list = None) -> SignReport:
    """Certify that ``min(fa, fb)`` has the expected sign along ``axis`` for every combo.

    Grid points outside either function's domain (or rejected by ``where``)
    are skipped. When ``rows`` is given, (combo, axis value, fa, fb, min)
    tuples are appended to it.
    """
    ga, gb = get(fa), get(fb)
    report = SignReport(f"min({ga.name}, {gb.name})", f"{axis} in [{np.min(axis_values):g}, "
                        f"{np.max(axis_values):g}], {len(combos)} combos", expect)
    axis_values = np.asarray(axis_values, dtype=float)
    for combo in combos:
        spec = {axis: axis_values, **combo}
        p = _expand_grid(spec)
        ma, _ = ga.domain({k: p[k] for k in ga.params})
        mb, _ = gb.domain({k: p[k] for k in gb.params})
        mask = ma & mb
        if where is not None:
            mask &= np.asarray(where(p), dtype=bool)
        sel = {k: v[mask] for k, v in p.items()}
        if not mask.any():
            continue
        va = np.atleast_1d(ga.func(**{k: sel[k] for k in ga.params}))
        vb = np.atleast_1d(gb.func(**{k: sel[k] for k in gb.params}))
        env = np.minimum(va, vb)
        ok = env < 0 if expect == "negative" else np.vectorize(lambda v: _sign_ok(v, expect))(env)
        _collect(report, sel, env, ok)
        if rows is not None:
            for i in range(env.size):
                rows.append((combo, float(sel[axis][i]), float(va[i]), float(vb[i]), float(env[i])))
        fixed = {k: (float(v) if not callable(v) else v.label) for k, v in combo.items()}
        limit_bad = False
        if with_limit:
            plain = {k: float(v) for k, v in combo.items() if not callable(v)}
            la = limit_at_infinity(ga, axis, plain)
            lb = limit_at_infinity(gb, axis, plain)
            report.limits.append((plain, min(la, lb)))
            limit_bad = not _sign_ok(min(la, lb), expect)
        if limit_bad or not ok.all():
            report.failing.append(fixed)
    return report


# -- monotonicity of the appendix functions ---------------------------------------

DELTAS = (0.0, 0.5, 1.0, 2.0, 5.0)
CONSTANTS = (0.5, 1.0, 2.0, 10.0)
MONO_TOL = 1e-14


def default_xy_grid() -> np.ndarray:
    return np.unique(np.concatenate([np.arange(2.0, 10.0, 0.25), np.geomspace(10.0, 500.0, 120)]))


def _mono(values: np.ndarray, axis: int, direction: str):
    """Consecutive differences along ``axis`` that break the claimed direction."""
    d = np.diff(values, axis=axis)
    valid = ~np.isnan(d)
    bad = (d > MONO_TOL) if direction == "decreasing" else (d < -MONO_TOL)
    return int(valid.sum()), bad & valid, d


MONOTONICITY_CLAIMS = {
    "appendix-030": ("appendix_g030", {"x": "increasing", "y": "decreasing"}),
    "appendix-030-2": ("appendix_g030_2", {"x": "decreasing", "y": "increasing"}),
    "appendix-040": ("appendix_g040", {"x": "decreasing"}),
    "appendix-050": ("appendix_g050", {"x": "decreasing"}),
}


def monotonicity_check(pred: str, grid=None, deltas=DELTAS, constants=CONSTANTS) -> SignReport:
    """Finite-difference check of a stated monotonicity over a grid.

    Differences are taken between consecutive grid points on which the
    function is defined; a violation is a step in the wrong direction
    larger than ``MONO_TOL``.
    """
    if pred not in MONOTONICITY_CLAIMS:
        raise KeyError(f"unknown monotonicity claim {pred!r}")
    gname, claims = MONOTONICITY_CLAIMS[pred]
    g = get(gname)
    xs = default_xy_grid() if grid is None else np.asarray(grid, dtype=float)
    report = SignReport(pred, "", expect="monotone")
    if gname in ("appendix_g030", "appendix_g030_2"):
        X, Y = np.meshgrid(xs, xs, indexing="ij")
        combos = [(a, b) for a in deltas for b in deltas]
        report.grid = f"x, y in [{xs.min():g}, {xs.max():g}] ({xs.size} pts), deltas {list(deltas)}"
        for ddx, ddy in combos:
            vals, _ = evaluate(g, x=X, y=Y, dx=ddx, dy=ddy)
            for ax, name in ((0, "x"), (1, "y")):
                count, bad, d = _mono(vals, ax, claims[name])
                report.n_points += count
                report.n_violations += int(bad.sum())
                for i, j in zip(*np.nonzero(bad)):
                    if len(report.violations) < 20:
                        report.violations.append(({"x": float(X[i, j]), "y": float(Y[i, j]), "dx": ddx,
                                                   "dy": ddy, "axis": name}, float(d[i, j])))
    elif gname == "appendix_g040":
        x = xs[xs >= 4]
        report.grid = f"x in [{x.min():g}, {x.max():g}] ({x.size} pts)"
        vals, _ = evaluate(g, x=x)
        count, bad, d = _mono(vals, 0, "decreasing")
        report.n_points += count
        report.n_violations += int(bad.sum())
        report.violations += [({"x": float(x[i])}, float(d[i])) for i in np.flatnonzero(bad)[:20]]
    else:
        x = xs[xs >= 4]
        report.grid = f"x in [{x.min():g}, {x.max():g}] ({x.size} pts), c in {list(constants)}"
        for c in constants:
            vals, _ = evaluate(g, x=x, c=c)
            count, bad, d = _mono(vals, 0, "decreasing")
            report.n_points += count
            report.n_violations += int(bad.sum())
            report.violations += [({"x": float(x[i]), "c": c}, float(d[i])) for i in np.flatnonzero(bad)[:20]]
    report.max_value = report.min_value = float("nan")
    return report


# -- thresholds and tables -------------------------------------------------------

DZ_MAX = 10**4


def admissible_sibling_degrees(dx: int) -> list:
    """Degrees a big sibling of x may have: at most two below d(x), never below 4."""
    return [d for d in (dx - 2, dx - 1, dx) if d >= 4]


def first_negative_limit(name: str = "g1o", axis: str = "dy", start: int = 5, stop: int = 200) -> int:
    """Smallest integer d(x) at which the limit along ``axis`` is negative."""
    for dx in range(start, stop):
        if limit_at_infinity(name, axis, {"dx": dx}) < 0:
            return dx
    return None


def largest_negative_g2_case1(dx_range=range(5, 101), dy_max: int = DZ_MAX) -> int:
    """Largest d(x) such that g2_case1 is negative for every d(y) >= d(x), all smaller d(x) too."""
    best = None
    for dx in dx_range:
        rep = certify_sign("g2_case1", {"dx": dx, "dy": np.arange(dx, dy_max + 1)}, limit_axis="dy")
        if not rep.certified:
            break
        best = dx
    return best


def _g12_negative(dx, k, dz_max):
    z = np.arange(max(dx, k), dz_max + 1, dtype=float)
    for dxi in admissible_sibling_degrees(dx):
        if not np.all(g12(dx, z, dxi, k) < 0):
            return False
        if not limit_at_infinity("g12", "dz", {"dx": dx, "dxi": dxi, "k": k}) < 0:
            return False
    return True


def table1(dx_values=range(54, 67), k_max: int = 400, dz_max: int = DZ_MAX) -> list:
    """For each d(x), the least k making g12 negative for every d(z) >= max(d(x), k).

    The sibling degrees range over :func:`admissible_sibling_degrees`; g12
    decreases in k, so larger k stay negative.
    """
    rows = []
    for dx in dx_values:
        found = None
        for k in range(1, k_max + 1):
            if _g12_negative(dx, k, dz_max):
                found = k
                break
        rows.append((dx, found))
    return rows


def _g22_negative(dx, c, dz_max):
    z = np.arange(max(dx, c + 2), dz_max + 1, dtype=float)
    for dxi in admissible_sibling_degrees(dx):
        if not np.all(g22(dx, z, dxi, z - c) < 0):
            return False
        if not limit_at_infinity("g22", "dz", {"dx": dx, "dxi": dxi}) < 0:
            return False
    return True


def table2(dx_values=range(48, 54), c_max: int = 2000, dz_max: int = DZ_MAX) -> list:
    """For each d(x), the least c such that g22 < 0 whenever 2 <= k <= d(z) - c.

    g22 grows with k, so the claim for ``k = d(z) - c`` covers every smaller k.
    """
    rows = []
    for dx in dx_values:
        found = None
        for c in range(0, c_max + 1):
            if _g22_negative(dx, c, dz_max):
                found = c
                break
        rows.append((dx, found))
    return rows


TABLE1_PUBLISHED = [(66, 1), (65, 2), (64, 5), (63, 7), (62, 9), (61, 11), (60, 13), (59, 15),
                    (58, 17), (57, 19), (56, 23), (55, 29), (54, 52)]
TABLE2_PUBLISHED = [(48, 3), (49, 8), (50, 17), (51, 36), (52, 87), (53, 516)]


# -- envelope configurations -------------------------------------------------------


class _Offset:
    """``k = axis - offset`` as a grid callable with a readable label."""

    def __init__(self, axis, offset):
        self.axis = axis
        self.offset = offset
        self.label = f"{axis}-{offset}" if offset else axis

    def __call__(self, p):
        return p[self.axis] - self.offset


def offset(axis: str, off: int) -> _Offset:
    return _Offset(axis, off)


def case1_envelope_combos(dx_values=range(46, 54)) -> list:
    return [{"dx": dx} for dx in dx_values]


def case1_envelope(dx_values=range(46, 54), dy_max: int = DZ_MAX, rows=None) -> SignReport:
    ys = np.arange(min(dx_values), dy_max + 1)
    return lower_envelope("g1_parity", "g2_case1", "dy", ys, case1_envelope_combos(dx_values),
                          where=lambda p: p["dy"] >= p["dx"], rows=rows)


def subcase21_envelope_combos(table1_rows=None, table2_rows=None) -> list:
    """Parameter combinations left open by both tables, with d(x_i) in {d(x)-1, d(x)}."""
    t1 = dict(table1_rows or TABLE1_PUBLISHED)
    t2 = dict(table2_rows or TABLE2_PUBLISHED)
    combos = []
    for dx, c in sorted(t2.items()):
        for dxi in (dx - 1, dx):
            for j in range(c):
                combos.append({"dx": dx, "dxi": dxi, "k": offset("dz", j)})
    for dx, kmin in sorted(t1.items()):
        if dx > 65:
            continue
        for dxi in (dx - 1, dx):
            for k in range(2, kmin):
                combos.append({"dx": dx, "dxi": dxi, "k": k})
    return combos


def subcase21_envelope(dz_max: int = DZ_MAX, combos=None, rows=None) -> SignReport:
    combos = subcase21_envelope_combos() if combos is None else combos
    zs = np.arange(4, dz_max + 1)
    return lower_envelope("g12", "g22", "dz", zs, combos, where=lambda p: p["dz"] >= p["dx"], rows=rows)
