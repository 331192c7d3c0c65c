"""Truncated multivariate Taylor arithmetic (jets) of total order at most 3.

A :class:`Jet` stores the Taylor coefficients of one or more scalar functions
of ``dim`` variables around a base point, i.e. ``d^m f / m!`` for every
multi-index ``m`` with ``|m| <= order``.  Coefficients live on the last axis
of ``Jet.coeffs`` in graded-lexicographic order, so the coefficients of a
lower-order jet are a prefix of those of a higher-order one.  Leading axes are
component axes: a jet with ``coeffs.shape == (3, 3, N)`` is a 3x3 matrix of
jets.

``order`` is the number of *trustworthy* derivative orders.  Differentiation
lowers it by one, so iterated covariant derivatives run out of orders exactly
when they should, and :class:`~gtcone.errors.CapabilityError` is raised rather
than silently returning a truncated polynomial's garbage.

The elementary functions (:func:`exp`, :func:`log`, :func:`sin`, :func:`cos`,
:func:`sqrt`, :func:`power`) accept jets as well as plain floats and arrays,
so a closed-form field can be written once and evaluated either way.
"""

from __future__ import annotations

import functools
import itertools
import math
import string
from typing import Sequence

import numpy as np

from .errors import ArgumentError, CapabilityError, DomainError

MAX_ORDER = 3


@functools.lru_cache(maxsize=None)
def monomials(dim: int, order: int = MAX_ORDER) -> tuple[tuple[int, ...], ...]:
    """Multi-indices of total degree <= ``order`` in graded-lex order."""
    out = []
    for degree in range(order + 1):
        for combo in itertools.combinations_with_replacement(range(dim), degree):
            mi = [0] * dim
            for v in combo:
                mi[v] += 1
            out.append(tuple(mi))
    return tuple(out)


@functools.lru_cache(maxsize=None)
def n_coeffs(dim: int, order: int = MAX_ORDER) -> int:
    return math.comb(dim + order, order)


@functools.lru_cache(maxsize=None)
def _index(dim: int, order: int) -> dict:
    return {m: i for i, m in enumerate(monomials(dim, order))}


@functools.lru_cache(maxsize=None)
def _product_table(dim: int, order: int):
    mons = monomials(dim, order)
    index = _index(dim, order)
    left, right, target = [], [], []
    for i, a in enumerate(mons):
        for j, b in enumerate(mons):
            if sum(a) + sum(b) > order:
                continue
            left.append(i)
            right.append(j)
            target.append(index[tuple(x + y for x, y in zip(a, b))])
    scatter = np.zeros((len(target), len(mons)))
    scatter[np.arange(len(target)), target] = 1.0
    return np.array(left), np.array(right), scatter


@functools.lru_cache(maxsize=None)
def _diff_table(dim: int, order: int, var: int):
    """Source positions and factors so that d/dx_var of an ``order`` jet is an
    ``order - 1`` jet."""
    index = _index(dim, order)
    src, fac = [], []
    for m in monomials(dim, order - 1):
        up = list(m)
        up[var] += 1
        src.append(index[tuple(up)])
        fac.append(float(up[var]))
    return np.array(src, dtype=int), np.array(fac)


@functools.lru_cache(maxsize=None)
def _restrict_table(dim: int, order: int, drop: tuple[int, ...]):
    index = _index(dim, order)
    keep = [v for v in range(dim) if v not in drop]
    src = []
    for m in monomials(len(keep), order):
        full = [0] * dim
        for v, e in zip(keep, m):
            full[v] = e
        src.append(index[tuple(full)])
    return np.array(src, dtype=int)


@functools.lru_cache(maxsize=None)
def _degrees(dim: int, order: int) -> np.ndarray:
    return np.array([sum(m) for m in monomials(dim, order)])


def _factorial(mi: Sequence[int]) -> int:
    out = 1
    for e in mi:
        out *= math.factorial(e)
    return out


class Jet:
    """An immutable (array of) truncated Taylor expansion(s)."""

    __slots__ = ("coeffs", "dim", "order")
    __array_ufunc__ = None  # make ndarray (op) Jet defer to the Jet methods

    def __init__(self, coeffs, dim: int, order: int = MAX_ORDER):
        coeffs = np.asarray(coeffs, dtype=float)
        if not 0 <= order <= MAX_ORDER:
            raise ArgumentError(f"jet order must lie in [0, {MAX_ORDER}], got {order}")
        if coeffs.shape[-1] != n_coeffs(dim, order):
            raise ArgumentError(
                f"expected {n_coeffs(dim, order)} coefficients for dim={dim}, "
                f"order={order}, got trailing axis {coeffs.shape[-1:]}")
        self.coeffs = coeffs
        self.dim = dim
        self.order = order

    # -- construction ------------------------------------------------------
    @classmethod
    def constant(cls, value, dim: int, order: int = MAX_ORDER) -> "Jet":
        value = np.asarray(value, dtype=float)
        coeffs = np.zeros(value.shape + (n_coeffs(dim, order),))
        coeffs[..., 0] = value
        return cls(coeffs, dim, order)

    # -- array protocol ----------------------------------------------------
    @property
    def shape(self) -> tuple[int, ...]:
        return self.coeffs.shape[:-1]

    def __len__(self):
        return self.shape[0]

    def __getitem__(self, key) -> "Jet":
        if not isinstance(key, tuple):
            key = (key,)
        tail = (slice(None),) if any(k is Ellipsis for k in key) else (Ellipsis,)
        return Jet(self.coeffs[key + tail], self.dim, self.order)

    def __iter__(self):
        for i in range(len(self)):
            yield self[i]

    @property
    def T(self) -> "Jet":
        axes = tuple(reversed(range(len(self.shape)))) + (len(self.shape),)
        return Jet(self.coeffs.transpose(axes), self.dim, self.order)

    def transpose(self, *axes) -> "Jet":
        return Jet(self.coeffs.transpose(tuple(axes) + (len(self.shape),)),
                   self.dim, self.order)

    def reshape(self, *shape) -> "Jet":
        return Jet(self.coeffs.reshape(tuple(shape) + (self.coeffs.shape[-1],)),
                   self.dim, self.order)

    def sum(self, axis=None) -> "Jet":
        if axis is None:
            axis = tuple(range(len(self.shape)))
        return Jet(self.coeffs.sum(axis=axis), self.dim, self.order)

    # -- access --------------------------------------------------------------
    @property
    def value(self):
        v = self.coeffs[..., 0]
        return float(v) if v.ndim == 0 else v

    def coefficient(self, mi: Sequence[int]):
        mi = tuple(int(e) for e in mi)
        if len(mi) != self.dim:
            raise ArgumentError(f"multi-index {mi} has wrong length for dim {self.dim}")
        if sum(mi) > self.order:
            raise CapabilityError(
                f"multi-index of degree {sum(mi)} exceeds jet order {self.order}")
        return self.coeffs[..., _index(self.dim, self.order)[mi]]

    def partial(self, mi: Sequence[int]):
        """Partial derivative ``d^mi`` at the base point (see :func:`extract_partial`)."""
        return extract_partial(self, mi)

    def truncate(self, order: int) -> "Jet":
        if order > self.order:
            raise CapabilityError(f"cannot raise jet order {self.order} to {order}")
        return Jet(self.coeffs[..., :n_coeffs(self.dim, order)], self.dim, order)

    # -- calculus ------------------------------------------------------------
    def diff(self, var: int) -> "Jet":
        if self.order == 0:
            raise CapabilityError("jet of order 0 cannot be differentiated")
        if not 0 <= var < self.dim:
            raise ArgumentError(f"variable {var} out of range for dim {self.dim}")
        src, fac = _diff_table(self.dim, self.order, var)
        return Jet(self.coeffs[..., src] * fac, self.dim, self.order - 1)

    def grad(self) -> "Jet":
        """All first partials, appended as a new *last* component axis."""
        if self.order == 0:
            raise CapabilityError("jet of order 0 cannot be differentiated")
        parts = [self.diff(v).coeffs for v in range(self.dim)]
        return Jet(np.stack(parts, axis=-2), self.dim, self.order - 1)

    def restrict(self, drop: Sequence[int]) -> "Jet":
        """Freeze the variables in ``drop`` at their base values; the result
        is a jet in the remaining variables (same order)."""
        drop = tuple(sorted(set(int(v) for v in drop)))
        src = _restrict_table(self.dim, self.order, drop)
        return Jet(self.coeffs[..., src], self.dim - len(drop), self.order)

    # -- arithmetic ------------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, Jet):
            if other.dim != self.dim:
                raise ArgumentError(f"jet dimension mismatch: {self.dim} vs {other.dim}")
            if self.order == other.order:
                return self, other
            order = min(self.order, other.order)
            return self.truncate(order), other.truncate(order)
        return None

    def __neg__(self):
        return Jet(-self.coeffs, self.dim, self.order)

    def __pos__(self):
        return self

    def __add__(self, other):
        pair = self._coerce(other)
        if pair is not None:
            a, b = pair
            return Jet(a.coeffs + b.coeffs, a.dim, a.order)
        if isinstance(other, (float, int)):
            coeffs = self.coeffs.copy()
            coeffs[..., 0] += other
            return Jet(coeffs, self.dim, self.order)
        other = np.asarray(other, dtype=float)
        shape = np.broadcast_shapes(self.shape, other.shape)
        coeffs = np.broadcast_to(self.coeffs, shape + self.coeffs.shape[-1:]).copy()
        coeffs[..., 0] += other
        return Jet(coeffs, self.dim, self.order)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        pair = self._coerce(other)
        if pair is not None:
            a, b = pair
            if a.order == 1:
                # Leibniz rule truncated at first order
                a0, b0 = a.coeffs[..., :1], b.coeffs[..., :1]
                coeffs = a0 * b.coeffs + b0 * a.coeffs
                coeffs[..., 0] -= (a0 * b0)[..., 0]
                return Jet(coeffs, a.dim, 1)
            left, right, scatter = _product_table(a.dim, a.order)
            return Jet((a.coeffs[..., left] * b.coeffs[..., right]) @ scatter,
                       a.dim, a.order)
        if isinstance(other, (float, int)):
            return Jet(self.coeffs * other, self.dim, self.order)
        other = np.asarray(other, dtype=float)
        return Jet(self.coeffs * other[..., None], self.dim, self.order)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * power(other, -1)
        other = np.asarray(other, dtype=float)
        if np.any(other == 0):
            raise DomainError("division by zero")
        return Jet(self.coeffs / other[..., None], self.dim, self.order)

    def __rtruediv__(self, other):
        return power(self, -1) * other

    def __pow__(self, q):
        if isinstance(q, (int, np.integer)) and q >= 0:
            out = Jet.constant(np.ones(self.shape), self.dim, self.order)
            for _ in range(int(q)):
                out = out * self
            return out
        return power(self, q)

    def __repr__(self):
        return f"Jet(dim={self.dim}, order={self.order}, shape={self.shape}, value={self.value!r})"


# --------------------------------------------------------------------------
# construction and extraction

def seed_variable(index: int, value: float, dimension: int, order: int = MAX_ORDER) -> Jet:
    """The coordinate function ``x_index`` expanded around ``value``."""
    if dimension < 1:
        raise ArgumentError("dimension must be positive")
    if not 0 <= index < dimension:
        raise ArgumentError(f"index {index} out of range for dimension {dimension}")
    coeffs = np.zeros(n_coeffs(dimension, order))
    coeffs[0] = value
    if order >= 1:
        coeffs[1 + index] = 1.0
    return Jet(coeffs, dimension, order)


def seed_point(point: Sequence[float], order: int = MAX_ORDER) -> list[Jet]:
    """Coordinate jets for every variable at ``point``."""
    point = np.asarray(point, dtype=float)
    return [seed_variable(i, point[i], len(point), order) for i in range(len(point))]


def extract_partial(a: Jet, multi_index: Sequence[int]):
    """Partial derivative ``d^multi_index`` of ``a`` at the base point."""
    mi = tuple(int(e) for e in multi_index)
    if sum(mi) > MAX_ORDER:
        raise ArgumentError(f"multi-index degree {sum(mi)} exceeds {MAX_ORDER}")
    return a.coefficient(mi) * _factorial(mi)


def as_jet(obj, dim: int, order: int = MAX_ORDER) -> Jet:
    """Assemble a jet array from a (nested) sequence of jets and numbers."""
    if isinstance(obj, Jet):
        if obj.dim != dim:
            raise ArgumentError(f"jet dimension mismatch: {obj.dim} vs {dim}")
        return obj.truncate(min(order, obj.order)) if obj.order > order else obj
    if isinstance(obj, (list, tuple)):
        parts = [as_jet(o, dim, order) for o in obj]
        low = min([p.order for p in parts], default=order)
        return Jet(np.stack([p.truncate(low).coeffs for p in parts]), dim, low)
    return Jet.constant(obj, dim, order)


def zeros(shape, dim: int, order: int = MAX_ORDER) -> Jet:
    return Jet(np.zeros(tuple(shape) + (n_coeffs(dim, order),)), dim, order)


# --------------------------------------------------------------------------
# arithmetic front door

def jet_arith(a, b, kind: str):
    if kind == "add":
        return a + b
    if kind == "sub":
        return a - b
    if kind == "mul":
        return a * b
    if kind == "div":
        return a / b
    raise ArgumentError(f"unknown arithmetic kind {kind!r}")


def _compose(a: Jet, derivs) -> Jet:
    """f(a) from f and its derivatives at a's value (Taylor composition)."""
    h = Jet(a.coeffs.copy(), a.dim, a.order)
    h.coeffs[..., 0] = 0.0
    out = Jet.constant(derivs[0], a.dim, a.order)
    term = None
    for m in range(1, a.order + 1):
        term = h if term is None else term * h
        out = out + term * (derivs[m] / math.factorial(m))
    return out


def exp(a):
    if not isinstance(a, Jet):
        return np.exp(a)
    e = np.exp(a.coeffs[..., 0])
    return _compose(a, [e, e, e, e])


def log(a):
    if not isinstance(a, Jet):
        return np.log(a)
    v = a.coeffs[..., 0]
    if np.any(v <= 0):
        raise DomainError("log of a jet with nonpositive value")
    return _compose(a, [np.log(v), 1 / v, -1 / v**2, 2 / v**3])


def sin(a):
    if not isinstance(a, Jet):
        return np.sin(a)
    s, c = np.sin(a.coeffs[..., 0]), np.cos(a.coeffs[..., 0])
    return _compose(a, [s, c, -s, -c])


def cos(a):
    if not isinstance(a, Jet):
        return np.cos(a)
    s, c = np.sin(a.coeffs[..., 0]), np.cos(a.coeffs[..., 0])
    return _compose(a, [c, -s, -c, s])


def power(a, q):
    if not isinstance(a, Jet):
        return np.power(np.asarray(a, dtype=float), q)
    v = a.coeffs[..., 0]
    q = float(q)
    integral = q.is_integer()
    if not integral and np.any(v <= 0):
        raise DomainError(f"power {q} of a jet with nonpositive value")
    if q < 0 and np.any(v == 0):
        raise DomainError("negative power of a zero-valued jet")
    derivs, coef = [], 1.0
    for m in range(4):
        exponent = q - m
        if coef == 0.0:
            derivs.append(np.zeros_like(v))
        else:
            derivs.append(coef * np.power(v, exponent))
        coef *= exponent
    return _compose(a, derivs)


def sqrt(a):
    if not isinstance(a, Jet):
        return np.sqrt(a)
    if np.any(a.coeffs[..., 0] <= 0):
        raise DomainError("sqrt of a jet with nonpositive value")
    return power(a, 0.5)


_MAPS = {"exp": exp, "log": log, "sin": sin, "cos": cos, "sqrt": sqrt}


def jet_map(a, kind: str, q: float | None = None):
    if kind == "pow":
        if q is None:
            raise ArgumentError("pow requires an exponent")
        return power(a, q)
    try:
        return _MAPS[kind](a)
    except KeyError:
        raise ArgumentError(f"unknown map {kind!r}") from None


# --------------------------------------------------------------------------
# tensor algebra over jets

def jeinsum(subscripts: str, a, b):
    """``np.einsum`` over component axes, with jet multiplication on the
    coefficient axis.  Either operand may be a plain array (a constant)."""
    if not isinstance(a, Jet) and not isinstance(b, Jet):
        return np.einsum(subscripts, a, b)
    ins, out = subscripts.split("->")
    sa, sb = ins.split(",")
    if not isinstance(a, Jet) or not isinstance(b, Jet):
        jet, const = (a, b) if isinstance(a, Jet) else (b, a)
        free = next(c for c in string.ascii_letters if c not in subscripts)
        if isinstance(a, Jet):
            expr = f"{sa}{free},{sb}->{out}{free}"
            coeffs = np.einsum(expr, jet.coeffs, np.asarray(const, dtype=float))
        else:
            expr = f"{sa},{sb}{free}->{out}{free}"
            coeffs = np.einsum(expr, np.asarray(const, dtype=float), jet.coeffs)
        return Jet(coeffs, jet.dim, jet.order)
    a, b = a._coerce(b)
    left, right, scatter = _product_table(a.dim, a.order)
    free = next(c for c in string.ascii_letters if c not in subscripts)
    expr = f"{sa}{free},{sb}{free}->{out}{free}"
    prod = np.einsum(expr, a.coeffs[..., left], b.coeffs[..., right])
    return Jet(prod @ scatter, a.dim, a.order)


def _nilpotent_part(m: Jet) -> Jet:
    h = Jet(m.coeffs.copy(), m.dim, m.order)
    h.coeffs[..., 0] = 0.0
    return h


def jinv(m: Jet) -> Jet:
    """Inverse of a square jet matrix by the terminating Neumann series."""
    m0 = m.coeffs[..., 0]
    inv0 = np.linalg.inv(m0)
    h = jeinsum("ik,kj->ij", inv0, _nilpotent_part(m))
    n = m.shape[-1]
    term = Jet.constant(np.eye(n), m.dim, m.order)
    total = term
    for _ in range(m.order):
        term = -jeinsum("ik,kj->ij", term, h)
        total = total + term
    return jeinsum("ik,kj->ij", total, inv0)


def jdet(m: Jet) -> Jet:
    """Determinant of a square jet matrix, ``det(m0) * exp(tr log(1 + H))``."""
    m0 = m.coeffs[..., 0]
    d0 = float(np.linalg.det(m0))
    h = jeinsum("ik,kj->ij", np.linalg.inv(m0), _nilpotent_part(m))
    logm = zeros(m.shape, m.dim, m.order)
    term = None
    for k in range(1, m.order + 1):
        term = h if term is None else jeinsum("ik,kj->ij", term, h)
        logm = logm + term * ((-1) ** (k + 1) / k)
    trace = Jet(np.trace(logm.coeffs, axis1=0, axis2=1), m.dim, m.order)
    return exp(trace) * d0
