"""Polyhedral sets of distributions given by linear moment constraints.

A :class:`ConstraintSet` is an intersection of hyperplanes ``<f, q> = alpha``
and half-spaces ``<f, q> >= alpha`` / ``<f, q> <= alpha`` with the simplex,
hence closed and convex.  Membership is tested with an absolute boundary
tolerance so that types sitting exactly on a boundary count as members.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import CapacityError, DimensionError, InfeasibleError, ValidationError
from .measures import Dist
from .typespace import TypeVector

BOUNDARY_TOLERANCE = 1e-12
VERTEX_TOLERANCE = 1e-10
MAX_VERTEX_CANDIDATES = 2_000_000


class Relation(str, enum.Enum):
    EQ = "eq"
    GE = "ge"
    LE = "le"


@dataclass(frozen=True, eq=False)
class LinearConstraint:
    """``<f, q> (relation) alpha`` for a function ``f`` on the alphabet."""

    f: np.ndarray
    relation: Relation
    alpha: float

    def __post_init__(self):
        f = np.array(self.f, dtype=float)
        if f.ndim != 1 or f.size < 2:
            raise ValidationError("f must be a vector with at least two entries")
        if not np.all(np.isfinite(f)):
            raise ValidationError("f must be finite-valued")
        alpha = float(self.alpha)
        if not math.isfinite(alpha):
            raise ValidationError("alpha must be finite")
        try:
            relation = Relation(self.relation)
        except ValueError:
            raise ValidationError(f"relation must be one of eq, ge, le; got {self.relation!r}") from None
        f.setflags(write=False)
        object.__setattr__(self, "f", f)
        object.__setattr__(self, "relation", relation)
        object.__setattr__(self, "alpha", alpha)

    @property
    def k(self) -> int:
        return self.f.size

    def holds(self, value: float, tol: float = BOUNDARY_TOLERANCE) -> bool:
        if self.relation is Relation.EQ:
            return abs(value - self.alpha) <= tol
        if self.relation is Relation.GE:
            return value >= self.alpha - tol
        return value <= self.alpha + tol

    def to_dict(self) -> dict:
        return {"f": self.f.tolist(), "relation": self.relation.value, "alpha": self.alpha}

    @classmethod
    def from_dict(cls, d: dict) -> LinearConstraint:
        return cls(d["f"], d["relation"], d["alpha"])

    def __eq__(self, other):
        if not isinstance(other, LinearConstraint):
            return NotImplemented
        return (np.array_equal(self.f, other.f) and self.relation is other.relation
                and self.alpha == other.alpha)

    def __hash__(self):
        return hash((self.f.tobytes(), self.relation, self.alpha))

    def __repr__(self):
        return f"LinearConstraint({self.f.tolist()!r}, {self.relation.value!r}, {self.alpha!r})"


def eq(f, alpha) -> LinearConstraint:
    return LinearConstraint(f, Relation.EQ, alpha)


def ge(f, alpha) -> LinearConstraint:
    return LinearConstraint(f, Relation.GE, alpha)


def le(f, alpha) -> LinearConstraint:
    return LinearConstraint(f, Relation.LE, alpha)


@dataclass(frozen=True, eq=False)
class ConstraintSet:
    """A nonempty list of linear constraints on a common alphabet."""

    constraints: tuple[LinearConstraint, ...]
    boundary_tolerance: float = BOUNDARY_TOLERANCE
    _matrix: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        cons = tuple(self.constraints)
        if not cons:
            raise ValidationError("a constraint set needs at least one constraint")
        sizes = {c.k for c in cons}
        if len(sizes) != 1:
            raise DimensionError(f"constraints disagree on alphabet size: {sorted(sizes)}")
        if not self.boundary_tolerance >= 0:
            raise ValidationError("boundary_tolerance must be nonnegative")
        matrix = np.vstack([c.f for c in cons])
        matrix.setflags(write=False)
        object.__setattr__(self, "constraints", cons)
        object.__setattr__(self, "_matrix", matrix)

    @classmethod
    def of(cls, *constraints: LinearConstraint, boundary_tolerance=BOUNDARY_TOLERANCE):
        return cls(tuple(constraints), boundary_tolerance)

    @classmethod
    def from_dicts(cls, items: Iterable[dict], boundary_tolerance=BOUNDARY_TOLERANCE):
        return cls(tuple(LinearConstraint.from_dict(d) for d in items), boundary_tolerance)

    @classmethod
    def full_simplex(cls, k: int) -> ConstraintSet:
        """The vacuous constraint ``<(0,...,0,1), q> >= 0``."""
        f = np.zeros(k)
        f[-1] = 1.0
        return cls.of(ge(f, 0.0))

    def to_dicts(self) -> list[dict]:
        return [c.to_dict() for c in self.constraints]

    def __len__(self):
        return len(self.constraints)

    def __iter__(self):
        return iter(self.constraints)

    def __getitem__(self, i):
        return self.constraints[i]

    @property
    def k(self) -> int:
        return self.constraints[0].k

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    @property
    def alphas(self) -> np.ndarray:
        return np.array([c.alpha for c in self.constraints])

    @property
    def relations(self) -> tuple[Relation, ...]:
        return tuple(c.relation for c in self.constraints)

    def is_linear_family(self) -> bool:
        return all(c.relation is Relation.EQ for c in self.constraints)

    def _check_k(self, k):
        if k != self.k:
            raise DimensionError(f"constraint set is over {self.k} symbols, argument has {k}")

    def _holds(self, values: np.ndarray) -> np.ndarray:
        """Column-wise membership for ``values`` of shape ``(m, ...)``."""
        tol = self.boundary_tolerance
        ok = np.ones(values.shape[1:], dtype=bool)
        for c, v in zip(self.constraints, values):
            if c.relation is Relation.EQ:
                ok &= np.abs(v - c.alpha) <= tol
            elif c.relation is Relation.GE:
                ok &= v >= c.alpha - tol
            else:
                ok &= v <= c.alpha + tol
        return ok

    def contains(self, q: Dist) -> bool:
        self._check_k(q.k)
        return bool(self._holds((self._matrix @ q.probs)[:, None])[0])

    def contains_type(self, t: TypeVector) -> bool:
        self._check_k(t.k)
        return self.contains(t.as_dist())

    def contains_counts(self, counts: np.ndarray, n: int) -> np.ndarray:
        """Membership of each row of an ``(m, k)`` count block, as a boolean vector."""
        counts = np.asarray(counts)
        self._check_k(counts.shape[-1])
        return self._holds(self._matrix @ (counts / n).T)

    def slack(self, q: Dist) -> np.ndarray:
        """Signed slack per constraint; negative means violated (EQ slack is ``-|gap|``)."""
        self._check_k(q.k)
        values = self._matrix @ q.probs
        out = np.empty(len(self))
        for i, (c, v) in enumerate(zip(self.constraints, values)):
            if c.relation is Relation.EQ:
                out[i] = -abs(v - c.alpha)
            elif c.relation is Relation.GE:
                out[i] = v - c.alpha
            else:
                out[i] = c.alpha - v
        return out

    def vertices(self, allowed: np.ndarray | None = None) -> np.ndarray:
        """Vertices of the feasible polytope, optionally restricted to symbols in ``allowed``.

        Returns an array of shape ``(v, k)``; ``v == 0`` means infeasible.
        """
        return _vertices(self.constraints, self.k, allowed)

    def check_feasible(self, allowed: np.ndarray | None = None) -> np.ndarray:
        """Return the vertices, or raise :class:`InfeasibleError` with a certificate index."""
        verts = self.vertices(allowed)
        if len(verts):
            return verts
        for i in range(len(self)):
            if not len(_vertices(self.constraints[: i + 1], self.k, allowed)):
                c = self.constraints[i]
                f = c.f if allowed is None else c.f[np.asarray(allowed, dtype=bool)]
                lo, hi = float(f.min()), float(f.max())
                context = "on its own" if i == 0 else f"together with constraints 0..{i - 1}"
                raise InfeasibleError(
                    f"constraint {i} ({c.relation.value} {c.alpha!r}) cannot be met {context}; "
                    f"<f, q> ranges over [{lo!r}, {hi!r}] on the simplex",
                    certificate_index=i,
                    achievable_range=(lo, hi),
                )
        raise InfeasibleError("no distribution on the allowed symbols", certificate_index=0)

    def support(self, allowed: np.ndarray | None = None) -> np.ndarray:
        """Symbols that some feasible distribution charges (union of vertex supports)."""
        verts = self.check_feasible(allowed)
        return np.any(verts > VERTEX_TOLERANCE, axis=0)


def _vertices(constraints: Sequence[LinearConstraint], k: int, allowed) -> np.ndarray:
    eq_rows, eq_rhs = [np.ones(k)], [1.0]
    ineq_rows, ineq_rhs = [], []
    allowed = np.ones(k, dtype=bool) if allowed is None else np.asarray(allowed, dtype=bool)
    for x in range(k):
        unit = np.zeros(k)
        unit[x] = 1.0
        if allowed[x]:
            ineq_rows.append(unit)
            ineq_rhs.append(0.0)
        else:
            eq_rows.append(unit)
            eq_rhs.append(0.0)
    for c in constraints:
        if c.relation is Relation.EQ:
            eq_rows.append(c.f)
            eq_rhs.append(c.alpha)
        elif c.relation is Relation.GE:
            ineq_rows.append(c.f)
            ineq_rhs.append(c.alpha)
        else:
            ineq_rows.append(-c.f)
            ineq_rhs.append(-c.alpha)
    E, e = np.array(eq_rows), np.array(eq_rhs)
    G, g = np.array(ineq_rows), np.array(ineq_rhs)
    e_tol = VERTEX_TOLERANCE * np.maximum(1.0, np.abs(E).max(axis=1))
    g_tol = VERTEX_TOLERANCE * np.maximum(1.0, np.abs(G).max(axis=1))

    def feasible(q):
        return np.all(np.abs(E @ q - e) <= e_tol) and np.all(G @ q >= g - g_tol)

    rank_e = np.linalg.matrix_rank(E)
    need = k - rank_e
    if need == 0:
        q, *_ = np.linalg.lstsq(E, e, rcond=None)
        return q[None, :] if feasible(q) else np.empty((0, k))
    n_candidates = math.comb(len(G), need)
    if n_candidates > MAX_VERTEX_CANDIDATES:
        raise CapacityError(
            f"vertex enumeration needs {n_candidates} candidate bases",
            required=n_candidates,
            budget=MAX_VERTEX_CANDIDATES,
        )
    found = {}
    for rows in itertools.combinations(range(len(G)), need):
        A = np.vstack([E, G[list(rows)]])
        if np.linalg.matrix_rank(A) < k:
            continue
        b = np.concatenate([e, g[list(rows)]])
        q, *_ = np.linalg.lstsq(A, b, rcond=None)
        if not feasible(q):
            continue
        q = np.where(np.abs(q) <= VERTEX_TOLERANCE, 0.0, q)
        found.setdefault(tuple(np.round(q, 9)), q)
    if not found:
        return np.empty((0, k))
    return np.array([found[key] for key in sorted(found)])


def contains(cs: ConstraintSet, q: Dist) -> bool:
    return cs.contains(q)


def contains_type(cs: ConstraintSet, t: TypeVector) -> bool:
    return cs.contains_type(t)


def is_subset_witness(b: ConstraintSet, a: ConstraintSet, samples: Iterable[Dist]) -> bool:
    """False if some sample lies in ``b`` but not in ``a``.

    True only means the inclusion ``b ⊆ a`` was not refuted by these samples.
    """
    if b.k != a.k:
        raise DimensionError(f"constraint sets over {b.k} and {a.k} symbols")
    return not any(b.contains(q) and not a.contains(q) for q in samples)
