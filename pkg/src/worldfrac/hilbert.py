"""Finite-dimensional state vectors over R, C or H.

States are coefficient arrays over a labelled orthonormal basis.  Subspaces
are coordinate subspaces: an :class:`OrthogonalPartition` groups basis labels
into outcomes, so projections are exact coordinate restrictions.

Conventions:

* scalar multiples of states act on the right, ``v * c`` (this matters only
  for quaternions);
* ``inner(u, v) = sum(conj(u_i) * v_i)``, conjugate-linear in ``u`` and
  (right-)linear in ``v``, so ``inner(e_i, v)`` is the coefficient ``c_i``.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .fields import (FieldMismatchError, Scalar, ScalarField, conj_components,
                     mul_components)


class BasisMismatchError(ValueError):
    """States over different bases (or partitions not matching a basis)."""


class UnknownOutcomeError(KeyError):
    pass


class ZeroVectorError(ValueError):
    """A ray representative or projection target was the zero vector."""


class PointerStateError(ValueError):
    """Pointer states missing, on different bases, or not orthogonal."""


TENSOR_SEP = "⊗"


@dataclass(frozen=True, eq=False)
class StateVector:
    field: ScalarField
    basis: tuple[str, ...]
    coeffs: np.ndarray  # shape (len(basis), field.ray_dim)

    def __post_init__(self):
        f = ScalarField.parse(self.field)
        basis = tuple(str(b) for b in self.basis)
        c = np.array(self.coeffs, dtype=float)
        d = f.ray_dim
        if c.ndim == 1 and d == 1:
            c = c[:, None]
        if c.ndim != 2 or c.shape[1] != d:
            raise ValueError(
                f"coeffs must have shape (n, {d}) for a {f.value} state, got {c.shape}")
        if len(basis) == 0:
            raise ValueError("state needs at least one coefficient")
        if len(basis) != c.shape[0]:
            raise ValueError(f"{len(basis)} basis labels but {c.shape[0]} coefficients")
        if len(set(basis)) != len(basis):
            raise ValueError("basis labels must be unique")
        if not np.all(np.isfinite(c)):
            raise ValueError("coefficients must be finite")
        c.setflags(write=False)
        object.__setattr__(self, "field", f)
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "coeffs", c)

    # -- constructors -----------------------------------------------------

    @classmethod
    def from_complex(cls, amplitudes: Sequence[complex], basis: Sequence[str] | None = None) -> StateVector:
        a = np.asarray(amplitudes, dtype=complex)
        basis = basis if basis is not None else [str(i) for i in range(len(a))]
        return cls(ScalarField.COMPLEX, tuple(basis), np.stack([a.real, a.imag], axis=-1))

    @classmethod
    def from_real(cls, amplitudes: Sequence[float], basis: Sequence[str] | None = None) -> StateVector:
        a = np.asarray(amplitudes, dtype=float)
        basis = basis if basis is not None else [str(i) for i in range(len(a))]
        return cls(ScalarField.REAL, tuple(basis), a[:, None])

    @classmethod
    def basis_vector(cls, field: ScalarField, basis: Sequence[str], label: str) -> StateVector:
        field = ScalarField.parse(field)
        basis = tuple(basis)
        c = np.zeros((len(basis), field.ray_dim))
        c[basis.index(label), 0] = 1.0
        return cls(field, basis, c)

    @classmethod
    def from_json(cls, obj: Mapping) -> StateVector:
        field = ScalarField.parse(obj["field"])
        coeffs = [c if isinstance(c, (list, tuple)) else [c] for c in obj["coeffs"]]
        return cls(field, tuple(obj["basis"]), np.array(coeffs, dtype=float))

    def to_json(self) -> dict:
        return {"field": self.field.value, "basis": list(self.basis),
                "coeffs": self.coeffs.tolist()}

    # -- basic algebra ----------------------------------------------------

    @property
    def dim(self) -> int:
        return len(self.basis)

    def coeff(self, label: str) -> Scalar:
        return Scalar.from_array(self.field, self.coeffs[self.basis.index(label)])

    def as_complex(self) -> np.ndarray:
        if self.field is ScalarField.QUATERNION:
            raise FieldMismatchError("quaternion state has no complex coefficient array")
        if self.field is ScalarField.REAL:
            return self.coeffs[:, 0].astype(complex)
        return self.coeffs[:, 0] + 1j * self.coeffs[:, 1]

    def realify(self) -> np.ndarray:
        """The state as a vector of the underlying real space R^(n*d)."""
        return self.coeffs.ravel().copy()

    def _compatible(self, other: StateVector) -> None:
        if other.field is not self.field:
            raise FieldMismatchError(
                f"{self.field.value} state vs {other.field.value} state")
        if other.basis != self.basis:
            raise BasisMismatchError("states are expressed in different bases")

    def _with(self, coeffs: np.ndarray) -> StateVector:
        return StateVector(self.field, self.basis, coeffs)

    def __add__(self, other: StateVector) -> StateVector:
        self._compatible(other)
        return self._with(self.coeffs + other.coeffs)

    def __sub__(self, other: StateVector) -> StateVector:
        self._compatible(other)
        return self._with(self.coeffs - other.coeffs)

    def __neg__(self) -> StateVector:
        return self._with(-self.coeffs)

    def __mul__(self, c) -> StateVector:
        """Right scalar multiple ``v * c``; ``c`` may be a real number or a Scalar."""
        if isinstance(c, (int, float, np.floating)):
            return self._with(self.coeffs * float(c))
        if isinstance(c, Scalar):
            if c.field is not self.field:
                raise FieldMismatchError(f"{c.field.value} scalar on {self.field.value} state")
            return self._with(mul_components(self.field, self.coeffs, c.as_array()))
        return NotImplemented

    def __rmul__(self, c) -> StateVector:
        if isinstance(c, (int, float, np.floating)):
            return self * c
        if isinstance(c, Scalar):
            if c.field is not self.field:
                raise FieldMismatchError(f"{c.field.value} scalar on {self.field.value} state")
            return self._with(mul_components(self.field, c.as_array(), self.coeffs))
        return NotImplemented

    scaled = __mul__

    def is_zero(self) -> bool:
        return not np.any(self.coeffs)

    def allclose(self, other: StateVector, atol: float = 1e-12) -> bool:
        self._compatible(other)
        return bool(np.allclose(self.coeffs, other.coeffs, rtol=0.0, atol=atol))

    def __eq__(self, other) -> bool:
        if not isinstance(other, StateVector):
            return NotImplemented
        return (self.field is other.field and self.basis == other.basis
                and np.array_equal(self.coeffs, other.coeffs))

    __hash__ = None

    def __repr__(self) -> str:
        return f"StateVector({self.field.value}, {list(self.basis)}, {self.coeffs.tolist()})"


def inner(u: StateVector, v: StateVector) -> Scalar:
    """Hermitian product, conjugate-linear in the first slot."""
    u._compatible(v)
    terms = mul_components(u.field, conj_components(u.field, u.coeffs), v.coeffs)
    return Scalar.from_array(u.field, terms.sum(axis=0))


def norm_sq(v: StateVector) -> float:
    return float(np.sum(v.coeffs * v.coeffs))


def norm(v: StateVector) -> float:
    return float(np.sqrt(norm_sq(v)))


@dataclass(frozen=True)
class OrthogonalPartition:
    """Outcome label -> set of basis labels spanning that outcome's subspace."""

    groups: Mapping[str, frozenset[str]] = dc_field(default_factory=dict)

    def __post_init__(self):
        groups = {str(k): frozenset(str(x) for x in v) for k, v in dict(self.groups).items()}
        if not groups:
            raise ValueError("partition needs at least one outcome")
        seen: set[str] = set()
        for name, members in groups.items():
            if not members:
                raise ValueError(f"outcome {name!r} has no basis labels")
            overlap = seen & members
            if overlap:
                raise ValueError(f"basis labels {sorted(overlap)} appear in more than one outcome")
            seen |= members
        object.__setattr__(self, "groups", groups)

    @classmethod
    def by_label(cls, basis: Iterable[str]) -> OrthogonalPartition:
        """Finest partition: one outcome per basis label."""
        return cls({b: {b} for b in basis})

    @classmethod
    def from_json(cls, obj: Mapping[str, Sequence[str]]) -> OrthogonalPartition:
        return cls({k: frozenset(v) for k, v in obj.items()})

    def to_json(self) -> dict:
        return {k: sorted(v) for k, v in self.groups.items()}

    @property
    def outcomes(self) -> list[str]:
        return list(self.groups)

    def members(self, outcome: str) -> frozenset[str]:
        try:
            return self.groups[outcome]
        except KeyError:
            raise UnknownOutcomeError(f"unknown outcome {outcome!r}") from None

    def check(self, basis: Sequence[str]) -> None:
        covered = frozenset().union(*self.groups.values())
        if covered != frozenset(basis):
            missing = sorted(frozenset(basis) - covered)
            extra = sorted(covered - frozenset(basis))
            raise BasisMismatchError(
                f"partition does not cover the basis (missing {missing}, unknown {extra})")

    def refine(self, outcome: str, parts: Mapping[str, Iterable[str]]) -> OrthogonalPartition:
        """Split one outcome into several; the others are left untouched."""
        members = self.members(outcome)
        new_parts = {k: frozenset(v) for k, v in parts.items()}
        if frozenset().union(*new_parts.values()) != members:
            raise ValueError(f"parts must exactly cover outcome {outcome!r}")
        groups = {k: v for k, v in self.groups.items() if k != outcome}
        groups.update(new_parts)
        return OrthogonalPartition(groups)


def project(v: StateVector, partition: OrthogonalPartition, outcome: str) -> StateVector:
    """Orthogonal projection of ``v`` onto the subspace of ``outcome``."""
    partition.check(v.basis)
    members = partition.members(outcome)
    mask = np.array([b in members for b in v.basis])
    return v._with(np.where(mask[:, None], v.coeffs, 0.0))


def components(v: StateVector, partition: OrthogonalPartition) -> dict[str, StateVector]:
    """Branch decomposition ``v = sum(components)`` over every outcome."""
    return {o: project(v, partition, o) for o in partition.outcomes}


def tensor(a: StateVector, b: StateVector) -> StateVector:
    if a.field is not b.field:
        raise FieldMismatchError(f"{a.field.value} (x) {b.field.value}")
    labels = tuple(f"{i}{TENSOR_SEP}{j}" for i in a.basis for j in b.basis)
    coeffs = mul_components(a.field, a.coeffs[:, None, :], b.coeffs[None, :, :])
    return StateVector(a.field, labels, coeffs.reshape(len(labels), a.field.ray_dim))


def entangle_measure(system: StateVector, pointer_states: Mapping[str, StateVector],
                     atol: float = 1e-10) -> StateVector:
    """Measurement interaction ``|i> (x) |D> -> |i> (x) |D_i>`` extended linearly.

    Returns ``sum_i c_i |i> (x) |D_i>``.  Pointer states must be nonzero,
    share one device basis, and be mutually orthogonal so that branches are
    distinguishable.
    """
    missing = [b for b in system.basis if b not in pointer_states]
    if missing:
        raise PointerStateError(f"no pointer state for system labels {missing}")
    pointers = [pointer_states[b] for b in system.basis]
    first = pointers[0]
    for p in pointers:
        if p.field is not system.field:
            raise FieldMismatchError("pointer states must share the system's field")
        if p.basis != first.basis:
            raise PointerStateError("pointer states must share one device basis")
        if p.is_zero():
            raise PointerStateError("pointer states must be nonzero")
    for i in range(len(pointers)):
        for j in range(i + 1, len(pointers)):
            overlap = inner(pointers[i], pointers[j]).norm()
            if overlap > atol * norm(pointers[i]) * norm(pointers[j]):
                raise PointerStateError(
                    f"pointer states for {system.basis[i]!r} and {system.basis[j]!r} "
                    f"are not orthogonal (|<Di,Dj>| = {overlap:.3g})")
    nd = first.dim
    labels = tuple(f"{i}{TENSOR_SEP}{j}" for i in system.basis for j in first.basis)
    d = system.field.ray_dim
    out = np.empty((system.dim, nd, d))
    for k, p in enumerate(pointers):
        # |i> (x) |D_i> c_i, scalar on the right
        out[k] = mul_components(system.field, p.coeffs, system.coeffs[k][None, :])
    return StateVector(system.field, labels, out.reshape(-1, d))


def change_basis(v: StateVector, new_basis: Mapping[str, StateVector],
                 atol: float = 1e-10) -> StateVector:
    """Express ``v`` in another orthonormal basis.

    ``new_basis`` maps each new label to its basis vector written in ``v``'s
    current basis.  The new coefficient of label ``j`` is ``inner(b_j, v)``.
    """
    vecs = list(new_basis.values())
    if len(vecs) != v.dim:
        raise BasisMismatchError(f"need {v.dim} new basis vectors, got {len(vecs)}")
    for i, bi in enumerate(vecs):
        bi._compatible(v)
        for j in range(i, len(vecs)):
            g = inner(bi, vecs[j]).as_array()
            target = np.zeros_like(g)
            if i == j:
                target[0] = 1.0
            if not np.allclose(g, target, rtol=0.0, atol=atol):
                raise ValueError("new basis is not orthonormal")
    coeffs = np.array([inner(b, v).as_array() for b in vecs])
    return StateVector(v.field, tuple(new_basis), coeffs)


def random_state(field: ScalarField, dim: int, rng: np.random.Generator,
                 basis: Sequence[str] | None = None) -> StateVector:
    """Gaussian random state (isotropic in the underlying real space)."""
    field = ScalarField.parse(field)
    basis = tuple(basis) if basis is not None else tuple(f"e{i}" for i in range(dim))
    return StateVector(field, basis, rng.standard_normal((dim, field.ray_dim)))


def random_partition(basis: Sequence[str], rng: np.random.Generator,
                     n_outcomes: int | None = None) -> OrthogonalPartition:
    """Random grouping of ``basis`` into ``n_outcomes`` nonempty outcomes."""
    basis = list(basis)
    if n_outcomes is None:
        n_outcomes = int(rng.integers(1, len(basis) + 1))
    if not 1 <= n_outcomes <= len(basis):
        raise ValueError("n_outcomes must be between 1 and the basis size")
    order = rng.permutation(len(basis))
    # first n_outcomes shuffled labels seed the groups, the rest land anywhere
    assign = np.concatenate([np.arange(n_outcomes),
                             rng.integers(0, n_outcomes, len(basis) - n_outcomes)])
    groups: dict[str, set[str]] = {f"o{k}": set() for k in range(n_outcomes)}
    for idx, g in zip(order, assign):
        groups[f"o{g}"].add(basis[idx])
    return OrthogonalPartition(groups)
