import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from worldfrac.fields import FieldMismatchError, Scalar, ScalarField
from worldfrac.hilbert import (BasisMismatchError, OrthogonalPartition, PointerStateError,
                               StateVector, UnknownOutcomeError, change_basis, components,
                               entangle_measure, inner, norm_sq, project, random_partition,
                               random_state, tensor)

from conftest import SQRT3_2

FIELDS = list(ScalarField)


def e(i, n=2, field=ScalarField.COMPLEX):
    labels = [str(k) for k in range(n)]
    return StateVector.basis_vector(field, labels, labels[i])


def random_scalar(field, rng):
    return Scalar.from_array(field, rng.standard_normal(field.ray_dim))


def test_inner_orthonormal_basis():
    assert inner(e(0), e(0)) == Scalar.complex(1)
    assert inner(e(0), e(1)) == Scalar.complex(0)


def test_spin_state_normalized(spin_state):
    assert inner(spin_state, spin_state).isclose(Scalar.complex(1), atol=1e-15)
    assert math.isclose(norm_sq(spin_state), 1.0, rel_tol=1e-15)


def test_inner_picks_coefficient(rng):
    v = random_state("complex", 4, rng)
    for i, label in enumerate(v.basis):
        ei = StateVector.basis_vector("complex", v.basis, label)
        assert inner(ei, v) == v.coeff(label)


@pytest.mark.parametrize("field", FIELDS)
def test_inner_sesquilinear(field, rng):
    u, v = random_state(field, 3, rng), random_state(field, 3, rng)
    c = random_scalar(field, rng)
    # conjugate-linear in the first slot, right-linear in the second
    assert inner(u * c, v).isclose(c.conj() * inner(u, v))
    assert inner(u, v * c).isclose(inner(u, v) * c)
    assert inner(v, u).isclose(inner(u, v).conj())


@pytest.mark.parametrize("field", FIELDS)
def test_norm_sq_matches_inner(field, rng):
    v = random_state(field, 5, rng)
    ip = inner(v, v)
    assert math.isclose(ip.components[0], norm_sq(v), rel_tol=1e-14)
    assert np.allclose(ip.components[1:], 0.0, atol=1e-14)


def test_norm_sq_examples(spin_state):
    padded = StateVector.from_complex([0, 1, 0, 0])
    assert norm_sq(padded) == 1.0
    assert math.isclose(norm_sq(spin_state * 2.0), 4 * norm_sq(spin_state), rel_tol=1e-15)


def test_project_coordinate_restriction(spin_state, spin_partition):
    up = project(spin_state, spin_partition, "up")
    assert up == StateVector.from_complex([SQRT3_2, 0.0], ["up", "down"])


def test_project_single_group_is_identity(rng):
    v = random_state("quaternion", 4, rng)
    whole = OrthogonalPartition({"g": set(v.basis)})
    assert project(v, whole, "g") == v


def test_project_unknown_outcome(spin_state, spin_partition):
    with pytest.raises(UnknownOutcomeError):
        project(spin_state, spin_partition, "sideways")


def test_partition_must_cover_basis(spin_state):
    with pytest.raises(BasisMismatchError):
        project(spin_state, OrthogonalPartition({"up": {"up"}}), "up")


@pytest.mark.parametrize("groups", [{"a": {"x"}, "b": {"x", "y"}}, {"a": set()}, {}])
def test_partition_validation(groups):
    with pytest.raises(ValueError):
        OrthogonalPartition(groups)


def test_parseval_random_states(rng):
    worst = 0.0
    for _ in range(1000):
        field = FIELDS[rng.integers(3)]
        v = random_state(field, int(rng.integers(1, 9)), rng)
        part = random_partition(v.basis, rng)
        total = sum(norm_sq(p) for p in components(v, part).values())
        worst = max(worst, abs(norm_sq(v) - total))
    assert worst < 1e-10


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from(FIELDS), st.integers(1, 8))
def test_projection_properties(seed, field, dim):
    rng = np.random.default_rng(seed)
    v = random_state(field, dim, rng)
    part = random_partition(v.basis, rng)
    parts = components(v, part)
    # idempotent, exact
    for o, p in parts.items():
        assert project(p, part, o) == p
    # branches orthogonal, exact
    outs = list(parts)
    for i in range(len(outs)):
        for j in range(i + 1, len(outs)):
            assert inner(parts[outs[i]], parts[outs[j]]).norm() == 0.0
    # branches reassemble v
    total = parts[outs[0]]
    for o in outs[1:]:
        total = total + parts[o]
    assert total == v


def test_tensor_basis_vectors():
    t = tensor(e(0), e(0))
    assert t.basis == ("0⊗0", "0⊗1", "1⊗0", "1⊗1")
    assert t == StateVector.from_complex([1, 0, 0, 0], t.basis)


@pytest.mark.parametrize("field", FIELDS)
def test_tensor_norm_multiplicative(field, rng):
    a, b = random_state(field, 3, rng), random_state(field, 4, rng)
    assert math.isclose(norm_sq(tensor(a, b)), norm_sq(a) * norm_sq(b), rel_tol=1e-13)


def test_tensor_spin_with_unit_device(spin_state):
    device = StateVector.from_complex([0.6, 0.8j], ["D0", "D1"])
    composite = tensor(spin_state, device)
    # direct computation of the four products
    expected = [SQRT3_2 * 0.6, SQRT3_2 * 0.8j, 0.5 * 0.6, 0.5 * 0.8j]
    np.testing.assert_allclose(composite.as_complex(), expected, atol=1e-15)
    assert math.isclose(norm_sq(composite), 1.0, rel_tol=1e-14)


def test_tensor_field_mismatch():
    with pytest.raises(FieldMismatchError):
        tensor(e(0), e(0, field=ScalarField.REAL))


def pointers(field=ScalarField.COMPLEX):
    dev = ("ready", "saw_up", "saw_down")
    return {"up": StateVector.basis_vector(field, dev, "saw_up"),
            "down": StateVector.basis_vector(field, dev, "saw_down")}


def test_entangle_no_superposition():
    up = StateVector.from_complex([1, 0], ["up", "down"])
    out = entangle_measure(up, pointers())
    assert out == tensor(up, pointers()["up"])


def test_entangle_superposition(spin_state):
    out = entangle_measure(spin_state, pointers())
    expected = dict.fromkeys(out.basis, 0.0)
    expected["up⊗saw_up"] = SQRT3_2
    expected["down⊗saw_down"] = 0.5
    np.testing.assert_allclose(out.as_complex(), list(expected.values()), atol=0)


@pytest.mark.parametrize("field", FIELDS)
def test_entangle_linear(field, rng):
    labels = ["a", "b", "c"]
    dev = [f"d{k}" for k in range(5)]
    # orthogonal pointer states with generic coefficients
    ptr = {}
    for k, lab in enumerate(labels):
        coeffs = np.zeros((5, field.ray_dim))
        coeffs[k] = rng.standard_normal(field.ray_dim)
        ptr[lab] = StateVector(field, dev, coeffs)
    u, w = random_state(field, 3, rng, labels), random_state(field, 3, rng, labels)
    alpha, beta = random_scalar(field, rng), random_scalar(field, rng)
    lhs = entangle_measure(u * alpha + w * beta, ptr)
    rhs = entangle_measure(u, ptr) * alpha + entangle_measure(w, ptr) * beta
    assert lhs.allclose(rhs, atol=1e-12)


def test_entangle_rejects_bad_pointers(spin_state):
    with pytest.raises(PointerStateError, match="no pointer"):
        entangle_measure(spin_state, {"up": pointers()["up"]})
    same = pointers()
    same["down"] = same["up"] * 0.5
    with pytest.raises(PointerStateError, match="not orthogonal"):
        entangle_measure(spin_state, same)


def test_change_basis_hadamard(spin_state):
    s = 1 / math.sqrt(2)
    plus = StateVector.from_complex([s, s], spin_state.basis)
    minus = StateVector.from_complex([s, -s], spin_state.basis)
    rotated = change_basis(spin_state, {"+": plus, "-": minus})
    np.testing.assert_allclose(rotated.as_complex(), [s * (SQRT3_2 + 0.5), s * (SQRT3_2 - 0.5)],
                               atol=1e-15)
    assert math.isclose(norm_sq(rotated), norm_sq(spin_state), rel_tol=1e-14)


def test_change_basis_rejects_non_orthonormal(spin_state):
    with pytest.raises(ValueError):
        change_basis(spin_state, {"a": spin_state, "b": spin_state})


def test_json_round_trip(rng):
    v = random_state("quaternion", 3, rng)
    assert StateVector.from_json(v.to_json()) == v


@pytest.mark.parametrize("kwargs", [
    dict(field="complex", basis=("a", "a"), coeffs=[[1, 0], [0, 1]]),
    dict(field="complex", basis=("a",), coeffs=[[1, 0, 0]]),
    dict(field="real", basis=(), coeffs=np.zeros((0, 1))),
])
def test_state_validation(kwargs):
    with pytest.raises(ValueError):
        StateVector(**kwargs)
