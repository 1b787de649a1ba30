"""Three-qutrit states as 3x3x3 complex tensors.

A state is identified with the trilinear form sum_ijk A[i,j,k] x_i y_j z_k;
the local group SL(3,C)^x3 acts by contracting each tensor leg with the
matching matrix.  This module also builds the three-parameter normal-form
family, slice-determinant cubics, reduced densities, the tangent-map orbit
dimension, and the JSON state file format.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .poly_engine import MultiPoly, VariableRef, group_catalog

STATE_FORMAT = "trimoduli-state-v1"

# tuples (i,j,k) carrying v and w in the normal form, 1-based:
# v multiplies the odd arrangements of (1,2,3), w the even ones.
ODD_TRIPLES = ((1, 3, 2), (2, 1, 3), (3, 2, 1))
EVEN_TRIPLES = ((1, 2, 3), (2, 3, 1), (3, 1, 2))


class StateIOError(ValueError):
    """Raised for malformed state files."""


class ParameterTriple(NamedTuple):
    """Normal-form parameters (u, v, w)."""

    u: complex
    v: complex
    w: complex


@dataclass(frozen=True, eq=False)
class State:
    """Unnormalized pure state of three qutrits."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amp = np.asarray(self.amplitudes, dtype=complex)
        if amp.shape != (3, 3, 3):
            raise StateIOError(f"amplitude tensor must be 3x3x3, got shape {amp.shape}")
        if not np.all(np.isfinite(amp.view(float))):
            raise StateIOError("amplitudes must be finite")
        amp.setflags(write=False)
        object.__setattr__(self, "amplitudes", amp)

    @property
    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))

    def scaled(self, t: complex) -> "State":
        return State(self.amplitudes * t)

    def isclose(self, other: "State", tol: float = 1e-12) -> bool:
        return bool(np.max(np.abs(self.amplitudes - other.amplitudes)) <= tol)

    def form(self) -> MultiPoly:
        """The trilinear form of the state (slot-1 catalog over x, y, z)."""
        return trilinear_form(self.amplitudes)


@dataclass(frozen=True, eq=False)
class LocalTransform:
    """A triple of 3x3 complex matrices, one per party."""

    g1: np.ndarray
    g2: np.ndarray
    g3: np.ndarray

    def __post_init__(self):
        for name in ("g1", "g2", "g3"):
            m = np.asarray(getattr(self, name), dtype=complex)
            if m.shape != (3, 3):
                raise ValueError(f"{name} must be 3x3")
            m.setflags(write=False)
            object.__setattr__(self, name, m)

    @property
    def matrices(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return (self.g1, self.g2, self.g3)

    def is_det_normalized(self, tol: float = 1e-12) -> bool:
        return all(abs(np.linalg.det(m) - 1.0) < tol for m in self.matrices)

    def det_normalized(self) -> "LocalTransform":
        """Rescale each matrix by det**(-1/3) (principal cube root)."""
        mats = []
        for m in self.matrices:
            d = np.linalg.det(m)
            if d == 0:
                raise ValueError("cannot det-normalize a singular matrix")
            mats.append(m / d ** (1.0 / 3.0))
        return LocalTransform(*mats)

    def compose(self, other: "LocalTransform") -> "LocalTransform":
        return LocalTransform(self.g1 @ other.g1, self.g2 @ other.g2, self.g3 @ other.g3)

    @classmethod
    def identity(cls) -> "LocalTransform":
        eye = np.eye(3, dtype=complex)
        return cls(eye, eye, eye)


def trilinear_form(amplitudes) -> MultiPoly:
    """Trilinear form sum A[i,j,k] x_i y_j z_k from any 3x3x3 array of
    scalars (complex for numeric work, Fraction for exact runs)."""
    catalog = group_catalog(("x", "y", "z"))
    pos = {v: n for n, v in enumerate(catalog)}
    terms = {}
    for i in range(3):
        for j in range(3):
            for k in range(3):
                a = amplitudes[i][j][k] if not isinstance(amplitudes, np.ndarray) else amplitudes[i, j, k]
                if a:
                    key = [0] * 9
                    key[pos[VariableRef("x", i + 1)]] = 1
                    key[pos[VariableRef("y", j + 1)]] = 1
                    key[pos[VariableRef("z", k + 1)]] = 1
                    terms[tuple(key)] = a
    return MultiPoly(catalog, terms)


def normal_form_amplitudes(u, v, w):
    """Normal-form coefficient layout as a nested 3x3x3 list, scalar-generic."""
    zero = u - u  # matches the scalar type of the inputs
    amp = [[[zero for _ in range(3)] for _ in range(3)] for _ in range(3)]
    for i in range(3):
        amp[i][i][i] = u
    for (i, j, k) in ODD_TRIPLES:
        amp[i - 1][j - 1][k - 1] = v
    for (i, j, k) in EVEN_TRIPLES:
        amp[i - 1][j - 1][k - 1] = w
    return amp


def normal_form_state(t: ParameterTriple | tuple) -> State:
    """The state with u on the diagonal, v on odd and w on even arrangements
    of (1,2,3), zero elsewhere."""
    u, v, w = (complex(c) for c in t)
    return State(np.array(normal_form_amplitudes(u, v, w), dtype=complex))


def apply_local(s: State, g: LocalTransform) -> State:
    """Contract each tensor leg with the matching matrix."""
    amp = np.einsum("ip,jq,kr,pqr->ijk", g.g1, g.g2, g.g3, s.amplitudes)
    return State(amp)


def slice_cubic(s: State, axis: str) -> MultiPoly:
    """Determinant of the 3x3 matrix of linear forms obtained by contracting
    the chosen leg with its variables; a ternary cubic in that group."""
    if axis not in ("x", "y", "z"):
        raise ValueError("axis must be one of 'x', 'y', 'z'")
    A = s.amplitudes
    if axis == "x":
        rows = lambda i, j, k: (i, j, k)   # noqa: E731  entry M[j,k] = sum_i A_ijk x_i
    elif axis == "y":
        rows = lambda j, i, k: (i, j, k)   # noqa: E731  entry M[i,k] = sum_j A_ijk y_j
    else:
        rows = lambda k, i, j: (i, j, k)   # noqa: E731  entry M[i,j] = sum_k A_ijk z_k
    catalog = group_catalog((axis,))
    pos = {v: n for n, v in enumerate(catalog)}
    terms: dict[tuple, complex] = {}
    perms = (((0, 1, 2), 1), ((1, 2, 0), 1), ((2, 0, 1), 1),
             ((0, 2, 1), -1), ((2, 1, 0), -1), ((1, 0, 2), -1))
    for sigma, sign in perms:
        for a in range(3):
            for b in range(3):
                for c in range(3):
                    coeff = (A[rows(a, 0, sigma[0])] * A[rows(b, 1, sigma[1])]
                             * A[rows(c, 2, sigma[2])])
                    if coeff:
                        key = [0] * 3
                        for idx in (a, b, c):
                            key[pos[VariableRef(axis, idx + 1)]] += 1
                        k = tuple(key)
                        terms[k] = terms.get(k, 0) + sign * coeff
    return MultiPoly(catalog, terms)


def reduced_density(s: State, party: int) -> np.ndarray:
    """Single-party reduced density matrix of the unnormalized state."""
    A = s.amplitudes
    if party == 1:
        rho = np.einsum("ijk,ljk->il", A, A.conj())
    elif party == 2:
        rho = np.einsum("ijk,ilk->jl", A, A.conj())
    elif party == 3:
        rho = np.einsum("ijk,ijl->kl", A, A.conj())
    else:
        raise ValueError("party must be 1, 2 or 3")
    return rho


def _sl3_basis() -> list[np.ndarray]:
    basis = []
    for i in range(3):
        for j in range(3):
            if i != j:
                m = np.zeros((3, 3), dtype=complex)
                m[i, j] = 1.0
                basis.append(m)
    basis.append(np.diag([1.0, -1.0, 0.0]).astype(complex))
    basis.append(np.diag([0.0, 1.0, -1.0]).astype(complex))
    return basis


def orbit_dimension(s: State, rel_tol: float = 1e-8) -> int:
    """Complex rank of the tangent map sl(3)^3 -> H at the state."""
    rows = []
    A = s.amplitudes
    for X in _sl3_basis():
        rows.append(np.einsum("ip,pjk->ijk", X, A).ravel())
    for X in _sl3_basis():
        rows.append(np.einsum("jq,iqk->ijk", X, A).ravel())
    for X in _sl3_basis():
        rows.append(np.einsum("kr,ijr->ijk", X, A).ravel())
    tangent = np.array(rows)
    sv = np.linalg.svd(tangent, compute_uv=False)
    if sv.size == 0 or sv[0] == 0.0:
        return 0
    return int(np.sum(sv > rel_tol * sv[0]))


def write_state(path, s: State) -> None:
    flat = []
    for i in range(3):
        for j in range(3):
            for k in range(3):
                a = s.amplitudes[i, j, k]
                flat.append([a.real, a.imag])
    payload = {"format": STATE_FORMAT, "amplitudes": flat}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh)
        fh.write("\n")


def read_state(path) -> State:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            payload = json.load(fh)
    except json.JSONDecodeError as exc:
        raise StateIOError(f"malformed JSON in state file: {exc}") from exc
    if not isinstance(payload, dict) or payload.get("format") != STATE_FORMAT:
        raise StateIOError(f"unknown state file format (expected {STATE_FORMAT!r})")
    amps = payload.get("amplitudes")
    if not isinstance(amps, list) or len(amps) != 27:
        n = len(amps) if isinstance(amps, list) else "none"
        raise StateIOError(f"amplitudes must be a list of 27 [re, im] pairs, got {n}")
    values = []
    for entry in amps:
        if not isinstance(entry, list) or len(entry) != 2:
            raise StateIOError("each amplitude must be an [re, im] pair")
        re, im = entry
        if not all(isinstance(p, (int, float)) for p in (re, im)):
            raise StateIOError("amplitude components must be numbers")
        if not (math.isfinite(re) and math.isfinite(im)):
            raise StateIOError("non-finite amplitude in state file")
        values.append(complex(re, im))
    amp = np.array(values, dtype=complex).reshape(3, 3, 3)
    return State(amp)


def random_state(seed: int) -> State:
    """Seeded generic state: PCG64 stream, 27 standard-normal real parts
    followed by 27 imaginary parts."""
    rng = np.random.Generator(np.random.PCG64(seed))
    re = rng.standard_normal(27)
    im = rng.standard_normal(27)
    return State((re + 1j * im).reshape(3, 3, 3))


def random_parameter_triple(seed: int) -> ParameterTriple:
    rng = np.random.Generator(np.random.PCG64(seed))
    re = rng.standard_normal(3)
    im = rng.standard_normal(3)
    return ParameterTriple(*(complex(a, b) for a, b in zip(re, im)))


def random_local_transform(seed: int, det_normalized: bool = True) -> LocalTransform:
    """Seeded random local transform; each matrix is standard-normal complex
    and, by default, rescaled to unit determinant."""
    rng = np.random.Generator(np.random.PCG64(seed))
    mats = []
    for _ in range(3):
        while True:
            m = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
            if abs(np.linalg.det(m)) > 1e-6:
                break
        mats.append(m)
    g = LocalTransform(*mats)
    return g.det_normalized() if det_normalized else g
