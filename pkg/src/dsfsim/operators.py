"""Second-quantized operators and their qubit (Pauli) images.

The Hamiltonian convention is

    H = offset + sum_{pq,s} one_body[p,q] a+_{ps} a_{qs}
        + 1/2 sum_{pqrs,ss'} two_body[p,q,r,s] a+_{ps} a_{qs} a+_{rs'} a_{ss'}

i.e. the two-body part is a product of spin-summed one-body excitations, and
``one_body`` absorbs the compensating one-body correction.  Use
:func:`from_core_integrals` to build a Hamiltonian from conventional core
integrals instead.  Spatial orbital p with spin s maps to qubit ``2p + s``
(s = 0 for alpha).
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass

import numpy as np

from .pauli import DROP_THRESHOLD, LinearPauli, PauliSum, ladder

SYMMETRY_TOL = 1e-12


class FcidumpError(ValueError):
    """Raised on malformed FCIDUMP input; message names the offending line."""


def _check_symmetric(m: np.ndarray, what: str) -> None:
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"{what} must be a square matrix")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{what} has non-finite entries")
    if np.max(np.abs(m - m.T), initial=0.0) > SYMMETRY_TOL:
        raise ValueError(f"{what} is not symmetric to {SYMMETRY_TOL}")
    if np.iscomplexobj(m):
        raise ValueError(f"{what} must be real")


_EIGHTFOLD = [(0, 1, 2, 3), (1, 0, 2, 3), (0, 1, 3, 2), (1, 0, 3, 2),
              (2, 3, 0, 1), (2, 3, 1, 0), (3, 2, 0, 1), (3, 2, 1, 0)]


def _check_eightfold(g: np.ndarray) -> None:
    if g.ndim != 4 or len(set(g.shape)) != 1:
        raise ValueError("two-body tensor must be rank-4 with equal axes")
    if not np.all(np.isfinite(g)):
        raise ValueError("two-body tensor has non-finite entries")
    for perm in _EIGHTFOLD[1:]:
        if np.max(np.abs(g - g.transpose(perm)), initial=0.0) > SYMMETRY_TOL:
            raise ValueError("two-body tensor violates 8-fold index symmetry")


@dataclass(frozen=True)
class Hamiltonian:
    """Active-space electronic Hamiltonian in the convention above."""

    offset: float
    one_body: np.ndarray
    two_body: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "one_body", np.asarray(self.one_body, dtype=float))
        object.__setattr__(self, "two_body", np.asarray(self.two_body, dtype=float))
        if not np.isfinite(self.offset):
            raise ValueError("offset must be finite")
        _check_symmetric(self.one_body, "one-body matrix")
        _check_eightfold(self.two_body)
        if self.two_body.shape[0] != self.one_body.shape[0]:
            raise ValueError("one- and two-body dimensions disagree")

    @property
    def n_orbitals(self) -> int:
        return self.one_body.shape[0]

    def core_one_body(self) -> np.ndarray:
        """Equivalent core integrals h_pq of the normal-ordered convention."""
        return self.one_body + 0.5 * np.einsum("prrq->pq", self.two_body)


def from_core_integrals(offset: float, h_core: np.ndarray,
                        two_body: np.ndarray) -> Hamiltonian:
    """Build a Hamiltonian from conventional core one-electron integrals."""
    h_core = np.asarray(h_core, dtype=float)
    two_body = np.asarray(two_body, dtype=float)
    one_body = h_core - 0.5 * np.einsum("prrq->pq", two_body)
    return Hamiltonian(offset, one_body, two_body)


@dataclass(frozen=True)
class DipoleOperator:
    """Cartesian one-body dipole matrices (Bohr), one per component."""

    x: np.ndarray
    y: np.ndarray
    z: np.ndarray

    def __post_init__(self):
        for name in ("x", "y", "z"):
            m = np.asarray(getattr(self, name), dtype=float)
            object.__setattr__(self, name, m)
            _check_symmetric(m, f"dipole component {name}")
        if not (self.x.shape == self.y.shape == self.z.shape):
            raise ValueError("dipole components must share a shape")

    @property
    def n_orbitals(self) -> int:
        return self.x.shape[0]

    def component(self, axis: str) -> np.ndarray:
        return {"x": self.x, "y": self.y, "z": self.z}[axis]


@dataclass(frozen=True)
class QVector:
    """Momentum transfer in inverse Bohr."""

    qx: float
    qy: float
    qz: float

    def __post_init__(self):
        if not all(np.isfinite(c) for c in (self.qx, self.qy, self.qz)):
            raise ValueError("momentum components must be finite")

    def component(self, axis: str) -> float:
        return {"x": self.qx, "y": self.qy, "z": self.qz}[axis]

    @property
    def norm(self) -> float:
        return float(np.sqrt(self.qx**2 + self.qy**2 + self.qz**2))


# ---------------------------------------------------------------------------
# FCIDUMP interchange format
# ---------------------------------------------------------------------------

_HEADER_FIELD = re.compile(r"([A-Za-z0-9]+)\s*=\s*([-0-9]+)")


def parse_fcidump_header(text: str) -> dict[str, int]:
    """Extract integer namelist fields (NORB, NELEC, MS2, ...) from the header."""
    header_lines = []
    for line in text.splitlines():
        header_lines.append(line)
        if "&END" in line.upper() or line.strip() == "/":
            break
    fields = {}
    for key, value in _HEADER_FIELD.findall(" ".join(header_lines)):
        fields[key.upper()] = int(value)
    if "NORB" not in fields:
        raise FcidumpError("line 1: header is missing NORB")
    return fields


def parse_fcidump(text: str) -> Hamiltonian:
    """Parse an FCIDUMP stream into a Hamiltonian.

    One-body values are stored verbatim into ``one_body`` (this package's
    product-of-excitations convention); unlisted integrals default to zero and
    every listed value is symmetrized over the standard index permutations.
    """
    lines = text.splitlines()
    fields = parse_fcidump_header(text)
    n = fields["NORB"]
    if n < 1:
        raise FcidumpError("line 1: NORB must be positive")
    offset = 0.0
    one = np.zeros((n, n))
    two = np.zeros((n, n, n, n))
    in_header = True
    for lineno, raw in enumerate(lines, start=1):
        if in_header:
            if "&END" in raw.upper() or raw.strip() == "/":
                in_header = False
            continue
        parts = raw.split()
        if not parts:
            continue
        if len(parts) != 5:
            raise FcidumpError(f"line {lineno}: expected 'value p q r s'")
        try:
            value = float(parts[0])
            p, q, r, s = (int(t) for t in parts[1:])
        except ValueError:
            raise FcidumpError(f"line {lineno}: malformed number") from None
        if not np.isfinite(value):
            raise FcidumpError(f"line {lineno}: non-finite value")
        if (p, q, r, s) == (0, 0, 0, 0):
            offset = value
            continue
        if min(p, q, r, s) < 0 or max(p, q, r, s) > n:
            raise FcidumpError(f"line {lineno}: orbital index out of range 1..{n}")
        if r == 0 and s == 0:
            if p == 0 or q == 0:
                raise FcidumpError(f"line {lineno}: incomplete one-body index pair")
            one[p - 1, q - 1] = value
            one[q - 1, p - 1] = value
        else:
            if min(p, q, r, s) == 0:
                raise FcidumpError(f"line {lineno}: incomplete two-body index quad")
            i, j, k, l = p - 1, q - 1, r - 1, s - 1
            for a, b, c, d in _EIGHTFOLD:
                idx = (i, j, k, l)
                two[idx[a], idx[b], idx[c], idx[d]] = value
    return Hamiltonian(offset, one, two)


def write_fcidump(h: Hamiltonian, n_electrons: int = 0, ms2: int = 0,
                  tol: float = 1e-15) -> str:
    """Render a Hamiltonian as FCIDUMP text (canonical 8-fold entries only)."""
    n = h.n_orbitals
    out = [f" &FCI NORB={n},NELEC={n_electrons},MS2={ms2},",
           "  ORBSYM=" + "1," * n,
           "  ISYM=1,",
           " &END"]
    for p in range(n):
        for q in range(p + 1):
            pq = p * (p + 1) // 2 + q
            for r in range(p + 1):
                for s in range(r + 1):
                    if r * (r + 1) // 2 + s > pq:
                        continue
                    v = float(h.two_body[p, q, r, s])
                    if abs(v) > tol:
                        out.append(f"{v!r} {p+1} {q+1} {r+1} {s+1}")
    for p in range(n):
        for q in range(p + 1):
            v = float(h.one_body[p, q])
            if abs(v) > tol:
                out.append(f"{v!r} {p+1} {q+1} 0 0")
    out.append(f"{float(h.offset)!r} 0 0 0 0")
    return "\n".join(out) + "\n"


def read_fcidump_file(path) -> tuple[Hamiltonian, dict[str, int]]:
    with open(path) as fh:
        text = fh.read()
    return parse_fcidump(text), parse_fcidump_header(text)


# ---------------------------------------------------------------------------
# Dipole matrices as a companion JSON document
# ---------------------------------------------------------------------------

def load_dipole_json(text: str) -> DipoleOperator:
    doc = json.loads(text)
    try:
        return DipoleOperator(np.array(doc["x"], dtype=float),
                              np.array(doc["y"], dtype=float),
                              np.array(doc["z"], dtype=float))
    except KeyError as exc:
        raise ValueError(f"dipole JSON is missing component {exc}") from None


def dump_dipole_json(d: DipoleOperator) -> str:
    return json.dumps({axis: d.component(axis).tolist() for axis in "xyz"},
                      sort_keys=True)


# ---------------------------------------------------------------------------
# Jordan-Wigner mapping
# ---------------------------------------------------------------------------

def _spin_excitation(p: int, q: int) -> LinearPauli:
    """Spin-summed excitation sum_s a+_{ps} a_{qs} as a word accumulator."""
    acc = LinearPauli()
    for spin in (0, 1):
        acc.add_sum(ladder(2 * p + spin, dagger=True) * ladder(2 * q + spin, dagger=False))
    return acc


def one_body_to_pauli(m: np.ndarray, drop: float = DROP_THRESHOLD) -> PauliSum:
    """Qubit image of ``sum_{pq,s} m[p,q] a+_{ps} a_{qs}`` for symmetric m."""
    m = np.asarray(m, dtype=float)
    _check_symmetric(m, "one-body matrix")
    n = m.shape[0]
    acc = LinearPauli()
    for p in range(n):
        for q in range(n):
            if abs(m[p, q]) > 0.0:
                acc.add_sum(_spin_excitation(p, q), m[p, q])
    return acc.collapse(2 * n, drop=drop)


def jordan_wigner(h: Hamiltonian, drop: float = DROP_THRESHOLD) -> PauliSum:
    """Map a Hamiltonian to its qubit representation.

    The two-body expansion multiplies spin-summed excitation pairs term by
    term and merges coefficients, dropping anything below ``drop``; the
    result is Hermitian with purely real coefficients.
    """
    n = h.n_orbitals
    acc = LinearPauli()
    acc.add(complex(h.offset), 0, 0)
    excitations: dict[tuple[int, int], LinearPauli] = {}
    for p in range(n):
        for q in range(n):
            excitations[(p, q)] = _spin_excitation(p, q)
            if abs(h.one_body[p, q]) > 0.0:
                acc.add_sum(excitations[(p, q)], h.one_body[p, q])
    for p in range(n):
        for q in range(n):
            e_pq = excitations[(p, q)]
            for r in range(n):
                for s in range(n):
                    g = h.two_body[p, q, r, s]
                    if abs(g) > 0.0:
                        acc.add_sum(e_pq * excitations[(r, s)], 0.5 * g)
    return acc.collapse(2 * n, drop=drop)
