"""Spectral analysis of nonnegative integer (substitution) matrices.

Exact work (powers, primitivity, ranks over the integers) uses Python ints;
eigenvalues are computed in double precision with numpy.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

#: relative tolerance for comparing r(M) with the dilation factor
MODULUS_RTOL = 1e-8
#: relative tolerance used to cluster numerically computed eigenvalues
CLUSTER_RTOL = 1e-6
#: singular values below RANK_RTOL * (scale) are treated as zero
RANK_RTOL = 1e-8


class NotPrimitiveError(ValueError):
    """Raised when an operation needs a primitive matrix."""


class IntMatrix:
    """Square matrix of nonnegative arbitrary-precision integers.

    Immutable; ``rows`` is a tuple of tuples of Python ints.
    """

    __slots__ = ("rows", "n")

    def __init__(self, rows: Iterable[Iterable[int]]):
        data = tuple(tuple(int(x) for x in row) for row in rows)
        n = len(data)
        if n == 0:
            raise ValueError("matrix must have at least one row")
        for row in data:
            if len(row) != n:
                raise ValueError(f"matrix is not square: row of length {len(row)} in {n}x{n}")
            if any(x < 0 for x in row):
                raise ValueError("matrix entries must be nonnegative")
        self.rows = data
        self.n = n

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls([[int(i == j) for j in range(n)] for i in range(n)])

    @classmethod
    def from_text(cls, text: str) -> "IntMatrix":
        """Parse ``n`` followed by ``n`` lines of ``n`` integers."""
        lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
        lines = [ln for ln in lines if ln]
        if not lines:
            raise ValueError("empty matrix file")
        try:
            n = int(lines[0])
        except ValueError:
            raise ValueError(f"first line must be the dimension, got {lines[0]!r}") from None
        if len(lines) - 1 != n:
            raise ValueError(f"expected {n} matrix rows, found {len(lines) - 1}")
        rows = []
        for k, ln in enumerate(lines[1:], start=2):
            try:
                rows.append([int(tok) for tok in ln.split()])
            except ValueError:
                raise ValueError(f"line {k}: non-integer entry in {ln!r}") from None
        return cls(rows)

    @classmethod
    def load(cls, path: str | Path) -> "IntMatrix":
        return cls.from_text(Path(path).read_text())

    def to_text(self) -> str:
        body = "\n".join(" ".join(str(x) for x in row) for row in self.rows)
        return f"{self.n}\n{body}\n"

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other: object) -> bool:
        if isinstance(other, IntMatrix):
            return self.rows == other.rows
        try:
            return self.rows == IntMatrix(other).rows  # type: ignore[arg-type]
        except (TypeError, ValueError):
            return NotImplemented

    def __hash__(self) -> int:
        return hash(self.rows)

    def __repr__(self) -> str:
        return f"IntMatrix({[list(r) for r in self.rows]})"

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        cols = list(zip(*other.rows))
        return IntMatrix([[sum(a * b for a, b in zip(row, col)) for col in cols] for row in self.rows])

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self.rows]

    def to_float(self) -> np.ndarray:
        return np.array(self.rows, dtype=float)

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(row[j] for row in self.rows)

    def column_sums(self) -> tuple[int, ...]:
        return tuple(sum(col) for col in zip(*self.rows))

    def norm1(self) -> int:
        """Maximum absolute column sum."""
        return max(self.column_sums())

    def matvec(self, x: Sequence[int]) -> list[int]:
        return [sum(a * b for a, b in zip(row, x)) for row in self.rows]

    def power(self, l: int) -> "IntMatrix":
        if l < 0:
            raise ValueError("negative power")
        result = IntMatrix.identity(self.n)
        base = self
        while l:
            if l & 1:
                result = result @ base
            l >>= 1
            if l:
                base = base @ base
        return result


def as_intmatrix(M) -> IntMatrix:
    return M if isinstance(M, IntMatrix) else IntMatrix(M)


class Regime(enum.Enum):
    LINEAR = "Linear"
    LINEAR_LOG = "LinearLog"
    UNSUPPORTED = "Unsupported"


@dataclass(frozen=True)
class RegimeVerdict:
    regime: Regime
    r: float
    lam: float
    semisimple: bool | None
    primitive: bool

    def as_dict(self) -> dict:
        return {
            "regime": self.regime.value,
            "r": self.r,
            "lambda": self.lam,
            "semisimple_at_r": self.semisimple,
            "primitive": self.primitive,
        }


@dataclass(frozen=True)
class PerronData:
    mu: float
    v: np.ndarray
    w: np.ndarray
    nu: np.ndarray
    r: float
    spectrum: tuple[tuple[complex, int], ...] = field(default=())

    def as_dict(self) -> dict:
        def _c(z: complex):
            return [z.real, z.imag] if abs(z.imag) > 0 else z.real

        return {
            "mu": self.mu,
            "r": self.r,
            "v": self.v.tolist(),
            "w": self.w.tolist(),
            "nu": self.nu.tolist(),
            "spectrum": [{"value": _c(z), "multiplicity": m} for z, m in self.spectrum],
        }


# --------------------------------------------------------------------------
# exact integer helpers


def _bool_matmul(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    return (A.astype(np.int64) @ B.astype(np.int64)) > 0


def is_primitive(M) -> bool:
    """True iff some power of ``M`` is entrywise positive.

    Uses the Wielandt bound: a primitive n x n matrix has M^k > 0 for every
    k >= (n-1)^2 + 1, so one boolean power by repeated squaring decides it.
    """
    M = as_intmatrix(M)
    n = M.n
    pattern = np.array(M.rows, dtype=object) > 0
    pattern = pattern.astype(bool)
    k = (n - 1) ** 2 + 1
    result = np.eye(n, dtype=bool)
    base = pattern
    while k:
        if k & 1:
            result = _bool_matmul(result, base)
        k >>= 1
        if k:
            base = _bool_matmul(base, base)
    return bool(result.all())


def power_column(M, l: int, j: int) -> tuple[int, ...]:
    """Column ``j`` of ``M**l``, exact."""
    M = as_intmatrix(M)
    if not 0 <= j < M.n:
        raise IndexError(f"column index {j} out of range for {M.n}x{M.n} matrix")
    if l < 0:
        raise ValueError("power must be nonnegative")
    x = [int(i == j) for i in range(M.n)]
    for _ in range(l):
        x = M.matvec(x)
    return tuple(x)


def integer_rank(rows: Sequence[Sequence[int]]) -> int:
    """Rank over Q via fraction-free (Bareiss) elimination."""
    A = [list(map(int, r)) for r in rows]
    if not A:
        return 0
    nrows, ncols = len(A), len(A[0])
    rank = 0
    prev = 1
    for col in range(ncols):
        pivot = next((i for i in range(rank, nrows) if A[i][col] != 0), None)
        if pivot is None:
            continue
        A[rank], A[pivot] = A[pivot], A[rank]
        p = A[rank][col]
        for i in range(rank + 1, nrows):
            a = A[i][col]
            row_i, row_r = A[i], A[rank]
            for c in range(col + 1, ncols):
                row_i[c] = (p * row_i[c] - a * row_r[c]) // prev
            row_i[col] = 0
        prev = p
        rank += 1
        if rank == nrows:
            break
    return rank


def poly_of_matrix(M, coeffs: Sequence[int]) -> list[list[int]]:
    """Evaluate an integer polynomial (highest degree first) at ``M`` exactly.

    Entries may be negative, so the result is a plain list of lists.
    """
    M = as_intmatrix(M)
    n = M.n
    acc = [[0] * n for _ in range(n)]
    cols = list(zip(*M.rows))
    for c in coeffs:
        # Horner: acc = acc @ M + c I
        acc = [[sum(a * b for a, b in zip(row, col)) for col in cols] for row in acc]
        for i in range(n):
            acc[i][i] += int(c)
    return acc


# --------------------------------------------------------------------------
# numeric spectral helpers


def _cluster(eigs: np.ndarray, rtol: float = CLUSTER_RTOL) -> list[tuple[complex, int]]:
    scale = max(1.0, float(np.max(np.abs(eigs)))) if len(eigs) else 1.0
    clusters: list[list[complex]] = []
    for z in sorted(eigs, key=lambda z: (-abs(z), -z.real, -z.imag)):
        for cl in clusters:
            if abs(cl[0] - z) <= rtol * scale:
                cl.append(complex(z))
                break
        else:
            clusters.append([complex(z)])
    out = []
    for cl in clusters:
        mean = complex(np.mean(cl))
        if abs(mean.imag) <= rtol * scale:
            mean = complex(mean.real, 0.0)
        out.append((mean, len(cl)))
    return out


def spectrum(M) -> tuple[tuple[complex, int], ...]:
    """Eigenvalues grouped with their algebraic multiplicities, by decreasing modulus."""
    A = as_intmatrix(M).to_float()
    return tuple(_cluster(np.linalg.eigvals(A)))


def _perron_and_second(spec: Sequence[tuple[complex, int]]) -> tuple[float, float]:
    mu_val, mu_mult = max(spec, key=lambda zm: (zm[0].real if abs(zm[0].imag) == 0 else -np.inf))
    mu = float(mu_val.real)
    others = [abs(z) for z, m in spec if z != mu_val]
    if mu_mult > 1:
        others.append(mu)
    r = max(others) if others else 0.0
    return mu, float(r)


def _numeric_rank(A: np.ndarray, scale: float) -> int:
    s = np.linalg.svd(A, compute_uv=False)
    return int(np.sum(s > RANK_RTOL * scale))


def _is_semisimple(A: np.ndarray, eta: complex) -> tuple[bool, int]:
    n = A.shape[0]
    B = A.astype(complex) - eta * np.eye(n)
    scale = max(1.0, float(np.linalg.norm(B, 2)))
    r1 = _numeric_rank(B, scale)
    r2 = _numeric_rank(B @ B, scale * scale)
    return r1 == r2, n - r1


def modulus_group(M, r: float) -> list[tuple[complex, int]]:
    spec = spectrum(M)
    scale = max(1.0, abs(r))
    group = [(z, m) for z, m in spec if abs(abs(z) - r) <= MODULUS_RTOL * scale]
    if not group:
        raise ValueError(f"no eigenvalue of modulus {r!r}")
    return group


def semisimple_at_modulus(M, r: float) -> bool:
    """Whether every eigenvalue of modulus ``r`` is semi-simple.

    Compares rank(M - eta I) with rank((M - eta I)^2) using singular values.
    """
    M = as_intmatrix(M)
    A = M.to_float()
    return all(_is_semisimple(A, z)[0] for z, _ in modulus_group(M, r))


def multiplicities_at_modulus(M, r: float) -> list[dict]:
    """Algebraic and geometric multiplicity of each eigenvalue of modulus ``r``."""
    M = as_intmatrix(M)
    A = M.to_float()
    out = []
    for z, alg in modulus_group(M, r):
        ok, geo = _is_semisimple(A, z)
        out.append({"value": z, "algebraic": alg, "geometric": geo, "semisimple": ok})
    return out


def semisimple_exact(M, coeffs: Sequence[int]) -> bool:
    """Exact semi-simplicity test for the eigenvalues that are roots of ``coeffs``.

    For an integer polynomial p, the eigenvalues of M among the roots of p are
    all semi-simple iff rank p(M) == rank p(M)^2 (provided p is squarefree).
    """
    P = poly_of_matrix(M, coeffs)
    cols = list(zip(*P))
    P2 = [[sum(a * b for a, b in zip(row, col)) for col in cols] for row in P]
    return integer_rank(P) == integer_rank(P2)


def perron_data(M) -> PerronData:
    """Perron eigenvalue, positive eigenvectors, frequencies and second modulus."""
    M = as_intmatrix(M)
    if not is_primitive(M):
        raise NotPrimitiveError("matrix is not primitive; Perron-Frobenius data requires primitivity")
    A = M.to_float()
    spec = spectrum(M)
    mu, r = _perron_and_second(spec)

    def _perron_vector(B: np.ndarray) -> np.ndarray:
        vals, vecs = np.linalg.eig(B)
        k = int(np.argmin(np.abs(vals - mu)))
        x = np.real(vecs[:, k])
        x = x / x.sum()
        # one step of inverse iteration to polish the residual
        try:
            y = np.linalg.solve(B - (mu * (1 + 1e-13) + 1e-300) * np.eye(len(x)), x)
            if np.all(np.isfinite(y)) and abs(y.sum()) > 0:
                y = y / y.sum()
                if np.linalg.norm(B @ y - mu * y, np.inf) < np.linalg.norm(B @ x - mu * x, np.inf):
                    x = y
        except np.linalg.LinAlgError:
            pass
        return np.abs(x)

    v = _perron_vector(A)
    w = _perron_vector(A.T)
    w = w / float(v @ w)
    nu = v / v.sum()
    return PerronData(mu=mu, v=v, w=w, nu=nu, r=r, spectrum=spec)


def classify(M, lam: float) -> RegimeVerdict:
    """Discrepancy regime: Linear if r(M) < lam, LinearLog if r(M) == lam with
    semi-simple eigenvalues at that modulus, Unsupported otherwise.

    Non-primitive input is never rejected here; it is reported in the verdict
    and ends up Unsupported unless the modulus comparison already says so.
    """
    M = as_intmatrix(M)
    if lam <= 1:
        raise ValueError("dilation factor must exceed 1")
    primitive = is_primitive(M)
    _, r = _perron_and_second(spectrum(M))
    tol = MODULUS_RTOL * lam
    semisimple = None
    if r < lam - tol:
        regime = Regime.LINEAR
    elif abs(r - lam) <= tol:
        semisimple = semisimple_at_modulus(M, r)
        regime = Regime.LINEAR_LOG if semisimple else Regime.UNSUPPORTED
    else:
        regime = Regime.UNSUPPORTED
    if not primitive:
        regime = Regime.UNSUPPORTED
    return RegimeVerdict(regime=regime, r=r, lam=float(lam), semisimple=semisimple, primitive=primitive)


def corollary_deviation(M, l: int, nu: np.ndarray | None = None) -> float:
    """max_{i,j} |m^l_{ij} - nu_i * sum_k m^l_{kj}|."""
    M = as_intmatrix(M)
    if nu is None:
        nu = perron_data(M).nu
    P = M.power(l)
    worst = 0.0
    for j in range(M.n):
        col = P.column(j)
        total = sum(col)
        for i, m in enumerate(col):
            worst = max(worst, abs(m - nu[i] * total))
    return float(worst)


def envelope_growth(M, l_fit: int = 5, l_max: int = 15, rho: float | None = None) -> tuple[float, float, float]:
    """Fit C = max_{l<=l_fit} dev(l)/rho^l and return (C, max_{l<=l_max} dev/rho^l, rho)."""
    pd = perron_data(M)
    if rho is None:
        rho = max(pd.r, 1.0) + 0.01
    ratios = [corollary_deviation(M, l, pd.nu) / rho**l for l in range(1, l_max + 1)]
    return max(ratios[:l_fit]), max(ratios), rho


def real_root_bisect(coeffs: Sequence[float], lo: float, hi: float, iters: int = 200) -> float:
    """Root of a polynomial (highest degree first) bracketed by [lo, hi]."""
    f = lambda x: math.fsum(c * x ** (len(coeffs) - 1 - k) for k, c in enumerate(coeffs))  # noqa: E731
    flo = f(lo)
    if flo * f(hi) > 0:
        raise ValueError("root not bracketed")
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)
