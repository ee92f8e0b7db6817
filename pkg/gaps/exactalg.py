"""Exact dense linear algebra and seeded sampling.

Matrices are numpy object arrays of Python integers (or ``Fraction`` in
rational mode) so nothing ever passes through floating point. Ranks and
echelon forms are taken by FLINT: ``nmod_mat`` over one of ten fixed primes
just below 2**62, ``fmpz_mat``/``fmpq_mat`` over the rationals.
"""
import hashlib
import logging
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

import flint
import numpy as np

logger = logging.getLogger(__name__)

# The ten largest primes below 2**62. Rank trial t over base index i uses PRIMES[(i + t) % 10].
PRIMES = tuple((1 << 62) - k for k in (57, 87, 117, 143, 153, 167, 171, 195, 203, 273))

# Rational-mode samples are integers drawn uniformly from [-SAMPLE_BOX, SAMPLE_BOX].
SAMPLE_BOX = 1000

_MASK64 = (1 << 64) - 1


class FieldKind(Enum):
    EXACT_RATIONAL = 'qq'
    PRIME_FIELD = 'fp'


@dataclass(frozen=True)
class FieldContext:
    """The field every rank of one computation is taken over."""
    kind: FieldKind
    prime: int | None = None

    def __post_init__(self):
        if self.kind is FieldKind.PRIME_FIELD:
            if self.prime not in PRIMES:
                raise ValueError(f"{self.prime} is not one of the baked-in primes")
        elif self.prime is not None:
            raise ValueError("the rational context carries no prime")

    @classmethod
    def rational(cls):
        return cls(FieldKind.EXACT_RATIONAL)

    @classmethod
    def prime_field(cls, index=0):
        return cls(FieldKind.PRIME_FIELD, PRIMES[index % len(PRIMES)])

    @classmethod
    def from_mode(cls, mode, prime_index=0):
        if mode == FieldKind.EXACT_RATIONAL.value:
            return cls.rational()
        if mode == FieldKind.PRIME_FIELD.value:
            return cls.prime_field(prime_index)
        raise ValueError(f"unknown mode {mode!r}")

    @property
    def is_prime(self):
        return self.kind is FieldKind.PRIME_FIELD

    @property
    def index(self):
        return PRIMES.index(self.prime) if self.is_prime else None

    def for_trial(self, trial):
        """Field of rank trial ``trial``: the next baked-in prime per trial, qq unchanged."""
        if not self.is_prime:
            return self
        return FieldContext.prime_field(self.index + trial)

    @property
    def mode(self):
        return self.kind.value

    @property
    def certainty(self):
        return 'probabilistic' if self.is_prime else 'exact'

    def element(self, value):
        """Canonical representative of ``value`` in this field."""
        if self.is_prime:
            if isinstance(value, Fraction):
                return value.numerator * pow(value.denominator, -1, self.prime) % self.prime
            return int(value) % self.prime
        if isinstance(value, Fraction):
            return value.numerator if value.denominator == 1 else value
        return int(value)

    def array(self, values):
        """Object array of canonical field elements."""
        arr = np.array(values, dtype=object)
        if arr.size == 0:
            return arr
        if self.is_prime and not any(isinstance(x, Fraction) for x in arr.flat):
            return arr % self.prime
        return np.frompyfunc(self.element, 1, 1)(arr)

    def __str__(self):
        return f"fp({self.prime})" if self.is_prime else "qq"


@dataclass(frozen=True, eq=False)
class DenseMatrix:
    """Immutable rows x cols matrix over a FieldContext."""
    ctx: FieldContext
    entries: np.ndarray

    def __post_init__(self):
        arr = self.ctx.array(self.entries)
        if arr.ndim != 2:
            raise ValueError(f"expected a 2-D table, got shape {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, 'entries', arr)

    @classmethod
    def from_rows(cls, ctx, rows, cols):
        rows = list(rows)
        if not rows:
            return cls(ctx, np.empty((0, cols), dtype=object))
        return cls(ctx, rows)

    @classmethod
    def identity(cls, ctx, size):
        return cls(ctx, np.identity(size, dtype=int).astype(object))

    @property
    def rows(self):
        return self.entries.shape[0]

    @property
    def cols(self):
        return self.entries.shape[1]

    @property
    def shape(self):
        return self.entries.shape

    def rank(self):
        return rank(self)

    def kernel_basis(self):
        return kernel_basis(self)

    def transpose(self):
        return DenseMatrix(self.ctx, self.entries.T.copy())

    def over(self, ctx):
        """The same entries read in another field."""
        return DenseMatrix(ctx, self.entries.copy())

    def times_transpose(self, other):
        """``self @ other.T`` computed in this matrix's field."""
        if self.cols != other.cols:
            raise ValueError(f"column mismatch {self.cols} != {other.cols}")
        if not (self.rows and other.rows and self.cols):
            return DenseMatrix(self.ctx, np.zeros((self.rows, other.rows), dtype=object))
        product = _flint_mat(self) * _flint_mat(other).transpose()
        entries = np.array(_flint_entries(product, self.ctx), dtype=object)
        return DenseMatrix(self.ctx, entries.reshape(self.rows, other.rows))

    def to_lists(self):
        return [list(row) for row in self.entries]

    def __eq__(self, other):
        if not isinstance(other, DenseMatrix):
            return NotImplemented
        return self.ctx == other.ctx and self.shape == other.shape and self.to_lists() == other.to_lists()

    def __repr__(self):
        return f"DenseMatrix({self.rows}x{self.cols} over {self.ctx})"


def rank(matrix):
    """Exact rank of ``matrix`` over its field."""
    if matrix.rows == 0 or matrix.cols == 0:
        return 0
    if matrix.ctx.is_prime:
        return _flint_mat(matrix).rank()
    return flint.fmpz_mat(_integer_rows(matrix.entries).tolist()).rank()


def kernel_basis(matrix):
    """Basis of the right null space, one vector per row.

    Row k is the free-column solution of the reduced echelon form, so the
    basis is the same on every run. In rational mode every row is scaled to
    a primitive integer vector.
    """
    ctx = matrix.ctx
    reduced, pivots = _rref(matrix)
    pivot_set = set(pivots)
    basis = []
    for column in range(matrix.cols):
        if column in pivot_set:
            continue
        vector = [0] * matrix.cols
        vector[column] = 1
        for row, pivot_col in zip(reduced, pivots):
            vector[pivot_col] = -row[column]
        basis.append([x % ctx.prime for x in vector] if ctx.is_prime else _primitive(vector))
    return DenseMatrix.from_rows(ctx, basis, matrix.cols)


def _flint_mat(matrix):
    """The matrix as an ``nmod_mat`` (fp) or ``fmpq_mat`` (qq)."""
    if matrix.ctx.is_prime:
        return flint.nmod_mat(matrix.rows, matrix.cols, matrix.entries.ravel().tolist(), matrix.ctx.prime)
    return flint.fmpq_mat(matrix.rows, matrix.cols, [_fmpq(x) for x in matrix.entries.flat])


def _flint_entries(mat, ctx):
    """Row-major entries of a FLINT matrix as Python ints or Fractions."""
    if ctx.is_prime:
        return [int(x) for x in mat.entries()]
    return [Fraction(int(x.p), int(x.q)) for x in mat.entries()]


def _fmpq(value):
    value = Fraction(value)
    return flint.fmpq(value.numerator, value.denominator)


def _rref(matrix):
    """Reduced row echelon form; returns (nonzero rows, pivot columns)."""
    if matrix.rows == 0 or matrix.cols == 0:
        return [], []
    cols = matrix.cols
    reduced, r = _flint_mat(matrix).rref()
    flat = _flint_entries(reduced, matrix.ctx)[:r * cols]
    rows = [flat[i * cols:(i + 1) * cols] for i in range(r)]
    pivots = [next(k for k, x in enumerate(row) if x) for row in rows]
    return rows, pivots


def _integer_rows(entries):
    """Scale each row by the lcm of its denominators."""
    if not any(isinstance(x, Fraction) for x in entries.flat):
        return entries
    rows = []
    for row in entries:
        scale = math.lcm(*(Fraction(x).denominator for x in row))
        rows.append([int(Fraction(x) * scale) for x in row])
    return np.array(rows, dtype=object)


def _primitive(row):
    scale = math.lcm(*(Fraction(x).denominator for x in row)) if len(row) else 1
    ints = [int(Fraction(x) * scale) for x in row]
    g = math.gcd(*ints)
    return [x // g for x in ints] if g > 1 else ints


def stream_id(task, *keys):
    """Stable 64-bit id for a named task, e.g. ``stream_id('sigma', j, trial)``."""
    text = '|'.join(str(part) for part in (task, *keys))
    return int.from_bytes(hashlib.blake2b(text.encode('utf-8'), digest_size=8).digest(), 'big')


class SeededSampler:
    """Deterministic element stream for one (seed, stream-id) pair.

    PCG64 seeded through a SeedSequence gives the same draws on every
    platform, so results never depend on which process or thread asks.
    """

    def __init__(self, seed, stream=0):
        self.seed = int(seed) & _MASK64
        self.stream_id = int(stream) & _MASK64
        self.position = 0
        self._rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([self.seed, self.stream_id])))

    def next_element(self, ctx):
        self.position += 1
        if ctx.is_prime:
            return int(self._rng.integers(0, ctx.prime))
        return int(self._rng.integers(-SAMPLE_BOX, SAMPLE_BOX, endpoint=True))

    def elements(self, ctx, count):
        return [self.next_element(ctx) for _ in range(count)]

    def substream(self, task, *keys):
        """A fresh sampler on the same seed for a named task."""
        return SeededSampler(self.seed, stream_id(task, *keys))

    def __repr__(self):
        return f"SeededSampler(seed={self.seed}, stream_id={self.stream_id:#018x}, position={self.position})"
