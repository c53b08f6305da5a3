"""Exact scalars and matrices over the rationals or a prime field.

Rational scalars are Python ints where possible and ``Fraction`` otherwise;
prime-field scalars are ints in ``range(p)``. Elimination always pivots on the
first nonzero entry in column order so results are reproducible.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Sequence


class FieldMismatch(ValueError):
    pass


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


class Field:
    p: int | None = None

    def __call__(self, x):
        raise NotImplementedError

    def div(self, a, b):
        raise NotImplementedError

    def norm(self, x):
        return x

    def format(self, x) -> str:
        return str(x)

    def __eq__(self, other):
        return isinstance(other, Field) and self.p == other.p

    def __hash__(self):
        return hash(("field", self.p))

    def __repr__(self):
        return str(self)


class Rationals(Field):
    p = None

    def __call__(self, x):
        if isinstance(x, bool):
            x = int(x)
        if isinstance(x, int):
            return x
        if isinstance(x, str):
            x = Fraction(x.strip())
        else:
            x = Fraction(x)
        return x.numerator if x.denominator == 1 else x

    def norm(self, x):
        if type(x) is Fraction and x.denominator == 1:
            return x.numerator
        return x

    def div(self, a, b):
        if b == 0:
            raise ZeroDivisionError("division by zero in Q")
        q = Fraction(a) / b
        return q.numerator if q.denominator == 1 else q

    def inv(self, a):
        return self.div(1, a)

    def random_element(self, rng, spread: int = 3):
        return rng.randint(-spread, spread)

    def __str__(self):
        return "Q"


class PrimeField(Field):
    def __init__(self, p: int):
        if not _is_prime(p):
            raise ValueError(f"{p} is not prime")
        if p >= 2**63:
            raise ValueError("modulus must fit in a machine word")
        self.p = p

    def __call__(self, x):
        if isinstance(x, str):
            x = Fraction(x.strip())
        if isinstance(x, Fraction):
            return (x.numerator * pow(x.denominator, -1, self.p)) % self.p
        return int(x) % self.p

    def norm(self, x):
        return x % self.p

    def div(self, a, b):
        if b % self.p == 0:
            raise ZeroDivisionError(f"division by zero in GF({self.p})")
        return (a * pow(b, -1, self.p)) % self.p

    def inv(self, a):
        return self.div(1, a)

    def random_element(self, rng, spread: int = 3):
        return rng.randrange(self.p)

    def format(self, x) -> str:
        # balanced representative keeps files readable
        return str(x - self.p) if x > self.p // 2 else str(x)

    def __str__(self):
        return f"GF({self.p})"


QQ = Rationals()


def parse_field(text: str) -> Field:
    t = text.strip().replace(" ", "")
    if t in ("Q", "QQ"):
        return QQ
    m = re.fullmatch(r"GF\(?(\d+)\)?", t)
    if m:
        return PrimeField(int(m.group(1)))
    raise ValueError(f"unknown field {text!r}; expected Q or GF(p)")


def check_same_field(*fields: Field) -> Field:
    first = fields[0]
    for f in fields[1:]:
        if f != first:
            raise FieldMismatch(f"mixed fields {first} and {f}")
    return first


class Echelon:
    """Incremental reduced row echelon form over sparse rows.

    Rows are dicts ``{column: value}``. Every stored row has a pivot equal to 1
    and zeros in all other pivot columns, so reducing a vector is one pass.
    """

    def __init__(self, field: Field):
        self.field = field
        self.rows: dict[int, dict[int, object]] = {}

    def __len__(self):
        return len(self.rows)

    @property
    def rank(self) -> int:
        return len(self.rows)

    def reduce(self, vec: dict) -> dict:
        f = self.field
        v = {c: x for c, x in vec.items() if x != 0}
        hits = [c for c in v if c in self.rows]
        for c in hits:
            a = v.get(c)
            if not a:
                continue
            for k, x in self.rows[c].items():
                y = f.norm(v.get(k, 0) - a * x)
                if y == 0:
                    v.pop(k, None)
                else:
                    v[k] = y
        return v

    def add(self, vec: dict) -> bool:
        """Insert ``vec``; return True if it was independent of the current rows."""
        f = self.field
        v = self.reduce(vec)
        if not v:
            return False
        piv = min(v)
        inv = f.inv(v[piv])
        v = {k: f.norm(x * inv) for k, x in v.items()}
        for row in self.rows.values():
            a = row.get(piv)
            if a:
                for k, x in v.items():
                    y = f.norm(row.get(k, 0) - a * x)
                    if y == 0:
                        row.pop(k, None)
                    else:
                        row[k] = y
        self.rows[piv] = v
        return True

    def contains(self, vec: dict) -> bool:
        return not self.reduce(vec)

    def pivots(self) -> list[int]:
        return sorted(self.rows)

    def kernel(self, ncols: int) -> list[dict]:
        """Null space basis when the stored rows are read as equations.

        Each returned vector has a 1 at its own free column and 0 at every
        other free column.
        """
        f = self.field
        free = [c for c in range(ncols) if c not in self.rows]
        by_col: dict[int, list[tuple[int, object]]] = {}
        for p, row in self.rows.items():
            for k, x in row.items():
                if k != p:
                    by_col.setdefault(k, []).append((p, x))
        out = []
        for c in free:
            v = {c: f(1)}
            for p, x in by_col.get(c, ()):
                v[p] = f.norm(-x)
            out.append(v)
        return out


class ExactMatrix:
    """Dense exact matrix. Treat instances as immutable."""

    __slots__ = ("field", "nrows", "ncols", "rows")

    def __init__(self, field: Field, nrows: int, ncols: int, rows=None):
        self.field = field
        self.nrows = nrows
        self.ncols = ncols
        if rows is None:
            rows = [[0] * ncols for _ in range(nrows)]
        else:
            rows = [[field(x) for x in r] for r in rows]
            if len(rows) != nrows or any(len(r) != ncols for r in rows):
                raise ValueError(f"entries do not match shape {nrows}x{ncols}")
        self.rows = rows

    @classmethod
    def _raw(cls, field, nrows, ncols, rows):
        m = cls.__new__(cls)
        m.field, m.nrows, m.ncols, m.rows = field, nrows, ncols, rows
        return m

    @classmethod
    def zeros(cls, field, nrows, ncols):
        return cls._raw(field, nrows, ncols, [[0] * ncols for _ in range(nrows)])

    @classmethod
    def identity(cls, field, n):
        rows = [[0] * n for _ in range(n)]
        for i in range(n):
            rows[i][i] = 1
        return cls._raw(field, n, n, rows)

    @classmethod
    def from_columns(cls, field, nrows, columns: Sequence[Sequence]):
        rows = [[field(col[i]) for col in columns] for i in range(nrows)]
        return cls._raw(field, nrows, len(columns), rows)

    @classmethod
    def from_sparse_columns(cls, field, nrows, columns: Sequence[dict]):
        rows = [[0] * len(columns) for _ in range(nrows)]
        for j, col in enumerate(columns):
            for i, x in col.items():
                rows[i][j] = x
        return cls._raw(field, nrows, len(columns), rows)

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other):
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return (self.field == other.field and self.shape == other.shape
                and self.rows == other.rows)

    def __hash__(self):
        return hash((self.nrows, self.ncols, tuple(map(tuple, self.rows))))

    def __repr__(self):
        return f"ExactMatrix({self.field}, {self.nrows}x{self.ncols}, {self.tolist()})"

    def tolist(self):
        return [list(r) for r in self.rows]

    def column(self, j) -> list:
        return [r[j] for r in self.rows]

    def columns(self) -> list[list]:
        return [self.column(j) for j in range(self.ncols)]

    def sparse_rows(self) -> list[dict]:
        return [{j: x for j, x in enumerate(r) if x != 0} for r in self.rows]

    def is_zero(self) -> bool:
        return all(x == 0 for r in self.rows for x in r)

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix._raw(self.field, self.ncols, self.nrows,
                                [list(c) for c in zip(*self.rows)] if self.nrows else
                                [[] for _ in range(self.ncols)])

    T = property(transpose)

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        f = check_same_field(self.field, other.field)
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        n = other.ncols
        brows = other.rows
        out = []
        for r in self.rows:
            acc = [0] * n
            for k, a in enumerate(r):
                if a:
                    b = brows[k]
                    for j in range(n):
                        if b[j]:
                            acc[j] += a * b[j]
            out.append([f.norm(x) for x in acc])
        return ExactMatrix._raw(f, self.nrows, n, out)

    def apply(self, vec: Sequence) -> list:
        f = self.field
        if len(vec) != self.ncols:
            raise ValueError("vector length mismatch")
        return [f.norm(sum(a * b for a, b in zip(r, vec) if a and b)) for r in self.rows]

    def __add__(self, other):
        f = check_same_field(self.field, other.field)
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return ExactMatrix._raw(f, self.nrows, self.ncols,
                                [[f.norm(a + b) for a, b in zip(r, s)]
                                 for r, s in zip(self.rows, other.rows)])

    def __neg__(self):
        f = self.field
        return ExactMatrix._raw(f, self.nrows, self.ncols,
                                [[f.norm(-a) for a in r] for r in self.rows])

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "ExactMatrix":
        f = self.field
        c = f(c)
        return ExactMatrix._raw(f, self.nrows, self.ncols,
                                [[f.norm(a * c) for a in r] for r in self.rows])

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "ExactMatrix":
        return ExactMatrix._raw(self.field, len(rows), len(cols),
                                [[self.rows[i][j] for j in cols] for i in rows])

    def echelon(self) -> Echelon:
        e = Echelon(self.field)
        for r in self.sparse_rows():
            e.add(r)
        return e

    def rank(self) -> int:
        return rank(self)

    def kernel_basis(self) -> "ExactMatrix":
        return kernel_basis(self)

    def solve(self, b):
        return solve(self, b)

    def inverse(self) -> "ExactMatrix | None":
        if self.nrows != self.ncols:
            return None
        n = self.nrows
        e = Echelon(self.field)
        for i, r in enumerate(self.rows):
            v = {j: x for j, x in enumerate(r) if x != 0}
            v[n + i] = 1
            e.add(v)
        if sorted(e.rows)[:n] != list(range(n)) or any(p >= n for p in e.rows):
            return None
        rows = [[e.rows[i].get(n + j, 0) for j in range(n)] for i in range(n)]
        return ExactMatrix._raw(self.field, n, n, rows)


def hstack(field, nrows, blocks: Iterable[ExactMatrix]) -> ExactMatrix:
    rows = [[] for _ in range(nrows)]
    ncols = 0
    for b in blocks:
        if b.nrows != nrows:
            raise ValueError("row count mismatch in hstack")
        for i in range(nrows):
            rows[i].extend(b.rows[i])
        ncols += b.ncols
    return ExactMatrix._raw(field, nrows, ncols, rows)


def block_diag(field, blocks: Sequence[ExactMatrix]) -> ExactMatrix:
    n = sum(b.nrows for b in blocks)
    m = sum(b.ncols for b in blocks)
    out = ExactMatrix.zeros(field, n, m)
    r0 = c0 = 0
    for b in blocks:
        for i in range(b.nrows):
            out.rows[r0 + i][c0:c0 + b.ncols] = b.rows[i]
        r0 += b.nrows
        c0 += b.ncols
    return out


def rank(m: ExactMatrix) -> int:
    return m.echelon().rank


def kernel_basis(m: ExactMatrix) -> ExactMatrix:
    """Columns form a basis of the right null space of ``m``."""
    vecs = m.echelon().kernel(m.ncols)
    return ExactMatrix.from_sparse_columns(m.field, m.ncols, vecs)


def solve(m: ExactMatrix, b: Sequence) -> list | None:
    """Some ``x`` with ``m @ x == b``, or None when the system is inconsistent."""
    if len(b) != m.nrows:
        raise ValueError(f"right-hand side has {len(b)} entries, expected {m.nrows}")
    f = m.field
    b = [f(x) for x in b]
    n = m.ncols
    e = Echelon(f)
    for r, bi in zip(m.rows, b):
        v = {j: x for j, x in enumerate(r) if x != 0}
        if bi:
            v[n] = bi
        e.add(v)
    if n in e.rows:
        return None
    x = [0] * n
    for p, row in e.rows.items():
        x[p] = row.get(n, 0)
    if m.apply(x) != b:
        raise ArithmeticError("back-substitution check failed")
    return x
