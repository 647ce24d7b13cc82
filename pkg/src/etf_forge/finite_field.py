"""Concrete models of GF(p^s) via the companion matrix of a primitive polynomial.

Field elements are coordinate vectors over F_p in the basis 1, a, ..., a^(s-1)
where a is a root of the chosen modulus.  Internally an element is also
addressed by its integer code sum(c_i * p**i); for s = 1 the code is the
residue itself, so prime fields read naturally.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from functools import lru_cache
from typing import NamedTuple, Sequence

import numpy as np

from .errors import ConsistencyError

FfElt = tuple  # coordinate vector, constant coordinate first

DEFAULT_FIELD_BOUND = 10**4

__all__ = [
    "FfElt",
    "FieldSpec",
    "Intertwiner",
    "NormalBasisResidue",
    "field_new",
    "field_for_order",
    "field_from_json",
    "qr_codes",
    "qr_set",
    "is_paley_admissible",
    "normal_basis_qr",
    "intertwiner",
    "verify_intertwiner",
    "pairing",
    "is_prime",
    "prime_power",
]


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    i = 3
    while i * i <= n:
        if n % i == 0:
            return False
        i += 2
    return True


def prime_power(q: int) -> tuple[int, int] | None:
    """Return (p, s) with q = p**s, or None if q is not a prime power."""
    if q < 2:
        return None
    for p in range(2, q + 1):
        if q % p == 0:
            s = 0
            while q % p == 0:
                q //= p
                s += 1
            return (p, s) if q == 1 else None
    return None


def _prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


# -- small dense linear algebra over F_p ----------------------------------------


def mat_mul(a, b, p):
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(len(b))) % p for j in range(len(b[0])))
        for i in range(len(a))
    )


def mat_vec(a, v, p):
    return tuple(sum(a[i][k] * v[k] for k in range(len(v))) % p for i in range(len(a)))


def transpose(a):
    return tuple(zip(*a))


def rref_mod_p(rows: Sequence[Sequence[int]], p: int) -> tuple[list[list[int]], list[int]]:
    """Reduced row echelon form over F_p; returns (rows, pivot columns)."""
    m = [list(r) for r in rows]
    if not m:
        return m, []
    ncols = len(m[0])
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] % p), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = pow(m[r][c], p - 2, p)
        m[r] = [(x * inv) % p for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] % p:
                f = m[i][c]
                m[i] = [(x - f * y) % p for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank_mod_p(rows, p: int) -> int:
    return len(rref_mod_p(rows, p)[1])


def nullspace_mod_p(rows, ncols: int, p: int) -> list[list[int]]:
    """Basis of {x : rows . x = 0}, one vector per free column in ascending order."""
    red, pivots = rref_mod_p(rows, p) if rows else ([], [])
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [0] * ncols
        v[f] = 1
        for r, pc in zip(red, pivots):
            v[pc] = (-r[f]) % p
        basis.append(v)
    return basis


def inverse_mod_p(a, p: int):
    n = len(a)
    aug = [list(a[i]) + [int(i == j) for j in range(n)] for i in range(n)]
    red, pivots = rref_mod_p(aug, p)
    if pivots[:n] != list(range(n)) or len(red) < n:
        raise ZeroDivisionError("matrix is singular over F_p")
    return tuple(tuple(row[n:]) for row in red)


# -- polynomials over F_p (constant term first) --------------------------------


def _poly_mod(a: list[int], b: Sequence[int], p: int) -> list[int]:
    a = [x % p for x in a]
    db = len(b) - 1
    inv = pow(b[-1], p - 2, p)
    for i in range(len(a) - 1, db - 1, -1):
        c = (a[i] * inv) % p
        if c:
            for j in range(db + 1):
                a[i - db + j] = (a[i - db + j] - c * b[j]) % p
    a = a[:db]
    while a and a[-1] == 0:
        a.pop()
    return a


def is_irreducible(poly: Sequence[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree <= deg/2."""
    s = len(poly) - 1
    if s < 1:
        return False
    for deg in range(1, s // 2 + 1):
        for tail in itertools.product(range(p), repeat=deg):
            if not _poly_mod(list(poly), list(tail) + [1], p):
                return False
    return True


# -- the field model ------------------------------------------------------------


@dataclass(frozen=True)
class FieldSpec:
    p: int
    s: int
    modulus: tuple[int, ...]  # monic, constant term first, length s + 1
    companion: tuple[tuple[int, ...], ...] = field(repr=False)
    exp_table: tuple[int, ...] = field(repr=False, compare=False)  # log -> code
    log_table: tuple[int, ...] = field(repr=False, compare=False)  # code -> log (-1 at 0)

    @property
    def q(self) -> int:
        return self.p**self.s

    # element codes

    def coords(self, code: int) -> FfElt:
        out = []
        for _ in range(self.s):
            code, r = divmod(code, self.p)
            out.append(r)
        return tuple(out)

    def code(self, x) -> int:
        if isinstance(x, (int, np.integer)):
            if not 0 <= x < self.q:
                raise ValueError(f"element code {x} outside F_{self.q}")
            return int(x)
        if len(x) != self.s:
            raise ValueError(f"expected {self.s} coordinates, got {len(x)}")
        return sum((int(c) % self.p) * self.p**i for i, c in enumerate(x))

    def label(self, code: int):
        """Human-facing label: the residue for prime fields, coordinates otherwise."""
        return code if self.s == 1 else list(self.coords(code))

    def elements(self) -> range:
        return range(self.q)

    # arithmetic on codes

    def add(self, x: int, y: int) -> int:
        if self.s == 1:
            return (x + y) % self.p
        return self.code([a + b for a, b in zip(self.coords(x), self.coords(y))])

    def neg(self, x: int) -> int:
        if self.s == 1:
            return (-x) % self.p
        return self.code([-a for a in self.coords(x)])

    def sub(self, x: int, y: int) -> int:
        return self.add(x, self.neg(y))

    def mul(self, x: int, y: int) -> int:
        if x == 0 or y == 0:
            return 0
        return self.exp_table[(self.log_table[x] + self.log_table[y]) % (self.q - 1)]

    def power(self, x: int, k: int) -> int:
        if x == 0:
            return 0 if k else 1
        return self.exp_table[(self.log_table[x] * k) % (self.q - 1)]

    def frobenius(self, x: int) -> int:
        return self.power(x, self.p)

    def alpha_power(self, k: int) -> int:
        """Code of C^k e_1."""
        return self.exp_table[k % (self.q - 1)]

    def is_qr(self, x: int) -> bool:
        return x != 0 and self.log_table[x] % 2 == 0

    def to_json(self) -> dict:
        return {"p": self.p, "s": self.s, "modulus": list(self.modulus)}


def _companion(modulus: Sequence[int], p: int) -> tuple[tuple[int, ...], ...]:
    s = len(modulus) - 1
    rows = [[0] * s for _ in range(s)]
    for i in range(1, s):
        rows[i][i - 1] = 1
    for i in range(s):
        rows[i][s - 1] = (-modulus[i]) % p
    return tuple(tuple(r) for r in rows)


def _power_table(modulus: Sequence[int], p: int) -> list[int] | None:
    """Codes of C^k e_1 for k = 0..q-2, or None if C does not have order q - 1."""
    s = len(modulus) - 1
    q = p**s
    last = [(-c) % p for c in modulus[:s]]
    v = [1] + [0] * (s - 1)
    weights = [p**i for i in range(s)]
    table = []
    for k in range(q - 1):
        code = sum(c * w for c, w in zip(v, weights))
        if k and code == 1:
            return None
        table.append(code)
        top = v[-1]
        v = [(last[0] * top) % p] + [(v[i - 1] + last[i] * top) % p for i in range(1, s)]
    if v != [1] + [0] * (s - 1):
        return None
    return table


@lru_cache(maxsize=64)
def field_new(
    p: int, s: int = 1, modulus: tuple[int, ...] | None = None, bound: int = DEFAULT_FIELD_BOUND
) -> FieldSpec:
    """Build GF(p^s) with a primitive modulus.

    Without an explicit ``modulus`` the candidates are scanned in lexicographic
    order of the companion matrix's last column (the coordinates of a^s), and
    the first one of multiplicative order p^s - 1 is taken.  For s = 1 this
    picks the smallest primitive root.
    """
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if s < 1:
        raise ValueError(f"extension degree must be >= 1, got {s}")
    if p**s > bound:
        raise ValueError(f"field size {p}^{s} exceeds the bound {bound}")
    if modulus is not None:
        modulus = tuple(int(c) % p for c in modulus)
        if len(modulus) != s + 1 or modulus[-1] != 1:
            raise ValueError(f"modulus must be monic of degree {s}, constant term first")
        if not is_irreducible(modulus, p):
            raise ValueError(f"modulus {modulus} is reducible over F_{p}")
        table = _power_table(modulus, p)
        if table is None:
            raise ValueError(f"modulus {modulus} is irreducible but not primitive")
    else:
        table = None
        for last in itertools.product(range(p), repeat=s):
            if last[0] == 0:
                continue
            cand = tuple((-c) % p for c in last) + (1,)
            table = _power_table(cand, p)
            if table is not None:
                modulus = cand
                break
        if table is None:  # pragma: no cover - primitive polynomials always exist
            raise ConsistencyError(f"no primitive modulus found for GF({p}^{s})")
    log = [-1] * (p**s)
    for k, c in enumerate(table):
        log[c] = k
    if sorted(table) != list(range(1, p**s)):
        raise ConsistencyError("discrete log table is not a bijection")
    return FieldSpec(p, s, modulus, _companion(modulus, p), tuple(table), tuple(log))


def field_for_order(q: int, modulus: Sequence[int] | None = None, bound: int = DEFAULT_FIELD_BOUND) -> FieldSpec:
    pp = prime_power(q)
    if pp is None:
        raise ValueError(f"{q} is not a prime power")
    return field_new(pp[0], pp[1], tuple(modulus) if modulus is not None else None, bound)


def field_from_json(data: dict, bound: int = DEFAULT_FIELD_BOUND) -> FieldSpec:
    return field_new(int(data["p"]), int(data["s"]), tuple(data["modulus"]), bound)


def qr_set(fld: FieldSpec) -> list[FfElt]:
    """Quadratic residues as coordinate vectors, in the order C^(2k) e_1."""
    if fld.p == 2:
        return [fld.coords(c) for c in fld.exp_table]
    return [fld.coords(fld.alpha_power(2 * k)) for k in range((fld.q - 1) // 2)]


def qr_codes(fld: FieldSpec) -> list[int]:
    return [fld.alpha_power(2 * k) for k in range((fld.q - 1) // 2)]


def is_paley_admissible(fld: FieldSpec) -> bool:
    ok = fld.q % 4 == 3
    if ok:
        qr = set(qr_codes(fld))
        nr = {c for c in range(1, fld.q) if c not in qr}
        if {fld.neg(x) for x in qr} != nr:
            raise ConsistencyError("NR != -QR although q = 3 mod 4")
    return ok


class NormalBasisResidue(NamedTuple):
    b: int  # the residue is C^(2b) e_1
    element: FfElt
    orbit: tuple[FfElt, ...]  # x, x^p, ..., x^(p^(s-1))


def normal_basis_qr(fld: FieldSpec) -> NormalBasisResidue:
    """First residue C^(2b) e_1 (smallest b) whose Frobenius orbit is a basis."""
    if fld.q % 4 != 3:
        raise ValueError(f"q = {fld.q} is not 3 mod 4")
    for b in range((fld.q - 1) // 2):
        x = fld.alpha_power(2 * b)
        orbit = [x]
        for _ in range(fld.s - 1):
            orbit.append(fld.frobenius(orbit[-1]))
        vecs = [fld.coords(c) for c in orbit]
        if rank_mod_p(vecs, fld.p) == fld.s:
            return NormalBasisResidue(b, fld.coords(x), tuple(vecs))
    raise ConsistencyError(f"no normal basis of residues in GF({fld.q})")  # pragma: no cover


def pairing(x: Sequence[int], y: Sequence[int], p: int) -> int:
    """The dot product sum(x_i * y_i) mod p."""
    if len(x) != len(y):
        raise ValueError("pairing of vectors of different lengths")
    return sum(a * b for a, b in zip(x, y)) % p


@dataclass(frozen=True)
class Intertwiner:
    S: tuple[tuple[int, ...], ...]
    S_inv: tuple[tuple[int, ...], ...]
    b: int  # normal-basis residue used in the pairing constraints

    def apply(self, fld: FieldSpec, y: int) -> int:
        return fld.code(mat_vec(self.S, fld.coords(y), fld.p))

    def apply_inverse(self, fld: FieldSpec, y: int) -> int:
        return fld.code(mat_vec(self.S_inv, fld.coords(y), fld.p))


def _sym_index(s: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(s) for j in range(i, s)]


def intertwiner(fld: FieldSpec) -> Intertwiner:
    """Symmetric invertible S with S C = C^T S and equal pairings on the normal basis.

    The unknowns are the upper-triangular entries of S; the homogeneous system
    is solved over F_p and the first nullspace basis vector is used.
    """
    p, s = fld.p, fld.s
    nb = normal_basis_qr(fld)
    C = fld.companion
    idx = _sym_index(s)
    pos = {}
    for t, (i, j) in enumerate(idx):
        pos[(i, j)] = pos[(j, i)] = t

    rows = []
    # (S C - C^T S)_{ij} = sum_k S_ik C_kj - C_ki S_kj
    for i in range(s):
        for j in range(s):
            row = [0] * len(idx)
            for k in range(s):
                row[pos[(i, k)]] += C[k][j]
                row[pos[(k, j)]] -= C[k][i]
            rows.append([x % p for x in row])
    # e1^T S (C^(2b p^k) - C^(2b p^(k+1))) e1 = 0
    for k in range(s - 1):
        u = fld.coords(fld.alpha_power(2 * nb.b * p**k))
        w = fld.coords(fld.alpha_power(2 * nb.b * p ** (k + 1)))
        row = [0] * len(idx)
        for j in range(s):
            row[pos[(0, j)]] += u[j] - w[j]
        rows.append([x % p for x in row])

    for vec in nullspace_mod_p(rows, len(idx), p):
        S = tuple(tuple(vec[pos[(i, j)]] for j in range(s)) for i in range(s))
        try:
            S_inv = inverse_mod_p(S, p)
        except ZeroDivisionError:
            continue
        result = Intertwiner(S, S_inv, nb.b)
        verify_intertwiner(fld, result)
        return result
    raise ConsistencyError(f"no invertible intertwiner found for GF({fld.q})")


def verify_intertwiner(
    fld: FieldSpec, it: Intertwiner, exhaustive: bool | None = None, samples: int = 2000, seed: int = 0
) -> None:
    """Raise ConsistencyError unless S has all the defining properties.

    Both pairing identities are checked on every (k, l, n) when ``exhaustive``
    (the default for q <= 10^4 since the check is vectorised), else on a
    deterministic random sample.
    """
    p, s = fld.p, fld.s
    S = it.S
    C = fld.companion
    if S != transpose(S):
        raise ConsistencyError("S is not symmetric")
    if mat_mul(S, it.S_inv, p) != tuple(tuple(int(i == j) for j in range(s)) for i in range(s)):
        raise ConsistencyError("S_inv is not the inverse of S")
    if mat_mul(S, C, p) != mat_mul(transpose(C), S, p):
        raise ConsistencyError("S C != C^T S")
    for k in range(s - 1):
        u = fld.coords(fld.alpha_power(2 * it.b * p**k))
        w = fld.coords(fld.alpha_power(2 * it.b * p ** (k + 1)))
        if pairing((1,) + (0,) * (s - 1), mat_vec(S, [a - b for a, b in zip(u, w)], p), p):
            raise ConsistencyError(f"normal-basis pairing constraint {k} fails")

    d = (fld.q - 1) // 2
    E = np.array([fld.coords(fld.alpha_power(2 * k)) for k in range(d)], dtype=np.int64)
    SE = (E @ np.array(S, dtype=np.int64).T) % p
    F = (E @ SE.T) % p  # F[k, l] = <C^2k e1, S C^2l e1>
    if exhaustive is None:
        exhaustive = True
    ks = np.arange(d)
    if exhaustive:
        for n in range(d):
            shifted = F[np.ix_((ks + n) % d, (ks - n) % d)]
            if not np.array_equal(F, shifted):
                raise ConsistencyError(f"shift identity fails for n = {n}")
    else:
        rng = random.Random(seed)
        for _ in range(samples):
            k, l, n = rng.randrange(d), rng.randrange(d), rng.randrange(d)
            if F[k, l] != F[(k + n) % d, (l - n) % d]:
                raise ConsistencyError(f"shift identity fails at {(k, l, n)}")
    frob = F[np.ix_((p * ks) % d, (p * ks) % d)]
    if not np.array_equal(F, frob):
        raise ConsistencyError("Frobenius identity fails")
