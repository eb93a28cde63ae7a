"""Binary extension fields GF(2^k) in polynomial basis.

Conventions used everywhere in this package:

* A field element is a polynomial over GF(2) of degree < k, stored as an
  integer whose bit j is the coefficient of x^j.
* The external bit-string encoding writes coefficients low degree first:
  character i of the string (1-based) is the coefficient of x^(i-1).
  So in GF(4): "00" = 0, "10" = 1, "01" = x, "11" = 1 + x.
* Elements are enumerated by their integer value, i.e. the i-th element of
  the field (0-based) is the one whose coefficient vector encodes i.  "The
  first h elements" always means integer values 0..h-1.
* Hex serialization writes the integer value with ceil(k/4) digits.

Fields of "tower" degree k = 2*3^lambda use the modulus x^k + x^(k/2) + 1,
which is irreducible for every such k.  Other degrees up to 24 fall back to
a built-in table of irreducible polynomials so that small test fields such
as GF(8) and GF(16) are available.
"""

from __future__ import annotations

import functools

import numpy as np

# Irreducible polynomials for degrees without a tower modulus, given as
# exponent tuples (the tower degrees 2, 6, 18 are handled separately).
_FALLBACK_MODULI = {
    1: (1, 0),
    3: (3, 1, 0),
    4: (4, 1, 0),
    5: (5, 2, 0),
    7: (7, 1, 0),
    8: (8, 4, 3, 2, 0),
    9: (9, 4, 0),
    10: (10, 3, 0),
    11: (11, 2, 0),
    12: (12, 6, 4, 1, 0),
    13: (13, 4, 3, 1, 0),
    14: (14, 10, 6, 1, 0),
    15: (15, 1, 0),
    16: (16, 5, 3, 2, 0),
    17: (17, 3, 0),
    19: (19, 5, 2, 1, 0),
    20: (20, 3, 0),
    21: (21, 2, 0),
    22: (22, 1, 0),
    23: (23, 5, 0),
    24: (24, 4, 3, 1, 0),
}

MAX_DEGREE = 24

# log/exp tables are built lazily and only for fields small enough that a
# full multiplication table pair is cheap to hold.
_TABLE_DEGREE_CAP = 20


def is_tower_degree(k: int) -> bool:
    """True iff k = 2 * 3^lambda for some lambda >= 0."""
    if k % 2:
        return False
    k //= 2
    while k % 3 == 0:
        k //= 3
    return k == 1


def poly_degree(v: int) -> int:
    """Degree of a GF(2) polynomial stored as an int (-1 for zero)."""
    return v.bit_length() - 1


def poly_mulmod(a: int, b: int, modulus: int, k: int) -> int:
    """Carry-less multiply of two GF(2) polynomials, reduced mod `modulus`."""
    r = 0
    while b:
        if b & 1:
            r ^= a
        b >>= 1
        a <<= 1
        if a >> k & 1:
            a ^= modulus
    return r


def poly_divmod(a: int, b: int) -> tuple[int, int]:
    """Quotient and remainder of GF(2) polynomial division."""
    if b == 0:
        raise ZeroDivisionError("division by the zero polynomial")
    db = poly_degree(b)
    q = 0
    while poly_degree(a) >= db:
        shift = poly_degree(a) - db
        q ^= 1 << shift
        a ^= b << shift
    return q, a


def is_irreducible(modulus: int) -> bool:
    """Brute-force irreducibility of a GF(2) polynomial of degree <= 24.

    Trial division by every polynomial of degree 1..deg/2; exhaustive and
    only meant for the degrees this package supports.
    """
    k = poly_degree(modulus)
    if k <= 0:
        return False
    for d in range(1, k // 2 + 1):
        for div in range(1 << d, 1 << (d + 1)):
            if poly_divmod(modulus, div)[1] == 0:
                return False
    return True


def default_modulus(k: int) -> int:
    if is_tower_degree(k):
        return (1 << k) | (1 << (k // 2)) | 1
    if k in _FALLBACK_MODULI:
        m = 0
        for e in _FALLBACK_MODULI[k]:
            m |= 1 << e
        return m
    raise ValueError(f"no built-in modulus for GF(2^{k}); supported degrees: "
                     f"towers 2*3^i and {sorted(_FALLBACK_MODULI)}")


class FieldParams:
    """A concrete representation of GF(2^k).

    Attributes
    ----------
    k : extension degree (bits per element)
    modulus : irreducible degree-k polynomial over GF(2), as an int
    nice : True iff k = 2*3^lambda and the modulus is x^k + x^(k/2) + 1
    order : 2^k
    """

    __slots__ = ("k", "modulus", "nice", "order", "_ops")

    def __init__(self, k: int, modulus: int | None = None):
        if not 1 <= k <= MAX_DEGREE:
            raise ValueError(f"extension degree {k} out of supported range 1..{MAX_DEGREE}")
        if modulus is None:
            modulus = default_modulus(k)
        if poly_degree(modulus) != k:
            raise ValueError("modulus degree does not match k")
        self.k = k
        self.modulus = modulus
        self.nice = is_tower_degree(k) and modulus == ((1 << k) | (1 << (k // 2)) | 1)
        self.order = 1 << k
        self._ops = None

    def __repr__(self):
        return f"FieldParams(k={self.k}, modulus={self.modulus:#x}, nice={self.nice})"

    def __eq__(self, other):
        return isinstance(other, FieldParams) and self.k == other.k and self.modulus == other.modulus

    def __hash__(self):
        return hash((self.k, self.modulus))

    # -- element constructors ------------------------------------------------

    def zero(self) -> "FieldElem":
        return FieldElem(0, self)

    def one(self) -> "FieldElem":
        return FieldElem(1, self)

    def x(self) -> "FieldElem":
        return FieldElem(2, self)

    def elem(self, val: int) -> "FieldElem":
        return FieldElem(val, self)

    def from_bits(self, bits: str) -> "FieldElem":
        """Parse the external encoding: char i is the coefficient of x^(i-1)."""
        if len(bits) != self.k or set(bits) - {"0", "1"}:
            raise ValueError(f"expected a {self.k}-char bit string, got {bits!r}")
        val = 0
        for i, c in enumerate(bits):
            if c == "1":
                val |= 1 << i
        return FieldElem(val, self)

    def from_hex(self, h: str) -> "FieldElem":
        val = int(h, 16)
        if val >= self.order:
            raise ValueError(f"hex value {h!r} out of range for GF(2^{self.k})")
        return FieldElem(val, self)

    def elements(self):
        """All field elements in enumeration order (integer value order)."""
        return [FieldElem(v, self) for v in range(self.order)]

    @property
    def ops(self) -> "FieldOps":
        if self._ops is None:
            self._ops = FieldOps(self)
        return self._ops

    # -- raw int arithmetic (hot paths work on ints, not FieldElem) ----------

    def mul(self, a: int, b: int) -> int:
        ops = self.ops
        if ops.log is not None:
            if a == 0 or b == 0:
                return 0
            return int(ops.exp[ops.log[a] + ops.log[b]])
        return poly_mulmod(a, b, self.modulus, self.k)

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero in GF(2^k)")
        ops = self.ops
        if ops.log is not None:
            return int(ops.exp[self.order - 1 - ops.log[a]])
        return self.pow(a, self.order - 2)

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            a, e = self.inv(a), -e
        r = 1
        while e:
            if e & 1:
                r = self.mul(r, a)
            a = self.mul(a, a)
            e >>= 1
        return r


class FieldElem:
    """Immutable element of GF(2^k); arithmetic via operators."""

    __slots__ = ("val", "params")

    def __init__(self, val: int, params: FieldParams):
        if not 0 <= val < params.order:
            raise ValueError(f"value {val} out of range for GF(2^{params.k})")
        self.val = val
        self.params = params

    # identity-style checks are frequent enough to deserve helpers
    def is_zero(self) -> bool:
        return self.val == 0

    def __add__(self, other: "FieldElem") -> "FieldElem":
        self._check(other)
        return FieldElem(self.val ^ other.val, self.params)

    __sub__ = __add__  # characteristic 2

    def __mul__(self, other: "FieldElem") -> "FieldElem":
        self._check(other)
        return FieldElem(self.params.mul(self.val, other.val), self.params)

    def __truediv__(self, other: "FieldElem") -> "FieldElem":
        self._check(other)
        return FieldElem(self.params.mul(self.val, self.params.inv(other.val)), self.params)

    def __pow__(self, e: int) -> "FieldElem":
        return FieldElem(self.params.pow(self.val, e), self.params)

    def inverse(self) -> "FieldElem":
        return FieldElem(self.params.inv(self.val), self.params)

    def _check(self, other: "FieldElem"):
        if self.params != other.params:
            raise ValueError("field parameter mismatch")

    def __eq__(self, other):
        return (isinstance(other, FieldElem) and self.val == other.val
                and self.params == other.params)

    def __hash__(self):
        return hash((self.val, self.params.k, self.params.modulus))

    def to_bits(self) -> str:
        return "".join("1" if self.val >> i & 1 else "0" for i in range(self.params.k))

    def to_hex(self) -> str:
        width = (self.params.k + 3) // 4
        return format(self.val, f"0{width}x")

    def __repr__(self):
        return f"<{self.to_bits()}|GF(2^{self.params.k})>"


class FieldOps:
    """numpy discrete log/antilog tables for one field, built lazily.

    Multiplication of value arrays `a`, `b`:
        exp[log[a] + log[b]]   with zero operands masked to zero.
    `exp` is doubled in length so index sums need no reduction.
    For degrees above the table cap only scalar bitwise arithmetic is
    available and `log` is None.
    """

    __slots__ = ("params", "log", "exp")

    def __init__(self, params: FieldParams):
        self.params = params
        if params.k > _TABLE_DEGREE_CAP:
            self.log = None
            self.exp = None
            return
        q = params.order
        # find a generator of the multiplicative group by trial
        gen = None
        for cand in range(2, q):
            if _order(cand, params) == q - 1:
                gen = cand
                break
        if gen is None:  # q == 2
            gen = 1
        log = np.zeros(q, dtype=np.int64)
        exp = np.zeros(2 * q, dtype=np.int64)
        v = 1
        for i in range(q - 1):
            exp[i] = v
            log[v] = i
            v = poly_mulmod(v, gen, params.modulus, params.k)
        exp[q - 1:2 * (q - 1)] = exp[:q - 1]
        self.log = log
        self.exp = exp

    # -- vectorized value-array arithmetic ------------------------------------

    def mul_arr(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        out = self.exp[self.log[a] + self.log[b]]
        return np.where((a == 0) | (b == 0), 0, out)

    def inv_arr(self, a):
        a = np.asarray(a, dtype=np.int64)
        if np.any(a == 0):
            raise ZeroDivisionError("inverse of zero in GF(2^k)")
        return self.exp[self.params.order - 1 - self.log[a]]

    def pow_arr(self, a, e: int):
        a = np.asarray(a, dtype=np.int64)
        q1 = self.params.order - 1
        out = self.exp[(self.log[a] * (e % q1)) % q1]
        if e == 0:
            return np.ones_like(a)
        return np.where(a == 0, 0, out)


def _order(v: int, params: FieldParams) -> int:
    """Multiplicative order of v, by walking powers (small fields only)."""
    r = v
    n = 1
    while r != 1:
        r = poly_mulmod(r, v, params.modulus, params.k)
        n += 1
        if n > params.order:
            raise RuntimeError("order walk did not terminate; modulus not irreducible?")
    return n


@functools.lru_cache(maxsize=None)
def gf(k: int, modulus: int | None = None) -> FieldParams:
    """Shared FieldParams instance for GF(2^k) with the default modulus."""
    return FieldParams(k, modulus)


def fe_mul(a: FieldElem, b: FieldElem) -> FieldElem:
    """Product in GF(2^k). Both operands must share parameters."""
    return a * b


def fe_inv(a: FieldElem) -> FieldElem:
    """Multiplicative inverse; raises ZeroDivisionError on zero."""
    return a.inverse()
