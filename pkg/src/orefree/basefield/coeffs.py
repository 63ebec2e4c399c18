"""Coefficient domains: the prime field F_p, the rationals, and small F_{p^k}.

Every domain works on plain values (``int``, or gmpy2 ``mpq`` for Q) so that
polynomial dictionaries stay cheap to hash and compare.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import List, Optional, Sequence

from gmpy2 import mpq

RATIONAL_TYPES = (Fraction, type(mpq()))


def is_prime(n: int) -> bool:
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


def prime_power(q: int):
    """Return ``(p, e)`` with ``q == p**e``, or ``None`` if q is not a prime power."""
    if q < 2:
        return None
    for p in range(2, q + 1):
        if q % p == 0:
            e = 0
            while q % p == 0:
                q //= p
                e += 1
            return (p, e) if q == 1 else None
    return None


class Domain:
    characteristic = 0
    zero = 0
    one = 1
    order: Optional[int] = None  # number of elements, None if infinite

    def frobenius(self, a, e: int):
        return a

    def is_prime_field(self) -> bool:
        return True


class Rationals(Domain):
    """The field Q, elements are gmpy2 ``mpq``."""

    characteristic = 0
    zero = mpq(0)
    one = mpq(1)

    def __repr__(self):
        return "QQ"

    def __eq__(self, other):
        return isinstance(other, Rationals)

    def __hash__(self):
        return hash("QQ")

    def __reduce__(self):
        return (Rationals, ())

    def coerce(self, n):
        return mpq(n)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero in QQ")
        return 1 / mpq(a)

    def pow(self, a, n):
        return mpq(a) ** n

    def random(self, rng, bound: int = 5):
        num = rng.randint(-bound, bound)
        den = rng.randint(1, 3)
        return mpq(num, den)

    def random_nonzero(self, rng, bound: int = 5):
        while True:
            a = self.random(rng, bound)
            if a != 0:
                return a

    def to_str(self, a) -> str:
        return str(a)

    def prime_coords(self, a) -> List:
        return [a]

    def elements(self):
        raise ValueError("QQ is infinite")


class PrimeField(Domain):
    """F_p with elements stored as ints in ``range(p)``."""

    def __init__(self, p: int):
        if not is_prime(p):
            raise ValueError(f"characteristic {p} is not prime")
        self.p = p
        self.characteristic = p
        self.order = p

    def __repr__(self):
        return f"GF({self.p})"

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("GF", self.p))

    def coerce(self, n):
        if isinstance(n, RATIONAL_TYPES):
            return (int(n.numerator) * pow(int(n.denominator), -1, self.p)) % self.p
        return n % self.p

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def neg(self, a):
        return (-a) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def inv(self, a):
        if a % self.p == 0:
            raise ZeroDivisionError(f"inverse of zero in GF({self.p})")
        return pow(a, self.p - 2, self.p)

    def pow(self, a, n):
        if n < 0:
            a, n = self.inv(a), -n
        return pow(a, n, self.p)

    def random(self, rng, bound=None):
        return rng.randrange(self.p)

    def random_nonzero(self, rng, bound=None):
        return rng.randrange(1, self.p)

    def to_str(self, a) -> str:
        return str(a)

    def prime_coords(self, a) -> List:
        return [a]

    def elements(self):
        return range(self.p)


def _poly_mulmod(a: Sequence[int], b: Sequence[int], modulus: Sequence[int], p: int) -> List[int]:
    k = len(modulus) - 1
    prod = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                prod[i + j] = (prod[i + j] + ai * bj) % p
    # modulus is monic
    for d in range(len(prod) - 1, k - 1, -1):
        c = prod[d]
        if c:
            for i in range(k + 1):
                prod[d - k + i] = (prod[d - k + i] - c * modulus[i]) % p
    return (prod + [0] * k)[:k]


def find_irreducible(p: int, k: int) -> List[int]:
    """Lexicographically first monic irreducible of degree k over F_p (low-to-high coefficients)."""
    if k == 1:
        return [0, 1]
    for tail in itertools.product(range(p), repeat=k):
        modulus = list(reversed(tail)) + [1]
        if modulus[0] == 0:
            continue
        try:
            GaloisField(p, k, modulus)
        except ValueError:
            continue
        return modulus
    raise ValueError(f"no irreducible polynomial of degree {k} over GF({p})")


class GaloisField(Domain):
    """F_{p^k} = F_p[X]/(modulus) with log/antilog tables.

    An element is the integer whose base-p digits are its coefficients in the
    power basis 1, X, ..., X^{k-1}. Prime-field elements are therefore the ints
    ``0..p-1``, so F_p embeds without conversion.
    """

    MAX_ORDER = 1 << 16

    def __init__(self, p: int, k: int, modulus: Optional[Sequence[int]] = None, gen: str = "w"):
        if not is_prime(p):
            raise ValueError(f"characteristic {p} is not prime")
        if k < 1:
            raise ValueError("extension degree must be >= 1")
        q = p ** k
        if q > self.MAX_ORDER:
            raise ValueError(f"GF({p}^{k}) exceeds the table limit {self.MAX_ORDER}")
        if modulus is None:
            modulus = find_irreducible(p, k)
        modulus = [m % p for m in modulus]
        if len(modulus) != k + 1 or modulus[-1] != 1:
            raise ValueError("modulus must be monic of the extension degree")
        self.p, self.k, self.q = p, k, q
        self.modulus = tuple(modulus)
        self.gen = gen
        self.characteristic = p
        self.order = q
        self._build_tables()

    def _digits(self, a: int) -> List[int]:
        out = []
        for _ in range(self.k):
            a, r = divmod(a, self.p)
            out.append(r)
        return out

    def _undigits(self, ds: Sequence[int]) -> int:
        a = 0
        for d in reversed(ds):
            a = a * self.p + d
        return a

    def _build_tables(self):
        q, p = self.q, self.p
        if q == 2:
            self._exp = [1]
            self._log = {1: 0}
        else:
            for g in range(2, q):
                gd = self._digits(g)
                exp = [1]
                cur = [1] + [0] * (self.k - 1)
                seen = {1}
                ok = True
                for _ in range(q - 2):
                    cur = _poly_mulmod(cur, gd, self.modulus, p)
                    e = self._undigits(cur)
                    if e == 0 or e in seen:
                        ok = False
                        break
                    seen.add(e)
                    exp.append(e)
                if ok and _poly_mulmod(cur, gd, self.modulus, p) == [1] + [0] * (self.k - 1):
                    self._exp = exp
                    self._log = {e: i for i, e in enumerate(exp)}
                    break
            else:
                raise ValueError(f"modulus {list(self.modulus)} is not irreducible over GF({p})")
        if p == 2:
            self._add = lambda a, b: a ^ b
        else:
            self._add = self._digit_add

    def _digit_add(self, a, b):
        p = self.p
        out, scale = 0, 1
        while a or b:
            a, ra = divmod(a, p)
            b, rb = divmod(b, p)
            out += ((ra + rb) % p) * scale
            scale *= p
        return out

    def __repr__(self):
        return f"GF({self.p}^{self.k})"

    def __eq__(self, other):
        return isinstance(other, GaloisField) and (other.p, other.k, other.modulus) == (self.p, self.k, self.modulus)

    def __hash__(self):
        return hash(("GF", self.p, self.k, self.modulus))

    def __reduce__(self):
        return (GaloisField, (self.p, self.k, list(self.modulus), self.gen))

    def is_prime_field(self) -> bool:
        return self.k == 1

    def coerce(self, n):
        if isinstance(n, RATIONAL_TYPES):
            return self.mul(int(n.numerator) % self.p, self.inv(int(n.denominator) % self.p))
        return n % self.p

    def add(self, a, b):
        return self._add(a, b)

    def neg(self, a):
        if self.p == 2:
            return a
        return self._undigits([(-d) % self.p for d in self._digits(a)])

    def sub(self, a, b):
        return self._add(a, self.neg(b))

    def mul(self, a, b):
        if a == 0 or b == 0:
            return 0
        return self._exp[(self._log[a] + self._log[b]) % (self.q - 1)]

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError(f"inverse of zero in {self!r}")
        return self._exp[(-self._log[a]) % (self.q - 1)]

    def pow(self, a, n):
        if a == 0:
            if n <= 0:
                raise ZeroDivisionError("0 to a non-positive power")
            return 0
        return self._exp[(self._log[a] * n) % (self.q - 1)]

    def frobenius(self, a, e: int):
        if e % self.k == 0 or a == 0:
            return a
        return self.pow(a, self.p ** (e % self.k))

    def generator(self) -> int:
        """The class of X (not necessarily primitive)."""
        return self.p if self.k > 1 else 1

    def random(self, rng, bound=None):
        return rng.randrange(self.q)

    def random_nonzero(self, rng, bound=None):
        return rng.randrange(1, self.q)

    def elements(self):
        return range(self.q)

    def prime_coords(self, a) -> List:
        return self._digits(a)

    def to_str(self, a) -> str:
        if self.k == 1:
            return str(a)
        terms = []
        for i, d in reversed(list(enumerate(self._digits(a)))):
            if not d:
                continue
            if i == 0:
                terms.append(str(d))
            else:
                mono = self.gen if i == 1 else f"{self.gen}^{i}"
                terms.append(mono if d == 1 else f"{d}*{mono}")
        if not terms:
            return "0"
        return " + ".join(terms)
