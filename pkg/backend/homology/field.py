"""
Prime-field arithmetic. Chains are sparse dicts {index: residue} with no zero entries.
"""
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Iterable

Chain = Dict[int, int]


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    return all(p % k for k in range(2, int(p ** 0.5) + 1))


def check_prime(p: int) -> int:
    if not is_prime(p):
        raise ValueError(f"coefficient field needs a prime, got {p}")
    return p


@lru_cache(maxsize=None)
def inverses(p: int) -> Dict[int, int]:
    """Multiplicative inverses of the nonzero residues mod p."""
    return {a: pow(a, p - 2, p) for a in range(1, p)}


def inverse(a: int, p: int) -> int:
    a %= p
    if a == 0:
        raise ZeroDivisionError(f"0 has no inverse mod {p}")
    return inverses(p)[a]


@dataclass(frozen=True)
class FieldScalar:
    value: int
    p: int = 2

    def __post_init__(self):
        object.__setattr__(self, "value", self.value % self.p)

    def _coerce(self, other) -> int:
        if isinstance(other, FieldScalar):
            if other.p != self.p:
                raise ValueError(f"mixing F_{self.p} and F_{other.p}")
            return other.value
        return int(other) % self.p

    def __add__(self, other):
        return FieldScalar(self.value + self._coerce(other), self.p)

    def __sub__(self, other):
        return FieldScalar(self.value - self._coerce(other), self.p)

    def __mul__(self, other):
        return FieldScalar(self.value * self._coerce(other), self.p)

    def __truediv__(self, other):
        return FieldScalar(self.value * inverse(self._coerce(other), self.p), self.p)

    def __neg__(self):
        return FieldScalar(-self.value, self.p)

    __radd__ = __add__
    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, FieldScalar):
            return self.p == other.p and self.value == other.value
        return self.value == int(other) % self.p

    def __hash__(self):
        return hash((self.value, self.p))

    def __int__(self):
        return self.value


def axpy(a: int, x: Chain, y: Chain, p: int) -> Chain:
    """y + a*x as a new chain."""
    out = dict(y)
    for k, v in x.items():
        s = (out.get(k, 0) + a * v) % p
        if s:
            out[k] = s
        else:
            out.pop(k, None)
    return out


def scale(a: int, x: Chain, p: int) -> Chain:
    a %= p
    if a == 0:
        return {}
    return {k: (a * v) % p for k, v in x.items()}


def low(x: Chain) -> int:
    return max(x)


def chain_from(pairs: Iterable, p: int) -> Chain:
    out: Chain = {}
    for k, v in pairs:
        out = axpy(v, {k: 1}, out, p)
    return out
