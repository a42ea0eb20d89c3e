"""Prime fields F_p with residues stored as plain Python ints in [0, p)."""

from dataclasses import dataclass
from typing import Literal

from src.exceptions import DivisionByZero

MAX_PRIME = 2**31

# Deterministic Miller-Rabin witnesses for every n < 3,215,031,751.
_WITNESSES = (2, 3, 5, 7)

FieldOp = Literal["add", "sub", "mul", "inv", "neg"]


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for small in (2, 3, 5, 7, 11, 13):
        if n % small == 0:
            return n == small
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _WITNESSES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class PrimeField:
    p: int

    def __post_init__(self) -> None:
        if not isinstance(self.p, int) or isinstance(self.p, bool):
            raise ValueError(f"{self.p!r} is not an integer")
        if not 2 <= self.p < MAX_PRIME:
            raise ValueError(f"{self.p} is outside the supported range 2 <= p < 2^31")
        if not is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")

    def __call__(self, value: int) -> int:
        return value % self.p

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.p

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.p

    def mul(self, a: int, b: int) -> int:
        return a * b % self.p

    def neg(self, a: int) -> int:
        return -a % self.p

    def inv(self, a: int) -> int:
        a %= self.p
        if a == 0:
            raise DivisionByZero(f"0 has no inverse modulo {self.p}")
        return pow(a, self.p - 2, self.p)

    def __str__(self) -> str:
        return f"F_{self.p}"


def field_arith(field: PrimeField, a: int, b: int, op: FieldOp) -> int:
    """Dispatch a single field operation; unary ops ignore ``b``."""
    if op == "add":
        return field.add(a, b)
    if op == "sub":
        return field.sub(a, b)
    if op == "mul":
        return field.mul(a, b)
    if op == "inv":
        return field.inv(a)
    if op == "neg":
        return field.neg(a)
    raise ValueError(f"Unknown field operation: {op}")
