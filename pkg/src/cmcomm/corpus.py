"""Built-in small algebras used by the theorem harness and the tests."""

from __future__ import annotations

import json
from importlib import resources

from .algebra import FiniteAlgebra, OperationTable


def _binary(symbol, n, f):
    return OperationTable(symbol, 2, tuple(f(a, b) for a in range(n) for b in range(n)))


def _unary(symbol, n, f):
    return OperationTable(symbol, 1, tuple(f(a) for a in range(n)))


def trivial() -> FiniteAlgebra:
    return FiniteAlgebra("trivial", 1, (OperationTable("*", 2, (0,)),))


def cyclic_group(n: int) -> FiniteAlgebra:
    return FiniteAlgebra(
        f"z{n}",
        n,
        (
            _binary("+", n, lambda a, b: (a + b) % n),
            _unary("-", n, lambda a: (-a) % n),
            OperationTable("0", 0, (0,)),
        ),
    )


def klein_group() -> FiniteAlgebra:
    """Z2 x Z2 with (a, b) encoded as a + 2b."""
    return FiniteAlgebra(
        "z2xz2",
        4,
        (
            _binary("+", 4, lambda a, b: a ^ b),
            _unary("-", 4, lambda a: a),
            OperationTable("0", 0, (0,)),
        ),
    )


def dihedral_group(m: int) -> FiniteAlgebra:
    """Symmetries of the m-gon: index i < m is r^i, index m + i is s r^i.

    Uses r s = s r^-1, so (s^a r^b)(s^c r^d) = s^(a+c) r^((-1)^c b + d).
    """
    n = 2 * m

    def split(x):
        return divmod(x, m)

    def mul(x, y):
        a, b = split(x)
        c, d = split(y)
        return ((a + c) % 2) * m + ((-b if c else b) + d) % m

    def inv(x):
        a, b = split(x)
        return x if a else (-b) % m

    name = "s3" if m == 3 else f"d{m}"
    return FiniteAlgebra(
        name,
        n,
        (_binary("*", n, mul), _unary("inv", n, inv), OperationTable("e", 0, (0,))),
    )


def s3() -> FiniteAlgebra:
    """S3 with elements ordered e, r, r^2, s, sr, sr^2."""
    return dihedral_group(3)


def d4() -> FiniteAlgebra:
    return dihedral_group(4)


def z4_ring() -> FiniteAlgebra:
    n = 4
    return FiniteAlgebra(
        "z4ring",
        n,
        (
            _binary("+", n, lambda a, b: (a + b) % n),
            _unary("-", n, lambda a: (-a) % n),
            OperationTable("0", 0, (0,)),
            _binary("*", n, lambda a, b: (a * b) % n),
        ),
    )


def semilattice2() -> FiniteAlgebra:
    return FiniteAlgebra("semilattice2", 2, (_binary("^", 2, min),))


BUILDERS = {
    "trivial": trivial,
    "z2": lambda: cyclic_group(2),
    "z3": lambda: cyclic_group(3),
    "z4": lambda: cyclic_group(4),
    "z2xz2": klein_group,
    "s3": s3,
    "z4ring": z4_ring,
    "semilattice2": semilattice2,
    "d4": d4,
}

# group fixtures: name -> (multiplication, inverse, identity) symbols
GROUP_SIGNATURES = {
    "z2": ("+", "-", "0"),
    "z3": ("+", "-", "0"),
    "z4": ("+", "-", "0"),
    "z2xz2": ("+", "-", "0"),
    "s3": ("*", "inv", "e"),
    "d4": ("*", "inv", "e"),
}


def build(name: str) -> FiniteAlgebra:
    return BUILDERS[name]()


def load(name: str) -> FiniteAlgebra:
    """Load a shipped fixture from its JSON file."""
    text = resources.files("cmcomm").joinpath("data", "algebras", f"{name}.json").read_text()
    return FiniteAlgebra.from_json(text)


def names() -> list[str]:
    return list(BUILDERS)


def load_chain_data(name: str):
    path = resources.files("cmcomm").joinpath("data", "chains", f"{name}.json")
    if not path.is_file():
        return None
    return json.loads(path.read_text())
