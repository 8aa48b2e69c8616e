"""Regenerate the shipped algebra files and frozen Day chains.

Run from the repository root: ``python3 scripts/freeze_fixtures.py``.
Chains are searched once here and re-verified by the test suite.
"""

from pathlib import Path

from cmcomm import corpus
from cmcomm.algebra import save_algebra
from cmcomm.dayterms import find_day_chain, save_chain, verify_day_chain

DATA = Path(__file__).resolve().parent.parent / "src" / "cmcomm" / "data"


def main():
    for name in corpus.names():
        alg = corpus.build(name)
        save_algebra(alg, DATA / "algebras" / f"{name}.json")
        found = find_day_chain(alg)
        if found.chain is None:
            print(f"{name}: no chain (complete={found.complete}, clone {found.clone_size})")
            continue
        ok, _ = verify_day_chain(alg, found.chain)
        assert ok, name
        save_chain(found.chain, DATA / "chains" / f"{name}.json")
        print(f"{name}: chain of length {found.chain.n}")


if __name__ == "__main__":
    main()
