"""Print the PCGs of every intermediate code of the (8,5,2) construction, and its repair table.

Each coefficient of a Vandermonde-derived code is +-alpha**t for one alpha,
so the t=0 and t=1 blocks determine how to print it symbolically.

    python scripts/reproduce_8_5_2.py [--code Q2] [--rows 4]
"""

import argparse

from mdsx.builder import build
from mdsx.repair import audit, format_audit


def term(c0, c1, q, node, col):
    sign = "-" if c0 == q - 1 else "+"
    alpha = c1 if sign == "+" else (-c1) % q
    coef = "" if alpha == 1 else f"{alpha}^t "
    return sign, f"{coef}f_{{{node},{col}}}"


def pcg_rows(code, max_rows):
    q = code.q
    for a in range(min(code.N, max_rows)):
        parts = []
        for i in range(code.n):
            for col in range(code.N):
                c0, c1 = int(code.blocks[0, i, a, col]), int(code.blocks[1, i, a, col])
                if c0 or c1:
                    parts.append(term(c0, c1, q, i, col))
        text = " ".join(f"{s} {t}" for s, t in parts).lstrip("+ ")
        yield f"row {a:2d}: {text} = 0"


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--code", choices=["Q1", "Q2", "Q3", "Q4"], help="print only this code")
    ap.add_argument("--rows", type=int, default=16, help="rows per code to print")
    args = ap.parse_args()

    built = build(8, 5, 2)
    codes = list(built.intermediates) + [built.code]
    for m, code in enumerate(codes, start=1):
        name = f"Q{m}"
        if args.code and args.code != name:
            continue
        print(f"{name}: ({code.n},{code.k}) code over F_{code.q}, N={code.N}")
        for line in pcg_rows(code, args.rows):
            print("  " + line)
        print()
    print(format_audit(audit(built), paper_indexing=True))


if __name__ == "__main__":
    main()
