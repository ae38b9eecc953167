"""Counting weak paths over the naturals, and why join differs from sum.

In the triangle x -tau 2-> y, x -tau 2-> z, y -tau 2-> z there are six
weighted ways from x to z.  A silent self-loop then shows the difference
between the two continuous operations: summing every path diverges, while
the join only counts first arrivals.
"""

from coweak import builtin, parse_system, solve_exact, solve_iterate

TRIANGLE = """\
semiring nat
tau tau
trans x tau 2 y
trans x tau 2 z
trans y tau 2 z
"""

LOOP = """\
semiring nat
tau tau
trans x tau 1 x
"""


def show(title, text):
    sys = parse_system(text)
    weak = builtin("weak", sys.labels, sys.tau)
    print(title)
    for oplus in ("join", "sum"):
        ex = solve_exact(sys, weak, None, oplus)
        it = solve_iterate(sys, weak, None, oplus)
        print(f"  {oplus:4s} exact {ex[('x', 'w_tau')].to_json()}  "
              f"iterate {it[('x', 'w_tau')].to_json()} in {it.iterations} steps, widened {it.meta['widened']}")


if __name__ == "__main__":
    show("triangle:", TRIANGLE)
    show("silent self-loop:", LOOP)
