"""Weak behaviour of a two-state probabilistic system, step by step.

State x loops silently with probability 1/2 and moves to y on ``a`` with
probability 1/2.  Weakly, x performs ``a`` and lands in y with certainty.
"""

from coweak import Partition, builtin, check_bisimulation, parse_system, solve_exact, solve_iterate

SYSTEM = """\
semiring real
tau tau
trans x a 1/2 y
trans x tau 1/2 x
"""


def main():
    sys = parse_system(SYSTEM)
    weak = builtin("weak", sys.labels, sys.tau)
    part = Partition.discrete(sys.states)

    print("Kleene iterates for entry (x, tau* a tau*), class of y:")
    for n in (1, 2, 4, 8, 16):
        t = solve_iterate(sys, weak, part, "join", max_iter=n)
        print(f"  after {n:2d} steps: {float(t[('x', 'w_a')][part.label_of('y')]):.6f}")

    exact = solve_exact(sys, weak, part, "join")
    print("exact least solution:", exact[("x", "w_a")].to_json(), f"({exact.strategy})")

    v = check_bisimulation(sys, weak, Partition.single(sys.states))
    print("can x and y be identified?", v.holds)
    print("witness:", v.to_json(sys.kind)["witness"])


if __name__ == "__main__":
    main()
