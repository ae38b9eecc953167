"""Strong, weak and delay bisimilarity of small process terms.

Each pair is elaborated over the boolean semiring and checked with the
three builtin patterns; the last column computes the weak verdict again via
saturation followed by plain kernel bisimulation.
"""

from coweak import BOOL, builtin, elaborate_process_term, largest_bisimulation, saturate, strong_kernel_bisim

PAIRS = [
    ("a.tau.b.0", "a.b.0"),
    ("tau.a.0", "a.0"),
    ("a.0 + tau.b.0", "a.0 + b.0"),
    ("a.(b.0 + tau.c.0)", "a.(b.0 + tau.c.0) + a.c.0"),
    ("b.0 + tau.c.0", "b.0 + c.0"),
]


def main():
    print(f"{'P':22s} {'Q':28s} strong weak  delay via-saturation")
    for p, q in PAIRS:
        ps = elaborate_process_term(f"P = {p}\nQ = {q}\n", kind=BOOL)
        sys, rp, rq = ps.system, ps.roots["P"], ps.roots["Q"]
        verdicts = []
        for name in ("strong", "weak", "delay"):
            part = largest_bisimulation(sys, builtin(name, sys.labels, sys.tau))
            verdicts.append(part.related(rp, rq))
        weak = builtin("weak", sys.labels, sys.tau)
        sat = strong_kernel_bisim(saturate(sys, weak, "join", pstates=weak.reachable))
        print(f"{p:22s} {q:28s} " + "  ".join(f"{str(v):5s}" for v in verdicts) + f" {sat.related(rp, rq)}")


if __name__ == "__main__":
    main()
