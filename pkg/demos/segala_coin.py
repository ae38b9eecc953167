"""Weak probabilistic bisimulation on a small Segala system.

x flips a silent fair coin between y and z, both of which do ``a``; w does
``a`` directly.  h reaches an ``a``-capable state only half the time.  The
weak-transition polytopes and the pattern route agree on every partition.
"""

from coweak import all_partitions
from coweak.segala import check_segala_equivalence, largest_weak_prob_bisim, parse_segala

SYSTEM = """\
sstep x tau { y 1/2 ; z 1/2 }
sstep y a { d 1 }
sstep z a { d 1 }
sstep w a { d 1 }
sstep h tau { y 1/2 ; d 1/2 }
"""


def main():
    sys = parse_segala(SYSTEM)
    best = largest_weak_prob_bisim(sys)
    print("largest weak probabilistic bisimulation:", best.to_json()["blocks"])
    agree = total = 0
    for p in all_partitions(sys.states):
        r = check_segala_equivalence(sys, p)
        total += 1
        agree += bool(r["agree"])
    print(f"routes agree on {agree} of {total} partitions")


if __name__ == "__main__":
    main()
