"""Four atoms in two pairs: the smallest dictionary where the greedy
selection rules genuinely disagree.

Atoms 1-2 open symmetrically around the first axis by theta1, atoms 3-4
around the second axis by theta2.  The support is the first pair; how
hard the second pair interferes is controlled entirely by the angles.
"""

import numpy as np

from greedycert import (
    brc_omp,
    build_failure_input,
    compute_spark,
    construct_reaching_input,
    erc_oxx_subset,
    example1,
    run_greedy,
)

theta2 = np.pi / 4
support = (0, 1)

# sweep the first angle: the certificate flips from true to false as
# the support pair closes up and the cross-pair coherence takes over
print("theta1      full     after atom 1   unreachable?")
for frac in (3, 4, 6, 8, 12):
    theta1 = np.pi / frac
    d = example1(theta1, theta2)
    full = erc_oxx_subset(d, support, (), "omp")
    part = erc_oxx_subset(d, support, (0,), "omp")
    brc = brc_omp(d, support)
    print(f"pi/{frac:<3}    {full.aggregate:.4f}       {part.aggregate:.4f}"
          f"        {brc.verdict}")

# narrow pair: no input supported on the pair can ever be recovered.
# build one, run both algorithms on it, watch the wrong atom win
d = example1(np.pi / 12, theta2)
y = build_failure_input(d, support, (), "omp")
for alg in ("omp", "ols"):
    trace = run_greedy(alg, d.matrix, y, 2, oracle=support)
    print(f"{alg}: status={trace.status} wrong_index={trace.wrong_index}")

# the same geometry still lets us steer a run through any independent
# prefix when we are free to choose the input
y = construct_reaching_input(d, (2, 0), "ols")
trace = run_greedy("ols", d.matrix, y, 2)
print("steered ols selections:", trace.selections())

# four atoms spanning a 3-dimensional space must contain a dependency
print("spark:", compute_spark(d, 4))
