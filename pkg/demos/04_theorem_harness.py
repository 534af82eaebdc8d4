# Running the theorem checks.
#
# Each check evaluates its hypotheses on a concrete instance first; a check
# whose hypotheses fail reports not_applicable instead of pass/fail.  The
# manifest records which status every scenario should produce.

import json
import time

from defstat import theorems as th
from defstat import sequences as sq

t0 = time.perf_counter()
results = th.run_manifest(jobs=4)
print(th.summary_table(results))
print(f"{time.perf_counter() - t0:.1f}s")

# A single check on a custom instance: harmonic approach to 0.5 in R^2.
inst = th.Instance("harmonic2", sq.HarmonicApproach([0.5, 0.5], [1.0, -2.0]), [0.5, 0.5])
check = th.check_convergent_implies_cauchy(inst)
print(check.status.value, json.dumps(check.evidence))

# An oscillating sequence does not converge, so the uniqueness check has
# nothing to say about it.
osc = th.Instance("osc", sq.EvenOddOscillator([1.0], [-1.0]), [0.0])
print(th.check_uniqueness(osc).status.value)
