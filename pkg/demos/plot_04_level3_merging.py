"""
Signals split across sibling codes
==================================

An effect spread thinly over several level-5 siblings can miss
significance for every sibling but stand out once they are merged into their
level-3 parent.
"""

import datetime as dt

from pemsignal import Cohort, build_matrices, detect
from pemsignal.ingest import Member
from pemsignal.readcode import Readcode

siblings = ["N245.13", "N245.14", "N245.16", "N245.17"]
day0 = dt.date(2012, 1, 1)
members = []
for k in range(10):
    plan = []
    for s, code in enumerate(siblings):
        before = 3 + (k + s) % 3
        after = before + (5 if k % 4 == s else 0)
        plan += [(-10, code)] * before + [(10, code)] * after
    plan += [(0, None)] * (100 - len(plan))
    for i, (offset, code) in enumerate(plan):
        events = () if code is None else ((day0 + dt.timedelta(days=offset), Readcode(code)),)
        members.append(Member(f"P{k:02d}{i:03d}", (day0,), events))
cohort = Cohort("D1", tuple(members))

for level in (5, 3):
    m = build_matrices(cohort, level=level)
    table = detect(m.x, m.y, m.a, m.b, top_k=5)
    print(f"level {level}:")
    for row in table.rows:
        print(f"  {row.rank}  {row.code}  N_B={row.n_before:3d}  N_A={row.n_after:3d}  "
              f"p={row.p_value:.3g}")
