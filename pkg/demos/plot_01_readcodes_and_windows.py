"""
Read codes and exposure windows
===============================

Read codes carry a five level hierarchy in their first five characters.
Truncating to level 3 is what the coarse feature matrix uses.
"""

from pemsignal import code_level, parse_readcode, truncate_to_level3

for text in ["N245.16", "N245111", "N24..00", "C10F.00", "J046.00"]:
    code = parse_readcode(text)
    print(f"{code}  level {code_level(code)}  ->  {truncate_to_level3(code)}")

##############################################################################
# Events are placed in the baseline (before) or exposed (after) window
# relative to the prescription dates. Days here are plain integers.

from pemsignal import TailPolicy, assign_windows

prescriptions = [0, 40, 200]
events = [(-90, "far past"), (-30, "pre-window"), (0, "on script"), (35, "inside"),
          (70, "30 days after day-40 script"), (100, "60 days after day-40 script"),
          (230, "after last script"), (400, "tail")]

for (day, label), window in assign_windows(prescriptions, events, window_days=60):
    print(f"day {day:4d}  {label:28s} {window.value}")

##############################################################################
# Events long after the final prescription count as baseline by default;
# ``TailPolicy.DISCARD`` drops them instead.

tail = assign_windows(prescriptions, [(400, "tail")], 60, TailPolicy.DISCARD)
print(tail[0][1].value)
