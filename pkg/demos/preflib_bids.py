"""From PrefLib-style bid lines to a reviewer assignment.

Lines read ``count: order``; braces group tied submissions, and submissions a
reviewer never mentions are treated as their least-liked group.  Utilities
default to Borda scores.  Each submission gets two reviewers and each reviewer
three submissions.
"""
from crralloc import build_instance, make_goal, pairwise_report, parse_preflib, w_crr
from crralloc.formats import serialize_allocation

BIDS = """\
# NUMBER ALTERNATIVES: 6
2: 1,2,{3,4}
1: 4,{5,6},1
1: {2,6},3
"""

profile = parse_preflib(BIDS)
for i, classes in enumerate(profile):
    print(f"reviewer {i}: " + " > ".join("{" + ",".join(map(str, c)) + "}" for c in classes))

instance = build_instance(profile, None, agent_caps=(3, 3), item_caps=(2, 2))
print("\nBorda utilities:\n", instance.utilities)

alloc = w_crr(instance, make_goal(instance, "rank_max"))
print("\nRM-CRR assignment (reviewer: submissions, 0-based):")
print(serialize_allocation(alloc), end="")
print("fairness:", {k: round(v, 3) for k, v in pairwise_report(instance, alloc).fractions.items()})
