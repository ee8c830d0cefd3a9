"""Two small instances where optimizing welfare alone costs fairness.

First, three agents and nine single-copy items: any utilitarian-optimal
allocation leaves one of the two like-minded agents envious beyond one item,
and UM-CRR cannot fix that because the goal forbids it.

Second, two agents and four items: the Nash-optimal balanced allocation is
not EF1, while dropping the balance requirement makes it EF1 again.
"""
from crralloc import build_instance, exact_baseline, make_goal, pairwise_report, w_crr, welfare
from crralloc.fairness import check_ef1
from crralloc.welfare import max_utilitarian

utils = [[9, 8, 7, 6, 5, 4, 3, 2, 1]] * 2 + [[6, 9, 8, 7, 5, 4, 3, 2, 1]]
for caps, label in (((0, 9), "no size limit"), ((3, 3), "three items each")):
    inst = build_instance(None, utils, agent_caps=caps, item_caps=(1, 1))
    plain, best = max_utilitarian(inst)
    crr = w_crr(inst, make_goal(inst, "utilitarian_max"))
    print(f"[{label}] optimum {best:g}")
    for name, alloc in (("UM", plain), ("UM-CRR", crr)):
        ef1 = pairwise_report(inst, alloc).fractions["EF1"]
        print(f"   {name:7s} bundles {[sorted(b) for b in alloc.bundles]}  EF1 pairs {ef1:.2f}")

print()
nash_utils = [[5, 5, 2, 2], [7, 7, 0, 0]]
for caps, label in (((2, 2), "two items each"), ((0, 4), "no size limit")):
    inst = build_instance(None, nash_utils, agent_caps=caps, item_caps=(1, 1))
    alloc = exact_baseline(inst, "nash")
    print(
        f"[{label}] Nash optimum {welfare(inst, alloc, 'nash'):g}: "
        f"{[sorted(b) for b in alloc.bundles]}, first agent EF1 towards second: {check_ef1(inst, alloc, 0, 1)}"
    )
