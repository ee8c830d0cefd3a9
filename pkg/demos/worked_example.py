"""Four reviewers, six submissions: watch UM-CRR pick item by item.

Every submission needs exactly two reviewers and every reviewer takes exactly
three submissions.  Three reviewers share one taste; the fourth likes item 0 much
less.  UM-CRR hands out items round by round but refuses any pick that would
make the utilitarian optimum unreachable.
"""
from crralloc import build_instance, make_goal, pairwise_report, welfare
from crralloc.crr import crr_run

utilities = [
    [6, 5, 4, 3, 2, 1],
    [6, 5, 4, 3, 2, 1],
    [6, 5, 4, 3, 2, 1],
    [2, 6, 5, 4, 3, 1],
]
instance = build_instance(None, utilities, agent_caps=(3, 3), item_caps=(2, 2))
state = crr_run(instance, make_goal(instance, "utilitarian_max"))

print("event log:")
for line in state.trace_lines():
    print("  ", line)

refused = [(i, o) for _, i, o, ok in state.queries if not ok]
print(f"\nrefused picks (agent, item): {refused}")
print(f"completion queries issued: {state.num_queries} (bound m*n = {instance.m * instance.n})")

for i, bundle in enumerate(state.result.bundles):
    print(f"agent {i}: items {sorted(bundle)}  utility {instance.utility(i, bundle):g}")
print(f"total utility: {welfare(instance, state.result):g}")
print("fairness:", {k: round(v, 3) for k, v in pairwise_report(instance, state.result).fractions.items()})
