"""Which Beurling-Bjorck spaces with weights t^(1/mu) log(1+t)^u are
isomorphic, and which are equal?

Prints the closed-form verdict next to the numeric log-space probe.
"""
from bbspaces import classify as cl
from bbspaces import weights as wm


def space(mu, tau, u=0.0, v=0.0, case="beurling"):
    return cl.SpaceDescriptor(wm.PowerLog(mu, u), wm.PowerLog(tau, v), case)


pairs = [
    ((1, 2), (2, 1)),
    ((1, 2), (2, 2)),
    ((1, 2, 1, 0), (2, 1, 0, 1)),
    ((1, 2, 1, 0), (2, 1, 1, 0)),
    ((0.75, 0.75), (0.6, 0.9)),
    ((2, 2, 1, -1), (2, 2, 1, -1)),
]
print(f"{'space 1':>18} {'space 2':>18}  {'closed form':>15} {'numeric':>15}  equal")
for p1, p2 in pairs:
    s1, s2 = space(*p1), space(*p2)
    a = cl.decide_isomorphic(s1, s2)
    b = cl.decide_isomorphic(s1, s2, method="numeric")
    print(f"{str(p1):>18} {str(p2):>18}  {a.relation:>15} {b.relation:>15}  {a.witness['equal']}")

print("\ninclusion: S(t, t) in S(t^(1/2), t^(1/2))?",
      cl.decide_inclusion(space(1, 1), space(2, 2)).relation)
# t^2 growth is only Gabor accessible in the Roumieu case
print("mu = 1/2, Beurling:", cl.decide_isomorphic(space(0.5, 1), space(1, 0.5)).relation)
print("mu = 1/2, Roumieu: ",
      cl.decide_isomorphic(space(0.5, 1, case="roumieu"), space(1, 0.5, case="roumieu")).relation)
