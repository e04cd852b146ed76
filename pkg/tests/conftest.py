import os

from hypothesis import HealthCheck, settings

from agcheck.model import bundle_from_dict

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", deadline=None, max_examples=300, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def make_bundle(prods, types=("Int", "Str"), mode="manual", role="eval", nonterminals=None, start="Program"):
    """Build a single-module bundle from ``(id, lhs, rhs, action)`` tuples."""
    nts = nonterminals
    if nts is None:
        nts = []
        for _, lhs, rhs, _ in prods:
            for sym in (lhs, *rhs):
                if sym not in nts:
                    nts.append(sym)
    type_docs = [t if isinstance(t, dict) else {"name": t} for t in types]
    return bundle_from_dict({
        "types": type_docs,
        "nonterminals": nts,
        "start": start,
        "roles": [{"name": role, "mode": mode}],
        "modules": [{"name": "m", "productions": [
            {"id": pid, "lhs": lhs, "rhs": list(rhs), "actions": {role: action}} for pid, lhs, rhs, action in prods
        ]}],
    })
