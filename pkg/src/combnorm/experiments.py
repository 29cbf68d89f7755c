"""Named, seeded experiment recipes.

Each recipe returns a plain dict report with a ``checks`` list (one entry per
exact assertion) and a ``status`` of ``"pass"``, ``"fail"`` or
``"incomplete"`` (a window or time cap stopped it).  Reports contain only
ints, strings, bools and lists, so equal inputs give byte-identical JSON.
"""

from __future__ import annotations

import random
import time
from fractions import Fraction

from .constructions import (WindowExhausted, build_l1_blocks, l1_lower_bound_holds,
                            prefix_chain_holds, schreier_witness, tree_example_vector,
                            unit_vector_stream, verify_growth_lower_bound,
                            verify_stable_inequality)
from .duality import (check_envelope_witness, convexity_ratio, dual_norm,
                      envelope_decomposition_search, envelope_gauge,
                      quasi_dual_functional_norm)
from .family import SetFamily, partition_family, schreier, tree_family
from .norms import is_k_stable, norm_lower, norm_upper, norm_upper_exact
from .vector import SparseVector, fmt_q

EXPERIMENTS = ("notnorm", "tree-growth", "schreier-witness", "l1-blocks",
               "quasi-constant-sweep", "duality-identities")


class UnknownExperiment(ValueError):
    pass


def random_rational(rng: random.Random, span: int = 5, den: int = 4) -> Fraction:
    num = 0
    while not num:
        num = rng.randint(-span, span)
    return Fraction(num, rng.randint(1, den))


def random_vector(rng: random.Random, window: int, max_support: int) -> SparseVector:
    size = rng.randint(1, min(window, max_support))
    support = sorted(rng.sample(range(1, window + 1), size))
    return SparseVector((i, random_rational(rng)) for i in support)


def random_partition(rng: random.Random, window: int) -> list:
    """Random partition of ``[1..window]`` into (not necessarily interval) pieces."""
    labels = [rng.randint(0, max(0, window // 2)) for _ in range(window)]
    pieces: dict[int, list[int]] = {}
    for i, lab in enumerate(labels, start=1):
        pieces.setdefault(lab, []).append(i)
    return sorted(tuple(p) for p in pieces.values())


def _check(name: str, ok: bool, **values) -> dict:
    return {"name": name, "ok": bool(ok), **values}


def _report(name: str, params: dict, checks: list, rows=None, incomplete: str | None = None,
            extra: dict | None = None) -> dict:
    if incomplete:
        status = "incomplete"
    else:
        status = "pass" if all(c["ok"] for c in checks) else "fail"
    out = {"experiment": name, "params": params, "status": status, "checks": checks}
    if rows is not None:
        out["rows"] = rows
    if incomplete:
        out["reason"] = incomplete
    if extra:
        out.update(extra)
    return out


class _Deadline:
    def __init__(self, time_cap_ms: int | None):
        self.end = None if not time_cap_ms else time.monotonic() + time_cap_ms / 1000

    def passed(self) -> bool:
        return self.end is not None and time.monotonic() > self.end


def run_notnorm(**_) -> dict:
    family = schreier(5)
    x = SparseVector({2: 1, 3: 1})
    y = SparseVector({3: 1, 4: 1, 5: 1})
    nx, cx = norm_upper_exact(x, family)
    ny, cy = norm_upper_exact(y, family)
    nxy, cxy = norm_upper_exact(x + y, family)
    checks = [
        _check("norm_x_is_1", nx == 1, value=fmt_q(nx), certificate=cx.to_json()),
        _check("norm_y_is_1", ny == 1, value=fmt_q(ny), certificate=cy.to_json()),
        _check("norm_sum_is_3", nxy == 3, value=fmt_q(nxy), certificate=cxy.to_json()),
        _check("triangle_fails", nxy > nx + ny),
    ]
    return _report("notnorm", {"window": 5}, checks)


def run_tree_growth(max_n: int = 3, **_) -> dict:
    checks, rows = [], []
    for n in range(1, max_n + 1):
        family, _ = tree_family(n)
        x, branches = tree_example_vector(n)
        value = norm_upper(x, family)
        ratio = convexity_ratio(branches, family)
        expected = 2 ** n * (1 + Fraction(n, 2))
        rows.append({"n": n, "norm": fmt_q(value), "expected": fmt_q(expected), "ratio": fmt_q(ratio)})
        checks.append(_check(f"norm_n{n}", value == expected, value=fmt_q(value), expected=fmt_q(expected)))
        checks.append(_check(f"ratio_n{n}", ratio == 1 + Fraction(n, 2), value=fmt_q(ratio)))
        checks.append(_check(f"branches_unit_n{n}", all(norm_upper(b, family) == 1 for b in branches)))
    return _report("tree-growth", {"max_n": max_n}, checks, rows)


def run_schreier_witness(n: int = 4, m: int = 0, **_) -> dict:
    checks, rows = [], []
    for size in range(1, n + 1):
        w = schreier_witness(size)
        props = w.properties()
        for key, result in props.items():
            checks.append(_check(f"n{size}_{key}", result["ok"]))
        consistent, report = verify_growth_lower_bound(w, m)
        checks.append(_check(f"n{size}_certificate_chain", report["chain_holds"]))
        rows.append({
            "n": size,
            "support_max": w.support.max,
            "phi": props["phi_levels"]["phi"],
            "l": report["l"],
            "certificate_value": report["certificate_value"],
            "hypothesis_bound": report["hypothesis_bound"],
            "consistent": consistent,
            "scaled_growth_expression": report["scaled_growth_expression"],
        })
    return _report("schreier-witness", {"n": n, "m": m}, checks, rows)


def run_l1_blocks(window: int = 2000, count: int = 2, trials: int = 500, seed: int = 0, **_) -> dict:
    family = schreier(window)
    params = {"window": window, "count": count, "trials": trials, "seed": seed}
    try:
        blocks = build_l1_blocks(unit_vector_stream(), count, family, window)
        incomplete = None
        report = None
    except WindowExhausted as exc:
        blocks = exc.blocks
        incomplete = str(exc)
        report = exc.report
    rng = random.Random(seed)
    checks = [
        _check("blocks_normalized", all(norm_upper(b.y, family) == 1 for b in blocks)),
        _check("blocks_successive",
               all(a.k < b.y.support[0] for a, b in zip(blocks, blocks[1:]))),
        _check("blocks_stable",
               all(is_k_stable(b.block, a.k, family) for a, b in zip(blocks, blocks[1:]))),
    ]
    lower_ok = chain_ok = True
    for _ in range(trials):
        lams = [rng.choice((-2, -1, 1, 2)) for _ in blocks]
        lower_ok = lower_ok and l1_lower_bound_holds(blocks, lams, family)
        chain_ok = chain_ok and prefix_chain_holds(blocks, lams, family)
    checks.append(_check("l1_lower_bound", lower_ok, trials=trials))
    checks.append(_check("prefix_chain", chain_ok, trials=trials))
    pairs_ok = True
    for b in blocks[1:]:
        prefix = SparseVector()
        for c in blocks[: b.index - 1]:
            prefix = prefix + c.y
        pairs_ok = pairs_ok and verify_stable_inequality(prefix, b.y, 1, family)
    checks.append(_check("stable_inequality_prefix_pairs", pairs_ok))
    extra = {"blocks": [b.to_json() for b in blocks]}
    if report:
        extra["exhaustion"] = report
    return _report("l1-blocks", params, checks, incomplete=incomplete, extra=extra)


def run_quasi_constant_sweep(window: int = 10, trials: int = 500, seed: int = 0,
                             max_support: int = 6, time_cap_ms: int | None = None, **_) -> dict:
    """Largest observed ``||x+y|| / (||x|| + ||y||)``; only the bound 2 is asserted."""
    rng = random.Random(seed)
    family = schreier(window)
    deadline = _Deadline(time_cap_ms)
    best = Fraction(0)
    best_pair = None
    done = 0
    for _ in range(trials):
        if deadline.passed():
            break
        if rng.random() < 0.5:
            # 0/1 vectors are where the known large ratios live
            x = SparseVector.indicator(rng.sample(range(1, window + 1), rng.randint(1, max_support)))
            y = SparseVector.indicator(rng.sample(range(1, window + 1), rng.randint(1, max_support)))
        else:
            x = random_vector(rng, window, max_support)
            y = random_vector(rng, window, max_support)
        denom = norm_upper(x, family) + norm_upper(y, family)
        ratio = norm_upper(x + y, family) / denom
        if ratio > best:
            best, best_pair = ratio, (x, y)
        done += 1
    checks = [_check("ratio_at_most_2", best <= 2, max_ratio=fmt_q(best))]
    extra = {"trials_done": done, "max_ratio": fmt_q(best)}
    if best_pair:
        extra["argmax"] = {"x": best_pair[0].to_json(), "y": best_pair[1].to_json()}
    incomplete = None if done == trials else f"time cap reached after {done} trials"
    params = {"window": window, "trials": trials, "seed": seed, "max_support": max_support}
    return _report("quasi-constant-sweep", params, checks, incomplete=incomplete, extra=extra)


def _identity_family(kind: str, window: int, n: int, rng: random.Random) -> SetFamily:
    if kind == "schreier":
        return schreier(window)
    if kind == "partition":
        return partition_family(random_partition(rng, window), window)
    if kind == "tree":
        return tree_family(n)[0]
    raise ValueError(f"unknown family kind {kind!r}; expected schreier, partition or tree")


def run_duality_identities(family: str = "schreier", window: int = 8, trials: int = 100,
                           seed: int = 0, max_support: int = 8, n: int = 2, parts: int = 3,
                           time_cap_ms: int | None = None, **_) -> dict:
    rng = random.Random(seed)
    deadline = _Deadline(time_cap_ms)
    fixed = None if family == "partition" else _identity_family(family, window, n, rng)
    names = ["strong_duality", "envelope_witness", "dual_below_quasi_norm",
             "functional_norm_is_family_norm", "decomposition_sandwich"]
    if family == "partition":
        names.append("partition_collapse")
    failures = {k: 0 for k in names}
    done = 0
    for _ in range(trials):
        if deadline.passed():
            break
        fam = fixed or _identity_family(family, window, n, rng)
        y = random_vector(rng, fam.window, max_support)
        d = dual_norm(y, fam)
        g, witness = envelope_gauge(y, fam)
        u = norm_upper(y, fam)
        try:
            check_envelope_witness(y, g, witness, fam)
            witness_ok = True
        except ValueError:
            witness_ok = False
        search = envelope_decomposition_search(y, fam, parts)
        results = {
            "strong_duality": d == g,
            "envelope_witness": witness_ok,
            "dual_below_quasi_norm": d <= u,
            "functional_norm_is_family_norm": quasi_dual_functional_norm(y, fam) == norm_lower(y, fam),
            "decomposition_sandwich": g <= search <= u,
        }
        if family == "partition":
            results["partition_collapse"] = d == u
        for k, ok in results.items():
            failures[k] += not ok
        done += 1
    checks = [_check(k, failures[k] == 0, failures=failures[k], trials=done) for k in names]
    incomplete = None if done == trials else f"time cap reached after {done} trials"
    params = {"family": family, "window": window, "trials": trials, "seed": seed,
              "max_support": max_support, "parts": parts}
    if family == "tree":
        params["n"] = n
    return _report("duality-identities", params, checks, incomplete=incomplete)


RUNNERS = {
    "notnorm": run_notnorm,
    "tree-growth": run_tree_growth,
    "schreier-witness": run_schreier_witness,
    "l1-blocks": run_l1_blocks,
    "quasi-constant-sweep": run_quasi_constant_sweep,
    "duality-identities": run_duality_identities,
}


def run_experiment(name: str, **params) -> dict:
    runner = RUNNERS.get(name)
    if runner is None:
        raise UnknownExperiment(f"unknown experiment {name!r}; expected one of {', '.join(EXPERIMENTS)}")
    return runner(**{k: v for k, v in params.items() if v is not None})
