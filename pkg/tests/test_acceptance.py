"""Acceptance suite: nine end-to-end criteria, one PASS/FAIL line each.

Run with pytest (lines appear even without ``-s``) or directly:
``python3 tests/test_acceptance.py``.  The radius-4 sweep dominates the
runtime (roughly 8 minutes on one core).
"""

from __future__ import annotations

import itertools
import random
import sys
import time
from collections import Counter, defaultdict

import pytest

from thompson_stein.diagrams import IDENTITY, TreePair, compose, from_map, invert, is_identity, to_map
from thompson_stein.metric import ball, lower_bound, to_finite_word
from thompson_stein.minimizer import (
    canonical_from_map,
    canonicalize,
    caret_order_key,
    clear_cache,
    minimal_diagrams,
)
from thompson_stein.signature import GroupSignature
from thompson_stein.trees import (
    caret,
    enumerate_trees,
    replay,
    retype_root,
    subdivision,
    transform_sequence,
    trees_equivalent,
    valences,
)
from thompson_stein.words import (
    Word,
    check_relators,
    diagram_from_normal_form,
    evaluate,
    finite_generators,
    leaf_exponent_matrices,
    normal_form,
    parse_word,
    print_word,
    relators,
    split_normal_form_word,
    word_diagram,
    word_map,
    y,
)

F23 = GroupSignature((2, 3))
F35 = GroupSignature((3, 5))
F235 = GroupSignature((2, 3, 5))

WORKED_NF = (
    "y2_1 y2_3 z1_0^2 z1_1 z1_3 z2_4 z1_4 z2_8 z1_9 z1_12 z1_13^2 "
    "z1_16^-1 z2_15^-1 z1_12^-1 z2_12^-1 z1_10^-1 z1_8^-1 z2_2^-2 z1_2^-1 z1_0^-1 z2_0^-1 y2_0^-1"
)

_emit = print


def report(number: int, ok: bool, detail: str, started: float) -> None:
    status = "PASS" if ok else "FAIL"
    _emit(f"criterion {number}: {status} ({time.time() - started:.1f}s) {detail}", flush=True)
    assert ok, detail


@pytest.fixture(autouse=True)
def _visible(capsys):
    global _emit

    def show(*args, **kwargs):
        with capsys.disabled():
            print(*args, **kwargs)

    _emit = show
    yield
    _emit = print


def test_criterion_1_growth_law():
    t = time.time()
    got = []
    for sig, j, top in ((F23, 2, 6), (F235, 3, 3)):
        for n in range(1, top + 1):
            x = evaluate(Word((y(j, 0, n),)), sig)
            got.append((sig, j, n, x.leaf_count, sig.arity(j) ** n))
    bad = [g for g in got if g[3] != g[4]]
    elapsed = time.time() - t
    ok = not bad and elapsed < 60
    leaves = ",".join(str(g[3]) for g in got)
    report(1, ok, f"L((y_j)_0^n) = {leaves}; mismatches {len(bad)}", t)


def test_criterion_2_identity_recognition():
    t = time.time()
    d = TreePair(caret(2, caret(3), caret(3)), caret(3, caret(2), caret(2), caret(2)))
    rep = canonicalize(d, F23).rep
    ok = is_identity(d) and rep == IDENTITY
    report(2, ok, f"reduces to {rep}, is_identity {is_identity(d)}", t)


def test_criterion_3_presentation_soundness():
    t = time.time()
    parts = []
    failures = 0
    for sig in (F23, F35, F235):
        for finite in (False, True):
            rels = relators(sig, finite=finite)
            bad = check_relators(rels, sig)
            failures += len(bad)
            parts.append(f"{sig}{'finite' if finite else 'infinite'} {len(rels)}/{len(bad)}")
    report(3, failures == 0, "relators/failures: " + ", ".join(parts), t)


def test_criterion_4_worked_normal_form():
    t = time.time()
    w = parse_word(WORKED_NF, F23)
    x = evaluate(w, F23)
    worked = split_normal_form_word(w, F23)
    diagram = diagram_from_normal_form(worked)
    e = leaf_exponent_matrices(diagram.domain)
    matrices_ok = (
        e[0].columns == ((3, 1), (2, 1)) and e[1].columns == () and e[2].columns == ((2, 1), (3, 2))
    )
    same_element = to_map(diagram) == x.map
    nf = normal_form(x)
    round_trip = evaluate(parse_word(str(nf)), F23).map == x.map
    ok = matrices_ok and same_element and round_trip and len(w.tokens) == 22
    detail = (
        f"E0={list(e[0].columns)} E1={list(e[1].columns)} E2={list(e[2].columns)}; "
        f"L={x.leaf_count}, minimal diagrams {x.minimal_count}; NF round trip {round_trip}; "
        f"canonical NF equals the worked string: {str(nf) == WORKED_NF}"
    )
    report(4, ok, detail, t)


def _words_up_to(sig, length):
    letters = [g.with_exp(e) for g in finite_generators(sig) for e in (1, -1)]
    for n in range(length + 1):
        for gs in itertools.product(letters, repeat=n):
            yield Word(gs)


def test_criterion_5_word_problem():
    t = time.time()
    b = ball(F23, 3)
    nf_of_map = {}
    unsound = 0
    clashes = 0
    for e in b:
        x = b.element(e)
        nf = normal_form(x)
        nf_of_map[e.map] = str(nf)
        clashes += nf.index_clash()
        if word_map(nf.to_word(), F23) != e.map:
            unsound += 1
    by_nf = defaultdict(set)
    by_map = defaultdict(set)
    n_words = 0
    for w in _words_up_to(F23, 3):
        f = word_map(w, F23)
        s = nf_of_map[f]
        key = print_word(w)
        by_nf[s].add(key)
        by_map[f].add(key)
        n_words += 1
    partitions_agree = sorted(map(sorted, by_nf.values())) == sorted(map(sorted, by_map.values()))
    distinct = len(set(nf_of_map.values())) == len(nf_of_map)
    elapsed = time.time() - t
    ok = partitions_agree and distinct and unsound == 0 and elapsed < 600
    detail = (
        f"{len(b)} elements, {n_words} words; NF classes = map classes {partitions_agree}; "
        f"NF unsound {unsound}; last-index clashes {clashes}"
    )
    report(5, ok, detail, t)


def test_criterion_6_metric_sandwich():
    t = time.time()
    b = ball(F23, 4)
    rng = random.Random(0)
    viol = Counter()
    checked_words = 0
    for e in b:
        x = b.element(e)
        lb = lower_bound(x)
        fw = to_finite_word(x)
        if rng.random() < 0.05:
            checked_words += 1
            if word_map(fw, F23) != e.map:
                viol["finite word evaluates wrong"] += 1
        if not lb <= e.length:
            viol["lower bound"] += 1
        if not e.length <= fw.length:
            viol["finite word shorter than BFS"] += 1
        if not fw.length <= 10 * x.leaf_count:
            viol["d L(x)"] += 1
    detail = f"{len(b)} elements, {sum(viol.values())} violations {dict(viol)}; {checked_words} finite words re-evaluated"
    report(6, not viol, detail, t)


def test_criterion_7_minimizer_ground_truth():
    t = time.time()
    b = ball(F23, 3)
    worse = not_idempotent = not_constant = fresh = 0
    multi = Counter()
    example = None
    for k, e in enumerate(b):
        x = b.element(e)
        d = word_diagram(e.word, F23)
        if x.leaf_count > d.leaves:
            worse += 1
        # Recompute from the representative itself and from the constructed
        # diagram, bypassing the element cache.
        again = minimal_diagrams(to_map(x.rep), F23, upper=x.rep)
        if min(again, key=caret_order_key) != x.rep or len(again) != x.minimal_count:
            not_idempotent += 1
        if k % 10 == 0:
            clear_cache()
            fresh += 1
            if canonicalize(d, F23).rep != x.rep:
                not_constant += 1
        multi[x.minimal_count] += 1
        if example is None and x.minimal_count >= 2:
            example = print_word(e.word)
    several = sum(v for c, v in multi.items() if c >= 2)
    ok = worse == not_idempotent == not_constant == 0 and several > 0
    detail = (
        f"{len(b)} elements; larger than construction {worse}, not idempotent {not_idempotent}, "
        f"rep differs after a cold recomputation {not_constant}/{fresh}; {several} elements with "
        f">= 2 minimal diagrams (first: {example}); counts {dict(sorted(multi.items()))}"
    )
    report(7, ok, detail, t)


def test_criterion_8_tree_layer():
    t = time.time()
    bad_equiv = bad_retype = bad_replay = 0
    pairs_direct = equivalent_pairs = 0
    for n in range(1, 10):
        ts = list(enumerate_trees(n, F23))
        subs = [tuple(subdivision(s)) for s in ts]
        vals = [tuple(valences(s, F23)) for s in ts]
        # Equivalence is equality of leafwise valences; it must induce exactly
        # the partition by subdivision.
        if len(set(zip(subs, vals))) != len(set(subs)) or len(set(subs)) != len(set(vals)):
            bad_equiv += 1
        if n <= 7:
            for i, a in enumerate(ts):
                for j in range(i, len(ts)):
                    pairs_direct += 1
                    if trees_equivalent(a, ts[j]) != (subs[i] == subs[j]):
                        bad_equiv += 1
        classes = defaultdict(list)
        for s, sub in zip(ts, subs):
            classes[sub].append(s)
        for cls in classes.values():
            for a, c in itertools.product(cls, repeat=2):
                equivalent_pairs += 1
                if not trees_equivalent(a, c):
                    bad_equiv += 1
                moves = transform_sequence(a, c)
                if moves is None or replay(a, moves) != c:
                    bad_replay += 1
        for s, v in zip(ts, vals):
            for idx, m in enumerate(F23.arities):
                r = retype_root(s, m)
                positive = n > 1 and min(vec[idx] for vec in v) > 0
                if (r is not None) != positive or (r is not None and (r.arity != m or not trees_equivalent(r, s))):
                    bad_retype += 1
    ok = bad_equiv == bad_retype == bad_replay == 0
    detail = (
        f"equivalence mismatches {bad_equiv} ({pairs_direct} direct pairs up to 7 leaves, partitions up to 9), "
        f"retype mismatches {bad_retype}, replay failures {bad_replay} over {equivalent_pairs} equivalent pairs"
    )
    report(8, ok, detail, t)


def test_criterion_9_oracle_algebra():
    t = time.time()
    rng = random.Random(2024)
    letters = [g.with_exp(e) for g in finite_generators(F23) for e in (1, -1)]

    def rand_word():
        return Word(tuple(rng.choice(letters) for _ in range(rng.randint(0, 2))))

    bad = Counter()
    seen_maps = set()
    for _ in range(1000):
        a, b, c = (word_diagram(rand_word(), F23) for _ in range(3))
        fa, fb, fc = (to_map(d) for d in (a, b, c))
        if to_map(compose(compose(a, b), c)) != to_map(compose(a, compose(b, c))):
            bad["associativity"] += 1
        if (fa @ fb) @ fc != fa @ (fb @ fc):
            bad["map associativity"] += 1
        if not is_identity(compose(a, invert(a))) or not (fa @ fa.inverse()).is_identity():
            bad["inverse"] += 1
        if to_map(compose(a, IDENTITY)) != fa or to_map(compose(IDENTITY, a)) != fa:
            bad["identity"] += 1
        if to_map(compose(a, b)) != fa @ fb:
            bad["composition"] += 1
        for f in (fa, fb, fc):
            if f not in seen_maps:
                seen_maps.add(f)
                if to_map(from_map(f, F23)) != f or canonical_from_map(to_map(from_map(f, F23)), F23).map != f:
                    bad["from_map"] += 1
    detail = f"1000 triples, {len(seen_maps)} distinct elements through from_map; failures {dict(bad)}"
    report(9, not bad, detail, t)


if __name__ == "__main__":
    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
