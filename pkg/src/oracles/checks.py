"""
Verification sweeps behind ``partition_ops.py check``.

Every check splits its sweep into independent tasks. A task is a module-level
function plus keyword arguments, so it can be shipped to a worker process;
each returns a list of CellResult. Reports sort their cells, so the outcome
does not depend on the order in which workers finish.

    bm          free_basis vs bm_basis dimension tables
    bar         bar-complex homology vs E² counts (p = 2)
    adem        dual confluence (both variants at p = 2), R-notation Adem
                relations, E²/R translation
    lie         Jacobi and restriction identities in free shifted Lie algebras
    nishida     homogeneity, canonical forms, confluence, the bottom bracket
    koszul      dual relations vs annihilators of the primal relations
    e2          unstable_ext_basis counts vs bm_basis counts
    stability   operations commute with suspension of the source
"""

import itertools
import logging
import random
import sys
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from tqdm import tqdm

from src.algebra.errors import RewriteLimitExceeded
from src.algebra.fp_core import inverse_mod, sign
from src.algebra.koszul_dual import (DualElement, DualLetter, DualOpWord, dual_pair_relation,
                                     dual_relation_from_primal, normal_form_dual, unstable_ext_basis)
from src.algebra.power_ring import (RWord, adem_window_holds, normalize_rword, op_basis,
                                    r_letter_exists, to_R_notation, verify_adem_R)
from src.algebra.steenrod import (PLACEHOLDER, Canonicalizer, MixedWord, bracket, nishida_rewrite,
                                  r_letter, s_letter)
from src.lie.free_partition_lie import bm_basis, dims, free_basis
from src.lie.shifted_lie import FreeShiftedLie, LieSymbol
from src.oracles.bar_oracle import compare_with_E2
from src.utils.output import DimTable

logger = logging.getLogger(__name__)

CHECKS = ("bm", "bar", "adem", "lie", "nishida", "koszul", "e2", "stability")
Window = Tuple[int, Optional[int]]


@dataclass(frozen=True, order=True)
class CellResult:
    """One verdict. ``cell`` is a sortable key such as (degree, weight)."""
    check: str
    cell: Tuple
    passed: bool
    detail: str = ""


@dataclass(frozen=True)
class CheckTask:
    func: Callable[..., List[CellResult]]
    kwargs: Dict[str, Any] = field(default_factory=dict)

    def __call__(self) -> List[CellResult]:
        return self.func(**self.kwargs)


@dataclass
class CheckReport:
    check: str
    params: Dict[str, Any] = field(default_factory=dict)
    cells: List[CellResult] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(cell.passed for cell in self.cells)

    def failures(self) -> List[CellResult]:
        return [cell for cell in self.cells if not cell.passed]

    def rows(self) -> List[Dict[str, Any]]:
        return [{"check": c.check, "cell": ",".join(str(k) for k in c.cell),
                 "passed": c.passed, "detail": c.detail} for c in self.cells]

    def summary(self) -> str:
        verdict = "PASS" if self.ok else "FAIL"
        return f"{verdict}: {self.check} ({len(self.cells)} cells, {len(self.failures())} failed)"


def _run_task(task: CheckTask) -> List[CellResult]:
    return task()


def run_tasks(check: str, tasks: Sequence[CheckTask], jobs: int = 1, progress: bool = False,
              params: Optional[Dict[str, Any]] = None) -> CheckReport:
    """Run tasks inline (jobs == 1) or in a process pool and assemble a sorted report."""
    results: List[CellResult] = []
    bar = tqdm(total=len(tasks), desc=f"check {check}", file=sys.stderr, disable=not progress)
    if jobs <= 1:
        for task in tasks:
            results.extend(_run_task(task))
            bar.update(1)
    else:
        with ProcessPoolExecutor(max_workers=jobs) as executor:
            futures = [executor.submit(_run_task, task) for task in tasks]
            for future in as_completed(futures):
                results.extend(future.result())
                bar.update(1)
    bar.close()
    report = CheckReport(check, dict(params or {}), sorted(results))
    for cell in report.failures():
        logger.warning("check %s failed at %s: %s", check, cell.cell, cell.detail)
    logger.info(report.summary())
    return report


def _table_cells(check: str, left: DimTable, right: DimTable, labels: Tuple[str, str]) -> List[CellResult]:
    cells = sorted(set(left.nonzero()) | set(right.nonzero()))
    return [CellResult(check, cell, left[cell] == right[cell],
                       f"{labels[0]} {left[cell]}, {labels[1]} {right[cell]}") for cell in cells]


# ---------------------------------------------------------------------------
# bm: the two free-algebra bases
# ---------------------------------------------------------------------------

def _basis_dims(kind: str, gen_degrees: Tuple[int, ...], p: int, window: Window, weight_cap: int) -> DimTable:
    builder = free_basis if kind == "free" else bm_basis
    return dims(builder(gen_degrees, p, window, weight_cap))


def _bm_task(gen_degrees: Tuple[int, ...], p: int, window: Window, weight_cap: int) -> List[CellResult]:
    free = _basis_dims("free", gen_degrees, p, window, weight_cap)
    reference = _basis_dims("bm", gen_degrees, p, window, weight_cap)
    return _table_cells("bm", free, reference, ("free", "bm"))


def check_bm(p: int, gen_sets: Sequence[Sequence[int]], window: Window, weight_cap: int,
             jobs: int = 1, progress: bool = False) -> CheckReport:
    tasks = [CheckTask(_bm_task, {"gen_degrees": tuple(gens), "p": p, "window": window,
                                  "weight_cap": weight_cap}) for gens in gen_sets]
    return run_tasks("bm", tasks, jobs, progress,
                     {"p": p, "gens": [list(g) for g in gen_sets], "window": window, "weight_cap": weight_cap})


# ---------------------------------------------------------------------------
# bar: bar homology against the E² page
# ---------------------------------------------------------------------------

def _bar_task(j: int, weight_cap: int, window: Optional[Tuple[int, int]]) -> List[CellResult]:
    report = compare_with_E2(j, weight_cap, window)
    return [CellResult("bar", (j, c.degree, c.weight), c.equal, f"bar {c.bar}, E2 {c.e2}")
            for c in report.cells]


def check_bar(js: Sequence[int], weight_cap: int = 4, window: Optional[Tuple[int, int]] = None,
              jobs: int = 1, progress: bool = False) -> CheckReport:
    tasks = [CheckTask(_bar_task, {"j": j, "weight_cap": weight_cap, "window": window}) for j in js]
    return run_tasks("bar", tasks, jobs, progress, {"j": list(js), "weight_cap": weight_cap, "window": window})


# ---------------------------------------------------------------------------
# adem
# ---------------------------------------------------------------------------

def _dual_alphabet(p: int, index_window: int) -> List[Tuple[int, int]]:
    indices = range(-index_window, index_window + 1)
    return [(0, i) for i in indices] if p == 2 else [(e, i) for e in (0, 1) for i in indices]


def _confluence_variants(p: int) -> Tuple[str, ...]:
    # the full ringoid only differs from the additive one at p = 2
    return ("additive", "full") if p == 2 else ("additive",)


def _confluence_task(p: int, j: int, index_window: int, variant: str = "additive") -> List[CellResult]:
    failed = []
    count = 0
    for letters in itertools.product(_dual_alphabet(p, index_window), repeat=3):
        elem = DualElement.from_word(DualOpWord.of(p, j, letters, variant))
        count += 1
        if normal_form_dual(elem, "leftmost") != normal_form_dual(elem, "rightmost"):
            failed.append(letters)
    detail = f"{count} words" if not failed else f"not confluent on {failed[:3]}"
    return [CellResult("adem", ("confluence", j, variant), not failed, detail)]


def _adem_pairs(p: int, j: int, index_cap: int) -> List[Tuple[int, int, Tuple[int, int]]]:
    if p == 2:
        return [(a, b, (0, 0)) for b in range(-j + 2, index_cap + 1) for a in range(b - j + 1, 2 * b)]
    families = [(1, 1), (0, 1), (0, 0), (1, 0)]
    return [(a, b, eps) for eps in families for b in range(-index_cap, index_cap + 1)
            for a in range(-index_cap, p * index_cap + 1) if adem_window_holds(p, a, b, j, eps)]


def _adem_R_task(p: int, j: int, index_cap: int) -> List[CellResult]:
    pairs = _adem_pairs(p, j, index_cap)
    failed = [pair for pair in pairs if not verify_adem_R(p, pair[0], pair[1], j, pair[2])]
    detail = f"{len(pairs)} relations" if not failed else f"fails for {failed[:3]}"
    return [CellResult("adem", ("R-relations", j), not failed, detail)]


def _translation_task(p: int, j: int, filtration_cap: int, window: Window) -> List[CellResult]:
    variant = "full" if p == 2 else "additive"
    words = unstable_ext_basis(j, variant, filtration_cap, window, p=p)
    translated = [to_R_notation(w) for w in words]
    graded = all(r.weight == w.weight and r.target(j) == w.target_total for r, w in zip(translated, words))
    bijective = sorted(translated) == sorted(op_basis(j, filtration_cap, window, p=p))
    detail = f"{len(words)} words" + ("" if graded else ", grading changed") + ("" if bijective else ", not bijective")
    return [CellResult("adem", ("translation", j), graded and bijective, detail)]


def check_adem(p: int, index_window: int = 8, source_window: int = 4, index_cap: int = 12,
               filtration_cap: int = 3, degree_window: Window = (-20, None),
               jobs: int = 1, progress: bool = False) -> CheckReport:
    tasks = []
    for j in range(-source_window, source_window + 1):
        for variant in _confluence_variants(p):
            tasks.append(CheckTask(_confluence_task, {"p": p, "j": j, "index_window": index_window,
                                                      "variant": variant}))
        tasks.append(CheckTask(_adem_R_task, {"p": p, "j": j, "index_cap": index_cap}))
        tasks.append(CheckTask(_translation_task, {"p": p, "j": j, "filtration_cap": filtration_cap,
                                                   "window": degree_window}))
    return run_tasks("adem", tasks, jobs, progress,
                     {"p": p, "index_window": index_window, "source_window": source_window,
                      "index_cap": index_cap})


# ---------------------------------------------------------------------------
# lie: restricted Lie axioms
# ---------------------------------------------------------------------------

def _lie_elements(lie: FreeShiftedLie, weight_cap: int) -> List[Tuple[Any, int, int]]:
    return [(lie.element(LieSymbol(word)), degree, len(word)) for word, degree in lie.lyndon_basis(weight_cap)]


def _restrictable(p: int, degree: int) -> bool:
    return p == 2 or degree % 2 == 1


def _jacobi_task(p: int, gen_degrees: Tuple[int, ...], weight_cap: int) -> List[CellResult]:
    lie = FreeShiftedLie(p, gen_degrees)
    basis = _lie_elements(lie, weight_cap)
    failed, count = [], 0
    for (x, a, wx), (y, b, wy), (z, c, wz) in itertools.product(basis, repeat=3):
        if wx + wy + wz > weight_cap:
            continue
        count += 1
        total = (lie.bracket(x, lie.bracket(y, z)).scaled(sign(a * c))
                 + lie.bracket(y, lie.bracket(z, x)).scaled(sign(b * a))
                 + lie.bracket(z, lie.bracket(x, y)).scaled(sign(c * b)))
        if not total.is_zero():
            failed.append((lie.format(x), lie.format(y), lie.format(z)))
    detail = f"{count} triples" if not failed else f"Jacobi fails for {failed[:3]}"
    return [CellResult("lie", (gen_degrees, "jacobi"), not failed, detail)]


def _adjoint_task(p: int, gen_degrees: Tuple[int, ...], weight_cap: int) -> List[CellResult]:
    lie = FreeShiftedLie(p, gen_degrees)
    basis = _lie_elements(lie, weight_cap)
    failed, count = [], 0
    for (x, dx, wx), (y, _, wy) in itertools.product(basis, repeat=2):
        if not _restrictable(p, dx) or p * wx + wy > weight_cap:
            continue
        count += 1
        if lie.bracket(y, lie.restriction(x)) != lie.ad_power(x, y, p):
            failed.append((lie.format(x), lie.format(y)))
    detail = f"{count} pairs" if not failed else f"ad(x^[p]) != ad(x)^p for {failed[:3]}"
    return [CellResult("lie", (gen_degrees, "adjoint"), not failed, detail)]


def _sum_task(p: int, gen_degrees: Tuple[int, ...], weight_cap: int) -> List[CellResult]:
    lie = FreeShiftedLie(p, gen_degrees)
    basis = _lie_elements(lie, weight_cap)
    failed, count = [], 0
    for (x, dx, wx), (y, dy, wy) in itertools.combinations(basis, 2):
        if dx != dy or not _restrictable(p, dx) or p * max(wx, wy) > weight_cap:
            continue
        count += 1
        expected = lie.restriction(x) + lie.restriction(y)
        for i, s in enumerate(lie.s_coefficients(x, y), start=1):
            expected = expected + s.scaled(inverse_mod(i, p))
        if lie.restriction(x + y) != expected:
            failed.append((lie.format(x), lie.format(y)))
    detail = f"{count} pairs" if not failed else f"restriction of a sum fails for {failed[:3]}"
    return [CellResult("lie", (gen_degrees, "sum"), not failed, detail)]


def check_lie(p: int, gen_sets: Sequence[Sequence[int]], weight_cap: int = 6,
              jobs: int = 1, progress: bool = False) -> CheckReport:
    tasks = [CheckTask(func, {"p": p, "gen_degrees": tuple(gens), "weight_cap": weight_cap})
             for gens in gen_sets for func in (_jacobi_task, _adjoint_task, _sum_task)]
    return run_tasks("lie", tasks, jobs, progress,
                     {"p": p, "gens": [list(g) for g in gen_sets], "weight_cap": weight_cap})


# ---------------------------------------------------------------------------
# nishida
# ---------------------------------------------------------------------------

def _homogeneity_task(p: int, d: int, index_cap: int) -> List[CellResult]:
    bottom = -d + 1 if p == 2 else (-d + 1) // 2
    failed, count = [], 0
    for n in range(index_cap + 1):
        for j in range(bottom, bottom + index_cap + 1):
            if p != 2 and 2 * j <= -d:
                continue
            st, r = (n, j) if p == 2 else ((0, n), (0, j))
            source = MixedWord(p, (s_letter(0, n), r_letter(0, j)))
            degree = source.degree({PLACEHOLDER: d})
            count += 1
            for term in nishida_rewrite(p, st, r, d):
                if term.degree({PLACEHOLDER: d}) != degree or term.weight != p:
                    failed.append((n, j))
                    break
    detail = f"{count} relations" if not failed else f"inhomogeneous for {failed[:3]}"
    return [CellResult("nishida", (d, "homogeneous"), not failed, detail)]


def _mixed_samples(rng: random.Random, d: int, index_cap: int, samples: int) -> List[MixedWord]:
    """Sampled words Sq^a R^b R^c on a class of degree d with both R-letters defined."""
    words = []
    for _ in range(samples):
        a, b, c = (rng.randint(0, index_cap) for _ in range(3))
        if r_letter_exists(2, (0, c), d) and r_letter_exists(2, (0, b), d - c):
            words.append(MixedWord(2, (s_letter(0, a), r_letter(0, b), r_letter(0, c))))
    return words


def _is_canonical(word: MixedWord) -> bool:
    kinds = [letter.kind for letter in word.letters]
    return kinds == sorted(kinds)


def _canonical_task(d: int, index_cap: int, seed: int, samples: int) -> List[CellResult]:
    degrees = {PLACEHOLDER: d}
    first = Canonicalizer(2, degrees, "steenrod-first")
    second = Canonicalizer(2, degrees, "r-first")
    rng = random.Random(seed * 1000 + d)
    words = _mixed_samples(rng, d, index_cap, samples)
    failed = []
    for word in words:
        try:
            left = first.canonicalize(word)
            right = second.canonicalize(word)
        except RewriteLimitExceeded:
            failed.append((str(word), "no termination"))
            continue
        if not all(_is_canonical(term) and term.degree(degrees) == word.degree(degrees) for term in left):
            failed.append((str(word), "not canonical"))
        elif left != right:
            failed.append((str(word), "not confluent"))
    detail = f"{len(words)} words" if not failed else f"fails for {failed[:3]}"
    return [CellResult("nishida", (d, "canonical"), not failed, detail)]


def _bottom_bracket_task(d: int) -> List[CellResult]:
    expected = {bracket(MixedWord(2), MixedWord(2, (s_letter(0, 1),))): 1}
    result = nishida_rewrite(2, 1, -d + 1, d)
    return [CellResult("nishida", (d, "bottom"), result == expected,
                       f"Sq1 R{-d + 1} x = {', '.join(str(t) for t in result) or '0'}")]


def check_nishida(p: int, class_degrees: Sequence[int] = tuple(range(-4, 13)), index_cap: int = 8,
                  seed: int = 0, samples: int = 60, jobs: int = 1, progress: bool = False) -> CheckReport:
    """
    Homogeneity runs at every prime. Canonical forms, confluence and the
    bottom bracket are p = 2 statements and run only there.
    """
    tasks = []
    for d in class_degrees:
        tasks.append(CheckTask(_homogeneity_task, {"p": p, "d": d, "index_cap": index_cap}))
        if p == 2:
            tasks.append(CheckTask(_canonical_task, {"d": d, "index_cap": index_cap, "seed": seed,
                                                     "samples": samples}))
            if d % 2 == 0:
                tasks.append(CheckTask(_bottom_bracket_task, {"d": d}))
    return run_tasks("nishida", tasks, jobs, progress,
                     {"p": p, "class_degrees": list(class_degrees), "index_cap": index_cap, "seed": seed})


# ---------------------------------------------------------------------------
# koszul: primal annihilators
# ---------------------------------------------------------------------------

def _koszul_task(p: int, b: int, index_window: int, d: int) -> List[CellResult]:
    bocksteins = [(0, 0)] if p == 2 else list(itertools.product((0, 1), repeat=2))
    failed, count = [], 0
    for e1, e2 in bocksteins:
        for a in range(-index_window, p * b - e2 + 1):
            outer, inner = DualLetter(e1, a), DualLetter(e2, b)
            count += 1
            if dual_relation_from_primal(p, outer, inner) != dual_pair_relation(p, outer, inner, d):
                failed.append((outer, inner))
    detail = f"{count} pairs" if not failed else f"differs for {failed[:3]}"
    return [CellResult("koszul", (b,), not failed, detail)]


def check_koszul(p: int, index_window: int = 6, d: int = 400, jobs: int = 1,
                 progress: bool = False) -> CheckReport:
    """``d`` must be large enough that no letter of a relation sits at its bottom."""
    tasks = [CheckTask(_koszul_task, {"p": p, "b": b, "index_window": index_window, "d": d})
             for b in range(-index_window // 2, index_window + 1)]
    return run_tasks("koszul", tasks, jobs, progress, {"p": p, "index_window": index_window, "d": d})


# ---------------------------------------------------------------------------
# e2: one-generator E² counts against the reference basis
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class _Graded:
    degree: int
    weight: int


def e2_table(j: int, p: int, window: Window, weight_cap: int) -> DimTable:
    """E² counts on one generator of degree j per (total degree, weight), weight <= cap."""
    filtration_cap = 0
    while p ** (filtration_cap + 1) <= weight_cap:
        filtration_cap += 1
    variant = "full" if p == 2 else "additive"
    words = unstable_ext_basis(j, variant, filtration_cap, window, p=p)
    return DimTable.from_items(
        _Graded(w.target_total, w.weight) for w in words if w.weight <= weight_cap)


def _e2_task(j: int, p: int, window: Window, weight_cap: int) -> List[CellResult]:
    e2 = e2_table(j, p, window, weight_cap)
    reference = _basis_dims("bm", (j,), p, window, weight_cap)
    return [CellResult("e2", (j,) + r.cell, r.passed, r.detail)
            for r in _table_cells("e2", e2, reference, ("E2", "bm"))]


def check_e2(p: int, js: Sequence[int], window: Window, weight_cap: int, jobs: int = 1,
             progress: bool = False) -> CheckReport:
    tasks = [CheckTask(_e2_task, {"j": j, "p": p, "window": window, "weight_cap": weight_cap}) for j in js]
    return run_tasks("e2", tasks, jobs, progress,
                     {"p": p, "j": list(js), "window": window, "weight_cap": weight_cap})


# ---------------------------------------------------------------------------
# stability
# ---------------------------------------------------------------------------

def _strictly_above_bottom(p: int, letter: Tuple[int, int], total: int) -> bool:
    return r_letter_exists(p, (letter[0], letter[1] - 1), total)


def _stable_source(p: int, outer: Tuple[int, int], inner: Tuple[int, int], start: int) -> int:
    """Smallest source >= start at which both letters sit strictly above their bottoms."""
    j = start
    while not (_strictly_above_bottom(p, inner, j)
               and _strictly_above_bottom(p, outer, RWord(p, (inner,)).target(j))):
        j += 1
    return j


def _stability_task(p: int, j: int, weight_exp_cap: int, window: Window, index_cap: int) -> List[CellResult]:
    failed, count = [], 0
    for word in op_basis(j, weight_exp_cap, window, p=p):
        if word.bracket:
            continue
        count += 1
        here, there = normalize_rword(p, word, j), normalize_rword(p, word, j + 1)
        if here.as_rwords() != there.as_rwords() or word.target(j + 1) != word.target(j) + 1:
            failed.append(str(word))
    letters = [(0, i) for i in range(1, index_cap + 1)] if p == 2 else \
        [(e, i) for e in (0, 1) for i in range(1, index_cap + 1)]
    for outer, inner in itertools.product(letters, repeat=2):
        source = _stable_source(p, outer, inner, j)
        word = RWord(p, (outer, inner))
        count += 1
        if normalize_rword(p, word, source).as_rwords() != normalize_rword(p, word, source + 1).as_rwords():
            failed.append(f"{word} from {source}")
    detail = f"{count} words" if not failed else f"unstable: {failed[:3]}"
    return [CellResult("stability", (j,), not failed, detail)]


def check_stability(p: int, js: Sequence[int], weight_exp_cap: int = 2, window: Window = (-20, None),
                    index_cap: int = 6, jobs: int = 1, progress: bool = False) -> CheckReport:
    tasks = [CheckTask(_stability_task, {"p": p, "j": j, "weight_exp_cap": weight_exp_cap,
                                         "window": window, "index_cap": index_cap}) for j in js]
    return run_tasks("stability", tasks, jobs, progress,
                     {"p": p, "j": list(js), "weight_exp_cap": weight_exp_cap, "index_cap": index_cap})
