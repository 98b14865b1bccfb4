"""Word lengths over the extended generating set.

Lower bounds come from integer linear functionals on the abelianization
whose values on every generator are capped on one side (certificates).
Upper bounds come from explicit factorizations (witnesses). Exact values
come from exhaustive search over the implicit Cayley graph, which is
finite once the index cutoff from ``max_usable_index`` is applied, or
from certificate/witness collapse, or from the proven closed forms for
the whitelisted word families at base 5.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

from .errors import (
    BudgetExhausted,
    ConstraintViolation,
    IndexTooSmall,
    InvalidCertificate,
    UnknownLength,
)
from .genset import (
    BigGen,
    Gen,
    GenSetParams,
    LETTER_GENS,
    LetterGen,
    enumerate_generators,
    expand_generator,
    max_usable_index,
    normalize_conjugator,
    theta_value,
)
from .words import IDENTITY, Letter, Word

C_POS = LetterGen(Letter("c", 1))
B_NEG = LetterGen(Letter("b", -1))


class Direction(Enum):
    """Which side of the functional is capped on the generating set."""

    UPPER = "upper"
    LOWER = "lower"


@dataclass(frozen=True)
class Certificate:
    coeffs: tuple[int, int, int]
    direction: Direction


def _family_slope(cert: Certificate, params: GenSetParams) -> int:
    # Value on an index-j generator is B^(2j-1) times this, since the
    # generator abelianizes to (B^(2j), B^(2j-1) + B^(2j), 0).
    ca, cb, _ = cert.coeffs
    return ca * params.base + cb * (params.base + 1)


def certificate_cap(cert: Certificate, params: GenSetParams) -> int:
    """Largest one-sided value of the functional over all generators.

    Raises InvalidCertificate when the functional is unbounded on the
    indexed generators in the claimed direction.
    """
    slope = _family_slope(cert, params)
    if cert.direction is Direction.UPPER and slope > 0:
        raise InvalidCertificate(
            f"{cert.coeffs} unbounded above on the indexed generators"
        )
    if cert.direction is Direction.LOWER and slope < 0:
        raise InvalidCertificate(
            f"{cert.coeffs} unbounded below on the indexed generators"
        )
    cap = max(abs(c) for c in cert.coeffs)
    if cap == 0:
        raise InvalidCertificate("zero functional certifies nothing")
    return cap


def eval_certificate(cert: Certificate, u: Word, params: GenSetParams) -> int:
    """A proven lower bound on the extended word length of u.

    Every generator has functional value at most +cap (UPPER) or at least
    -cap (LOWER), so a factorization with n symbols forces
    n >= value(u)/cap, respectively n >= -value(u)/cap.
    """
    cap = certificate_cap(cert, params)
    na, nb, nc = u.abelianize()
    value = cert.coeffs[0] * na + cert.coeffs[1] * nb + cert.coeffs[2] * nc
    if cert.direction is Direction.LOWER:
        value = -value
    if value <= 0:
        return 0
    return -(-value // cap)


def _gcd3(a: int, b: int, c: int) -> int:
    from math import gcd

    return gcd(gcd(abs(a), abs(b)), abs(c))


@lru_cache(maxsize=None)
def certificate_pool(base: int, span: int = 3) -> tuple[Certificate, ...]:
    """Every valid primitive certificate with coefficients in [-span, span].

    Scaled coefficient triples give the same bound, so only primitive
    triples are kept. Deterministic order.
    """
    pool = []
    for ca in range(-span, span + 1):
        for cb in range(-span, span + 1):
            for cc in range(-span, span + 1):
                if (ca, cb, cc) == (0, 0, 0) or _gcd3(ca, cb, cc) != 1:
                    continue
                slope = ca * base + cb * (base + 1)
                if slope <= 0:
                    pool.append(Certificate((ca, cb, cc), Direction.UPPER))
                if slope >= 0:
                    pool.append(Certificate((ca, cb, cc), Direction.LOWER))
    pool.sort(key=lambda c: (c.direction.value, c.coeffs))
    return tuple(pool)


def certified_power_collapse(
    letter: str, kmax: int, params: GenSetParams
) -> Certificate:
    """Verify that the length of letter^k is exactly k for k = 1..kmax.

    The one-letter counting certificate gives the lower bound and the
    trivial letters witness the upper; the two meet at k, so no search is
    involved. Certificate validity is checked through the general
    machinery once; the per-k bound is its exact ceiling arithmetic on a
    single-run word. Raises ArithmeticError on any k where the bounds
    fail to meet (they cannot).
    """
    coeffs = tuple(1 if b == letter else 0 for b in ("a", "b", "c"))
    cert = Certificate(coeffs, Direction.UPPER)
    cap = certificate_cap(cert, params)
    coeff = 1  # functional value on letter^k is coeff * k
    for k in range(1, kmax + 1):
        lower = -(-coeff * k // cap)
        if lower != k:  # letters witness count is s_length(letter^k) = k
            raise ArithmeticError(
                f"certificate bound {lower} missed the witness count {k}"
            )
    return cert


def best_certificate_bound(
    u: Word, params: GenSetParams
) -> tuple[int, Certificate | None]:
    """Best pool bound; ties resolved toward lexicographically-first coeffs."""
    na, nb, nc = u.abelianize()
    best = 0
    best_cert: Certificate | None = None
    for cert in certificate_pool(params.base):
        ca, cb, cc = cert.coeffs
        value = ca * na + cb * nb + cc * nc
        if cert.direction is Direction.LOWER:
            value = -value
        if value <= 0:
            continue
        cap = max(abs(ca), abs(cb), abs(cc))
        bound = -(-value // cap)
        if bound > best:
            best = bound
            best_cert = cert
    return best, best_cert


# --- factorizations and witnesses -------------------------------------------


@dataclass(frozen=True)
class Factorization:
    """A run-compressed sequence of generator symbols.

    ``items`` holds (symbol, multiplicity) pairs so that witnesses with
    astronomically many repeated letters stay O(1) in memory.
    """

    items: tuple[tuple[Gen, int], ...] = ()

    @classmethod
    def from_symbols(cls, symbols) -> "Factorization":
        items: list[tuple[Gen, int]] = []
        for gen in symbols:
            if items and items[-1][0] == gen:
                items[-1] = (gen, items[-1][1] + 1)
            else:
                items.append((gen, 1))
        return cls(tuple(items))

    @property
    def symbol_count(self) -> int:
        return sum(mult for _, mult in self.items)

    def symbol_strings(self) -> list[str]:
        return [
            str(gen) if mult == 1 else f"{gen} *{mult}" for gen, mult in self.items
        ]

    def big_gens(self) -> list[BigGen]:
        return [g for g, _ in self.items if isinstance(g, BigGen)]


def verify_factorization(
    f: Factorization, params: GenSetParams
) -> tuple[Word, int]:
    """Reduced product of all expansions plus the symbol count."""
    product = IDENTITY
    for gen, mult in f.items:
        product = product * expand_generator(gen, params) ** mult
    return product, f.symbol_count


def letters_factorization(u: Word) -> Factorization:
    """The trivial witness spelling u letter by letter."""
    items = []
    for base, exp in u.runs:
        sign = 1 if exp > 0 else -1
        items.append((LetterGen(Letter(base, sign)), abs(exp)))
    return Factorization(tuple(items))


def block_witness(n: int, k: int, params: GenSetParams) -> Factorization:
    """Witness for c^k a^(B^(2n)) b^(B^(2n)): k letters c, then B^(2n-1)
    letters b^-1, then the identity-conjugator index-n generator."""
    if n < params.jmin:
        raise IndexTooSmall(f"index {n} below jmin={params.jmin}")
    if params.jmax_cap is not None and n > params.jmax_cap:
        raise ValueError(f"index {n} above jmax_cap={params.jmax_cap}")
    if k < 0:
        raise ValueError("k must be >= 0")
    items: list[tuple[Gen, int]] = []
    if k:
        items.append((C_POS, k))
    items.append((B_NEG, params.inner_exp(n)))
    items.append((BigGen(IDENTITY, n), 1))
    return Factorization(tuple(items))


def check_chain_constraint(
    blocks: list[tuple[int, int]], params: GenSetParams, cyclic: bool = False
) -> None:
    """Each separator power must exceed three times the next block's outer
    exponent; raises ConstraintViolation with the offending 1-based index."""
    for i in range(1, len(blocks)):
        n_i = blocks[i][0]
        k_prev = blocks[i - 1][1]
        if k_prev <= 3 * params.outer_exp(n_i):
            raise ConstraintViolation(
                f"separator k_{i} = {k_prev} is not greater than "
                f"3*B^(2*{n_i}) = {3 * params.outer_exp(n_i)}",
                index=i + 1,
            )
    if cyclic and blocks:
        n_first = blocks[0][0]
        k_last = blocks[-1][1]
        if k_last <= 3 * params.outer_exp(n_first):
            raise ConstraintViolation(
                f"trailing separator {k_last} breaks cyclic admissibility",
                index=1,
            )


def chain_witness(
    blocks: list[tuple[int, int]], params: GenSetParams
) -> Factorization:
    """Witness for the chained word

        a^(B^(2n_1)) b^(B^(2n_1)) c^(k_1) ... a^(B^(2n_r)) b^(B^(2n_r)) c^(k_r)

    with symbol count sum(B^(2n_i - 1) + 1) + sum(k_i). Requires every
    k_i >= 1 and the separator constraint between consecutive blocks.
    """
    if not blocks:
        raise ValueError("empty block list")
    for n, k in blocks:
        if n < params.jmin:
            raise IndexTooSmall(f"index {n} below jmin={params.jmin}")
        if params.jmax_cap is not None and n > params.jmax_cap:
            raise ValueError(f"index {n} above jmax_cap={params.jmax_cap}")
        if k < 1:
            raise ValueError("every separator power must be >= 1")
    check_chain_constraint(blocks, params)
    items: list[tuple[Gen, int]] = []
    for n, k in blocks:
        items.append((B_NEG, params.inner_exp(n)))
        items.append((BigGen(IDENTITY, n), 1))
        items.append((C_POS, k))
    return Factorization(tuple(items))


def chain_word(blocks: list[tuple[int, int]], params: GenSetParams) -> Word:
    """The chained word itself, built directly from the parameters."""
    runs: list[tuple[str, int]] = []
    for n, k in blocks:
        outer = params.outer_exp(n)
        runs.append(("a", outer))
        runs.append(("b", outer))
        if k:
            runs.append(("c", k))
    return Word.from_runs(runs)


# --- structural recognizers --------------------------------------------------


def _even_power_index(value: int, base: int) -> int | None:
    """n such that value == base^(2n), or None."""
    if value < base:
        return None
    e = 0
    while value % base == 0:
        value //= base
        e += 1
    if value != 1 or e % 2:
        return None
    return e // 2


def _scan_blocks(
    u: Word, params: GenSetParams, allow_adjacent: bool
) -> tuple[int, list[tuple[int, int]]] | None:
    """Match u against c^(k0) [a^(B^2n) b^(B^2n) c^(k_i)]*; returns
    (k0, blocks) or None. Block indices must be >= jmin (and under any cap)."""
    runs = list(u.runs)
    k0 = 0
    if runs and runs[0][0] == "c" and runs[0][1] > 0:
        k0 = runs[0][1]
        runs = runs[1:]
    blocks: list[tuple[int, int]] = []
    i = 0
    while i < len(runs):
        if i + 1 >= len(runs):
            return None
        (b1, e1), (b2, e2) = runs[i], runs[i + 1]
        if b1 != "a" or b2 != "b" or e1 <= 0 or e1 != e2:
            return None
        n = _even_power_index(e1, params.base)
        if n is None or n < params.jmin:
            return None
        if params.jmax_cap is not None and n > params.jmax_cap:
            return None
        i += 2
        k = 0
        if i < len(runs) and runs[i][0] == "c":
            if runs[i][1] < 0:
                return None
            k = runs[i][1]
            i += 1
        blocks.append((n, k))
        if i < len(runs) and k == 0 and not allow_adjacent:
            return None
    if not blocks:
        return None
    return k0, blocks


def shape_witness(u: Word, params: GenSetParams) -> Factorization | None:
    """Self-verifying upper-bound witness for block-shaped words, any base."""
    scan = _scan_blocks(u, params, allow_adjacent=True)
    if scan is None:
        return None
    k0, blocks = scan
    items: list[tuple[Gen, int]] = []
    if k0:
        items.append((C_POS, k0))
    for n, k in blocks:
        items.append((B_NEG, params.inner_exp(n)))
        items.append((BigGen(IDENTITY, n), 1))
        if k:
            items.append((C_POS, k))
    return Factorization(tuple(items))


def family_length(
    u: Word, params: GenSetParams
) -> tuple[int, Factorization] | None:
    """Exact length from the proven closed forms, or None.

    Whitelist (anything else is refused rather than estimated):
      * nonnegative powers of c, any parameters;
      * c^(k0) a^(5^2n) b^(5^2n) c^(k1) with n >= 2, k0, k1 >= 0, at the
        canonical parameters (base 5, jmin 2) only;
      * chains of such blocks with every separator >= 1 satisfying the
        separator constraint, same parameters.
    """
    if u.is_identity():
        return 0, Factorization()
    if len(u.runs) == 1 and u.runs[0][0] == "c" and u.runs[0][1] > 0:
        k = u.runs[0][1]
        return k, Factorization(((C_POS, k),))
    if params.base != 5 or params.jmin != 2:
        return None
    scan = _scan_blocks(u, params, allow_adjacent=False)
    if scan is None:
        return None
    k0, blocks = scan
    if len(blocks) == 1:
        n, k1 = blocks[0]
        length = k0 + params.inner_exp(n) + 1 + k1
        witness = block_witness(n, k0, params)
        if k1:
            witness = Factorization(witness.items + ((C_POS, k1),))
        return length, witness
    if k0 != 0 or blocks[-1][1] < 1:
        return None
    try:
        witness = chain_witness(blocks, params)
    except ConstraintViolation:
        return None
    length = sum(params.inner_exp(n) + 1 + k for n, k in blocks)
    return length, witness


def single_biggen_cancellation(
    f: Factorization, params: GenSetParams
) -> tuple[int, int] | None:
    """(letters cancelled from the big generator's expansion, expansion
    length) for a factorization of the form letters * big-gen * letters,
    else None.

    Cancellation is counted along the left-to-right reduction: first the
    letter prefix against the expansion, then the partially reduced word
    against the letter suffix (capped at what remains of the expansion).
    In any minimal factorization fewer than half the expansion's letters
    can be cancelled this way.
    """
    big_positions = [
        i
        for i, (gen, mult) in enumerate(f.items)
        if isinstance(gen, BigGen)
        for _ in range(mult)
    ]
    if len(big_positions) != 1:
        return None
    idx = big_positions[0]
    prefix = IDENTITY
    for gen, mult in f.items[:idx]:
        prefix = prefix * expand_generator(gen, params) ** mult
    expansion = expand_generator(f.items[idx][0], params)
    suffix = IDENTITY
    for gen, mult in f.items[idx + 1 :]:
        suffix = suffix * expand_generator(gen, params) ** mult
    merged = prefix * expansion
    from_left = (prefix.s_length + expansion.s_length - merged.s_length) // 2
    full = merged * suffix
    boundary = (merged.s_length + suffix.s_length - full.s_length) // 2
    from_right = min(boundary, expansion.s_length - from_left)
    return from_left + from_right, expansion.s_length


# --- the rewrite that drops a conjugator -------------------------------------


def rewrite_drop_conjugator(
    prefix: Word, gen: Gen, params: GenSetParams
) -> tuple[Word, Gen]:
    """If the letter prefix cancels the whole leading segment w b^(inner)
    of the generator's expansion, replace the generator by its
    identity-conjugator sibling, absorbing the difference into a new
    prefix that is never longer. Group element and symbol count are
    preserved; anything else returns the input unchanged.
    """
    if not isinstance(gen, BigGen):
        return prefix, gen
    norm = normalize_conjugator(gen.conj, gen.index, params)
    w = norm.conj
    if w.is_identity():
        return prefix, norm
    inner = Word((("b", params.inner_exp(gen.index)),))
    segment = w * inner
    collapsed = prefix * segment
    if collapsed.s_length != prefix.s_length - segment.s_length:
        return prefix, gen
    new_prefix = collapsed * ~w * ~inner
    return new_prefix, BigGen(IDENTITY, gen.index)


# --- length computation -------------------------------------------------------


@dataclass(frozen=True)
class SearchBudget:
    max_nodes: int = 1_000_000
    max_cost: int | None = None
    max_millis: float | None = None


@dataclass(frozen=True)
class LengthResult:
    """Bracket [lower, upper] on the extended word length.

    ``exact`` iff the bracket collapsed; ``exhaustive`` marks exactness
    established by completed search rather than by certificate collapse
    or a closed-form family. ``method`` is one of family/collapse/search/
    dual/bracket/budget.
    """

    lower: int
    upper: int
    witness: Factorization | None
    certificate: Certificate | None
    exact: bool
    exhaustive: bool
    budget_exhausted: bool
    nodes_expanded: int
    ms: float
    method: str

    def __post_init__(self):
        if self.lower > self.upper:
            raise ValueError("lower bound exceeds upper bound")
        if self.exact != (self.lower == self.upper):
            raise ValueError("exact flag inconsistent with bracket")


def _bracket_parts(u: Word, params: GenSetParams):
    lower, cert = best_certificate_bound(u, params)
    if lower == 0 and not u.is_identity():
        lower = 1  # a non-identity element needs at least one symbol
    upper = u.s_length
    witness = letters_factorization(u)
    shaped = shape_witness(u, params)
    if shaped is not None and shaped.symbol_count < upper:
        upper = shaped.symbol_count
        witness = shaped
    return lower, cert, upper, witness


def xlength(
    u: Word,
    params: GenSetParams,
    budget: SearchBudget | None = None,
    mode: str = "exact",
    algorithm: str = "best-first",
) -> LengthResult:
    """Compute or bracket the word length of u over the extended set.

    mode "family" uses only the proven closed forms (UnknownLength
    otherwise); "bracket" reports certificate-lower/witness-upper without
    searching; "exact" additionally runs exhaustive search when the
    bracket does not already collapse. ``algorithm`` picks the search
    engine: best-first, deepening, or dual (both, asserting agreement).
    """
    from . import search as _search

    t0 = time.perf_counter()
    budget = budget or SearchBudget()

    def elapsed_ms() -> float:
        return (time.perf_counter() - t0) * 1000.0

    if mode == "family":
        fam = family_length(u, params)
        if fam is None:
            raise UnknownLength(
                f"no proven closed form for {str(u) or '1'!r} at base "
                f"{params.base}, jmin {params.jmin}",
                words=[u],
            )
        length, witness = fam
        lower, cert = best_certificate_bound(u, params)
        return LengthResult(
            lower=length,
            upper=length,
            witness=witness,
            certificate=cert,
            exact=True,
            exhaustive=False,
            budget_exhausted=False,
            nodes_expanded=0,
            ms=elapsed_ms(),
            method="family",
        )

    if mode not in ("bracket", "exact"):
        raise ValueError(f"unknown mode {mode!r}")

    lower, cert, upper, witness = _bracket_parts(u, params)
    if lower == upper or mode == "bracket":
        return LengthResult(
            lower=lower,
            upper=upper,
            witness=witness,
            certificate=cert,
            exact=lower == upper,
            exhaustive=False,
            budget_exhausted=False,
            nodes_expanded=0,
            ms=elapsed_ms(),
            method="collapse" if lower == upper else "bracket",
        )

    # Exact mode: exhaustive search below the index cutoff.
    try:
        moves = _search.build_moves(u, upper, params, budget)
    except BudgetExhausted:
        return LengthResult(
            lower=lower,
            upper=upper,
            witness=witness,
            certificate=cert,
            exact=False,
            exhaustive=False,
            budget_exhausted=True,
            nodes_expanded=0,
            ms=elapsed_ms(),
            method="budget",
        )

    heuristic = _search.make_heuristic(u, upper, params, moves)
    cap = upper if budget.max_cost is None else min(upper, budget.max_cost)
    outcomes = []
    if algorithm in ("best-first", "dual"):
        outcomes.append(
            _search.best_first(u, moves, cap, heuristic, budget, t0)
        )
    if algorithm in ("deepening", "dual"):
        outcomes.append(
            _search.deepening(u, moves, cap, heuristic, budget, t0)
        )
    if not outcomes:
        raise ValueError(f"unknown algorithm {algorithm!r}")

    nodes = sum(o.nodes for o in outcomes)
    found = [o for o in outcomes if o.cost is not None]
    if found:
        costs = {o.cost for o in found}
        if len(costs) != 1:
            raise ArithmeticError(
                f"search engines disagree on {u!r}: "
                f"{sorted(costs)} (this is a bug)"
            )
        best = found[0]
        path_witness = Factorization.from_symbols(best.path)
        product, count = verify_factorization(path_witness, params)
        if product != u or count != best.cost:
            raise ArithmeticError(f"search produced an invalid witness for {u!r}")
        return LengthResult(
            lower=best.cost,
            upper=best.cost,
            witness=path_witness,
            certificate=cert,
            exact=True,
            exhaustive=True,
            # In dual mode, flag when the cross-check engine ran out of
            # budget even though the primary one completed.
            budget_exhausted=len(found) < len(outcomes),
            nodes_expanded=nodes,
            ms=elapsed_ms(),
            method="dual" if algorithm == "dual" else "search",
        )

    proven = max([lower] + [o.lower_bound for o in outcomes])
    for outcome in outcomes:
        # an unproven factorization found before the budget ran out still
        # tightens the upper end of the bracket
        if outcome.path is not None and len(outcome.path) < upper:
            candidate = Factorization.from_symbols(outcome.path)
            product, count = verify_factorization(candidate, params)
            if product == u and count < upper:
                upper = count
                witness = candidate
    proven = min(proven, upper)
    return LengthResult(
        lower=proven,
        upper=upper,
        witness=witness,
        certificate=cert,
        exact=proven == upper,
        exhaustive=False,
        budget_exhausted=True,
        nodes_expanded=nodes,
        ms=elapsed_ms(),
        method="budget",
    )
