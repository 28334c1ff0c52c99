"""Seeded word sampler and the parallel per-word check runner.

Sample ``index`` of a run with seed ``seed`` is drawn from
``numpy.random.Generator(Philox(SeedSequence([seed, index])))``: one
counter-based stream per sample, so the sample set does not depend on how
indices are chunked or how many workers run them.

Per sample, the first draw picks the family: below 0.5 a uniform word,
otherwise one of constant-tail, periodic-window and near-constant with
equal odds.
"""

import logging
from typing import Dict, List, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed
from tqdm import tqdm

from loopbench.construction import (
    ConstructionContext,
    ConstructionParams,
    check_dichotomy,
    check_local_max_lemmas,
    check_shift_lemmas,
)
from loopbench.models import SampleRecord, SampleSummary

logger = logging.getLogger("loopbench")

FAMILIES = ("uniform", "constant-tail", "periodic-window", "near-constant")


def sample_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, index])))


def sample_word(params: ConstructionParams, seed: int, index: int) -> Tuple[str, Tuple[int, ...]]:
    """(family, word) for one sample index."""
    rng = sample_rng(seed, index)
    n, N, L, W, R, K = params.n, params.N, params.L, params.W, params.R, params.K
    x = rng.integers(n, size=N)
    if rng.random() < 0.5:
        family = FAMILIES[0]
    else:
        family = FAMILIES[1 + int(rng.integers(3))]

    if family == "constant-tail":
        start = int(rng.integers(max(0, L - R), L + 1))
        x[start:] = rng.integers(n)
    elif family == "periodic-window":
        k = int(rng.integers(2, max(2, K - 1) + 1))
        block = rng.integers(n, size=k)
        start = int(rng.integers(max(0, L - 2 * W), L + 1))
        length = int(rng.integers(W, W + R + 1))
        stop = min(N, start + length)
        x[start:stop] = block[np.arange(stop - start) % k]
    elif family == "near-constant":
        x[:] = rng.integers(n)
        flips = int(rng.integers(1, 4))
        lo, hi = max(0, L - W - R), min(N, L + W + R)
        pos = rng.integers(lo, hi, size=flips)
        x[pos] = rng.integers(n, size=flips)
    return family, tuple(int(a) for a in x)


def check_sample(ctx: ConstructionContext, seed: int, index: int) -> SampleRecord:
    family, x = sample_word(ctx.params, seed, index)
    dichotomy = check_dichotomy(x, ctx)
    shift = []
    for i in range(ctx.params.n):
        shift.extend(check_shift_lemmas(x, i, ctx).violations)
    local_max = check_local_max_lemmas(x, ctx).violations
    return SampleRecord(
        index=index,
        family=family,
        word=list(x),
        dichotomy=dichotomy,
        shift_violations=shift,
        local_max_violations=local_max,
    )


def _check_chunk(ctx: ConstructionContext, seed: int, indices: Sequence[int]) -> List[SampleRecord]:
    return [check_sample(ctx, seed, i) for i in indices]


def run_samples(
    ctx: ConstructionContext,
    samples: int,
    seed: int,
    n_jobs: int = 1,
    chunk_size: int = 256,
    progress: bool = False,
) -> List[SampleRecord]:
    """Check ``samples`` words; records come back ordered by sample index."""
    chunks = [range(s, min(s + chunk_size, samples)) for s in range(0, samples, chunk_size)]
    results = Parallel(n_jobs=n_jobs)(
        delayed(_check_chunk)(ctx, seed, chunk)
        for chunk in tqdm(chunks, desc="Sampling", disable=not progress)
    )
    return [record for chunk in results for record in chunk]


def summarize(records: Sequence[SampleRecord], seed: int, params: ConstructionParams) -> SampleSummary:
    families: Dict[str, int] = {f: 0 for f in FAMILIES}
    cases = {"case1": 0, "case2": 0, "violation": 0}
    shift = local_max = 0
    for r in records:
        families[r.family] += 1
        if r.dichotomy.case is None:
            cases["violation"] += 1
        else:
            cases[f"case{r.dichotomy.case}"] += 1
        shift += len(r.shift_violations)
        local_max += len(r.local_max_violations)
    return SampleSummary(
        seed=seed,
        samples=len(records),
        N=params.N,
        reduced=params.reduced,
        families=families,
        cases=cases,
        dichotomy_violations=cases["violation"],
        shift_violations=shift,
        local_max_violations=local_max,
    )
