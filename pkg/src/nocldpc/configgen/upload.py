"""Circular-buffer sizing and on-the-fly reconfiguration planning.

Configuration memories are circular buffers of capacity B.  While code C1
(k1 words per buffer) is decoding, the new code C2 (k2 words) is uploaded in
three phases: into the free space (B - k1 words), during the last C1
iteration, and during the first C2 iteration.  The n nodes of a torus row
share one bus, so a given node gets one write slot every n cycles; the
feasibility boundary is B > (n-1)/n * (k1 + k2).

The cycle model realizes that bound exactly: phase 2 and 3 form one
contiguous window of k1 + k2 cycles; a C2 word must be written strictly
before the cycle that reads it, while C1 slots may be rewritten the same
cycle they are read (read-first memory).  The worst bus alignment puts the
node's write slot at phase n-1 within its row.
"""

from __future__ import annotations

from dataclasses import dataclass


class UploadInfeasibleError(ValueError):
    def __init__(self, message: str, min_feasible_b: int):
        super().__init__(message)
        self.min_feasible_b = min_feasible_b


def min_buffer_size(k1: int, k2: int, n: int) -> int:
    """Smallest integer B strictly greater than (n-1)/n * (k1 + k2)."""
    if k1 < 0 or k2 < 0 or n < 1:
        raise ValueError("need k1, k2 >= 0 and n >= 1")
    return ((n - 1) * (k1 + k2)) // n + 1


def _feasible(k1: int, k2: int, n: int, b: int) -> bool:
    if b < k1 or b < k2:
        return False
    if k2 <= b - k1:
        return True  # fits in the free section; phases 2 and 3 not needed
    return n * b > (n - 1) * (k1 + k2)


@dataclass
class UploadPlan:
    k1: int
    k2: int
    n: int
    b: int
    w1: int  # words uploadable into the free section (phase 1)
    w2: int  # nominal phase-2 word budget, floor(k1 / n)
    w3: int  # nominal phase-3 word budget, floor(k2 / n)
    feasible: bool
    trivial: bool  # phase 1 alone suffices
    min_b: int  # smallest workable capacity for this (k1, k2, n)
    sof1: int = 0
    eof1: int = -1
    sof2: int = -1
    eof2: int = -1

    def summary(self) -> dict:
        return {
            "k1": self.k1, "k2": self.k2, "n": self.n, "B": self.b,
            "w1": self.w1, "w2": self.w2, "w3": self.w3,
            "feasible": self.feasible, "trivial": self.trivial,
            "min_B": self.min_b,
            "SOF1": self.sof1, "EOF1": self.eof1,
            "SOF2": self.sof2, "EOF2": self.eof2,
        }


def plan_upload(k1: int, k2: int, n: int, b: int, strict: bool = True) -> UploadPlan:
    """Lay out the three-phase upload of C2 while C1 decodes from capacity b.

    With strict=True an infeasible b raises UploadInfeasibleError carrying
    the minimal workable capacity; strict=False returns the plan anyway so
    that the cycle simulation can demonstrate the failure.
    """
    if n < 1:
        raise ValueError("bus count n must be >= 1")
    if k1 < 0 or k2 < 0 or b < 1:
        raise ValueError("need k1, k2 >= 0 and B >= 1")
    min_b = max(min_buffer_size(k1, k2, n), k1, k2, 1)
    feasible = _feasible(k1, k2, n, b)
    w1 = max(b - k1, 0)
    plan = UploadPlan(
        k1=k1, k2=k2, n=n, b=b,
        w1=min(w1, k2), w2=k1 // n, w3=k2 // n,
        feasible=feasible,
        trivial=k2 <= w1,
        min_b=min_b,
        sof1=0,
        eof1=(k1 - 1) % b if k1 else -1,
        sof2=k1 % b,
        eof2=(k1 + k2) % b,
    )
    if strict and not feasible:
        raise UploadInfeasibleError(
            f"B={b} cannot hold the switch (k1={k1}, k2={k2}, n={n}); "
            f"smallest workable capacity is {min_b}",
            min_feasible_b=min_b,
        )
    return plan


@dataclass
class UploadReport:
    passed: bool
    alignment: int
    words_written: int
    first_violation: tuple[str, int, int] | None  # (kind, cycle, word)

    def __bool__(self) -> bool:
        return self.passed


def simulate_upload(plan: UploadPlan, alignment: int | None = None) -> UploadReport:
    """Cycle-by-cycle check of one circular buffer during the code switch.

    Walks the last C1 iteration followed by the first C2 iteration and
    asserts that (a) no C1 word is overwritten before its final read,
    (b) every C2 word is written before its first read, and (c) reads never
    stall, i.e. decoding continues without pause.  alignment selects the
    node's bus slot phase; None takes the worst case n-1.
    """
    k1, k2, n, b = plan.k1, plan.k2, plan.n, plan.b
    phase = n - 1 if alignment is None else alignment
    if not 0 <= phase < n:
        raise ValueError(f"alignment {phase} outside 0..{n - 1}")
    if k2 == 0:
        return UploadReport(True, phase, 0, None)
    if b < k1 or b < k2:
        return UploadReport(False, phase, 0, ("capacity", 0, min(b, k2)))

    free = b - k1
    prewritten = min(free, k2)
    write_cycle = {w: -1 for w in range(prewritten)}
    writes_done = prewritten
    violation = None

    for t in range(k1 + k2):
        if t >= k1:
            # decoder reads C2 word t-k1 this cycle
            w = t - k1
            wc = write_cycle.get(w)
            if wc is None or wc >= t:
                violation = ("read-before-write", t, w)
                break
        if t % n == phase and writes_done < k2:
            w = writes_done
            target_c1_word = w - free  # C1 slot being overwritten, if any
            if target_c1_word >= 0 and t < target_c1_word:
                violation = ("overwrite-before-read", t, w)
                break
            write_cycle[w] = t
            writes_done += 1

    if violation is None and writes_done < k2:
        violation = ("incomplete-upload", k1 + k2, writes_done)
    return UploadReport(violation is None, phase, writes_done, violation)
