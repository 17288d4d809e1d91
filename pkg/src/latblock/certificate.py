"""Evasion certificates: the machine-checkable output of the refuters.

A certificate pins one connecting curve (a lattice element gamma and a
distinguished interior time t) together with per-blocking-point sampled
clearances and exact attestations, so an independent checker can replay
the whole verdict.  Serialization is canonical JSON: sorted keys, fixed
separators, exact rationals as "num/den" strings with floats alongside.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

FORMAT_VERSION = 1


def frac_str(f) -> str:
    """Exact 'num/den' encoding of a rational (den omitted when 1)."""
    f = Fraction(f)
    if f.denominator == 1:
        return str(f.numerator)
    return f"{f.numerator}/{f.denominator}"


def parse_frac(s: str) -> Fraction:
    return Fraction(s)


@dataclass(frozen=True)
class EvasionCertificate:
    """Replayable evidence that one connecting curve clears a candidate
    blocking set by more than its tolerance everywhere."""

    mode: str                      # 'sl2' | 'quat'
    target: dict                   # exact description of the reduced target
    family_params: dict            # exact family data (strings)
    candidates: list               # candidate points as given (floats)
    gamma: dict                    # exact lattice element chosen
    gamma_index: int               # 1-based position in the family
    t: float                       # distinguished interior time
    lam: float                     # modified time at t
    a_lam: float                   # a(lambda) at t
    clearances: list[float]        # per-candidate minimum sampled clearance
    attestations: dict             # exact re-checkable facts
    sampling: dict                 # {'density': int, 'epsilon': float}
    algebra: dict | None = None    # {'a': int, 'b': int} in quat mode
    version: int = FORMAT_VERSION

    def to_dict(self) -> dict:
        doc = {
            "version": self.version,
            "mode": self.mode,
            "target": self.target,
            "family_params": self.family_params,
            "candidates": self.candidates,
            "gamma": self.gamma,
            "gamma_index": self.gamma_index,
            "t": self.t,
            "lambda": self.lam,
            "a_lambda": self.a_lam,
            "clearances": self.clearances,
            "attestations": self.attestations,
            "sampling": self.sampling,
        }
        if self.algebra is not None:
            doc["algebra"] = self.algebra
        return doc

    def to_json(self) -> str:
        """Canonical serialization: byte-stable for identical runs."""
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    @staticmethod
    def from_json(text: str) -> "EvasionCertificate":
        doc = json.loads(text)
        return EvasionCertificate(
            mode=doc["mode"],
            target=doc["target"],
            family_params=doc["family_params"],
            candidates=doc["candidates"],
            gamma=doc["gamma"],
            gamma_index=doc["gamma_index"],
            t=doc["t"],
            lam=doc["lambda"],
            a_lam=doc["a_lambda"],
            clearances=doc["clearances"],
            attestations=doc["attestations"],
            sampling=doc["sampling"],
            algebra=doc.get("algebra"),
            version=doc["version"],
        )


class BudgetExceeded(RuntimeError):
    """The search budget ran out before a clearing curve was found.

    This is never a claim that blocking succeeds: the diagnostics carry the
    best clearance seen so the caller can widen the budget.
    """

    def __init__(self, budget: int, best_clearance: float, best_index: int):
        super().__init__(
            f"budget {budget} exhausted; best clearance {best_clearance:.6g} "
            f"at family member {best_index}")
        self.budget = budget
        self.best_clearance = best_clearance
        self.best_index = best_index
