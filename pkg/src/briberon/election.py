"""(k,b)-elections: ballots, validation, tallying, winners and rule encoders."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

INT64_MAX = 2**63 - 1

RULES = ("plurality", "veto", "approval", "t-approval", "utility")


class InvalidElection(ValueError):
    """Raised when an election (or something built from one) breaks the (k,b) rules."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations) or "invalid election")


def check_int64(value: int, what: str = "value") -> int:
    if not -INT64_MAX - 1 <= value <= INT64_MAX:
        raise OverflowError(f"{what} {value} exceeds the 64-bit integer range")
    return value


@dataclass(frozen=True)
class CandidateSet:
    names: tuple[str, ...]

    def __post_init__(self):
        names = tuple(self.names)
        object.__setattr__(self, "names", names)
        if not names:
            raise ValueError("a candidate set needs at least one candidate")
        for name in names:
            if not isinstance(name, str) or not name:
                raise ValueError(f"candidate labels must be nonempty strings, got {name!r}")
        if len(set(names)) != len(names):
            raise ValueError("candidate labels must be distinct")

    def __len__(self):
        return len(self.names)

    def __iter__(self):
        return iter(self.names)

    def index(self, label: str) -> int:
        try:
            return self.names.index(label)
        except ValueError:
            raise KeyError(f"unknown candidate {label!r}") from None


@dataclass(frozen=True)
class Ballot:
    points: tuple[int, ...]
    unassigned: int = 0

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(int(x) for x in self.points))
        object.__setattr__(self, "unassigned", int(self.unassigned))


@dataclass(frozen=True)
class Violation:
    voter: int | None
    reason: str

    def __str__(self):
        if self.voter is None:
            return self.reason
        return f"voter {self.voter}: {self.reason}"


@dataclass(frozen=True)
class KBElection:
    """An election in which every voter spreads k points, at most b per candidate.

    ``weights`` defaults to all ones.  In a free-form election a voter may keep
    some points unassigned; those are not subject to the b bound.
    """

    candidates: CandidateSet
    k: int
    b: int
    ballots: tuple[Ballot, ...]
    free_form: bool = False
    weights: tuple[int, ...] | None = None

    def __post_init__(self):
        if not isinstance(self.candidates, CandidateSet):
            object.__setattr__(self, "candidates", CandidateSet(tuple(self.candidates)))
        ballots = tuple(b if isinstance(b, Ballot) else Ballot(tuple(b)) for b in self.ballots)
        object.__setattr__(self, "ballots", ballots)
        weights = (1,) * len(ballots) if self.weights is None else tuple(int(w) for w in self.weights)
        object.__setattr__(self, "weights", weights)
        if self.k < 1 or self.b < 1:
            raise ValueError("k and b must be positive integers")
        if not self.free_form and self.k > self.m * self.b:
            raise ValueError(
                f"no (k={self.k}, b={self.b})-election exists over {self.m} candidates"
            )
        if len(weights) != len(ballots):
            raise ValueError("one weight per ballot is required")
        if any(w < 1 for w in weights):
            raise ValueError("voter weights must be positive integers")

    @property
    def m(self) -> int:
        return len(self.candidates)

    @property
    def n(self) -> int:
        return len(self.ballots)

    def check(self) -> "KBElection":
        problems = validate(self)
        if problems:
            raise InvalidElection(problems)
        return self


@dataclass(frozen=True)
class ScoreVector:
    scores: tuple[int, ...]

    def __getitem__(self, i):
        return self.scores[i]

    def __len__(self):
        return len(self.scores)

    def __iter__(self):
        return iter(self.scores)


def validate(election: KBElection) -> list[Violation]:
    """Return every broken ballot rule (an empty list means the election is valid)."""
    out = []
    m, k, b = election.m, election.k, election.b
    for v, ballot in enumerate(election.ballots):
        if len(ballot.points) != m:
            out.append(Violation(v, f"ballot has {len(ballot.points)} entries, expected {m}"))
            continue
        if any(x < 0 for x in ballot.points):
            out.append(Violation(v, "negative point entry"))
        if any(x > b for x in ballot.points):
            out.append(Violation(v, "entry exceeds b"))
        if ballot.unassigned < 0:
            out.append(Violation(v, "negative unassigned count"))
        if not election.free_form and ballot.unassigned != 0:
            out.append(Violation(v, "unassigned points in a non-free-form election"))
        if sum(ballot.points) + ballot.unassigned != k:
            out.append(Violation(v, "points sum ≠ k"))
    return out


def tally(election: KBElection) -> ScoreVector:
    scores = [0] * election.m
    for w, ballot in zip(election.weights, election.ballots):
        for i, x in enumerate(ballot.points):
            scores[i] += w * x
    for s in scores:
        check_int64(s, "score")
    return ScoreVector(tuple(scores))


def winners(scores: ScoreVector | Sequence[int]) -> frozenset[int]:
    """Indices of all co-winners (candidates with the highest score)."""
    values = list(scores)
    if not values:
        raise ValueError("no candidates")
    top = max(values)
    return frozenset(i for i, s in enumerate(values) if s == top)


def is_winner(scores: ScoreVector | Sequence[int], candidate: int) -> bool:
    values = list(scores)
    return values[candidate] >= max(values)


def _as_index(candidates: CandidateSet, c) -> int:
    if isinstance(c, str):
        return candidates.index(c)
    c = int(c)
    if not 0 <= c < len(candidates):
        raise KeyError(f"candidate index {c} out of range")
    return c


def _ranking(candidates: CandidateSet, ranking) -> list[int]:
    order = [_as_index(candidates, c) for c in ranking]
    if sorted(order) != list(range(len(candidates))):
        raise ValueError(f"malformed ranking {list(ranking)!r}: not a permutation of the candidates")
    return order


def encode_rule(
    rule: str,
    candidates: CandidateSet | Iterable[str],
    ballots: Iterable,
    *,
    t: int | None = None,
    k: int | None = None,
    b: int | None = None,
    weights: Sequence[int] | None = None,
) -> KBElection:
    """Express a classical voting rule as a (k,b)-election.

    ``ballots`` holds strict rankings (plurality, veto), approval sets
    (approval, t-approval) or point vectors (utility).  Candidates may be given
    by label or by index.
    """
    if not isinstance(candidates, CandidateSet):
        candidates = CandidateSet(tuple(candidates))
    m = len(candidates)
    ballots = list(ballots)
    out = []
    if rule == "plurality":
        for r in ballots:
            pts = [0] * m
            pts[_ranking(candidates, r)[0]] = 1
            out.append(Ballot(tuple(pts)))
        kk, bb, free = 1, 1, False
    elif rule == "veto":
        if m < 2:
            raise ValueError("veto needs at least two candidates")
        for r in ballots:
            pts = [1] * m
            pts[_ranking(candidates, r)[-1]] = 0
            out.append(Ballot(tuple(pts)))
        kk, bb, free = m - 1, 1, False
    elif rule in ("approval", "t-approval"):
        if rule == "t-approval" and (t is None or not 1 <= t <= m):
            raise ValueError("t-approval needs 1 <= t <= m")
        for approved in ballots:
            idx = {_as_index(candidates, c) for c in approved}
            if rule == "t-approval" and len(idx) != t:
                raise ValueError(f"t-approval ballot approves {len(idx)} candidates, expected {t}")
            pts = tuple(1 if i in idx else 0 for i in range(m))
            out.append(Ballot(pts, m - len(idx) if rule == "approval" else 0))
        if rule == "approval":
            kk, bb, free = m, 1, True
        else:
            kk, bb, free = t, 1, False
    elif rule == "utility":
        if k is None or b is None:
            raise ValueError("utility voting needs explicit k and b")
        for vec in ballots:
            pts = tuple(int(x) for x in vec)
            if len(pts) != m or any(x < 0 or x > b for x in pts) or sum(pts) != k:
                raise ValueError(f"utility vector {list(pts)} violates k={k}, b={b}")
            out.append(Ballot(pts))
        kk, bb, free = k, b, False
    else:
        raise ValueError(f"unknown rule {rule!r}; expected one of {', '.join(RULES)}")
    return KBElection(candidates, kk, bb, tuple(out), free_form=free, weights=weights).check()
