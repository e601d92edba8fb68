"""Color classes, fairness parameters, and violation metrics for clusterings."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .graph import Clustering

__all__ = [
    "ColorModel",
    "FairnessBudget",
    "alpha_star",
    "proportional_alphas",
    "is_eps_fair",
    "max_fairness_violation",
    "max_fairness_violation_additive",
    "fairness_caps",
]

# Slack for fairness comparisons when alphas/epsilon arrive as floats.
FLOAT_SLACK = 1e-9


def _as_fraction(value):
    """Exact rational view of an int/Fraction, or None for floats."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, np.integer)):
        return Fraction(int(value))
    return None


@dataclass(frozen=True, eq=False)
class ColorModel:
    """Possibly-overlapping color classes with per-color fairness fractions.

    ``masks`` is an (ell, n) boolean membership matrix; row i is the vertex
    set of color i. ``alphas`` holds the per-color cap fraction in (0, 1],
    kept as Fractions when supplied that way so boundary comparisons stay
    exact.
    """

    masks: np.ndarray
    alphas: tuple
    names: tuple = None

    def __post_init__(self):
        masks = np.asarray(self.masks, dtype=bool)
        if masks.ndim != 2 or masks.shape[0] < 1 or masks.shape[1] < 1:
            raise ValueError("masks must be a nonempty (ell, n) boolean matrix")
        alphas = tuple(self.alphas)
        if len(alphas) != masks.shape[0]:
            raise ValueError(f"{masks.shape[0]} colors but {len(alphas)} alphas")
        for i, a in enumerate(alphas):
            if not 0 < a <= 1:
                raise ValueError(f"alpha[{i}] = {a} outside (0, 1]")
        for i in range(masks.shape[0]):
            if not masks[i].any():
                raise ValueError(f"color {i} has no members")
        names = self.names
        if names is not None:
            names = tuple(str(s) for s in names)
            if len(names) != masks.shape[0]:
                raise ValueError("names must match the number of colors")
        masks.setflags(write=False)
        object.__setattr__(self, "masks", masks)
        object.__setattr__(self, "alphas", alphas)
        object.__setattr__(self, "names", names)

    @property
    def ell(self) -> int:
        return int(self.masks.shape[0])

    @property
    def n(self) -> int:
        return int(self.masks.shape[1])

    @classmethod
    def from_labels(cls, labels, alphas, names=None) -> "ColorModel":
        """Disjoint colors from one label per vertex (labels sorted to fix
        color order). ``alphas`` may be a scalar applied uniformly."""
        labels = list(labels)
        cats = sorted(set(labels), key=str)
        masks = np.zeros((len(cats), len(labels)), dtype=bool)
        for i, cat in enumerate(cats):
            masks[i] = [lab == cat for lab in labels]
        if names is None:
            names = tuple(str(c) for c in cats)
        if not isinstance(alphas, (list, tuple)):
            alphas = tuple([alphas] * len(cats))
        return cls(masks, tuple(alphas), names)

    @classmethod
    def from_sets(cls, n: int, sets, alphas, names=None) -> "ColorModel":
        """Possibly-overlapping colors from explicit vertex id sets."""
        masks = np.zeros((len(sets), n), dtype=bool)
        for i, members in enumerate(sets):
            for v in members:
                masks[i, int(v)] = True
        if not isinstance(alphas, (list, tuple)):
            alphas = tuple([alphas] * len(sets))
        return cls(masks, tuple(alphas), names)

    def counts(self, members) -> np.ndarray:
        """Number of vertices of each color inside a cluster (popcounts)."""
        members = np.asarray(members)
        if members.dtype == bool:
            return self.masks[:, members].sum(axis=1)
        return self.masks[:, members.astype(np.intp)].sum(axis=1)

    def restrict(self, indices) -> "ColorModel":
        """Color model induced on a vertex subset; empty colors are dropped."""
        indices = np.asarray(indices, dtype=np.intp)
        sub = self.masks[:, indices]
        keep = [i for i in range(self.ell) if sub[i].any()]
        if not keep:
            raise ValueError("no color survives the restriction")
        names = tuple(self.names[i] for i in keep) if self.names else None
        return ColorModel(sub[keep], tuple(self.alphas[i] for i in keep), names)


@dataclass(frozen=True)
class FairnessBudget:
    """Allowed relative violation of the per-color caps."""

    epsilon: float

    def __post_init__(self):
        if self.epsilon < 0:
            raise ValueError("epsilon must be nonnegative")


def alpha_star(cm: ColorModel):
    """max over colors of (1 - alpha_i) / alpha_i; 0 when all caps are 1.

    Governs the cost guarantee of the rounding stage. Exact when the alphas
    are rationals.
    """
    if cm.ell == 0:
        raise ValueError("empty color model")
    return max((1 - a) / a for a in cm.alphas)


def proportional_alphas(p) -> tuple:
    """Caps proportional to class weights: alpha_i = p_i / sum(p).

    Convention: p[0] = 1 for the rarest class and p_i >= 1 elsewhere. Exact
    Fractions are returned for rational input.
    """
    p = list(p)
    if not p:
        raise ValueError("need at least one class weight")
    for w in p:
        if w <= 0:
            raise ValueError(f"class weight {w} must be positive")
    exact = [_as_fraction(w) for w in p]
    if all(w is not None for w in exact):
        total = sum(exact)
        return tuple(w / total for w in exact)
    total = float(sum(p))
    return tuple(float(w) / total for w in p)


class _ExactCaps:
    """Integer cross-multiplication test: count * den <= num * size."""

    def __init__(self, num, den):
        self.num = np.asarray(num, dtype=np.int64)
        self.den = np.asarray(den, dtype=np.int64)

    def admits(self, counts, sizes):
        counts = np.asarray(counts, dtype=np.int64)
        sizes = np.asarray(sizes, dtype=np.int64)
        return counts * self.den <= self.num * np.expand_dims(sizes, -1)


class _FloatCaps:
    """Float threshold test with a small slack against tie ambiguity."""

    def __init__(self, thresholds):
        self.thresholds = np.asarray(thresholds, dtype=float)

    def admits(self, counts, sizes):
        counts = np.asarray(counts, dtype=float)
        sizes = np.asarray(sizes, dtype=float)
        return counts <= self.thresholds * np.expand_dims(sizes, -1) + FLOAT_SLACK


def fairness_caps(cm: ColorModel, eps):
    """Per-color cap factors (1 + eps) * alpha_i as a vectorized comparator.

    Uses exact integer arithmetic when eps and every alpha are rationals,
    else float thresholds with FLOAT_SLACK. ``admits(counts, sizes)``
    broadcasts over a trailing color axis.
    """
    eps_f = _as_fraction(eps)
    alpha_f = [_as_fraction(a) for a in cm.alphas]
    if eps_f is not None and all(a is not None for a in alpha_f):
        caps = [(1 + eps_f) * a for a in alpha_f]
        return _ExactCaps([c.numerator for c in caps], [c.denominator for c in caps])
    return _FloatCaps([(1.0 + float(eps)) * float(a) for a in cm.alphas])


def is_eps_fair(cluster, cm: ColorModel, eps) -> bool:
    """True iff every color fills at most a (1 + eps) * alpha_i fraction of
    the cluster."""
    members = np.asarray(list(cluster) if not isinstance(cluster, np.ndarray) else cluster)
    if members.dtype == bool:
        size = int(members.sum())
    else:
        size = int(members.size)
    if size == 0:
        raise ValueError("fairness of an empty cluster is undefined")
    counts = cm.counts(members)
    return bool(fairness_caps(cm, eps).admits(counts, size).all())


def _nondegenerate_cluster_stats(c: Clustering, cm: ColorModel):
    for block in c.nondegenerate_blocks():
        yield cm.counts(block), block.size


def max_fairness_violation(c: Clustering, cm: ColorModel):
    """Worst relative overfill of a color cap over non-degenerate clusters:
    max of count / (alpha * size) - 1, clamped below at 0.

    Returns None when the clustering has no non-degenerate cluster.
    """
    worst = None
    for counts, size in _nondegenerate_cluster_stats(c, cm):
        for i in range(cm.ell):
            ratio = float(counts[i]) / (float(cm.alphas[i]) * size) - 1.0
            worst = ratio if worst is None else max(worst, ratio)
    if worst is None:
        return None
    return max(worst, 0.0)


def max_fairness_violation_additive(c: Clustering, cm: ColorModel):
    """Worst absolute overfill count - alpha * size, clamped below at 0;
    None without non-degenerate clusters. Companion reading of the same
    caps (reported alongside the relative form)."""
    worst = None
    for counts, size in _nondegenerate_cluster_stats(c, cm):
        for i in range(cm.ell):
            over = float(counts[i]) - float(cm.alphas[i]) * size
            worst = over if worst is None else max(worst, over)
    if worst is None:
        return None
    return max(worst, 0.0)
