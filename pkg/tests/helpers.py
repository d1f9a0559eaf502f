"""Shared fixtures-as-functions: data paths, random instances and float oracles."""

from __future__ import annotations

import random
from fractions import Fraction
from pathlib import Path

import numpy as np
import scipy.linalg
import sympy

from crnlp.fileformat import load
from crnlp.network import Network

DATA = Path(__file__).resolve().parent.parent / "data"


def data_file(name: str) -> Path:
    return DATA / name


def example1():
    return load(DATA / "example1.crn")


def schmitz():
    return load(DATA / "schmitz.crn")


def random_rational(rng: random.Random, num: int = 5, den: int = 4) -> Fraction:
    return Fraction(rng.randint(-num, num), rng.randint(1, den))


def random_matrix(rng: random.Random, rows: int, cols: int, density: float = 0.6) -> list[list[Fraction]]:
    return [[random_rational(rng) if rng.random() < density else Fraction(0) for _ in range(cols)]
            for _ in range(rows)]


def random_generators(rng: random.Random, n: int) -> list[list[Fraction]]:
    """Sparse rational generators; sometimes unit vectors so robust species occur."""
    gens = []
    for _ in range(rng.randint(0, n)):
        if rng.random() < 0.3:
            v = [Fraction(0)] * n
            v[rng.randrange(n)] = Fraction(1)
        else:
            v = [random_rational(rng) if rng.random() < 0.5 else Fraction(0) for _ in range(n)]
        gens.append(v)
    return gens


def sympy_rank(rows) -> int:
    if not rows or not rows[0]:
        return 0
    return sympy.Matrix([[sympy.Rational(v.numerator, v.denominator) for v in r] for r in rows]).rank()


def float_complement(gens: list[list[Fraction]], n: int) -> np.ndarray:
    """Rows span the orthogonal complement of span(gens), by SVD."""
    if not gens:
        return np.eye(n)
    a = np.array([[float(v) for v in g] for g in gens])
    return scipy.linalg.null_space(a).T


def sampling_oracle(gens, n: int, rng: np.random.Generator, samples: int = 50, rel: float = 1e-10) -> set[int]:
    """Species whose coordinate stays constant over sampled points of the LP set."""
    w = float_complement(gens, n)
    ref = np.exp(rng.uniform(-1.0, 1.0, n))
    if w.shape[0] == 0:
        return set(range(n))
    pts = ref * np.exp(rng.normal(size=(samples, w.shape[0])) @ w)
    return {k for k in range(n) if np.all(np.abs(pts[:, k] - ref[k]) <= rel * ref[k])}


def random_multilinkage_network(rng: random.Random, classes: int | None = None) -> Network:
    """Disjoint linkage classes over fresh complexes, each a random connected digraph."""
    classes = classes or rng.randint(2, 4)
    m = rng.randint(3, 5)  # 4**m >= 64 candidate complexes, at most 16 needed
    species = [f"S{i}" for i in range(m)]
    used: set[tuple] = set()
    rxns = []
    label = 0
    for _ in range(classes):
        size = rng.randint(2, 4)
        nodes = []
        while len(nodes) < size:
            c = tuple(rng.randint(0, 3) for _ in range(m))
            if c not in used:
                used.add(c)
                nodes.append(c)
        arcs = set()
        for i in range(1, size):
            j = rng.randrange(i)
            arcs.add((i, j) if rng.random() < 0.5 else (j, i))
        for _ in range(rng.randint(0, size)):
            a, b = rng.sample(range(size), 2)
            arcs.add((a, b))
        for a, b in sorted(arcs):
            label += 1
            rxns.append((f"R{label}", dict(zip(species, nodes[a])), dict(zip(species, nodes[b]))))
    return Network.from_reactions(species, rxns)


def random_network(rng: random.Random, max_species: int = 4, max_complexes: int = 6) -> Network:
    """Random network (possibly one linkage class), zero complex allowed."""
    m = rng.randint(1, max_species)
    species = [f"S{i}" for i in range(m)]
    n = rng.randint(2, min(max_complexes, 3 ** m))
    nodes: list[tuple] = []
    while len(nodes) < n:
        c = tuple(rng.randint(0, 2) for _ in range(m))
        if c not in nodes:
            nodes.append(c)
    arcs = set()
    for i in range(1, n):
        j = rng.randrange(i)
        arcs.add((i, j) if rng.random() < 0.5 else (j, i))
    for _ in range(rng.randint(0, n)):
        a, b = rng.sample(range(n), 2)
        arcs.add((a, b))
    rxns = [(f"R{k + 1}", dict(zip(species, nodes[a])), dict(zip(species, nodes[b])))
            for k, (a, b) in enumerate(sorted(arcs))]
    return Network.from_reactions(species, rxns)
