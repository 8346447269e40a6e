"""Synthetic tables with the stroke dataset's columns, for tests and demos.

The generator mimics the public file's marginals loosely (about 5% positives,
age 0.08-82, a few missing bmi values) and makes the outcome depend mostly on
age, glucose, hypertension and heart disease. It is not a substitute for the
real data.
"""

from __future__ import annotations

import csv
import os

import numpy as np

from .table import STROKE_SCHEMA, Table


def stroke_like_rows(n: int = 1000, seed: int = 0, bmi_missing: float = 0.04) -> list[list]:
    rng = np.random.default_rng(seed)
    age = np.round(np.clip(rng.gamma(4.0, 11.0, n), 0.08, 82.0), 2)
    child = age < 16
    gender = rng.choice(["Female", "Male"], size=n, p=[0.59, 0.41]).astype(object)
    if n > 10:
        gender[rng.integers(n)] = "Other"
    hypertension = (rng.random(n) < 0.02 + 0.25 * (age / 82) ** 2).astype(int)
    heart = (rng.random(n) < 0.01 + 0.15 * (age / 82) ** 3).astype(int)
    married = np.where(rng.random(n) < np.clip((age - 18) / 30, 0.05, 0.9), "Yes", "No")
    married[child] = "No"
    work = rng.choice(
        ["Private", "Self-employed", "Govt_job", "Never_worked"], size=n, p=[0.7, 0.18, 0.11, 0.01]
    ).astype(object)
    work[child] = np.where(rng.random(child.sum()) < 0.9, "children", "Never_worked")
    residence = rng.choice(["Urban", "Rural"], size=n)
    glucose = np.round(np.where(rng.random(n) < 0.15, rng.normal(200, 40, n), rng.normal(92, 20, n)), 2)
    glucose = np.clip(glucose, 55.0, 272.0)
    bmi = np.round(np.clip(rng.normal(18 + 0.3 * np.minimum(age, 40), 6.5, n), 10.3, 97.6), 1)
    smoking = rng.choice(
        ["never smoked", "Unknown", "formerly smoked", "smokes"], size=n, p=[0.37, 0.3, 0.17, 0.16]
    ).astype(object)
    smoking[child & (rng.random(n) < 0.8)] = "Unknown"
    logit = -7.3 + 0.075 * age + 0.006 * (glucose - 100) + 0.5 * hypertension + 0.4 * heart
    stroke = (rng.random(n) < 1.0 / (1.0 + np.exp(-logit))).astype(int)

    rows = []
    ids = rng.permutation(72000)[:n] + 1
    missing = rng.random(n) < bmi_missing
    for i in range(n):
        rows.append([
            int(ids[i]), str(gender[i]), float(age[i]), int(hypertension[i]), int(heart[i]),
            str(married[i]), str(work[i]), str(residence[i]), float(glucose[i]),
            None if missing[i] else float(bmi[i]), str(smoking[i]), int(stroke[i]),
        ])
    return rows


def stroke_like_table(n: int = 1000, seed: int = 0, bmi_missing: float = 0.04) -> Table:
    return Table(STROKE_SCHEMA, tuple(tuple(r) for r in stroke_like_rows(n, seed, bmi_missing)))


def write_stroke_like_csv(path: str | os.PathLike, n: int = 1000, seed: int = 0) -> str:
    """Write a synthetic file in the public CSV layout (missing bmi as ``N/A``)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([c.name for c in STROKE_SCHEMA])
        for row in stroke_like_rows(n, seed):
            writer.writerow(["N/A" if v is None else v for v in row])
    return str(path)
