"""
Synthetic stand-in for a country-level diet and health table.

One dominant index variable (``hdi``) drives the response
(``cholesterol``); five consumption variables are correlated with the
index and only weakly with the response beyond it.  155 rows, fixed seed.
The shipped ``data/diet_synthetic.csv`` is ``write_csv(make_diet_dataset())``.
"""

from __future__ import annotations

from importlib import resources

import numpy as np

from .linalg import DataColumn, DataMatrix

DEFAULT_SEED = 2013
N_ROWS = 155
DIET_COLUMNS = ("meat", "milk", "eggs", "fish", "animal_fat")
# loading of each consumption variable on the index, and its small direct effect on the response
_LOADINGS = (0.80, 0.65, 0.70, 0.35, 0.55)
_DIRECT = (0.10, 0.06, 0.10, 0.08, 0.07)


def make_diet_dataset(seed: int = DEFAULT_SEED, n: int = N_ROWS) -> DataMatrix:
    rng = np.random.default_rng(seed)
    hdi = np.clip(rng.beta(4.0, 2.5, size=n), 0.25, 0.97)
    z = (hdi - hdi.mean()) / hdi.std()
    diet = {}
    for name, load in zip(DIET_COLUMNS, _LOADINGS):
        diet[name] = load * z + np.sqrt(1.0 - load**2) * rng.standard_normal(n)
    chol = 0.85 * z + sum(d * diet[name] for name, d in zip(DIET_COLUMNS, _DIRECT)) + 0.40 * rng.standard_normal(n)
    cols = [DataColumn("hdi", np.round(hdi, 4)), DataColumn("cholesterol", np.round(4.6 + 0.35 * chol, 4))]
    scales = {"meat": (45.0, 25.0), "milk": (160.0, 70.0), "eggs": (9.0, 4.0), "fish": (18.0, 9.0), "animal_fat": (4.0, 2.5)}
    for name in DIET_COLUMNS:
        mu, sd = scales[name]
        cols.append(DataColumn(name, np.round(mu + sd * diet[name], 4)))
    return DataMatrix(cols)


def write_csv(data: DataMatrix) -> str:
    lines = [",".join(data.labels)]
    arr = data.to_array()
    for row in arr:
        lines.append(",".join(f"{v:.4f}" for v in row))
    return "\n".join(lines) + "\n"


def bundled_path():
    """Filesystem path of the shipped CSV."""
    return resources.files("reversals") / "data" / "diet_synthetic.csv"


if __name__ == "__main__":
    import sys

    sys.stdout.write(write_csv(make_diet_dataset()))
