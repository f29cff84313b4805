#!/usr/bin/env python3
"""Regenerate the CSV files bundled under data/.

breast_cancer.csv is the Breast Cancer Wisconsin (Diagnostic) dataset as
shipped with scikit-learn (569 rows, 212 malignant). The other three files
are deterministic synthetic stand-ins that keep the row counts, column
schemas, categorical vocabularies, and missing-value patterns of the
well-known UCI originals (chronic kidney disease, Parkinson's voice,
Cleveland heart disease), which cannot be redistributed here. Replace them
with the real CSVs if you have them; the loader only cares about the schema.

Run from the repository root:  python3 scripts/generate_datasets.py
"""

import csv
import os

import numpy as np

OUT_DIR = os.path.join(os.path.dirname(__file__), "..", "data")


def write_csv(name, header, rows):
    path = os.path.join(OUT_DIR, name)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)
    print(f"wrote {path} ({len(rows)} rows)")


def fmt(x, nd):
    return f"{x:.{nd}f}"


def breast_cancer():
    from sklearn.datasets import load_breast_cancer

    ds = load_breast_cancer()
    # sklearn encodes malignant as 0; the CSV uses the M/B diagnosis labels.
    header = ["id", "diagnosis"] + [n.replace(" ", "_") for n in ds.feature_names]
    rows = []
    for i, (x, y) in enumerate(zip(ds.data, ds.target)):
        diag = "M" if y == 0 else "B"
        rows.append([842000 + i, diag] + [fmt(v, 6) for v in x])
    n_pos = sum(1 for r in rows if r[1] == "M")
    assert len(rows) == 569 and n_pos == 212, (len(rows), n_pos)
    write_csv("breast_cancer.csv", header, rows)


def class_shifted(rng, n, labels, lo, hi, effect, nd=1, log_scale=False):
    """Numeric column with a class-conditional mean shift of `effect` sigmas."""
    mid = (lo + hi) / 2.0
    sigma = (hi - lo) / 6.0
    x = rng.normal(mid, sigma, size=n) + effect * sigma * (labels - labels.mean())
    if log_scale:
        x = np.exp(rng.normal(np.log(mid), 0.35, size=n) + 0.25 * effect * (labels - labels.mean()))
    x = np.clip(x, lo, hi)
    return [fmt(v, nd) for v in x]


def categorical(rng, n, labels, values, p_neg, p_pos):
    draws_neg = rng.choice(values, size=n, p=p_neg)
    draws_pos = rng.choice(values, size=n, p=p_pos)
    return np.where(labels == 1, draws_pos, draws_neg)


def punch_missing(rng, col, rate, token="?"):
    col = list(col)
    mask = rng.random(len(col)) < rate
    for i in np.flatnonzero(mask):
        col[i] = token
    return col


def ckd():
    rng = np.random.default_rng(20230401)
    n = 400
    labels = np.zeros(n, dtype=int)
    labels[:250] = 1  # ckd
    rng.shuffle(labels)

    cols = {}
    cols["age"] = class_shifted(rng, n, labels, 6, 90, 0.5, nd=0)
    cols["bp"] = class_shifted(rng, n, labels, 50, 180, 0.7, nd=0)
    sg_vals = ["1.005", "1.010", "1.015", "1.020", "1.025"]
    cols["sg"] = categorical(rng, n, labels, sg_vals,
                             [0.02, 0.05, 0.13, 0.35, 0.45],
                             [0.25, 0.30, 0.25, 0.15, 0.05])
    cols["al"] = categorical(rng, n, labels, ["0", "1", "2", "3", "4", "5"],
                             [0.85, 0.08, 0.04, 0.02, 0.007, 0.003],
                             [0.35, 0.20, 0.18, 0.15, 0.08, 0.04])
    cols["su"] = categorical(rng, n, labels, ["0", "1", "2", "3", "4", "5"],
                             [0.92, 0.04, 0.02, 0.01, 0.007, 0.003],
                             [0.62, 0.12, 0.10, 0.08, 0.05, 0.03])
    cols["rbc"] = categorical(rng, n, labels, ["normal", "abnormal"], [0.96, 0.04], [0.70, 0.30])
    cols["pc"] = categorical(rng, n, labels, ["normal", "abnormal"], [0.95, 0.05], [0.65, 0.35])
    cols["pcc"] = categorical(rng, n, labels, ["notpresent", "present"], [0.98, 0.02], [0.82, 0.18])
    cols["ba"] = categorical(rng, n, labels, ["notpresent", "present"], [0.99, 0.01], [0.90, 0.10])
    cols["bgr"] = class_shifted(rng, n, labels, 70, 490, 0.8, nd=0)
    cols["bu"] = class_shifted(rng, n, labels, 10, 300, 0.9, nd=0)
    cols["sc"] = class_shifted(rng, n, labels, 0.4, 15.0, 0.9, nd=1)
    cols["sod"] = class_shifted(rng, n, labels, 110, 150, -0.6, nd=0)
    cols["pot"] = class_shifted(rng, n, labels, 2.5, 7.5, 0.3, nd=1)
    cols["hemo"] = class_shifted(rng, n, labels, 3.1, 17.8, -1.0, nd=1)
    cols["pcv"] = class_shifted(rng, n, labels, 9, 54, -0.9, nd=0)
    cols["wc"] = class_shifted(rng, n, labels, 2200, 26400, 0.3, nd=0)
    cols["rc"] = class_shifted(rng, n, labels, 2.1, 8.0, -0.7, nd=1)
    cols["htn"] = categorical(rng, n, labels, ["no", "yes"], [0.95, 0.05], [0.45, 0.55])
    cols["dm"] = categorical(rng, n, labels, ["no", "yes"], [0.97, 0.03], [0.50, 0.50])
    cols["cad"] = categorical(rng, n, labels, ["no", "yes"], [0.98, 0.02], [0.87, 0.13])
    cols["appet"] = categorical(rng, n, labels, ["good", "poor"], [0.97, 0.03], [0.70, 0.30])
    cols["pe"] = categorical(rng, n, labels, ["no", "yes"], [0.98, 0.02], [0.72, 0.28])
    cols["ane"] = categorical(rng, n, labels, ["no", "yes"], [0.98, 0.02], [0.75, 0.25])

    miss = {"age": 0.02, "bp": 0.03, "rbc": 0.30, "pc": 0.16, "pcc": 0.01,
            "ba": 0.01, "bgr": 0.11, "bu": 0.05, "sc": 0.04, "sod": 0.22,
            "pot": 0.22, "hemo": 0.13, "pcv": 0.17, "wc": 0.26, "rc": 0.32,
            "htn": 0.005, "dm": 0.005, "appet": 0.002, "sg": 0.12,
            "al": 0.11, "su": 0.12}
    for k, rate in miss.items():
        cols[k] = punch_missing(rng, cols[k], rate)

    header = ["id"] + list(cols.keys()) + ["class"]
    rows = []
    for i in range(n):
        row = [i] + [cols[k][i] for k in cols] + ["ckd" if labels[i] == 1 else "notckd"]
        rows.append(row)
    assert len(header) - 1 == 25  # 25 feature columns ahead of the label
    write_csv("ckd.csv", header, rows)


def parkinsons():
    rng = np.random.default_rng(19570311)
    n = 195
    labels = np.zeros(n, dtype=int)
    labels[:147] = 1
    rng.shuffle(labels)

    spec = [
        ("MDVP:Fo(Hz)", 88, 260, -0.6, 3), ("MDVP:Fhi(Hz)", 102, 592, -0.3, 3),
        ("MDVP:Flo(Hz)", 65, 240, -0.5, 3), ("MDVP:Jitter(%)", 0.002, 0.033, 0.8, 5),
        ("MDVP:Jitter(Abs)", 0.000007, 0.00026, 0.7, 6), ("MDVP:RAP", 0.0007, 0.021, 0.8, 5),
        ("MDVP:PPQ", 0.0009, 0.02, 0.7, 5), ("Jitter:DDP", 0.002, 0.064, 0.8, 5),
        ("MDVP:Shimmer", 0.009, 0.12, 0.9, 5), ("MDVP:Shimmer(dB)", 0.085, 1.3, 0.9, 3),
        ("Shimmer:APQ3", 0.004, 0.056, 0.8, 5), ("Shimmer:APQ5", 0.005, 0.08, 0.8, 5),
        ("MDVP:APQ", 0.007, 0.14, 0.8, 5), ("Shimmer:DDA", 0.013, 0.17, 0.8, 5),
        ("NHR", 0.0006, 0.31, 0.6, 5), ("HNR", 8.4, 33.0, -0.9, 3),
        ("RPDE", 0.25, 0.69, 0.7, 6), ("DFA", 0.57, 0.83, 0.5, 6),
        ("spread1", -7.9, -2.4, 0.9, 6), ("spread2", 0.006, 0.45, 0.8, 6),
        ("D2", 1.4, 3.7, 0.6, 6), ("PPE", 0.04, 0.53, 0.9, 6),
    ]
    cols = {name: class_shifted(rng, n, labels, lo, hi, eff, nd)
            for name, lo, hi, eff, nd in spec}

    header = ["name"] + [s[0] for s in spec] + ["status"]
    rows = []
    for i in range(n):
        name = f"phon_R01_S{i // 6 + 1:02d}_{i % 6 + 1}"
        rows.append([name] + [cols[s[0]][i] for s in spec] + [labels[i]])
    write_csv("parkinsons.csv", header, rows)


def heart():
    rng = np.random.default_rng(198906)
    n = 303
    labels = np.zeros(n, dtype=int)
    labels[:164] = 1
    rng.shuffle(labels)

    cols = {}
    cols["age"] = class_shifted(rng, n, labels, 29, 77, 0.5, nd=0)
    cols["sex"] = categorical(rng, n, labels, ["0", "1"], [0.45, 0.55], [0.17, 0.83])
    cols["cp"] = categorical(rng, n, labels, ["1", "2", "3", "4"],
                             [0.12, 0.25, 0.40, 0.23], [0.04, 0.06, 0.12, 0.78])
    cols["trestbps"] = class_shifted(rng, n, labels, 94, 200, 0.3, nd=0)
    cols["chol"] = class_shifted(rng, n, labels, 126, 564, 0.25, nd=0)
    cols["fbs"] = categorical(rng, n, labels, ["0", "1"], [0.86, 0.14], [0.84, 0.16])
    cols["restecg"] = categorical(rng, n, labels, ["0", "1", "2"],
                                  [0.60, 0.01, 0.39], [0.38, 0.02, 0.60])
    cols["thalach"] = class_shifted(rng, n, labels, 71, 202, -0.8, nd=0)
    cols["exang"] = categorical(rng, n, labels, ["0", "1"], [0.86, 0.14], [0.45, 0.55])
    cols["oldpeak"] = class_shifted(rng, n, labels, 0.0, 6.2, 0.9, nd=1)
    cols["slope"] = categorical(rng, n, labels, ["1", "2", "3"],
                                [0.63, 0.31, 0.06], [0.27, 0.62, 0.11])
    cols["ca"] = categorical(rng, n, labels, ["0", "1", "2", "3"],
                             [0.79, 0.13, 0.06, 0.02], [0.42, 0.26, 0.20, 0.12])
    cols["thal"] = categorical(rng, n, labels, ["3", "6", "7"],
                               [0.79, 0.04, 0.17], [0.33, 0.08, 0.59])
    cols["ca"] = punch_missing(rng, cols["ca"], 4.0 / n)
    cols["thal"] = punch_missing(rng, cols["thal"], 2.0 / n)

    header = list(cols.keys()) + ["target"]
    rows = [[cols[k][i] for k in cols] + [labels[i]] for i in range(n)]
    write_csv("heart.csv", header, rows)


if __name__ == "__main__":
    os.makedirs(OUT_DIR, exist_ok=True)
    breast_cancer()
    ckd()
    parkinsons()
    heart()
