#!/usr/bin/env python3
"""Convert a dataset to the CSV layout the benchmark reads.

Output: header row, numeric feature columns, one `label` column.

  convert_dataset.py iris out.csv            # bundled with scikit-learn
  convert_dataset.py path/to/file.arff out.csv
  convert_dataset.py path/to/ecoli.data out.csv --whitespace --label-index -1 --drop-index 0
"""
import argparse
import csv
import sys


def from_sklearn(name):
    from sklearn import datasets

    loader = {"iris": datasets.load_iris, "wine": datasets.load_wine, "digits": datasets.load_digits}[name]
    d = loader()
    names = [f.replace(" ", "_").replace("(", "").replace(")", "") for f in (d.feature_names or [])]
    if not names:
        names = [f"f{i + 1}" for i in range(d.data.shape[1])]
    rows = [list(x) + [str(int(y))] for x, y in zip(d.data, d.target)]
    return names, rows


def from_arff(path):
    names, rows, in_data = [], [], False
    with open(path) as f:
        for line in f:
            s = line.strip()
            if not s or s.startswith("%"):
                continue
            low = s.lower()
            if low.startswith("@attribute"):
                names.append(s.split()[1].strip("'\""))
            elif low.startswith("@data"):
                in_data = True
            elif in_data:
                rows.append([c.strip().strip("'\"") for c in s.split(",")])
    return names[:-1], rows


def from_delimited(path, whitespace, label_index, drop):
    rows = []
    with open(path) as f:
        for line in f:
            cells = line.split() if whitespace else [c.strip() for c in line.strip().split(",")]
            if not cells:
                continue
            label = cells[label_index]
            keep = [c for i, c in enumerate(cells) if i not in drop and i != label_index % len(cells)]
            rows.append(keep + [label])
    width = len(rows[0]) - 1
    return [f"f{i + 1}" for i in range(width)], rows


def main():
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("source")
    p.add_argument("output")
    p.add_argument("--whitespace", action="store_true")
    p.add_argument("--label-index", type=int, default=-1)
    p.add_argument("--drop-index", type=int, action="append", default=[])
    a = p.parse_args()
    if a.source in ("iris", "wine", "digits"):
        names, rows = from_sklearn(a.source)
    elif a.source.endswith(".arff"):
        names, rows = from_arff(a.source)
    else:
        names, rows = from_delimited(a.source, a.whitespace, a.label_index, set(a.drop_index))
    with open(a.output, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(names + ["label"])
        for r in rows:
            w.writerow([repr(float(c)) if i < len(names) and c not in ("?", "") else c for i, c in enumerate(r[:-1])] + [r[-1]])
    print(f"{a.output}: {len(rows)} rows, {len(names)} features", file=sys.stderr)


if __name__ == "__main__":
    main()
