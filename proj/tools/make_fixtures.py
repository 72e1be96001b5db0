#!/usr/bin/env python3
"""Regenerate the CSV + .schema fixtures under data/.

Sources:
  iris, wine, glass, breast-l  Orange3 3.10.0 sdist, Orange/datasets/*.tab
  breast-w                     scikit-learn bundled WDBC (load_breast_cancer)

Usage: make_fixtures.py <orange-datasets-dir> <out-dir>

Missing values in breast-l ('?') become an explicit 'unknown' category, since
the loader rejects missing cells.
"""
import csv
import os
import re
import sys


def clean(name):
    name = re.sub(r"[^0-9A-Za-z]+", "_", name.strip()).strip("_").lower()
    return name or "attr"


def read_tab(path):
    with open(path, newline="") as f:
        lines = [l.rstrip("\n").split("\t") for l in f]
    names, kinds, flags, rows = lines[0], lines[1], lines[2], lines[3:]
    flags = flags + [""] * (len(names) - len(flags))
    return names, kinds, flags, [r for r in rows if any(c.strip() for c in r)]


def write(out_dir, name, attrs, class_name, rows):
    """attrs: list of (name, 'continuous' | [domain])."""
    with open(os.path.join(out_dir, name + ".csv"), "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow([a for a, _ in attrs])
        w.writerows(rows)
    with open(os.path.join(out_dir, name + ".schema"), "w") as f:
        f.write(f"# {name}\n")
        f.write(f"dataset.name = {name}\n")
        f.write(f"dataset.class = {class_name}\n")
        for a, kind in attrs:
            if kind == "continuous":
                f.write(f"attr.{a} = continuous\n")
            else:
                f.write(f"attr.{a} = nominal:{','.join(kind)}\n")


def sort_domain(values):
    try:
        return sorted(values, key=float)
    except ValueError:
        return sorted(values)


def convert_tab(src, out_dir, name, drop_meta=True, missing=None, class_domain=None):
    names, kinds, flags, rows = read_tab(src)
    keep = [i for i, fl in enumerate(flags) if not (drop_meta and fl.strip() in ("i", "m", "meta"))]
    class_idx = next(i for i, fl in enumerate(flags) if fl.strip() == "class")
    if missing is not None:
        rows = [[missing if c.strip() == "?" else c.strip() for c in r] for r in rows]
    attrs = []
    for i in keep:
        cname = clean(names[i])
        if kinds[i].strip() == "c":
            attrs.append((cname, "continuous"))
        else:
            declared = kinds[i].split()
            present = {r[i].strip() for r in rows}
            dom = declared if len(declared) > 1 else sort_domain(present)
            if i == class_idx and class_domain is not None:
                dom = class_domain
            for v in present:
                if v not in dom:
                    dom.append(v)
            attrs.append((cname, dom))
    out_rows = [[r[i].strip() for i in keep] for r in rows]
    write(out_dir, name, attrs, clean(names[class_idx]), out_rows)


def convert_wdbc(out_dir):
    from sklearn.datasets import load_breast_cancer

    b = load_breast_cancer()
    attrs = [(clean(n), "continuous") for n in b.feature_names]
    attrs.append(("diagnosis", ["malignant", "benign"]))
    rows = [[repr(float(v)) for v in x] + [b.target_names[t]] for x, t in zip(b.data, b.target)]
    write(out_dir, "breast-w", attrs, "diagnosis", rows)


def main():
    orange, out_dir = sys.argv[1], sys.argv[2]
    os.makedirs(out_dir, exist_ok=True)
    convert_tab(os.path.join(orange, "iris.tab"), out_dir, "iris")
    convert_tab(os.path.join(orange, "wine.tab"), out_dir, "wine")
    # UCI glass declares 7 types; type 4 has no instances.
    convert_tab(os.path.join(orange, "glass.tab"), out_dir, "glass",
                class_domain=["1", "2", "3", "4", "5", "6", "7"])
    convert_tab(os.path.join(orange, "breast-cancer.tab"), out_dir, "breast-l", missing="unknown")
    convert_wdbc(out_dir)


if __name__ == "__main__":
    main()
