"""Write the Wisconsin Diagnostic Breast Cancer table in the UCI wdbc.data layout.

scikit-learn ships the same 569x30 feature table with integer targets
(0 = malignant, 1 = benign) but without the patient ids. Ids are replaced by
the 1-based row number.
"""
import csv
import os
import sys

import sklearn


def main(out_path: str) -> None:
    src = os.path.join(os.path.dirname(sklearn.__file__), "datasets", "data", "breast_cancer.csv")
    with open(src, newline="") as f:
        rows = list(csv.reader(f))[1:]
    with open(out_path, "w", newline="") as out:
        for i, row in enumerate(rows, start=1):
            diagnosis = "M" if row[-1] == "0" else "B"
            out.write(",".join([str(i), diagnosis] + row[:-1]) + "\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "data/wdbc.data")
