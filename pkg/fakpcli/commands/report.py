# This code is part of fakp and is licensed under the MIT license.

import os
import pathlib

import click
import pandas as pd

from fakpcli import FAKPCommandPlugin
from fakpcli.utils import library_errors, write

from fakpcli.commands.train import METRICS_COLUMNS

VARIANTS = ["baseline", "fa"]
TEST_SETS = {"0": "original", "1": "rotated"}
MISSING = "-"


def load_metrics(path: os.PathLike | str) -> pd.DataFrame:
    """Read a metrics CSV keeping every cell as the verbatim string.

    Raises
    ------
    ParseError
      if required columns are missing, a row has the wrong field count, or
      a train size, rotation flag or accuracy is not a number.
    """
    from fakp.exceptions import ParseError

    try:
        df = pd.read_csv(path, dtype=str, keep_default_na=False)
    except pd.errors.EmptyDataError:
        return pd.DataFrame(columns=METRICS_COLUMNS, dtype=str)
    except pd.errors.ParserError as exc:
        raise ParseError(str(exc), 1) from None
    missing = [c for c in METRICS_COLUMNS if c not in df.columns]
    if missing:
        errmsg = f"metrics header lacks column(s): {', '.join(missing)}"
        raise ParseError(errmsg, 1)
    for i, row in enumerate(df.itertuples(index=False)):
        lineno = i + 2  # after the header
        if row.test_rotated not in TEST_SETS:
            raise ParseError(f"test_rotated must be 0 or 1, got "
                             f"'{row.test_rotated}'", lineno)
        try:
            int(row.train_size)
            float(row.overall_accuracy)
        except ValueError:
            errmsg = (f"non-numeric train_size '{row.train_size}' or "
                      f"overall_accuracy '{row.overall_accuracy}'")
            raise ParseError(errmsg, lineno) from None
    return df


def _size_order(sizes) -> list[str]:
    return sorted(set(sizes), key=lambda s: (int(s), s))


def accuracy_table(df: pd.DataFrame) -> pd.DataFrame:
    """Rows are train sizes, columns ``<variant> <original|rotated>``.

    Only combinations present in ``df`` get a column; cells are the CSV
    values, verbatim. Later duplicates of a row win.
    """
    cells: dict[tuple[str, str], dict[str, str]] = {}
    for row in df.itertuples(index=False):
        column = (row.variant, TEST_SETS.get(row.test_rotated,
                                             row.test_rotated))
        cells.setdefault(column, {})[row.train_size] = row.overall_accuracy

    def column_order(column):
        variant, test_set = column
        rank = VARIANTS.index(variant) if variant in VARIANTS else len(VARIANTS)
        return (rank, variant, test_set != "original", test_set)

    columns = sorted(cells, key=column_order)
    sizes = _size_order(df["train_size"])
    table = pd.DataFrame(
        [[cells[c].get(size, MISSING) for c in columns] for size in sizes],
        index=pd.Index(sizes, name="train_size"),
        columns=[f"{variant} {test_set}" for variant, test_set in columns],
    )
    return table


def degradation_table(df: pd.DataFrame) -> pd.DataFrame:
    """Per train size, the original-to-rotated accuracy drop of each variant
    in percentage points and, where both variants were evaluated on rotated
    data, the relative improvement of fa over baseline in percent."""
    acc: dict[tuple[str, str, str], float] = {}
    for row in df.itertuples(index=False):
        acc[(row.train_size, row.variant, row.test_rotated)] = \
            float(row.overall_accuracy)

    rows = []
    for size in _size_order(df["train_size"]):
        entry = {"train_size": size}
        for variant in VARIANTS:
            original = acc.get((size, variant, "0"))
            rotated = acc.get((size, variant, "1"))
            if original is not None and rotated is not None:
                entry[f"{variant} drop"] = 100.0 * (original - rotated)
        base = acc.get((size, "baseline", "1"))
        fa = acc.get((size, "fa", "1"))
        if base is not None and fa is not None and base > 0:
            entry["fa vs baseline rotated (%)"] = 100.0 * (fa - base) / base
        rows.append(entry)
    return pd.DataFrame(rows).set_index("train_size")


@click.command(
    'report',
    short_help="Summarize a metrics CSV as accuracy tables"
)
@click.argument('metrics_csv',
                type=click.Path(exists=True, dir_okay=False,
                                path_type=pathlib.Path))
def report(metrics_csv):
    """Print the overall accuracies in METRICS_CSV with one row per train
    size and one column per variant and test set (original or rotated).

    Below it, the degradation from original to rotated test data of each
    variant in percentage points and the relative improvement of the
    frame-averaged model over the baseline on rotated data.
    """
    with library_errors():
        df = load_metrics(metrics_csv)
    if df.empty:
        write("no results")
        return

    write("overall accuracy")
    write(accuracy_table(df).to_string())
    degradation = degradation_table(df)
    if not degradation.columns.empty:
        write("")
        write("degradation on rotated data")
        write(degradation.to_string(float_format=lambda v: f"{v:+.1f}"))


PLUGIN = FAKPCommandPlugin(
    command=report,
    section="Experiments",
    requires_fakp=(0, 1),
)

if __name__ == "__main__":
    report()
