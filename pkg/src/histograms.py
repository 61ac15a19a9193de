import os

import pyarrow as pa
import pyarrow.csv as csv
import pyarrow.ipc as ipc

CSV_COLUMNS = ["outcome_index", "count", "exact_probability"]


def histogram_table(rows, run=None):
    """
    Arrow table of (outcome_index, count, exact_probability) rows, with a leading
    run column when run is given.
    """
    cols = {
        "outcome_index": pa.array([r[0] for r in rows], pa.int64()),
        "count": pa.array([r[1] for r in rows], pa.int64()),
        "exact_probability": pa.array([r[2] for r in rows], pa.float64()),
    }
    if run is not None:
        cols = {"run": pa.array([run] * len(rows), pa.string()), **cols}
    return pa.table(cols)


def write_csv(rows, path):
    folder = os.path.dirname(path)
    if folder:
        os.makedirs(folder, exist_ok=True)
    csv.write_csv(histogram_table(rows), path)


def update_histograms(run, rows, dataset_path):
    """
    Overwrite any existing rows for the same run in the Arrow IPC file.
    """
    new_table = histogram_table(rows, run)
    old_table = read_histograms(dataset_path)
    if old_table is not None:
        mask = pa.array([val != run for val in old_table.column("run").to_pylist()], pa.bool_())
        table = pa.concat_tables([old_table.filter(mask), new_table])
    else:
        table = new_table

    with open(dataset_path, "wb") as f:
        writer = ipc.RecordBatchFileWriter(f, table.schema)
        writer.write_table(table)
        writer.close()


def read_histograms(dataset_path, run=None):
    """
    Histogram rows stored in the Arrow IPC file, restricted to one run when
    given. None when the file does not exist yet.
    """
    if not os.path.exists(dataset_path):
        return None
    with open(dataset_path, "rb") as f:
        table = ipc.RecordBatchFileReader(f).read_all()
    if run is None:
        return table
    return table.filter(pa.array([val == run for val in table.column("run").to_pylist()], pa.bool_()))


def run_key(scenario, seed):
    return f"{scenario}:seed={seed}"
