import os
import tempfile

import pyarrow.csv as csv

from src.histograms import CSV_COLUMNS, histogram_table, read_histograms, run_key, update_histograms, write_csv
from src.sampling import sample_counts


def test_histogram_dataset_upserts_by_run():
    """Writing the same run twice replaces its rows instead of appending them"""

    with tempfile.TemporaryDirectory() as tmpdir:
        dataset_path = os.path.join(tmpdir, "histograms.arrow")
        assert read_histograms(dataset_path) is None

        first = sample_counts([0.3, 0.7], 1000, seed=1).rows()
        second = sample_counts([0.5, 0.25, 0.25], 1000, seed=2).rows()

        update_histograms(run_key("section2", 1), first, dataset_path)
        update_histograms(run_key("section2", 2), second, dataset_path)
        table = read_histograms(dataset_path)
        print(f"Dataset has {table.num_rows} rows")
        assert table.num_rows == 5

        update_histograms(run_key("section2", 1), first, dataset_path)
        table = read_histograms(dataset_path)
        assert table.num_rows == 5
        runs = table.column("run").to_pylist()
        assert runs.count("section2:seed=1") == 2
        assert runs.count("section2:seed=2") == 3
        assert table.schema.names == ["run"] + CSV_COLUMNS


def test_histogram_dataset_reads_one_run():
    with tempfile.TemporaryDirectory() as tmpdir:
        dataset_path = os.path.join(tmpdir, "histograms.arrow")
        update_histograms(run_key("section2", 1), [(0, 10, 0.5), (1, 10, 0.5)], dataset_path)
        update_histograms(run_key("section2", 2), [(0, 4, 0.2), (1, 16, 0.8)], dataset_path)
        table = read_histograms(dataset_path, run=run_key("section2", 2))
        assert table.num_rows == 2
        assert table.column("count").to_pylist() == [4, 16]
        assert read_histograms(dataset_path, run="chi:seed=2").num_rows == 0


def test_histogram_csv():
    """CSV output has one row per outcome, 0-based"""

    histogram = sample_counts([0.2, 0.8], 5000, seed=42)
    with tempfile.TemporaryDirectory() as tmpdir:
        path = os.path.join(tmpdir, "out", "histogram.csv")
        write_csv(histogram.rows(), path)
        table = csv.read_csv(path)

    assert table.column_names == CSV_COLUMNS
    assert table.column("outcome_index").to_pylist() == [0, 1]
    assert sum(table.column("count").to_pylist()) == 5000
    assert table.column("exact_probability").to_pylist() == [0.2, 0.8]


def test_histogram_table_without_run():
    table = histogram_table([(0, 3, 0.5), (1, 3, 0.5)])
    assert table.column_names == CSV_COLUMNS
    assert table.num_rows == 2


if __name__ == "__main__":
    test_histogram_dataset_upserts_by_run()
    test_histogram_dataset_reads_one_run()
    test_histogram_csv()
    test_histogram_table_without_run()
