import json
from pathlib import Path

import pytest

from etspectra.cli.commands import main

GOLDEN = Path(__file__).parent / "golden"

SCHEMA_RUNS = {
    "spectrum": ["-P", "D=2", "--levels", "0..1"],
    "wavefunction": ["-P", "D=2", "--levels", "0", "--points", "51"],
    "envelope": ["-P", "D=2", "--levels", "0..1", "--points", "11"],
    "sweep-d": ["--d-range", "1..2", "--d-samples", "2", "--levels", "0"],
    "compare": ["--levels", "0"],
    "convergence": [
        "--model",
        "harmonic-approx",
        "-P",
        "D=1",
        "--levels",
        "0",
        "--n-points",
        "129",
        "--x-max",
        "10",
    ],
}


def key_tree(value):
    """Keys of nested mappings, first element of lists, values blanked."""
    if isinstance(value, dict):
        return {k: key_tree(v) for k, v in value.items()}
    if isinstance(value, list):
        return [key_tree(value[0])] if value else []
    return None


def render(tmp_path, name, argv, fmt):
    tmp_path.mkdir(parents=True, exist_ok=True)
    out = tmp_path / "{}.{}".format(name, fmt)
    assert main([name] + argv + ["--format", fmt, "--out", str(out)]) == 0
    return out.read_bytes()


@pytest.mark.parametrize("command", sorted(SCHEMA_RUNS))
def test_output_schema_matches_golden(tmp_path, command):
    payload = json.loads(render(tmp_path, command, SCHEMA_RUNS[command], "json"))
    golden = json.loads((GOLDEN / "{}.schema.json".format(command)).read_text())

    assert payload["columns"] == golden["columns"]
    assert all(list(row) == golden["columns"] for row in payload["rows"])
    assert key_tree(payload["metadata"]) == golden["metadata"]


@pytest.mark.parametrize("command", sorted(SCHEMA_RUNS))
def test_csv_output_is_reproducible(tmp_path, command):
    first = render(tmp_path / "a", command, SCHEMA_RUNS[command], "csv")
    second = render(tmp_path / "b", command, SCHEMA_RUNS[command], "csv")

    assert first == second
    golden = json.loads((GOLDEN / "{}.schema.json".format(command)).read_text())
    assert first.decode().splitlines()[0] == ",".join(golden["columns"])


def test_harmonic_envelope_matches_golden_bytes(tmp_path):
    argv = [
        "--model",
        "harmonic-approx",
        "-P",
        "D=1",
        "--levels",
        "0..1",
        "--window=-2..2",
        "--points",
        "5",
    ]

    assert render(tmp_path, "envelope", argv, "csv") == (
        GOLDEN / "envelope_harmonic.csv"
    ).read_bytes()
