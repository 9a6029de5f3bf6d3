import json
import os
import pathlib
import subprocess

import jsonschema
import pytest

CLI = os.environ.get("GEBRIDGE_CLI")
SCHEMAS = pathlib.Path(os.environ.get("GEBRIDGE_SCHEMAS", pathlib.Path(__file__).resolve().parents[2] / "schemas"))

pytestmark = pytest.mark.skipif(not CLI, reason="GEBRIDGE_CLI not set")

CASES = {
    "params": ["params", "--kernel", "exp", "--tc-grid", "1,4,16", "--s", "0.5"],
    "params-raw": ["params", "--rho", "0.5"],
    "simulate": ["simulate", "--kernel", "sqexp", "--tc", "3", "--reps", "10", "--slots", "300"],
    "validate-table": ["validate-table", "--grid", "tc=2 s=0,1 kernel=exp", "--reps", "40", "--slots", "600"],
    "scaling": ["scaling", "--kernel", "sqexp", "--tc-grid", "20,40,1e9", "--reps", "5", "--slots", "200"],
    "scaling-no-mc": ["scaling", "--kernel", "exp", "--tc-grid", "20,40,80", "--no-mc"],
    "diagnose": ["diagnose", "--tc-grid", "4", "--s-grid", "0,1", "--reps", "20", "--slots", "500"],
}


@pytest.mark.parametrize("case", sorted(CASES))
def test_json_matches_schema(case):
    args = CASES[case]
    proc = subprocess.run([CLI, *args, "--format", "json"], capture_output=True, text=True, timeout=300)
    assert proc.returncode == 0, proc.stderr
    doc = json.loads(proc.stdout)
    schema = json.loads((SCHEMAS / f"{args[0]}.schema.json").read_text())
    jsonschema.Draft202012Validator.check_schema(schema)
    jsonschema.validate(doc, schema, cls=jsonschema.Draft202012Validator)


def test_exit_codes():
    assert subprocess.run([CLI, "params", "--tc", "0"], capture_output=True).returncode == 2
    strict = [CLI, "validate-table", "--grid", "tc=2 s=0 kernel=sqexp", "--strict", "--tolerance", "0"]
    assert subprocess.run(strict, capture_output=True).returncode == 3
