"""Validates every scenario and a set of generated reports against schemas/."""
import glob
import json
import os
import subprocess
import sys

import jsonschema

source, cli = sys.argv[1], sys.argv[2]
scenario_schema = json.load(open(os.path.join(source, "schemas", "scenario.schema.json")))
report_schema = json.load(open(os.path.join(source, "schemas", "report.schema.json")))
bad = 0
for path in sorted(glob.glob(os.path.join(source, "scenarios", "*.json"))):
    try:
        jsonschema.validate(json.load(open(path)), scenario_schema)
    except jsonschema.ValidationError as e:
        print(f"{path}: {e.message}")
        bad += 1
for name in ["example_2_1", "example_2_3", "example_3_3_1", "structure_small", "negative_m2z2"]:
    out = subprocess.run([cli, "run", os.path.join(source, "scenarios", name + ".json")], capture_output=True, text=True).stdout
    try:
        jsonschema.validate(json.loads(out), report_schema)
    except jsonschema.ValidationError as e:
        print(f"report {name}: {e.message}")
        bad += 1
print("schema violations:", bad)
sys.exit(1 if bad else 0)
