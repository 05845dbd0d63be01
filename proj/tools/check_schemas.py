#!/usr/bin/env python3
#
#   Copyright 2026 The tabkit Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
#

"""Run the tabkit binary on a small dataset and validate its JSON outputs."""

import argparse
import json
import pathlib
import random
import subprocess
import sys
import tempfile

import jsonschema


def write_blobs(path):
    rng = random.Random(3)
    lines = ["a,b,c,target"]
    for i in range(90):
        t = i % 3
        lines.append(f"{rng.gauss(2 * t, 1):.4f},{rng.gauss(0, 1):.4f},{rng.gauss(-t, 1):.4f},k{t}")
    path.write_text("\n".join(lines) + "\n")


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--tabkit", required=True)
    parser.add_argument("--schemas", required=True)
    args = parser.parse_args()
    schemas = pathlib.Path(args.schemas)

    def load(name):
        return json.loads((schemas / name).read_text())

    failures = 0
    with tempfile.TemporaryDirectory() as tmp:
        tmp = pathlib.Path(tmp)
        data = tmp / "blobs.csv"
        write_blobs(data)

        def run(*argv, expect=0):
            proc = subprocess.run([args.tabkit, *map(str, argv)], capture_output=True, text=True)
            if proc.returncode != expect:
                raise SystemExit(f"{argv[0]} exited {proc.returncode}: {proc.stderr}")
            return proc

        run("train", "--data", data, "--target", "target", "--model", "lrforest",
            "--params", '{"forest": {"n_trees": 10}}', "--cv-folds", "3", "--out", tmp / "tr")
        run("evaluate", "--model", tmp / "tr/model.json", "--data", data, "--out", tmp / "ev")
        run("interpret", "--model", tmp / "tr/model.json", "--data", data, "--row", "2",
            "--out", tmp / "in")
        run("syn-eval", "--real", data, "--synth", data, "--target", "target", "--n-trees", "5",
            "--out", tmp / "se")
        run("syn-eval", "--real", data, "--synth", data, "--out", tmp / "se2")
        err = run("train", "--data", tmp / "missing.csv", "--target", "target", "--out", tmp / "x",
                  expect=3)
        usage = run("train", "--bogus", expect=2)

        checks = [
            ("train_report.schema.json", tmp / "tr/report.json"),
            ("model_bundle.schema.json", tmp / "tr/model.json"),
            ("run_meta.schema.json", tmp / "tr/run_meta.json"),
            ("evaluate_report.schema.json", tmp / "ev/report.json"),
            ("explanation.schema.json", tmp / "in/explanation.json"),
            ("fidelity.schema.json", tmp / "se/fidelity.json"),
            ("fidelity.schema.json", tmp / "se2/fidelity.json"),
        ]
        docs = [(s, json.loads(p.read_text()), p.name) for s, p in checks]
        docs.append(("error.schema.json", json.loads(err.stderr), "stderr (data)"))
        docs.append(("error.schema.json", json.loads(usage.stderr), "stderr (usage)"))
        for schema_name, doc, label in docs:
            schema = load(schema_name)
            jsonschema.Draft202012Validator.check_schema(schema)
            errors = list(jsonschema.Draft202012Validator(schema).iter_errors(doc))
            status = "ok" if not errors else "FAIL"
            print(f"{status:4} {schema_name:30} {label}")
            for e in errors[:5]:
                print(f"       {list(e.absolute_path)}: {e.message}")
            failures += 1 if errors else 0
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
