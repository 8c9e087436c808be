#!/usr/bin/env python3
"""End-to-end checks of the vqsd command line."""

import argparse
import json
import math
import os
import shutil
import subprocess
import sys
import unittest
from pathlib import Path

import jsonschema

ARGS = None


def run(*argv, env=None, check=True):
    full_env = dict(os.environ)
    full_env.pop("VQSD_SEED", None)
    if env:
        full_env.update(env)
    proc = subprocess.run([ARGS.cli, *argv], capture_output=True, text=True, env=full_env)
    if check and proc.returncode != 0:
        raise AssertionError(f"{argv} exited {proc.returncode}: {proc.stderr}")
    return proc


def strip_timestamp(doc):
    doc = json.loads(json.dumps(doc))
    doc["runMetadata"].pop("timestamp")
    return doc


class CliTest(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.work = Path(ARGS.work)
        shutil.rmtree(cls.work, ignore_errors=True)
        cls.work.mkdir(parents=True)
        cls.schema = json.loads(Path(ARGS.schema).read_text())
        jsonschema.Draft202012Validator.check_schema(cls.schema)

    def out(self, name):
        return self.work / self.id().rsplit(".", 1)[-1] / name

    def write_config(self, name, doc):
        path = self.out(name)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(doc))
        return path

    def load(self, directory):
        doc = json.loads((directory / "result.json").read_text())
        jsonschema.validate(doc, self.schema)
        return doc

    def test_discriminate_preset_is_deterministic(self):
        a, b = self.out("a"), self.out("b")
        run("discriminate", "--preset", "fig4a", "--seed", "11", "--out", str(a))
        run("discriminate", "--preset", "fig4a", "--seed", "11", "--out", str(b))
        da, db = self.load(a), self.load(b)
        self.assertEqual(strip_timestamp(da), strip_timestamp(db))
        self.assertEqual((a / "cost_history.csv").read_text(), (b / "cost_history.csv").read_text())
        self.assertEqual(da["runMetadata"]["seed"], 11)
        self.assertTrue(da["certificate"]["pass"])
        self.assertAlmostEqual(da["finalCost"], da["baselines"]["helstrom"], delta=1e-4)
        rows = (a / "cost_history.csv").read_text().splitlines()
        self.assertEqual(rows[0], "iteration,cost")
        self.assertEqual(len(rows) - 1, len(da["costHistory"]))

    def test_seed_precedence(self):
        cfg = self.write_config("cfg.json", {
            "mode": "discriminate", "seed": 4,
            "states": [{"ket": "0"}, {"ket": "+"}],
            "train": {"maxIterations": 20, "restarts": 1}})
        cases = [
            ([], None, 4),
            ([], {"VQSD_SEED": "9"}, 9),
            (["--seed", "13"], {"VQSD_SEED": "9"}, 13),
        ]
        for i, (flags, env, want) in enumerate(cases):
            d = self.out(f"s{i}")
            run("discriminate", "--config", str(cfg), "--out", str(d), *flags, env=env)
            self.assertEqual(self.load(d)["runMetadata"]["seed"], want)
        d = self.out("bad_env")
        proc = run("discriminate", "--config", str(cfg), "--out", str(d),
                   env={"VQSD_SEED": "seven"}, check=False)
        self.assertEqual(proc.returncode, 2)
        self.assertFalse(d.exists())

    def test_malformed_priors_write_nothing(self):
        for i, priors in enumerate([[0.5, 0.6], [1.2, -0.2], [1.0], "half"]):
            cfg = self.write_config(f"p{i}.json", {
                "mode": "discriminate", "priors": priors,
                "states": [{"ket": "0"}, {"ket": "1"}]})
            d = self.out(f"o{i}")
            proc = run("discriminate", "--config", str(cfg), "--out", str(d), check=False)
            self.assertEqual(proc.returncode, 2, proc.stderr)
            self.assertIn("prior", proc.stderr)
            self.assertFalse(d.exists())

    def test_configuration_errors(self):
        d = self.out("o")
        cases = [
            ("discriminate", "--preset", "fig9", "--out", str(d)),
            ("discriminate", "--out", str(d)),
            ("discriminate", "--config", str(self.work / "missing.json"), "--out", str(d)),
            ("classify-iris", "--ntarget", "1", "--encoding", "invcoscos",
             "--data", str(self.work / "no_such.csv"), "--out", str(d)),
            ("classify-iris", "--ntarget", "3", "--encoding", "invcoscos", "--out", str(d)),
            ("classify-iris", "--ntarget", "1", "--encoding", "sigmoid", "--out", str(d)),
        ]
        for argv in cases:
            proc = run(*argv, check=False)
            self.assertEqual(proc.returncode, 2, (argv, proc.stderr))
            self.assertFalse(d.exists(), argv)
        bad_json = self.out("bad.json")
        bad_json.parent.mkdir(parents=True, exist_ok=True)
        bad_json.write_text("{ not json")
        proc = run("discriminate", "--config", str(bad_json), "--out", str(d), check=False)
        self.assertEqual(proc.returncode, 2)

    def test_malformed_iris_data(self):
        data = self.out("iris.csv")
        data.parent.mkdir(parents=True, exist_ok=True)
        data.write_text("5.1,3.5,1.4,0.2,Iris-setosa\n4.9,3.0,abc,0.2,Iris-setosa\n")
        d = self.out("o")
        proc = run("classify-iris", "--ntarget", "1", "--encoding", "invcoscos",
                   "--data", str(data), "--out", str(d), check=False)
        self.assertEqual(proc.returncode, 2)
        self.assertIn("line 2", proc.stderr)
        self.assertFalse(d.exists())

    def test_classify_iris_is_deterministic(self):
        a, b = self.out("a"), self.out("b")
        argv = ["classify-iris", "--ntarget", "1", "--encoding", "invcoscos", "--folds", "2",
                "--seed", "3"]
        run(*argv, "--out", str(a))
        run(*argv, "--out", str(b))
        da, db = self.load(a), self.load(b)
        self.assertEqual(strip_timestamp(da), strip_timestamp(db))
        files = sorted(p.name for p in a.iterdir())
        self.assertEqual(files, sorted(p.name for p in b.iterdir()))
        self.assertIn("predictions_fold0.csv", files)
        self.assertIn("roc_class2.csv", files)
        for f in (f for f in files if f != "result.json"):
            self.assertEqual((a / f).read_text(), (b / f).read_text(), f)

        c = da["classification"]
        self.assertEqual(len(c["folds"]), 2)
        self.assertEqual(sum(f["testSize"] for f in c["folds"]), 150)
        self.assertAlmostEqual(c["mean"]["accuracy"],
                               sum(f["metrics"]["accuracy"] for f in c["folds"]) / 2, places=12)
        predicted = 0
        for k in range(2):
            rows = (a / f"predictions_fold{k}.csv").read_text().splitlines()
            self.assertEqual(rows[0], "index,truth,predicted,p0,p1,p2")
            for row in rows[1:]:
                p = [float(x) for x in row.split(",")[3:]]
                self.assertAlmostEqual(sum(p), 1.0, places=9)
                predicted += 1
        self.assertEqual(predicted, 150)

    def test_baselines(self):
        orth = self.write_config("orth.json", {
            "mode": "baselines", "states": [{"ket": "0"}, {"ket": "1"}]})
        doc = json.loads(run("baselines", "--config", str(orth)).stdout)
        jsonschema.validate(doc, self.schema)
        self.assertLess(abs(doc["baselines"]["helstrom"]), 1e-12)
        self.assertLess(abs(doc["baselines"]["pgmError"]), 1e-12)

        plus = self.write_config("plus.json", {
            "mode": "baselines", "states": [{"ket": "0"}, {"ket": "+"}]})
        d = self.out("o")
        doc = json.loads(run("baselines", "--config", str(plus), "--out", str(d)).stdout)
        self.assertEqual(self.load(d)["baselines"], doc["baselines"])
        want = (1 - 1 / math.sqrt(2)) / 2
        self.assertAlmostEqual(doc["baselines"]["helstrom"], want, delta=1e-12)
        self.assertAlmostEqual(doc["baselines"]["bruteForce"], want, delta=2e-4)
        self.assertGreaterEqual(doc["baselines"]["bruteForce"], want - 1e-12)

        trine = self.write_config("trine.json", {
            "mode": "baselines", "states": [{"ket": "0"}, {"ket": "1"}, {"ket": "+"}]})
        doc = json.loads(run("baselines", "--config", str(trine)).stdout)
        self.assertIsNone(doc["baselines"]["helstrom"])
        self.assertGreater(doc["baselines"]["pgmError"], 1 / 3)

    def test_version_and_help(self):
        self.assertTrue(run("--version").stdout.strip())
        self.assertIn("discriminate", run("--help").stdout)
        self.assertEqual(run(check=False).returncode, 2)


def main():
    global ARGS
    parser = argparse.ArgumentParser()
    parser.add_argument("--cli", required=True)
    parser.add_argument("--schema", required=True)
    parser.add_argument("--work", required=True)
    ARGS, rest = parser.parse_known_args()
    unittest.main(argv=[sys.argv[0], "-v", *rest])


if __name__ == "__main__":
    main()
