"""Contract checks for the efimov-lab executable: formats, schemas, exit codes.

Usage: cli_contract.py <efimov-lab> <schema dir>
"""

import csv
import io
import json
import math
import os
import pathlib
import subprocess
import sys
import tempfile
import unittest

import jsonschema

CLI = None
SCHEMAS = None


def run(*args, env=None, check=True):
    full_env = dict(os.environ, SOURCE_DATE_EPOCH="0")
    full_env.pop("EFIMOV_LAB_THREADS", None)
    if env:
        full_env.update(env)
    proc = subprocess.run([CLI, *args], capture_output=True, env=full_env)
    if check and proc.returncode != 0:
        raise AssertionError(f"{args} exited {proc.returncode}: {proc.stderr.decode()}")
    return proc


def run_json(*args, **kw):
    return json.loads(run(*args, "--format", "json", **kw).stdout)


def run_csv(*args):
    proc = run(*args, "--format", "csv")
    return proc.stdout.decode(), json.loads(proc.stderr)


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def validate(command, doc):
    schema = json.loads((SCHEMAS / f"{command}.schema.json").read_text())
    jsonschema.validate(doc, schema, cls=jsonschema.Draft202012Validator)


COMMANDS = {
    "constants": [],
    "potential": ["--a", "-1", "--rho-min", "1e-3", "--rho-max", "200", "--points", "60"],
    "spectrum": ["--levels", "5"],
    "nodes": [],
    "meanfield": ["--t0", "-10", "--stabilizer", "three-body", "--t3", "1"],
    "branches": ["--x", "0", "--count", "3"],
}

HEADERS = {
    "constants": "b,C,residual",
    "potential": "rho,x,nu_squared,lambda,v_eff",
    "spectrum": "n,E_n,kappa_n,node_count,ratio_to_next,flag",
    "nodes": "k,rho_k,ratio",
    "meanfield": "n,epsilon,epsilon_per_particle",
    "branches": "branch,nu_squared,lambda,residual",
}


class Formats(unittest.TestCase):
    def test_json_outputs_validate(self):
        for command, args in COMMANDS.items():
            with self.subTest(command=command):
                validate(command, run_json(command, *args))
        validate("nodes", run_json("nodes", "--probe", "--decades", "10"))
        validate("nodes", run_json("nodes", "--analytic"))

    def test_csv_sidecars_validate(self):
        for command, args in COMMANDS.items():
            with self.subTest(command=command):
                _, side = run_csv(command, *args)
                validate(command, side)

    def test_csv_layout(self):
        for command, args in COMMANDS.items():
            with self.subTest(command=command):
                body = run(command, *args, "--format", "csv").stdout
                self.assertNotIn(b"\r", body)
                self.assertTrue(body.endswith(b"\n"))
                lines = body.decode().split("\n")
                self.assertEqual(lines[0], HEADERS[command])
                width = len(lines[0].split(","))
                for line in lines[1:-1]:
                    self.assertEqual(len(line.split(",")), width)

    def test_twelve_significant_digits(self):
        text, _ = run_csv("branches", "--x", "0.3", "--count", "2")
        for row in rows(text):
            mantissa = row["nu_squared"].lstrip("-").split("e")[0].replace(".", "").lstrip("0")
            self.assertLessEqual(len(mantissa), 12)
            self.assertGreaterEqual(len(mantissa), 10)

    def test_constants_keys(self):
        doc = run_json("constants")
        self.assertEqual(set(doc), {"b", "C", "residual", "manifest"})
        self.assertAlmostEqual(doc["b"], 1.006, delta=1e-3)
        self.assertAlmostEqual(doc["C"], 1.262, delta=5e-3)
        self.assertLessEqual(run_json("constants", "--tol", "1e-12")["residual"], doc["residual"])

    def test_output_file_and_default_sidecar(self):
        with tempfile.TemporaryDirectory() as tmp:
            out = pathlib.Path(tmp) / "branches.csv"
            run("branches", "--x", "1", "--output", str(out))
            self.assertTrue(out.read_text().startswith(HEADERS["branches"]))
            validate("branches", json.loads(pathlib.Path(str(out) + ".json").read_text()))
            summary = pathlib.Path(tmp) / "s.json"
            run("branches", "--x", "1", "--output", str(out), "--summary", str(summary))
            validate("branches", json.loads(summary.read_text()))

    def test_manifest_contents(self):
        m = run_json("spectrum", "--levels", "3", "--tol", "1e-11")["manifest"]
        self.assertEqual(m["command"], "spectrum")
        self.assertEqual(m["tolerances"]["tol"], 1e-11)
        self.assertEqual(m["parameters"]["levels"], 3)
        self.assertEqual(m["timestamp"], "1970-01-01T00:00:00Z")


class Determinism(unittest.TestCase):
    def test_json_reruns_identical(self):
        for command, args in COMMANDS.items():
            with self.subTest(command=command):
                a = run(command, *args, "--format", "json").stdout
                self.assertEqual(a, run(command, *args, "--format", "json").stdout)

    def test_environment_mirrors_threads_flag(self):
        m = run_json("branches", "--x", "0", env={"EFIMOV_LAB_THREADS": "3"})["manifest"]
        self.assertEqual(m["threads"], 3)
        m = run_json("branches", "--x", "0", "--threads", "2", env={"EFIMOV_LAB_THREADS": "3"})["manifest"]
        self.assertEqual(m["threads"], 2)
        args = COMMANDS["potential"]
        self.assertEqual(run("potential", *args, "--threads", "1").stdout,
                         run("potential", *args, env={"EFIMOV_LAB_THREADS": "4"}).stdout)


class ExitCodes(unittest.TestCase):
    def test_unregularized_spectrum_is_forbidden(self):
        proc = run("spectrum", "--regularization", "none", check=False)
        self.assertEqual(proc.returncode, 3)
        self.assertIn(b"Thomas", proc.stderr)

    def test_invalid_model(self):
        self.assertEqual(run("meanfield", "--stabilizer", "three-body", "--t3", "-1", check=False).returncode, 2)
        self.assertEqual(run("spectrum", "--a", "0", check=False).returncode, 2)
        self.assertEqual(run("potential", "--mu", "-1", check=False).returncode, 2)

    def test_too_few_nodes(self):
        proc = run("nodes", "--rho-max", "1e4", "--level", "0", check=False)
        self.assertEqual(proc.returncode, 2)
        self.assertIn(b"insufficient nodes", proc.stderr)


class Physics(unittest.TestCase):
    def test_potential_columns(self):
        C = run_json("constants")["C"]
        text, _ = run_csv("potential", "--points", "20")
        for row in rows(text):
            self.assertAlmostEqual(float(row["lambda"]), float(row["nu_squared"]) - 4, places=9)
            rho = float(row["rho"])
            self.assertAlmostEqual(float(row["v_eff"]) * 2 * rho * rho / -C, 1.0, places=9)

    def test_dimer_asymptote(self):
        for mu in ("0.5", "1"):
            rho = 200 * math.sqrt(float(mu))
            doc = run_json("potential", "--a", "-1", "--mu", mu, "--rho-min", "1e-2",
                           "--rho-max", repr(rho), "--points", "300")
            last = doc["rows"][-1]
            self.assertAlmostEqual(abs(last["x"]), 200, places=6)
            self.assertAlmostEqual(2 * last["v_eff"] / (-1 / float(mu)), 1.0, delta=0.01)

    def test_tower_ratios_and_scheme_independence(self):
        ref = math.exp(2 * math.pi / run_json("constants")["b"])
        ratios = {}
        for scheme in ("hardwall", "cap"):
            doc = run_json("spectrum", "--levels", "6", "--scheme", scheme)
            lv = doc["levels"]
            ratios[scheme] = [l["ratio_to_next"] for i, l in enumerate(lv[:-1])
                              if i >= 1 and l["flag"] == "ok" and lv[i + 1]["flag"] == "ok"]
            self.assertGreaterEqual(len(ratios[scheme]), 2)
            for r in ratios[scheme]:
                self.assertAlmostEqual(r / ref, 1.0, delta=0.02)
        for a, b in zip(ratios["hardwall"], ratios["cap"]):
            self.assertAlmostEqual(a / b, 1.0, delta=0.03)

    def test_node_ratio_and_analytic_mode(self):
        s = run_json("nodes")["summary"]
        self.assertAlmostEqual(s["fitted_ratio"] / s["reference_ratio"], 1.0, delta=0.01)
        s = run_json("nodes", "--analytic")["summary"]
        self.assertAlmostEqual(s["fitted_ratio"] / s["reference_ratio"], 1.0, delta=1e-6)

    def test_probe_slopes_agree(self):
        s = run_json("nodes", "--probe", "--energy", "-1e-4", "--energy", "-1e-3", "--decades", "60",
                     "--threads", "4")["summary"]
        slopes = [f["slope_per_decade"] for f in s["fits"]]
        for v in slopes:
            self.assertAlmostEqual(v / s["reference_slope"], 1.0, delta=0.05)
        self.assertAlmostEqual(slopes[0] / slopes[1], 1.0, delta=0.01)

    def test_meanfield_classifications(self):
        def cls(*args):
            return run_json("meanfield", *args)["report"]["classification"]
        self.assertEqual(cls("--statistics", "fermi", "--t0", "-1"), "CollapseUnboundedBelow")
        self.assertEqual(cls("--statistics", "bose", "--t0", "1"), "TrivialMinimumAtZero")
        self.assertEqual(cls("--t0", "-10", "--stabilizer", "density-dependent", "--t3", "1"), "Saturating")
        report = run_json("meanfield", "--t0", "-1")["report"]
        self.assertIn("Thomas", report["caveat"])


if __name__ == "__main__":
    CLI = sys.argv[1]
    SCHEMAS = pathlib.Path(sys.argv[2])
    unittest.main(argv=sys.argv[:1], verbosity=2)
