#!/usr/bin/env python3
"""Validate CLI JSON outputs against the schemas shipped in schemas/."""

import json
import pathlib
import subprocess
import sys

import jsonschema


def run(args):
    proc = subprocess.run(args, capture_output=True, text=True)
    if proc.returncode != 0:
        raise SystemExit(f"command {args} exited {proc.returncode}: {proc.stderr}")
    return proc.stdout


def main():
    cwmw, schema_dir, workdir = sys.argv[1], pathlib.Path(sys.argv[2]), pathlib.Path(sys.argv[3])
    analyze_schema = json.loads((schema_dir / "analyze_result.schema.json").read_text())
    report_schema = json.loads((schema_dir / "experiment_report.schema.json").read_text())

    csv = workdir / "schema_check.csv"
    rows = ["cluster,group,value"]
    values = [0.31, 1.7, -0.4, 0.95, 2.2, -1.1, 0.55, 1.05]
    for i, v in enumerate(values):
        rows.append(f"a{i},1,{v}")
        rows.append(f"b{i},2,{v + 0.6}")
        rows.append(f"c{i},1,{v - 0.2}")
        rows.append(f"c{i},2,{v + 0.4}")
    csv.write_text("\n".join(rows) + "\n")

    for method in ["tilde", "tilde-t", "hat", "hat-star", "hoffman", "ignorable-u", "ignorable-w"]:
        out = run([cwmw, "analyze", "--input", str(csv), "--method", method,
                   "--resamples", "200"])
        jsonschema.validate(json.loads(out), analyze_schema)

    cfg = workdir / "schema_check.cfg"
    cfg.write_text(
        "n1 = 6\nn2 = 6\nnc = 6\nicg_law = fixed\ndistribution = gaussian\n"
        "sigma1_sq = 1\nsigma2_sq = 1\nrho1 = 0.1\nrho2 = 0.1\nrho12 = 0.2\n"
        "c1 = 2\nc2 = 3\nalpha_level = 0.05\nseed = 42\n")
    out_base = workdir / "schema_check_report"
    run([cwmw, "simulate", "--config", str(cfg), "--reps", "40",
         "--methods", "tilde,tilde-t,ignorable-w", "--out", str(out_base)])
    report = json.loads((workdir / "schema_check_report.json").read_text())
    jsonschema.validate(report, report_schema)

    # a scenario whose replicates all degenerate still yields a valid report
    tiny = workdir / "schema_check_tiny.cfg"
    tiny.write_text(
        "n1 = 1\nn2 = 1\nnc = 0\nicg_law = binom2\ndistribution = gaussian\n"
        "sigma1_sq = 1\nsigma2_sq = 1\nrho1 = 0\nrho2 = 0\nrho12 = 0\n"
        "alpha_level = 0.05\nseed = 7\n")
    tiny_base = workdir / "schema_check_tiny_report"
    run([cwmw, "simulate", "--config", str(tiny), "--reps", "10",
         "--methods", "tilde", "--out", str(tiny_base)])
    tiny_report = json.loads((workdir / "schema_check_tiny_report.json").read_text())
    jsonschema.validate(tiny_report, report_schema)

    print("schema validation: ok")


if __name__ == "__main__":
    main()
