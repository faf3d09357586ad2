"""Command-line front end.  Every command prints one JSON report."""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from importlib import metadata

from .classify import ClassificationError, classify_form
from .decompose import decompose_generalized_c, generalized_c_form, verify_decomposition
from .formcore import FormError, LinearForm, infer_nvars, parse_form
from .quadlinalg import SamplingBudget
from .rankengine import (NotReducibleError, ScanError, _resolve_factor, apolar_real_split_scan,
                         complex_rank, generalized_c_certificate, real_rank_bounds, verify_result)

EXIT_OK, EXIT_MALFORMED, EXIT_NOT_REDUCIBLE, EXIT_UNVERIFIED = 0, 1, 2, 3
TASKS = ("classify", "rank", "decompose", "verify", "scan")


def _version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "0.0.0"


def syntactic_factor(text: str, nvars: int):
    """A linear factor read off a top-level product such as '(x0+x1)*(...)'."""
    depth = 0
    pieces, start = [], 0
    body = text.strip()
    for i, ch in enumerate(body):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif depth == 0 and ch in "+-" and i > 0 and body[i - 1] not in "^*(":
            return None
        elif depth == 0 and ch == "*":
            pieces.append(body[start:i])
            start = i + 1
    pieces.append(body[start:])
    if len(pieces) < 2:
        return None
    for piece in pieces:
        try:
            f = parse_form(piece, nvars)
        except FormError:
            continue
        if f.degree == 1:
            return LinearForm.from_form(f)
    return None


def _build_input(req: dict):
    """(F, L or None) from a request holding 'form' or a factored pair 'L', 'Q'."""
    nvars = req.get("nvars")
    if "L" in req and "Q" in req:
        if nvars is None:
            nvars = max(infer_nvars(req["L"]), infer_nvars(req["Q"]))
        L = parse_form(req["L"], nvars)
        Q = parse_form(req["Q"], nvars)
        if L.degree != 1 or Q.degree != 2:
            raise FormError("factored input needs a linear L and a quadratic Q")
        return L * Q, LinearForm.from_form(L)
    F = parse_form(req["form"], nvars)
    hint = req.get("factor_hint")
    if hint:
        L = LinearForm.from_form(parse_form(hint, F.nvars))
    else:
        L = syntactic_factor(req["form"], F.nvars)
    return F, L


def _budget(req: dict) -> SamplingBudget:
    return SamplingBudget(trials=req.get("trials", 200), seed=req.get("seed", 0))


def _generalized(req: dict) -> dict:
    d, n = req["generalized_c"]
    if req["task"] == "decompose":
        D = decompose_generalized_c(d, n)
        ok, _ = verify_decomposition(D, generalized_c_form(d, n))
        return {"decomposition": D.to_json(), "terms": len(D), "verified": ok}
    if req["task"] != "rank":
        raise FormError("the degree-d family supports the rank and decompose tasks")
    return {"rank": generalized_c_certificate(d, n, _budget(req)).to_json()}


def run_task(req: dict) -> dict:
    """Run one request; the report always carries 'exit_code'."""
    report = {"tool": "cubicwaring", "version": _version(),
              "request": {k: v for k, v in req.items() if k != "report"}}
    t0 = time.perf_counter()
    try:
        task = req.get("task", "rank")
        if task not in TASKS:
            raise FormError(f"unknown task {task!r}")
        field_name = req.get("field", "complex")
        if field_name not in ("real", "complex"):
            raise FormError("field must be real or complex")
        seed = req.get("seed", 0)
        if req.get("generalized_c"):
            report.update(_generalized(req))
        elif task == "scan":
            F = parse_form(req["form"], req.get("nvars") or 3)
            report["scan"] = apolar_real_split_scan(F, seed, req.get("trials", 200)).to_json()
        else:
            F, L = _build_input(req)
            L = _resolve_factor(F, L, seed)
            if task == "classify":
                report["classification"] = classify_form(F, L, field_name).to_json()
            else:
                rank_fn = real_rank_bounds if field_name == "real" else complex_rank
                result = rank_fn(F, L, seed, _budget(req))
                data = result.to_json()
                if task == "rank":
                    report["rank"] = data
                elif task == "decompose":
                    D = result.decomposition
                    ok, residual = verify_decomposition(D, F)
                    report["decomposition"] = D.to_json()
                    report["terms"] = len(D)
                    report["verified"] = ok
                    report["residual"] = residual.to_text() if not residual.is_zero() else "0"
                    report["rank"] = {"lower": result.lower, "upper": result.upper}
                else:
                    claimed = req.get("report")
                    target = claimed["rank"] if claimed and "rank" in claimed else data
                    report["verification"] = verify_result(target, F)
                    if not report["verification"]["ok"]:
                        report["exit_code"] = EXIT_UNVERIFIED
        report.setdefault("exit_code", EXIT_OK)
    except (NotReducibleError, ClassificationError) as exc:
        report["error"] = str(exc)
        report["exit_code"] = EXIT_NOT_REDUCIBLE
    except (FormError, ScanError, KeyError, ValueError) as exc:
        report["error"] = f"{type(exc).__name__}: {exc}"
        report["exit_code"] = EXIT_MALFORMED
    if req.get("timing"):
        report["timing_seconds"] = round(time.perf_counter() - t0, 6)
    return report


def _corpus_request(i: int, entry: dict, defaults: dict) -> dict:
    req = dict(defaults)
    req.update({k: v for k, v in entry.items() if k in
                ("form", "L", "Q", "field", "task", "factor_hint", "nvars", "seed", "trials")})
    req["index"] = i
    if "name" in entry:
        req["name"] = entry["name"]
    return req


def _run_indexed(req: dict):
    expected = req.pop("expected", None)
    rep = run_task(req)
    if expected is not None:
        got = rep.get("rank", {})
        rep["expected"] = expected
        rep["matches_expected"] = all(got.get(k) == v for k, v in expected.items())
    return req["index"], rep


def run_corpus(path: str, defaults: dict, jobs: int) -> list[dict]:
    with open(path) as fh:
        entries = [json.loads(line) for line in fh if line.strip()]
    reqs = []
    for i, e in enumerate(entries):
        r = _corpus_request(i, e, defaults)
        if "expected" in e:
            r["expected"] = e["expected"]
        reqs.append(r)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(_run_indexed, reqs))
    else:
        results = [_run_indexed(r) for r in reqs]
    return [rep for _, rep in sorted(results, key=lambda t: t[0])]


def summary(report: dict) -> str:
    """One human-readable line rendered from a report."""
    if "entries" in report:
        ok = sum(1 for e in report["entries"] if e["exit_code"] == 0)
        return f"corpus: {ok}/{len(report['entries'])} entries succeeded"
    req = report["request"]
    if "form" in req:
        what = req["form"]
    elif "L" in req:
        what = f"({req['L']})*({req['Q']})"
    else:
        what = f"generalized-c {req.get('generalized_c')}"
    head = f"{req.get('task', 'rank')} {what}"
    if "error" in report:
        return f"{head}: error: {report['error']}"
    if "decomposition" in report:
        return f"{head}: {report.get('terms')} terms, verified={report.get('verified')}"
    if "rank" in report:
        r = report["rank"]
        rng = f"{r['lower']}" if r["lower"] == r["upper"] else f"[{r['lower']}, {r['upper']}]"
        return f"{head}: {r.get('field', req.get('field', 'complex'))} rank {rng}"
    if "classification" in report:
        return f"{head}: {report['classification']['label']}"
    if "scan" in report:
        s = report["scan"]
        return f"{head}: {s['status']} ({'rigorous' if s['rigorous'] else 'sampled'})"
    if "verification" in report:
        return f"{head}: certificates {'verified' if report['verification']['ok'] else 'FAILED'}"
    return head


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cubicwaring",
                                 description="Waring ranks of reducible cubic forms.")
    sub = ap.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--field", choices=("real", "complex"), default="complex")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--trials", type=int, default=200)
    common.add_argument("--json", metavar="PATH", help="write the report here instead of stdout")
    common.add_argument("--timing", action="store_true", help="include wall-clock timing")
    common.add_argument("--summary", action="store_true", help="print a one-line summary")
    for task in TASKS:
        p = sub.add_parser(task, parents=[common])
        p.add_argument("form", nargs="?", help="form text, e.g. 'x0*(x1^2+x2^2)'")
        p.add_argument("--factor-hint", metavar="L", help="a linear form dividing the input")
        p.add_argument("--nvars", type=int)
        if task in ("rank", "decompose"):
            p.add_argument("--generalized-c", nargs=2, type=int, metavar=("D", "N"),
                           help="use x0^(D-1) x1 + x0^(D-2) (x2^2+...+xN^2) instead of a form")
        if task == "verify":
            p.add_argument("--report", metavar="PATH", help="rank report whose certificates to check")
    p = sub.add_parser("corpus", parents=[common])
    p.add_argument("path", help="JSON-lines corpus file")
    p.add_argument("--task", choices=TASKS, default="rank")
    p.add_argument("--jobs", type=int, default=min(4, os.cpu_count() or 1))
    return ap


def _emit(report: dict, args) -> None:
    text = json.dumps(report, indent=2, sort_keys=True)
    if args.json:
        with open(args.json, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    if args.summary:
        print(summary(report), file=sys.stderr)


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    base = {"field": args.field, "seed": args.seed, "trials": args.trials}
    if args.timing:
        base["timing"] = True
    if args.command == "corpus":
        base["task"] = args.task
        try:
            entries = run_corpus(args.path, base, args.jobs)
        except (OSError, json.JSONDecodeError) as exc:
            print(f"cannot read corpus: {exc}", file=sys.stderr)
            return EXIT_MALFORMED
        report = {"tool": "cubicwaring", "version": _version(), "entries": entries}
        _emit(report, args)
        return EXIT_OK if all(e["exit_code"] == 0 for e in entries) else max(
            e["exit_code"] for e in entries)
    req = dict(base, task=args.command)
    if getattr(args, "generalized_c", None):
        req["generalized_c"] = list(args.generalized_c)
    elif args.form is None:
        print("a form is required", file=sys.stderr)
        return EXIT_MALFORMED
    else:
        req["form"] = args.form
    if args.factor_hint:
        req["factor_hint"] = args.factor_hint
    if args.nvars:
        req["nvars"] = args.nvars
    if getattr(args, "report", None):
        try:
            with open(args.report) as fh:
                req["report"] = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            print(f"cannot read report: {exc}", file=sys.stderr)
            return EXIT_MALFORMED
    report = run_task(req)
    _emit(report, args)
    return report["exit_code"]


if __name__ == "__main__":
    sys.exit(main())
