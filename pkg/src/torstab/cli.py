"""Batch front-end: validate JSON problem specifications, dispatch to the
analysis modules, and emit machine- or human-readable reports.

Exit codes: 0 on success, 2 when the input is rejected at the analysis
level (schema violations, semantic violations, or preconditions such as a
non-stable stratification input), 1 on internal errors.  Reports are
deterministic: rerunning the same specification reproduces them byte for
byte, and exact rationals are serialized as integers or "p/q" strings,
never as floats.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from importlib import resources

import numpy as np
from jsonschema import Draft202012Validator

from . import shb_model
from .errors import NotStableError, TorstabError, ValidationError, ZeroVectorError
from .graded_kuranishi import (
    GradedComplex,
    greens_operator,
    gvec_norm,
    kuranishi_forward,
    kuranishi_inverse_graded,
    obstruction,
    random_graded_complex,
)
from .kempf_ness import KNProblem, kn_minimize
from .stability import classify, destabilizer_bruteforce
from .stratify import StratifyOptions, stage_kn_minimizers, stratify, verify_decomposition
from .torus_rep import RepVector, Subtorus, WeightLine

SCHEMA_VERSION = "1"


def _load_schema(name: str) -> dict:
    text = resources.files("torstab.schemas").joinpath(name).read_text()
    return json.loads(text)


def problem_validator() -> Draft202012Validator:
    return Draft202012Validator(_load_schema("problem.schema.json"))


def report_validator() -> Draft202012Validator:
    return Draft202012Validator(_load_schema("report.schema.json"))


# ---------------------------------------------------------------------------
# serialization helpers


def _frac(x: Fraction):
    x = Fraction(x)
    return int(x) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _cplx(z: complex):
    z = complex(z)
    return [z.real, z.imag]


def _dump(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


# ---------------------------------------------------------------------------
# validation


def validate_document(text: str) -> dict:
    """Parse and fully validate a problem document, collecting every schema
    and semantic violation instead of stopping at the first."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(
            [f"parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}"]
        ) from exc
    errors = [
        f"{'/'.join(str(p) for p in err.absolute_path) or '<root>'}: {err.message}"
        for err in sorted(problem_validator().iter_errors(doc), key=str)
    ]
    if errors:
        raise ValidationError(errors)
    semantic = _semantic_errors(doc)
    if semantic:
        raise ValidationError(semantic)
    return doc


def _semantic_errors(doc: dict) -> list[str]:
    kind = doc["kind"]
    payload = doc["payload"]
    errors: list[str] = []
    if kind in ("stability", "kempf-ness", "stratify"):
        rank = payload["rank"]
        labels = set()
        for ln in payload["lines"]:
            lab = ln["label"]
            if lab in labels:
                errors.append(f"line {lab!r}: duplicate label")
            labels.add(lab)
            if len(ln["weight"]) != rank:
                errors.append(
                    f"line {lab!r}: weight has {len(ln['weight'])} entries, expected rank {rank}"
                )
            if kind == "stratify":
                if "rho" not in ln:
                    errors.append(f"line {lab!r}: rho must be >= 1 (missing)")
                elif ln["rho"] < 1:
                    errors.append(f"line {lab!r}: rho must be >= 1")
        for lab in payload["amplitudes"]:
            if lab not in labels:
                errors.append(f"amplitude for unknown line {lab!r}")
        if kind == "stratify":
            for row in payload.get("subtorus", []):
                if len(row) != rank:
                    errors.append(f"subtorus basis vector {row} has wrong dimension")
    elif kind == "shb":
        for i, blk in enumerate(payload["blocks"]):
            if len(blk["ranks"]) != len(blk["degrees"]):
                errors.append(f"block {i}: ranks and degrees must have equal length")
            elif sum(blk["degrees"]) != 0:
                errors.append(f"block {i}: degrees must sum to zero")
        if "x" in payload and len(payload["x"]) != len(payload["blocks"]):
            errors.append("x must have one entry per block")
    elif kind == "kuranishi":
        explicit = {"grades", "dims", "d0", "d1"}
        if "generator" in payload:
            if explicit & payload.keys():
                errors.append("give either a generator or explicit data, not both")
        elif not explicit <= payload.keys():
            missing = sorted(explicit - payload.keys())
            errors.append(f"explicit complex needs {', '.join(missing)}")
    return errors


# ---------------------------------------------------------------------------
# payload -> domain objects


def _amp(value) -> complex:
    if isinstance(value, list):
        return complex(value[0], value[1])
    return complex(value)


def rep_from_payload(payload: dict) -> RepVector:
    lines = tuple(
        WeightLine(
            ln["label"],
            tuple(ln["weight"]),
            rho=ln.get("rho"),
            norm2=float(ln.get("norm2", 1.0)),
        )
        for ln in payload["lines"]
    )
    amps = {lab: _amp(v) for lab, v in payload["amplitudes"].items()}
    return RepVector(lines, amps)


def shb_from_payload(payload: dict) -> shb_model.SHBSpec:
    blocks = tuple(
        shb_model.StableBlock(
            tuple(b["ranks"]), tuple(b["degrees"]), tag=b.get("tag", "")
        )
        for b in payload["blocks"]
    )
    return shb_model.SHBSpec(payload["genus"], blocks)


def _complex_entries(obj):
    return np.array(
        [[_amp(v) for v in row] for row in obj], dtype=complex
    ) if obj else np.zeros((0, 0), dtype=complex)


def complex_from_payload(payload: dict) -> GradedComplex:
    if "generator" in payload:
        gen = payload["generator"]
        rng = np.random.default_rng(gen["seed"])
        return random_graded_complex(
            rng,
            grades=tuple(gen.get("grades", (1, 2, 3, 4))),
            max_dim=gen.get("max_dim", 5),
        )
    grades = tuple(sorted(payload["grades"]))
    dims = {g: tuple(payload["dims"][str(g)]) for g in grades}

    def matrix(block, g, shape):
        rows = block.get(str(g))
        if rows is None:
            return np.zeros(shape, dtype=complex)
        m = np.array([[_amp(v) for v in row] for row in rows], dtype=complex)
        return m.reshape(shape) if m.size == 0 else m

    d0 = {g: matrix(payload["d0"], g, (dims[g][1], dims[g][0])) for g in grades}
    d1 = {g: matrix(payload["d1"], g, (dims[g][2], dims[g][1])) for g in grades}
    bracket = {}
    for ent in payload.get("bracket", []):
        g1, g2 = ent["g1"], ent["g2"]
        t = np.array(
            [[[_amp(v) for v in row] for row in sheet] for sheet in ent["tensor"]],
            dtype=complex,
        )
        bracket[(g1, g2)] = t
        bracket.setdefault((g2, g1), np.transpose(t, (0, 2, 1)))
    return GradedComplex(grades, dims, d0, d1, bracket)


# ---------------------------------------------------------------------------
# runners


def run_document(doc: dict, tol: float = 1e-10, convention: str | None = None,
                 emit_certificates: bool = True, box_bound: int | None = None,
                 seed: int | None = None):
    """Dispatch a validated document; returns (report_dict, exit_code)."""
    kind = doc["kind"]
    options = dict(doc.get("options", {}))
    if seed is not None and "seed" not in options:
        options["seed"] = seed
    tol = float(options.get("tol", tol))
    convention = convention or options.get("convention", shb_model.DEFAULT)
    runner = {
        "stability": _run_stability,
        "kempf-ness": _run_kempf_ness,
        "stratify": _run_stratify,
        "shb": _run_shb,
        "kuranishi": _run_kuranishi,
    }[kind]
    try:
        body = runner(doc["payload"], options, tol=tol, convention=convention,
                      emit_certificates=emit_certificates, box_bound=box_bound)
        status, code = "ok", 0
    except (NotStableError, ZeroVectorError, TorstabError, ValueError, KeyError) as exc:
        body = {"reason": str(exc)}
        if isinstance(exc, NotStableError) and exc.result is not None:
            body["stability"] = exc.result.stability
            if exc.result.cocharacter is not None:
                body["destabilizing_cocharacter"] = list(exc.result.cocharacter)
        status, code = "rejected", 2
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": kind,
        "status": status,
        "report": body,
    }, code


def _certificate_doc(res, emit: bool):
    if not emit:
        return {}
    cert: dict = {"weights": [list(w) for w in res.weights]}
    if res.combination is not None:
        cert["combination"] = [_frac(a) for a in res.combination]
    if res.flat_lattice is not None:
        cert["flat_lattice"] = [list(b) for b in res.flat_lattice.basis]
    if res.cocharacter is not None:
        cert["cocharacter"] = list(res.cocharacter)
    return {"certificate": cert}


def _run_stability(payload, options, *, tol, convention, emit_certificates, box_bound):
    v = rep_from_payload(payload)
    res = classify(v)
    body = {"class": res.stability, "certificate_verified": res.verify()}
    body.update(_certificate_doc(res, emit_certificates))
    if box_bound:
        witness = destabilizer_bruteforce(v, box_bound)
        body["bruteforce_witness"] = None if witness is None else list(witness)
    return body


def _run_kempf_ness(payload, options, *, tol, convention, emit_certificates, box_bound):
    v = rep_from_payload(payload)
    res = kn_minimize(KNProblem.from_vector(v), tol=tol)
    body = {"status": res.status}
    if res.minimizer is not None:
        body["minimizer"] = [float(c) for c in res.minimizer]
        body["gradient_norm"] = res.gradient_norm
    if res.value is not None:
        body["value"] = res.value
    if res.flat_space is not None:
        body["flat_space"] = [list(b) for b in res.flat_space.basis]
    if res.descent_ray is not None:
        body["descent_ray"] = list(res.descent_ray)
    if emit_certificates and res.stability is not None:
        body.update(_certificate_doc(res.stability, True))
    return body


def _run_stratify(payload, options, *, tol, convention, emit_certificates, box_bound):
    v = rep_from_payload(payload)
    torus = None
    if "subtorus" in payload:
        from .qexact import Lattice

        torus = Subtorus(
            payload["rank"],
            Lattice(payload["rank"], tuple(tuple(r) for r in payload["subtorus"])),
        )
    opts = StratifyOptions(sigma_multiple=int(options.get("sigma_multiple", 1)))
    res = stratify(v, torus=torus, options=opts)
    verification = verify_decomposition(res, v)
    stages = []
    for st in res.stages:
        stages.append(
            {
                "index": st.index,
                "torus_basis": [list(b) for b in st.torus.basis],
                "nu_labels": list(st.nu_labels),
                "s_labels": list(st.s_labels),
                "c": _frac(st.c),
                "x_stage": [_frac(c) for c in st.x_stage],
                "d": st.d,
            }
        )
    body = {
        "x": list(res.x),
        "sigma": res.sigma,
        "num_stages": res.num_stages,
        "d_ladder": list(res.d_ladder),
        "stages": stages,
        "residual_labels": list(res.residual_labels),
        "exponents": dict(sorted(res.exponents.items())),
        "tori_dims": [t.dim for t in res.tori],
        "verification": {
            "all_ok": verification.all_ok,
            "checks": [
                {"name": n, "ok": ok, "detail": d} for n, ok, d in verification.checks
            ],
        },
    }
    minimizers = []
    for kn, rescaled in stage_kn_minimizers(res):
        entry = {"status": kn.status}
        if kn.minimizer is not None:
            entry["minimizer"] = [float(c) for c in kn.minimizer]
        if kn.value is not None:
            entry["value"] = kn.value
        entry["rescaled_amplitudes"] = {k: _cplx(z) for k, z in sorted(rescaled.items())}
        minimizers.append(entry)
    body["stage_minimizers"] = minimizers
    return body


def _run_shb(payload, options, *, tol, convention, emit_certificates, box_bound):
    shb = shb_from_payload(payload)
    body: dict = {
        "total_rank": shb.total_rank,
        "genus": shb.genus,
        "abelian": shb.abelian,
        "block_ranks": list(shb.block_ranks()),
    }
    if shb.total_rank >= 2:
        body["expected_dim_central_locus"] = shb_model.expected_dim_central_locus(
            shb.total_rank, shb.genus
        )
    poset = shb_model.partitions_with_order(shb)
    table = []
    for p in poset.partitions:
        dim, strict = shb_model.partition_dim_comparison(
            p, shb.block_ranks(), shb.genus
        )
        table.append(
            {
                "parts": [list(part) for part in p.parts],
                "dim": dim,
                "proper": not p.is_trivial,
                "strictly_below_central": strict,
            }
        )
    body["partition_table"] = table
    if shb.abelian:
        torus = shb_model.automorphism_torus(shb)
        body["automorphism_torus"] = {
            "rank": torus.rank,
            "relation_character": list(torus.relation_character),
            "cocharacter_basis": [list(b) for b in torus.subtorus.basis],
        }
        body["positive_slice"] = [
            {"label": ln.label, "weight": list(ln.weight), "rho": ln.rho}
            for ln in shb_model.positive_slice_lines(shb, convention)
        ]
        if shb.k >= 2:
            cyc, verdict = shb_model.cyclic_phi_weights(shb, convention)
            body["cyclic_phi"] = {
                "stability": verdict.stability,
                "restricted_weights": sorted(
                    [list(w) for w in cyc.effective_g_weights()]
                ),
            }
        if "x" in payload:
            table_obj = shb_model.conformal_degree_table(
                shb, payload["x"], payload.get("sigma", 1), convention
            )
            body["conformal_degrees"] = {
                f"{cod[0]}.{cod[1]}|{dom[0]}.{dom[1]}": deg
                for (cod, dom), deg in sorted(table_obj.entries.items())
            }
    return body


def _run_kuranishi(payload, options, *, tol, convention, emit_certificates, box_bound):
    cx = complex_from_payload(payload)
    greens = greens_operator(cx)
    body: dict = {
        "grades": list(cx.grades),
        "dims": {str(g): list(cx.dims[g]) for g in cx.grades},
        "greens_status": greens.status,
        "greens_condition": greens.condition,
    }
    if "input" in payload:
        x = {
            int(g): np.array([_amp(v) for v in vec], dtype=complex)
            for g, vec in payload["input"].items()
        }
    else:
        seed = int(doc_option(options, "seed", 0))
        rng = np.random.default_rng(seed)
        x = {
            g: rng.normal(size=cx.n1(g)) + 1j * rng.normal(size=cx.n1(g))
            for g in cx.grades
            if g > 0
        }
        body["input_seed"] = seed
    u = kuranishi_inverse_graded(cx, x, greens)
    back = kuranishi_forward(cx, u, greens)
    diff = {g: back.get(g, 0) - x.get(g, 0) for g in set(back) | set(x)}
    denom = max(gvec_norm(x), 1e-30)
    body["round_trip_residual"] = gvec_norm(diff) / denom
    body["obstruction_norm"] = gvec_norm(obstruction(cx, x, greens))
    body["inverse"] = {
        str(g): [_cplx(z) for z in arr] for g, arr in sorted(u.items())
    }
    return body


def doc_option(options, key, default):
    return options.get(key, default)


# ---------------------------------------------------------------------------
# text rendering


def render_text(report: dict) -> str:
    lines = [f"kind: {report['kind']}", f"status: {report['status']}"]

    def walk(obj, indent):
        pad = "  " * indent
        if isinstance(obj, dict):
            for k in sorted(obj):
                v = obj[k]
                if isinstance(v, (dict, list)):
                    lines.append(f"{pad}{k}:")
                    walk(v, indent + 1)
                else:
                    lines.append(f"{pad}{k}: {v}")
        elif isinstance(obj, list):
            for v in obj:
                if isinstance(v, (dict, list)):
                    lines.append(f"{pad}-")
                    walk(v, indent + 1)
                else:
                    lines.append(f"{pad}- {v}")

    walk(report["report"], 1)
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# instance generator


def generate_instances(kind: str, seed: int, count: int) -> list[dict]:
    """Seeded random problem instances; instance i derives from seed + i."""
    out = []
    for i in range(count):
        rng = np.random.default_rng(seed + i)
        if kind in ("stability", "kempf-ness"):
            rank = int(rng.integers(1, 4))
            n = int(rng.integers(1, 9))
            lines = [
                {
                    "label": f"l{j}",
                    "weight": [int(w) for w in rng.integers(-4, 5, size=rank)],
                }
                for j in range(n)
            ]
            amps = {
                ln["label"]: [float(rng.normal()), float(rng.normal())] for ln in lines
            }
            payload = {"rank": rank, "lines": lines, "amplitudes": amps}
        elif kind == "stratify":
            from .stability import STABLE as _STABLE

            rank = int(rng.integers(1, 3))
            while True:
                n = int(rng.integers(rank + 1, 7))
                lines = [
                    {
                        "label": f"l{j}",
                        "weight": [int(w) for w in rng.integers(-3, 4, size=rank)],
                        "rho": int(rng.integers(1, 5)),
                    }
                    for j in range(n)
                ]
                amps = {
                    ln["label"]: [float(rng.normal()), float(rng.normal())]
                    for ln in lines
                }
                payload = {"rank": rank, "lines": lines, "amplitudes": amps}
                v = rep_from_payload(payload)
                if classify(v.restrict(Subtorus.full(rank))).stability == _STABLE:
                    break
        elif kind == "shb":
            k = int(rng.integers(1, 4))
            blocks = []
            for j in range(k):
                r = int(rng.integers(1, 4))
                if r == 1:
                    blocks.append({"ranks": [1], "degrees": [0], "tag": f"b{j}"})
                else:
                    blocks.append(
                        {"ranks": [1, r - 1], "degrees": [1, -1], "tag": f"b{j}"}
                    )
            payload = {"genus": int(rng.integers(2, 5)), "blocks": blocks}
        elif kind == "kuranishi":
            payload = {
                "generator": {
                    "seed": int(seed + i),
                    "grades": [1, 2, 3, 4],
                    "max_dim": int(rng.integers(2, 6)),
                }
            }
        else:
            raise ValueError(f"unknown kind {kind!r}")
        out.append(
            {"schema_version": SCHEMA_VERSION, "kind": kind, "payload": payload}
        )
    return out


# ---------------------------------------------------------------------------
# entry point


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="torstab",
        description="stability, Kempf-Ness, stratification, Hodge-bundle "
        "combinatorics, and graded Kuranishi analysis on JSON problem files",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    runp = sub.add_parser("run", help="validate and analyze problem files")
    runp.add_argument("--input", nargs="+", required=True, help="problem JSON files")
    runp.add_argument("--format", choices=["json", "text"], default="json")
    runp.add_argument("--tol", type=float, default=1e-10)
    runp.add_argument("--seed", type=int, default=0)
    runp.add_argument("--convention", choices=["default", "flipped"], default=None)
    runp.add_argument(
        "--emit-certificates", choices=["true", "false"], default="true"
    )
    runp.add_argument("--box-bound", type=int, default=None,
                      help="also run the brute-force destabilizer scan")

    valp = sub.add_parser("validate", help="validate problem files only")
    valp.add_argument("--input", nargs="+", required=True)

    genp = sub.add_parser("gen", help="emit seeded random problem instances")
    genp.add_argument("--kind", required=True,
                      choices=["stability", "kempf-ness", "stratify", "shb", "kuranishi"])
    genp.add_argument("--seed", type=int, default=0)
    genp.add_argument("--count", type=int, default=1)
    genp.add_argument("--out", default=None, help="write instances here (one file)")
    return ap


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.command == "validate":
            worst = 0
            for path in args.input:
                try:
                    with open(path) as fh:
                        validate_document(fh.read())
                    print(f"{path}: valid")
                except ValidationError as exc:
                    worst = 2
                    for msg in exc.errors:
                        print(f"{path}: {msg}")
            return worst

        if args.command == "gen":
            docs = generate_instances(args.kind, args.seed, args.count)
            text = _dump(docs if args.count > 1 else docs[0])
            if args.out:
                with open(args.out, "w") as fh:
                    fh.write(text)
            else:
                sys.stdout.write(text)
            return 0

        # run
        worst = 0
        for path in args.input:
            try:
                with open(path) as fh:
                    doc = validate_document(fh.read())
            except ValidationError as exc:
                report = {
                    "schema_version": SCHEMA_VERSION,
                    "kind": "unknown",
                    "status": "rejected",
                    "report": {"validation_errors": exc.errors},
                }
                code = 2
            else:
                report, code = run_document(
                    doc,
                    tol=args.tol,
                    convention=args.convention,
                    emit_certificates=args.emit_certificates == "true",
                    box_bound=args.box_bound,
                    seed=args.seed,
                )
            worst = max(worst, code)
            if args.format == "json":
                sys.stdout.write(_dump(report))
            else:
                sys.stdout.write(render_text(report))
        return worst
    except BrokenPipeError:
        return 1
    except Exception as exc:  # internal error: anything not handled above
        print(f"internal error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
