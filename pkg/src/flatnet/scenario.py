"""Declarative scenario files and deterministic report emission.

A scenario is a YAML document (schema_version 1) selecting a cover, a
target group, a generator assignment, and a task list.  Schema:

    schema_version: 1            # required, must be 1
    topology:                    # builtin...
      builtin: annulus           #   circle | annulus | disk
      n: 6                       #   | figure_eight | torus; circle takes n
    # ...or an explicit cover block:
    # topology:
    #   regions: [0, 1, 2]
    #   overlaps: [[0, 1, 0], [1, 2, 0]]    # [low, high, component]
    #   triples: [[0, 1, 2, [0, 0, 0]]]     # optional
    #   disjoint: [[0, 2]]                  # optional
    #   base: 0                             # optional
    group:
      variant: PhaseU1           # or MatrixUn
      dimension: 2               # MatrixUn only
    sigma:                       # one entry per presentation generator
      g0: pi/2                   # U(1): radians, or 'pi', '2pi/3', '-pi/4'
      # g0: [[[0.0,0.0],[1.0,0.0]], [[1.0,0.0],[0.0,0.0]]]
      #                            # U(n): rows of [re, im] entries
    modes_per_region: 2          # default 2
    charge: 1                    # default 1, at most modes_per_region
    seed: 7                      # required when random_paths > 0
    random_paths: 8              # extra sampled paths in the sector task
    tolerance: 1.0e-10           # default 1e-10; per-task override:
    # tolerances: {check: 1.0e-12}
    paths:                       # named visited-region sequences
      wind1: [0, 1, 2, 3, 0]
    amplitudes:                  # named path pairs sharing endpoints
      - [wind1, wind1]
    tasks: [check, trivialize, holonomy, sector, amplitude, classify]

Angles are radians (YAML numbers) or strings of the form 'p*pi/q' with
integer p, q ('pi', '-pi/3', '2pi/3', '3*pi/4').  Matrix values must be
unitary within 1e-8.  The sector and amplitude tasks act on the Fock
window and are unit-phase only; MatrixUn scenarios may run check,
trivialize, holonomy and classify (coefficient layer).

Reports carry no timestamps and serialize with sorted keys; identical
config and seed give byte-identical output.  Complex values appear as
[re, im] pairs rendered by shortest round-trip (at most 17 significant
digits, exact value recovery).  Exit-code contract, used by the CLI:
0 all requested tasks pass, 1 task failure, 2 parse/config error,
3 capacity.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field as dc_field

import numpy as np
import yaml

from .cocycles import (
    SigmaMorphism,
    check_cocycle,
    holonomy,
    transition_cocycle,
    trivialize,
    validate_sigma,
)
from .covers import (
    Cover,
    InvalidCover,
    InvalidPath,
    approximate_curve,
    builtin_cover,
    build_nerve,
    loop_class,
    pi1_presentation,
)
from .fock import CAPACITY_MODES, CapacityError, FockSpace, allocate_modes
from .groups import GroupValue, MatrixUn, PhaseU1, compose, distance, inverse
from .sectors import (
    classify,
    make_window,
    plain_transporter,
    rho_layer_transporter,
    telescope_residual,
    transition_amplitude,
    triple_law_residual,
    twisted_transporter,
    z_path,
)

SCHEMA_VERSION = 1
TASK_ORDER = ("check", "trivialize", "holonomy", "sector", "amplitude", "classify")
FOCK_TASKS = frozenset({"sector", "amplitude", "classify"})
DEFAULT_TOLERANCE = 1e-10


class ScenarioError(ValueError):
    """Config rejection; carries the offending field path when known."""

    def __init__(self, message: str, where: str | None = None):
        self.where = where
        super().__init__(message if where is None else f"{where}: {message}")


# ---------------------------------------------------------------------------
# Parsing

_PI_FORM = re.compile(
    r"^\s*(?P<sign>[+-])?\s*(?P<num>\d+)?\s*\*?\s*pi\s*(?:/\s*(?P<den>\d+)\s*)?$",
    re.IGNORECASE,
)


def parse_angle(value, where: str = "angle") -> float:
    """Radians from a YAML number or a rational-multiple-of-pi string."""
    if isinstance(value, bool):
        raise ScenarioError("angle must be a number or a pi fraction", where)
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        m = _PI_FORM.match(value)
        if m:
            num = int(m.group("num")) if m.group("num") else 1
            den = int(m.group("den")) if m.group("den") else 1
            if den == 0:
                raise ScenarioError("zero denominator", where)
            sign = -1.0 if m.group("sign") == "-" else 1.0
            return sign * num * np.pi / den
        raise ScenarioError(
            f"cannot read angle {value!r} (want a number or 'p*pi/q')", where
        )
    raise ScenarioError(f"cannot read angle of type {type(value).__name__}", where)


def _parse_matrix(raw, dim: int, where: str) -> MatrixUn:
    rows = raw
    if not isinstance(rows, list) or len(rows) != dim:
        raise ScenarioError(f"expected {dim} matrix rows", where)
    mat = np.zeros((dim, dim), dtype=complex)
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != dim:
            raise ScenarioError(f"row {i} must have {dim} [re, im] entries", where)
        for j, ent in enumerate(row):
            if not (isinstance(ent, list) and len(ent) == 2):
                raise ScenarioError(f"entry ({i},{j}) must be [re, im]", where)
            mat[i, j] = complex(float(ent[0]), float(ent[1]))
    gap = np.max(np.abs(mat.conj().T @ mat - np.eye(dim)))
    if gap > 1e-8:
        raise ScenarioError(f"matrix is not unitary (defect {gap:.3e})", where)
    return MatrixUn(mat)


@dataclass(frozen=True)
class ScenarioConfig:
    cover: Cover
    topology_name: str
    group_variant: str
    dimension: int | None
    sigma: dict[str, GroupValue]
    modes_per_region: int = 2
    charge: int = 1
    paths: dict[str, tuple[int, ...]] = dc_field(default_factory=dict)
    amplitudes: tuple[tuple[str, str], ...] = ()
    tasks: tuple[str, ...] = TASK_ORDER
    tolerance: float = DEFAULT_TOLERANCE
    tolerances: dict[str, float] = dc_field(default_factory=dict)
    seed: int | None = None
    random_paths: int = 0

    def task_tolerance(self, task: str) -> float:
        return float(self.tolerances.get(task, self.tolerance))


def _parse_topology(raw) -> tuple[Cover, str]:
    if not isinstance(raw, dict):
        raise ScenarioError("must be a mapping", "topology")
    if "builtin" in raw:
        name = raw["builtin"]
        extra = set(raw) - {"builtin", "n"}
        if extra:
            raise ScenarioError(f"unknown keys {sorted(extra)}", "topology")
        try:
            cover = builtin_cover(name, raw.get("n"))
        except InvalidCover as e:
            raise ScenarioError(str(e), "topology.builtin") from None
        label = name if name != "circle" else f"circle({len(cover.regions)})"
        return cover, label
    needed = {"regions", "overlaps"}
    if not needed <= set(raw):
        raise ScenarioError(
            "needs either 'builtin' or explicit 'regions' + 'overlaps'", "topology"
        )
    try:
        cover = Cover(
            regions=tuple(int(r) for r in raw["regions"]),
            overlaps=tuple((int(u), int(v), int(c)) for (u, v, c) in raw["overlaps"]),
            triples=tuple(
                (int(a), int(b), int(c), tuple(int(x) for x in comps))
                for (a, b, c, comps) in raw.get("triples", ())
            ),
            disjoint_pairs=tuple(
                (int(u), int(v)) for (u, v) in raw.get("disjoint", ())
            ),
            base_region=int(raw.get("base", raw["regions"][0])),
        )
    except (InvalidCover, TypeError, ValueError) as e:
        raise ScenarioError(str(e), "topology") from None
    return cover, "explicit"


def load_scenario(text: str, source: str = "<scenario>") -> ScenarioConfig:
    """Parse and validate scenario text; raises ScenarioError."""
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        loc = f" at line {mark.line + 1}" if mark is not None else ""
        raise ScenarioError(f"not valid YAML{loc}: {e}", source) from None
    if not isinstance(doc, dict):
        raise ScenarioError("top level must be a mapping", source)
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise ScenarioError(
            f"schema_version must be {SCHEMA_VERSION}", "schema_version"
        )

    known = {
        "schema_version", "topology", "group", "sigma", "modes_per_region",
        "charge", "seed", "random_paths", "tolerance", "tolerances",
        "paths", "amplitudes", "tasks",
    }
    extra = set(doc) - known
    if extra:
        raise ScenarioError(f"unknown keys {sorted(extra)}", source)

    cover, topo_name = _parse_topology(doc.get("topology", {}))

    graw = doc.get("group", {"variant": "PhaseU1"})
    if not isinstance(graw, dict) or "variant" not in graw:
        raise ScenarioError("needs a 'variant'", "group")
    variant = graw["variant"]
    dim = graw.get("dimension")
    if variant == "PhaseU1":
        if dim not in (None, 1):
            raise ScenarioError("dimension applies to MatrixUn only", "group")
        dim = None
    elif variant == "MatrixUn":
        if not isinstance(dim, int) or dim < 1:
            raise ScenarioError("MatrixUn needs an integer dimension >= 1", "group")
    else:
        raise ScenarioError(f"unknown variant {variant!r}", "group.variant")

    nerve = build_nerve(cover)
    gen_names = tuple(f"g{i}" for i in range(len(nerve.non_tree_edges)))
    sraw = doc.get("sigma", {}) or {}
    if not isinstance(sraw, dict):
        raise ScenarioError("must map generator names to values", "sigma")
    missing = [g for g in gen_names if g not in sraw]
    if missing:
        raise ScenarioError(f"missing generators {missing}", "sigma")
    unknown = [g for g in sraw if g not in gen_names]
    if unknown:
        raise ScenarioError(f"unknown generators {sorted(unknown)}", "sigma")
    sigma: dict[str, GroupValue] = {}
    for g in gen_names:
        where = f"sigma.{g}"
        if variant == "PhaseU1":
            sigma[g] = PhaseU1(parse_angle(sraw[g], where))
        else:
            sigma[g] = _parse_matrix(sraw[g], dim, where)

    m = doc.get("modes_per_region", 2)
    if not isinstance(m, int) or m < 1:
        raise ScenarioError("must be an integer >= 1", "modes_per_region")
    kappa = doc.get("charge", 1)
    if not isinstance(kappa, int) or kappa < 1:
        raise ScenarioError("must be an integer >= 1", "charge")
    if kappa > m:
        raise ScenarioError(
            f"charge {kappa} exceeds modes_per_region {m}", "charge"
        )

    praw = doc.get("paths", {}) or {}
    if not isinstance(praw, dict):
        raise ScenarioError("must map names to visited-region lists", "paths")
    paths: dict[str, tuple[int, ...]] = {}
    rset = set(cover.regions)
    for name in praw:
        seq = praw[name]
        where = f"paths.{name}"
        if not isinstance(seq, list) or not seq:
            raise ScenarioError("must be a non-empty region list", where)
        for r in seq:
            if r not in rset:
                raise ScenarioError(f"region {r} is not in the cover", where)
        try:
            approximate_curve(cover, seq)
        except InvalidPath as e:
            raise ScenarioError(str(e), where) from None
        paths[str(name)] = tuple(int(r) for r in seq)

    araw = doc.get("amplitudes", []) or []
    amplitudes = []
    for i, pair in enumerate(araw):
        where = f"amplitudes[{i}]"
        if not (isinstance(pair, list) and len(pair) == 2):
            raise ScenarioError("must be a [path, path] name pair", where)
        for nm in pair:
            if nm not in paths:
                raise ScenarioError(f"unknown path name {nm!r}", where)
        amplitudes.append((str(pair[0]), str(pair[1])))

    traw = doc.get("tasks", list(TASK_ORDER))
    if not isinstance(traw, list) or not traw:
        raise ScenarioError("must be a non-empty task list", "tasks")
    bad = [t for t in traw if t not in TASK_ORDER]
    if bad:
        raise ScenarioError(f"unknown tasks {bad}", "tasks")
    tasks = tuple(t for t in TASK_ORDER if t in set(traw))
    if variant == "MatrixUn":
        unsupported = sorted(set(tasks) & {"sector", "amplitude"})
        if unsupported:
            raise ScenarioError(
                f"tasks {unsupported} act on the Fock window and need PhaseU1",
                "tasks",
            )

    tol = doc.get("tolerance", DEFAULT_TOLERANCE)
    if not isinstance(tol, (int, float)) or tol <= 0:
        raise ScenarioError("must be a positive number", "tolerance")
    traw2 = doc.get("tolerances", {}) or {}
    if not isinstance(traw2, dict):
        raise ScenarioError("must map task names to positive numbers", "tolerances")
    tolerances = {}
    for t in traw2:
        if t not in TASK_ORDER:
            raise ScenarioError(f"unknown task {t!r}", "tolerances")
        v = traw2[t]
        if not isinstance(v, (int, float)) or v <= 0:
            raise ScenarioError("must be a positive number", f"tolerances.{t}")
        tolerances[t] = float(v)

    seed = doc.get("seed")
    if seed is not None and (not isinstance(seed, int) or seed < 0):
        raise ScenarioError("must be a non-negative integer", "seed")
    random_paths = doc.get("random_paths", 0)
    if not isinstance(random_paths, int) or random_paths < 0:
        raise ScenarioError("must be an integer >= 0", "random_paths")
    if random_paths > 0 and seed is None:
        raise ScenarioError("randomized checks need a seed", "seed")

    return ScenarioConfig(
        cover=cover,
        topology_name=topo_name,
        group_variant=variant,
        dimension=dim,
        sigma=sigma,
        modes_per_region=m,
        charge=kappa,
        paths=paths,
        amplitudes=tuple(amplitudes),
        tasks=tasks,
        tolerance=float(tol),
        tolerances=tolerances,
        seed=seed,
        random_paths=random_paths,
    )


def parse_scenario(path: str) -> ScenarioConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise ScenarioError(str(e), str(path)) from None
    return load_scenario(text, source=str(path))


# ---------------------------------------------------------------------------
# Value rendering (deterministic, JSON-safe)


def _render_value(v: GroupValue):
    if isinstance(v, PhaseU1):
        z = v.complex_value
        return {"angle": float(v.angle), "value": [float(z.real), float(z.imag)]}
    if isinstance(v, MatrixUn):
        return {
            "rows": [
                [[float(x.real), float(x.imag)] for x in row] for row in v.mat
            ]
        }
    return {"repr": repr(v)}


def _render_complex(z: complex):
    return [float(z.real), float(z.imag)]


# ---------------------------------------------------------------------------
# Running


def _sample_paths(config: ScenarioConfig, count: int):
    """Deterministic random walks on the overlap graph, from the base region."""
    cover = config.cover
    rng = np.random.default_rng([0 if config.seed is None else config.seed, 1])
    out = []
    for _ in range(count):
        cur = cover.base_region
        visited = [cur]
        length = int(rng.integers(2, 7))
        for _ in range(length):
            nbrs = cover.neighbors(cur)
            if not nbrs:
                break
            cur = int(nbrs[int(rng.integers(0, len(nbrs)))])
            visited.append(cur)
        out.append(approximate_curve(cover, visited))
    return out


def run_scenario(config: ScenarioConfig) -> dict:
    """Execute the requested tasks in fixed order and build the report.

    Raises CapacityError when a Fock-window task is requested and the
    total mode count exceeds the dense envelope; task-level errors are
    folded into the report (status fail), never raised.
    """
    cover = config.cover
    nerve = build_nerve(cover)
    presentation = pi1_presentation(nerve)
    identity = (
        PhaseU1(0.0)
        if config.group_variant == "PhaseU1"
        else MatrixUn(np.eye(config.dimension))
    )
    sigma = SigmaMorphism(dict(config.sigma), identity)
    cocycle = transition_cocycle(sigma, nerve)

    total_modes = len(cover.regions) * config.modes_per_region
    if set(config.tasks) & FOCK_TASKS and config.group_variant == "PhaseU1":
        if total_modes > CAPACITY_MODES:
            raise CapacityError(
                f"{total_modes} modes exceed the dense envelope of "
                f"{CAPACITY_MODES}; lower modes_per_region or shrink the cover"
            )

    # lazily built Fock context shared by sector/amplitude/classify
    ctx: dict = {}

    def fock_context():
        if "window" not in ctx:
            space = allocate_modes(cover, config.modes_per_region)
            fock = FockSpace(space)
            window = make_window(fock, cover, config.charge)
            ctx["window"] = window
            ctx["plain"] = plain_transporter(window, cover)
            ctx["twisted"] = twisted_transporter(window, cocycle)
        return ctx["window"], ctx["plain"], ctx["twisted"]

    tasks_doc: dict[str, dict] = {}
    failed: list[str] = []
    skipped: list[str] = []

    def record(name: str, body: dict, ok: bool):
        body["status"] = "pass" if ok else "fail"
        tasks_doc[name] = body
        if not ok:
            failed.append(name)

    def run_check() -> dict:
        tol = config.task_tolerance("check")
        violations = validate_sigma(presentation, sigma, tol)
        chk = check_cocycle(cocycle, tol)
        body = {
            "tolerance": tol,
            "relations_checked": len(presentation.relations),
            "relation_violations": [
                {"word": w.as_names(), "residual": float(r)} for (w, r) in violations
            ],
            "triples_checked": len(cover.triples),
            "max_triple_residual": float(chk.max_residual),
        }
        record("check", body, ok=(not violations) and chk.ok)
        return body

    def run_trivialize():
        tol = config.task_tolerance("trivialize")
        res = trivialize(cocycle, nerve, tol)
        body: dict = {"tolerance": tol, "trivial": bool(res.success)}
        if res.success:
            body["lambdas"] = {
                str(r): _render_value(v) for r, v in sorted(res.lambdas.items())
            }
        else:
            w = res.witness
            visited = [w.loop.start] + [s.dst for s in w.loop.steps]
            body["witness"] = {
                "regions": visited,
                "edge": list(w.edge),
                "holonomy": _render_value(w.holonomy),
                "residual": float(w.residual),
            }
        record("trivialize", body, ok=True)

    def run_holonomy():
        tol = config.task_tolerance("holonomy")
        entries = {}
        ok = True
        for name in sorted(config.paths):
            p = approximate_curve(cover, config.paths[name])
            val = holonomy(cocycle, p)
            entry = {
                "regions": list(config.paths[name]),
                "is_loop": bool(p.is_loop),
                "value": _render_value(val),
            }
            word = loop_class(presentation, p)
            entry["word"] = word.as_names()
            if p.is_loop:
                resid = float(distance(val, sigma.evaluate(word)))
                entry["sigma_match_residual"] = resid
                ok = ok and resid <= tol
            else:
                entry["path_dependent"] = True
            entries[name] = entry
        record("holonomy", {"tolerance": tol, "paths": entries}, ok=ok)

    def run_sector():
        tol = config.task_tolerance("sector")
        window, plain, twisted = fock_context()
        triple_max = 0.0
        for t in cover.triples:
            triple_max = max(triple_max, triple_law_residual(plain, t))
            triple_max = max(triple_max, triple_law_residual(twisted, t))
        probe = [approximate_curve(cover, seq) for seq in config.paths.values()]
        probe += _sample_paths(config, config.random_paths)
        tele_max = 0.0
        for p in probe:
            tele_max = max(tele_max, telescope_residual(plain, p))
            tele_max = max(tele_max, telescope_residual(twisted, p))
        body = {
            "tolerance": tol,
            "modes": total_modes,
            "charge": config.charge,
            "triples_checked": len(cover.triples),
            "max_triple_residual": float(triple_max),
            "paths_checked": len(probe),
            "max_telescope_residual": float(tele_max),
        }
        record("sector", body, ok=(triple_max <= tol and tele_max <= tol))

    def run_amplitude():
        tol = config.task_tolerance("amplitude")
        window, plain, twisted = fock_context()
        entries = []
        ok = True
        for (pn, qn) in config.amplitudes:
            p = approximate_curve(cover, config.paths[pn])
            q = approximate_curve(cover, config.paths[qn])
            entry: dict = {"p": pn, "q": qn}
            try:
                amp = transition_amplitude(twisted, p, q)
            except InvalidPath as e:
                entry["error"] = str(e)
                ok = False
            else:
                entry["value"] = _render_complex(amp)
                coeff = compose(z_path(twisted, p).coeff, inverse(z_path(twisted, q).coeff))
                resid = abs(amp - coeff.complex_value)
                entry["loop_phase_residual"] = float(resid)
                ok = ok and resid <= tol
            entries.append(entry)
        record("amplitude", {"tolerance": tol, "pairs": entries}, ok=ok)

    def run_classify():
        tol = config.task_tolerance("classify")
        if config.group_variant == "PhaseU1":
            _, _, twisted = fock_context()
            cls = classify(twisted, nerve, tol)
        else:
            cls = classify(rho_layer_transporter(cocycle), nerve, tol)
        res_max = max(cls.residuals.values(), default=0.0)
        body = {
            "tolerance": tol,
            "kind": cls.kind,
            "dimension": cls.dimension,
            "components": {
                g: _render_value(v) for g, v in sorted(cls.components.items())
            },
            "max_residual": float(res_max),
        }
        record("classify", body, ok=res_max <= tol)

    runners = {
        "check": run_check,
        "trivialize": run_trivialize,
        "holonomy": run_holonomy,
        "sector": run_sector,
        "amplitude": run_amplitude,
        "classify": run_classify,
    }

    for task in config.tasks:
        if task != "check" and "check" in failed:
            tasks_doc[task] = {"status": "skipped", "reason": "check failed"}
            skipped.append(task)
            continue
        try:
            runners[task]()
        except CapacityError:
            raise
        except Exception as e:  # fold into the report, never panic
            record(task, {"error": f"{type(e).__name__}: {e}"}, ok=False)

    status = "pass" if not failed else "fail"
    return {
        "schema_version": SCHEMA_VERSION,
        "scenario": {
            "topology": config.topology_name,
            "regions": len(cover.regions),
            "group": config.group_variant
            if config.dimension is None
            else f"{config.group_variant}({config.dimension})",
            "generators": len(nerve.non_tree_edges),
            "modes_per_region": config.modes_per_region,
            "charge": config.charge,
            "seed": config.seed,
            "tasks": list(config.tasks),
        },
        "tasks": tasks_doc,
        "summary": {
            "status": status,
            "failed": sorted(failed),
            "skipped": sorted(skipped),
            "exit_code": 0 if status == "pass" else 1,
        },
    }


# ---------------------------------------------------------------------------
# Emission


def emit_report(report: dict, fmt: str = "text") -> str:
    if fmt == "structured":
        return json.dumps(report, sort_keys=True, indent=2) + "\n"
    if fmt != "text":
        raise ValueError(f"unknown format {fmt!r}; choose text or structured")
    lines = []
    sc = report["scenario"]
    lines.append(
        f"scenario: {sc['topology']} | group {sc['group']} | "
        f"{sc['regions']} regions, {sc['generators']} generators | seed {sc['seed']}"
    )
    for task in TASK_ORDER:
        if task not in report["tasks"]:
            continue
        body = report["tasks"][task]
        status = body["status"].upper()
        detail = ""
        if body["status"] == "skipped":
            detail = f"({body['reason']})"
        elif "error" in body:
            detail = body["error"]
        elif task == "check":
            detail = (
                f"max triple residual {body['max_triple_residual']:.3e} "
                f"(tolerance {body['tolerance']:.1e}, "
                f"{body['triples_checked']} triples, "
                f"{body['relations_checked']} relations)"
            )
        elif task == "trivialize":
            if body["trivial"]:
                detail = "coboundary; per-region values recovered"
            else:
                w = body["witness"]
                detail = (
                    f"obstructed; witness loop {w['regions']} "
                    f"holonomy angle {w['holonomy'].get('angle', 'matrix')}"
                )
        elif task == "holonomy":
            parts = []
            for name in sorted(body["paths"]):
                e = body["paths"][name]
                v = e["value"]
                shown = f"angle {v['angle']:.12g}" if "angle" in v else "matrix"
                parts.append(f"{name}: {shown} [{e['word']}]")
            detail = "; ".join(parts) if parts else "no paths configured"
        elif task == "sector":
            detail = (
                f"max triple {body['max_triple_residual']:.3e}, "
                f"max telescope {body['max_telescope_residual']:.3e} "
                f"over {body['paths_checked']} paths "
                f"(tolerance {body['tolerance']:.1e})"
            )
        elif task == "amplitude":
            parts = []
            for e in body["pairs"]:
                if "error" in e:
                    parts.append(f"({e['p']},{e['q']}): {e['error']}")
                else:
                    re_, im_ = e["value"]
                    parts.append(f"({e['p']},{e['q']}): {re_:.12g}{im_:+.12g}i")
            detail = "; ".join(parts) if parts else "no pairs configured"
        elif task == "classify":
            detail = f"{body['kind']} (dimension {body['dimension']})"
        lines.append(f"  {task:<10} {status:<7} {detail}".rstrip())
    s = report["summary"]
    lines.append(
        f"summary: {s['status']}"
        + (f" | failed {s['failed']}" if s["failed"] else "")
        + (f" | skipped {s['skipped']}" if s["skipped"] else "")
    )
    return "\n".join(lines) + "\n"


def parse_report(text: str) -> dict:
    """Round-trip reader for the structured format."""
    doc = json.loads(text)
    if not isinstance(doc, dict) or doc.get("schema_version") != SCHEMA_VERSION:
        raise ScenarioError("not a structured report (schema_version mismatch)")
    for key in ("scenario", "tasks", "summary"):
        if key not in doc:
            raise ScenarioError(f"structured report is missing {key!r}")
    return doc
