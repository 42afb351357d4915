"""Command-line interface.

Exit codes: 0 on success, 1 when a requested mathematical check fails, 2 on
input or usage errors. With identical flags (including seeds) every command
produces byte-identical JSON.
"""

from __future__ import annotations

import json
import sys
from fractions import Fraction

import click

from . import selftest as selftest_mod
from .approx import certificate_check, find_approximation, find_uniform_approximation, sup_error, vc_dimension
from .defnlab import definability_table, level_buckets, paley_obstruction_report
from .errors import InvariantViolation, KeislerLabError
from .fol import evaluate, parse_formula, partitioned_to_text
from .groups import classify_idempotent, convolution_powers, haar, is_idempotent, subgroups
from .measures import (
    counting,
    fraction_str,
    load_measure,
    measure_of,
    measure_to_json_dict,
    morley,
    morley_measure,
    parse_fraction,
    product,
)
from .seqlab import (
    CountingDensity,
    ExtensionTruth,
    MorleyDensity,
    PatternDensity,
    SentenceTruth,
    coin_flip_annotation,
    evaluate_along,
    load_sequence_manifest,
)
from .structures import (
    cyclic_group,
    dihedral_group,
    extension_property,
    group_from_structure,
    load_structure,
    paley,
    paley_sequence,
    quaternion_group,
    symmetric_group,
)

MATH_FAIL = 1


def _frac(x: Fraction) -> dict:
    return {"exact": fraction_str(x), "decimal": float(x)}


def _emit(data: dict, output: str, text: str) -> None:
    if output == "json":
        click.echo(json.dumps(data, indent=2, sort_keys=True))
    else:
        click.echo(text)


def _maybe_selftest(selftest: bool, topics: list[str]) -> None:
    if not selftest:
        return
    results, ok = selftest_mod.run_suites(topics)
    for topic, (name, passed, detail) in results:
        status = "ok" if passed else "FAIL"
        suffix = f"  ({detail})" if detail else ""
        click.echo(f"[{topic}] {status}: {name}{suffix}")
    sys.exit(0 if ok else MATH_FAIL)


def _load_structure_arg(input_path, q):
    if (input_path is None) == (q is None):
        raise click.UsageError("provide exactly one of --input or --q")
    try:
        return paley(q) if q is not None else load_structure(input_path)
    except KeislerLabError as exc:
        raise click.UsageError(str(exc)) from None


def _load_group_arg(input_path, cyclic, dihedral, symmetric, quaternion):
    given = [x for x in (input_path, cyclic, dihedral, symmetric, quaternion or None) if x is not None]
    if len(given) != 1:
        raise click.UsageError("provide exactly one of --input/--cyclic/--dihedral/--symmetric/--quaternion")
    try:
        if input_path is not None:
            return group_from_structure(load_structure(input_path))
        if cyclic is not None:
            return cyclic_group(cyclic)
        if dihedral is not None:
            return dihedral_group(dihedral)
        if symmetric is not None:
            return symmetric_group(symmetric)
        return quaternion_group()
    except KeislerLabError as exc:
        raise click.UsageError(str(exc)) from None


def _parse_pf(text, structure):
    try:
        return parse_formula(text, structure.signature)
    except KeislerLabError as exc:
        raise click.UsageError(f"bad formula: {exc}") from None


def _load_measure_arg(path, structure, pf=None, vars=None):
    try:
        if path is None:
            return counting(structure, vars or (pf.obj_vars if pf else ("x",)))
        return load_measure(path, structure, vars or (pf.obj_vars if pf is not None else None))
    except KeislerLabError as exc:
        raise click.UsageError(str(exc)) from None


def _parse_assignment(text: str) -> dict[str, int]:
    out: dict[str, int] = {}
    if not text:
        return out
    for piece in text.split(","):
        if "=" not in piece:
            raise click.UsageError(f"bad assignment entry {piece!r} (want var=value)")
        name, value = piece.split("=", 1)
        try:
            out[name.strip()] = int(value)
        except ValueError:
            raise click.UsageError(f"bad assignment value {value!r}") from None
    return out


def _parse_points(text: str) -> list[tuple[int, ...]]:
    points = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        try:
            points.append(tuple(int(v) for v in chunk.split(",")))
        except ValueError:
            raise click.UsageError(f"bad point {chunk!r}") from None
    if not points:
        raise click.UsageError("no points given")
    return points


def _fraction_option(text: str, what: str) -> Fraction:
    try:
        return parse_fraction(text)
    except (ValueError, ZeroDivisionError):
        raise click.UsageError(f"bad {what}: {text!r}") from None


output_option = click.option("--output", type=click.Choice(["json", "table"]), default="table", show_default=True)
selftest_option = click.option("--selftest", is_flag=True, help="run this module's invariant suite and exit")
seed_option = click.option("--seed", type=int, default=0, show_default=True)


@click.group()
@click.version_option()
def main() -> None:
    """Exact Keisler-measure experiments over finite structures."""


# ---------------------------------------------------------------------------


@main.command("eval")
@click.option("--input", "input_path", type=click.Path(exists=True), help="structure JSON file")
@click.option("--q", type=int, help="use the Paley graph on q vertices")
@click.option("--formula", required=False)
@click.option("--assign", default="", help="variable assignment, e.g. x=0,y=1")
@output_option
@selftest_option
def eval_cmd(input_path, q, formula, assign, output, selftest):
    """Evaluate a formula in a structure under an assignment."""
    _maybe_selftest(selftest, ["fol", "engine"])
    if formula is None:
        raise click.UsageError("--formula is required")
    structure = _load_structure_arg(input_path, q)
    pf = _parse_pf(formula, structure)
    env = _parse_assignment(assign)
    try:
        truth = evaluate(structure, pf.formula, env)
    except KeislerLabError as exc:
        raise click.UsageError(str(exc)) from None
    data = {"structure": structure.name, "formula": partitioned_to_text(pf), "assignment": env, "truth": truth, "seed": 0}
    _emit(data, output, f"{structure.name} |= {partitioned_to_text(pf)} under {env}: {truth}")


@main.command("measure")
@click.option("--input", "input_path", type=click.Path(exists=True))
@click.option("--q", type=int)
@click.option("--formula", required=False)
@click.option("--measure", "measure_path", type=click.Path(exists=True), help="measure JSON (default: counting)")
@click.option("--params", default="", help="parameter assignment, e.g. y=3")
@click.option("--table", "show_table", is_flag=True, help="tabulate the value at every parameter tuple")
@output_option
@selftest_option
def measure_cmd(input_path, q, formula, measure_path, params, show_table, output, selftest):
    """Measure of a formula instance (or its whole parameter table)."""
    _maybe_selftest(selftest, ["measures"])
    if formula is None:
        raise click.UsageError("--formula is required")
    structure = _load_structure_arg(input_path, q)
    pf = _parse_pf(formula, structure)
    mu = _load_measure_arg(measure_path, structure, pf)
    try:
        if show_table:
            table = definability_table(mu, pf)
            entries = [{"params": list(b), "value": _frac(v)} for b, v in sorted(table.values.items())]
            data = {
                "structure": structure.name,
                "formula": partitioned_to_text(pf),
                "table": entries,
                "constant": table.is_constant(),
                "seed": 0,
            }
            lines = [f"b -> mu(phi(x, b)) on {structure.name}:"]
            lines += [f"  {tuple(e['params'])}: {e['value']['exact']} = {e['value']['decimal']:.6f}" for e in entries]
            _emit(data, output, "\n".join(lines))
        else:
            env = _parse_assignment(params)
            value = measure_of(mu, pf, env)
            data = {
                "structure": structure.name,
                "formula": partitioned_to_text(pf),
                "params": env,
                "value": _frac(value),
                "seed": 0,
            }
            _emit(data, output, f"mu({partitioned_to_text(pf)}) at {env} = {fraction_str(value)} = {float(value):.6f}")
    except KeislerLabError as exc:
        raise click.UsageError(str(exc)) from None


@main.command("product")
@click.option("--input", "input_path", type=click.Path(exists=True))
@click.option("--q", type=int)
@click.option("--mu", "mu_path", type=click.Path(exists=True), help="left measure JSON (default: counting)")
@click.option("--nu", "nu_path", type=click.Path(exists=True), help="right measure JSON (default: counting)")
@click.option("--formula", help="optional joint formula 'x ; y :: ...' to evaluate under both paths")
@output_option
@selftest_option
def product_cmd(input_path, q, mu_path, nu_path, formula, output, selftest):
    """Product vs integral-of-fibers measure: exact agreement check.

    Exits 1 if the product measure, the fiber-integral measure, or the
    coordinate-swapped reverse fiber-integral measure disagree anywhere.
    """
    _maybe_selftest(selftest, ["measures"])
    structure = _load_structure_arg(input_path, q)
    mu = _load_measure_arg(mu_path, structure, vars=("x",))
    nu = _load_measure_arg(nu_path, structure, vars=("y",))
    try:
        joint = product(mu, nu)
        fibered = morley_measure(mu, nu)
        flipped = morley_measure(nu, mu).reorder(mu.vars + nu.vars)
        agree = joint == fibered == flipped
        data = {
            "structure": structure.name,
            "agree": agree,
            "product": measure_to_json_dict(joint),
            "seed": 0,
        }
        lines = [f"product agreement on {structure.name}: {'exact' if agree else 'MISMATCH'}"]
        if formula is not None:
            pf = _parse_pf(formula, structure)
            if pf.obj_vars != mu.vars + nu.vars or pf.param_vars:
                raise click.UsageError(f"joint formula must have object variables {mu.vars + nu.vars} and no parameters")
            value_joint = measure_of(joint, pf)
            value_slices = morley(mu, nu, pf.with_partition(mu.vars, nu.vars))
            data["formula"] = partitioned_to_text(pf)
            data["value_product_path"] = _frac(value_joint)
            data["value_slice_path"] = _frac(value_slices)
            agree = agree and value_joint == value_slices
            data["agree"] = agree
            lines.append(f"  joint path: {fraction_str(value_joint)}  slice path: {fraction_str(value_slices)}")
        _emit(data, output, "\n".join(lines))
        if not agree:
            sys.exit(MATH_FAIL)
    except KeislerLabError as exc:
        raise click.UsageError(str(exc)) from None


@main.command("buckets")
@click.option("--input", "input_path", type=click.Path(exists=True))
@click.option("--q", type=int)
@click.option("--formula", required=False)
@click.option("--measure", "measure_path", type=click.Path(exists=True))
@click.option("--n", "granularity", type=int, required=False)
@output_option
@selftest_option
def buckets_cmd(input_path, q, formula, measure_path, granularity, output, selftest):
    """Level-set buckets of the parameter table, with conditions re-verified."""
    _maybe_selftest(selftest, ["defnlab"])
    if formula is None or granularity is None:
        raise click.UsageError("--formula and --n are required")
    structure = _load_structure_arg(input_path, q)
    pf = _parse_pf(formula, structure)
    mu = _load_measure_arg(measure_path, structure, pf)
    try:
        table = definability_table(mu, pf)
        lb = level_buckets(table, granularity)
    except InvariantViolation as exc:
        click.echo(f"bucket conditions failed: {exc}", err=True)
        sys.exit(MATH_FAIL)
    except KeislerLabError as exc:
        raise click.UsageError(str(exc)) from None
    data = {
        "structure": structure.name,
        "formula": partitioned_to_text(pf),
        "granularity": granularity,
        "buckets": [{"index": i, "size": len(b), "members": sorted(list(t) for t in b)} for i, b in enumerate(lb.buckets)],
        "conditions_verified": True,
        "seed": 0,
    }
    lines = [f"buckets at n={granularity} on {structure.name} (conditions re-verified):"]
    lines += [f"  bucket {i}: {len(b)} parameter tuples" for i, b in enumerate(lb.buckets)]
    _emit(data, output, "\n".join(lines))


@main.command("approx")
@click.option("--input", "input_path", type=click.Path(exists=True))
@click.option("--q", type=int)
@click.option("--formula", "formulas", multiple=True, help="repeat for a uniform multi-formula search")
@click.option("--measure", "measure_path", type=click.Path(exists=True))
@click.option("--epsilon", default="1/10", show_default=True, help="target for a single formula; n formulas target 1/n")
@click.option("--strategy", type=click.Choice(["sample", "exchange"]), default="sample", show_default=True)
@click.option("--route", type=click.Choice(["direct", "selector"]), default="direct", show_default=True)
@click.option("--budget", type=int, default=8, show_default=True)
@click.option("--size", type=int, help="initial sample size / replication cap (default: from epsilon)")
@seed_option
@output_option
@selftest_option
def approx_cmd(input_path, q, formulas, measure_path, epsilon, strategy, route, budget, size, seed, output, selftest):
    """Search for an average-measure witness with verified sup-error < epsilon."""
    _maybe_selftest(selftest, ["approx"])
    if not formulas:
        raise click.UsageError("at least one --formula is required")
    structure = _load_structure_arg(input_path, q)
    pfs = [_parse_pf(f, structure) for f in formulas]
    mu = _load_measure_arg(measure_path, structure, pfs[0])
    if len(pfs) == 1:
        eps = _fraction_option(epsilon, "epsilon")
        try:
            result = find_approximation(mu, pfs[0], eps, strategy=strategy, seed=seed, budget=budget, initial_size=size)
        except KeislerLabError as exc:
            raise click.UsageError(str(exc)) from None
        data = {
            "structure": structure.name,
            "formula": partitioned_to_text(pfs[0]),
            "epsilon": fraction_str(eps),
            "strategy": result.strategy,
            "seed": result.seed,
            "points": [list(p) for p in result.points],
            "point_count": result.size,
            "sup_error": _frac(result.error),
            "verified": result.verified,
            "meets_target": result.meets(eps),
        }
        text = (
            f"{result.strategy} search on {structure.name}: {result.size} points, "
            f"sup-error {fraction_str(result.error)} = {float(result.error):.6f} "
            f"({'meets' if result.meets(eps) else 'MISSES'} eps = {fraction_str(eps)})"
        )
        _emit(data, output, text)
        if not result.meets(eps):
            sys.exit(MATH_FAIL)
        return
    target = Fraction(1, len(pfs))
    try:
        result = find_uniform_approximation(mu, pfs, seed=seed, budget=budget, route=route)
    except KeislerLabError as exc:
        raise click.UsageError(str(exc)) from None
    data = {
        "structure": structure.name,
        "formulas": [partitioned_to_text(pf) for pf in pfs],
        "target": fraction_str(target),
        "route": result.route,
        "seed": result.seed,
        "points": [list(p) for p in result.points],
        "point_count": result.size,
        "per_formula_errors": [_frac(e) for e in result.per_formula_errors],
        "sup_error": _frac(result.error),
        "verified": result.verified,
        "meets_target": result.meets(target),
    }
    text = (
        f"uniform search ({result.route}) on {structure.name}: {result.size} points, "
        f"worst error {fraction_str(result.error)} "
        f"({'meets' if result.meets(target) else 'MISSES'} 1/{len(pfs)})"
    )
    _emit(data, output, text)
    if not result.meets(target):
        sys.exit(MATH_FAIL)


@main.command("vc")
@click.option("--input", "input_path", type=click.Path(exists=True))
@click.option("--q", type=int)
@click.option("--formula", required=False)
@click.option("--cap", type=int, default=3, show_default=True)
@output_option
@selftest_option
def vc_cmd(input_path, q, formula, cap, output, selftest):
    """Shatter function and VC dimension of the instance family."""
    _maybe_selftest(selftest, ["approx"])
    if formula is None:
        raise click.UsageError("--formula is required")
    structure = _load_structure_arg(input_path, q)
    pf = _parse_pf(formula, structure)
    try:
        report = vc_dimension(structure, pf, cap)
    except KeislerLabError as exc:
        raise click.UsageError(str(exc)) from None
    data = {
        "structure": structure.name,
        "formula": partitioned_to_text(pf),
        "cap": cap,
        "shatter": list(report.values),
        "vc_dimension": report.describe(),
        "seed": 0,
    }
    text = f"shatter values {list(report.values)} up to {cap}; VC dimension {report.describe()}"
    _emit(data, output, text)


@main.command("certify")
@click.option("--input", "input_path", type=click.Path(exists=True))
@click.option("--q", type=int)
@click.option("--formula", required=False)
@click.option("--measure", "measure_path", type=click.Path(exists=True))
@click.option("--n", "granularity", type=int, required=False)
@click.option("--points", "points_text", help="explicit points '0;1;2' or 'a,b;c,d' (default: search)")
@click.option("--budget", type=int, default=8, show_default=True)
@seed_option
@output_option
@selftest_option
def certify_cmd(input_path, q, formula, measure_path, granularity, points_text, budget, seed, output, selftest):
    """Check that a point list certifies the level buckets; exit 1 on failure."""
    _maybe_selftest(selftest, ["approx", "defnlab"])
    if formula is None or granularity is None:
        raise click.UsageError("--formula and --n are required")
    structure = _load_structure_arg(input_path, q)
    pf = _parse_pf(formula, structure)
    mu = _load_measure_arg(measure_path, structure, pf)
    try:
        table = definability_table(mu, pf)
        buckets = level_buckets(table, granularity)
        if points_text is not None:
            points = _parse_points(points_text)
        else:
            search = find_approximation(
                mu, pf, Fraction(1, 2 * granularity), strategy="exchange", seed=seed, budget=budget
            )
            points = list(search.points)
        cert = certificate_check(mu, pf, points, buckets, granularity)
    except KeislerLabError as exc:
        raise click.UsageError(str(exc)) from None
    data = {
        "structure": structure.name,
        "formula": partitioned_to_text(pf),
        "granularity": granularity,
        "point_count": cert.point_count,
        "passed": cert.passed,
        "counterexample": None if cert.counterexample is None else list(cert.counterexample),
        "reason": cert.reason,
        "seed": seed,
    }
    if cert.passed:
        text = f"certificate with {cert.point_count} points at n={granularity}: PASS"
    else:
        text = f"certificate FAILS at parameter {cert.counterexample}: {cert.reason}"
    _emit(data, output, text)
    if not cert.passed:
        sys.exit(MATH_FAIL)


@main.command("paley")
@click.option("--q", type=int, required=False)
@click.option("--check", type=click.Choice(["degree", "extension", "obstruction"]), default="degree", show_default=True)
@click.option("--p", "target", default="3/10", show_default=True, help="target density for the obstruction check")
@click.option("--samples", type=int, default=20, show_default=True)
@click.option("--s", "s_count", type=int, default=1, show_default=True)
@click.option("--t", "t_count", type=int, default=1, show_default=True)
@seed_option
@output_option
@selftest_option
def paley_cmd(q, check, target, samples, s_count, t_count, seed, output, selftest):
    """Paley graph checks: regularity, extension properties, obstruction report."""
    _maybe_selftest(selftest, ["structures", "defnlab"])
    if q is None:
        raise click.UsageError("--q is required")
    try:
        graph = paley(q)
    except KeislerLabError as exc:
        raise click.UsageError(str(exc)) from None
    if check == "degree":
        edges = graph.relations["R"]
        degrees = {a: sum(1 for b in range(q) if (a, b) in edges) for a in range(q)}
        expected = (q - 1) // 2
        regular = set(degrees.values()) == {expected}
        data = {"q": q, "check": "degree", "expected": expected, "regular": regular, "seed": seed}
        _emit(data, output, f"paley({q}): {'regular of degree ' + str(expected) if regular else 'NOT regular'}")
        if not regular:
            sys.exit(MATH_FAIL)
    elif check == "extension":
        holds = extension_property(graph, s_count, t_count)
        data = {"q": q, "check": "extension", "s": s_count, "t": t_count, "holds": holds, "seed": seed}
        _emit(data, output, f"paley({q}) extension({s_count},{t_count}): {holds}")
        if not holds:
            sys.exit(MATH_FAIL)
    else:
        try:
            report = paley_obstruction_report(q, _fraction_option(target, "p"), samples=samples, seed=seed)
        except InvariantViolation as exc:
            click.echo(f"obstruction computation failed: {exc}", err=True)
            sys.exit(MATH_FAIL)
        _emit(report.to_json_dict(), output, report.to_text())


@main.command("seq")
@click.option("--manifest", type=click.Path(exists=True), help="sequence manifest JSON")
@click.option("--paley-list", help="comma-separated Paley parameters, e.g. 5,13,17")
@click.option(
    "--quantity",
    type=click.Choice(["density", "sentence", "extension", "pattern", "morley-left", "morley-right"]),
    default="density",
    show_default=True,
)
@click.option("--formula", help="formula for density/sentence/morley quantities")
@click.option("--s", "s_count", type=int, default=1, show_default=True)
@click.option("--t", "t_count", type=int, default=1, show_default=True)
@click.option("--pattern-edges", type=int, default=1, show_default=True, help="adjacency count for the pattern quantity")
@click.option("--pattern-nonedges", type=int, default=1, show_default=True, help="non-adjacency count for the pattern quantity")
@click.option("--p", "bias", help="coin bias: annotate the pattern report with its targets")
@click.option("--epsilon", "epsilons", multiple=True, help="tail-stability epsilon (repeatable)")
@seed_option
@output_option
@selftest_option
def seq_cmd(
    manifest, paley_list, quantity, formula, s_count, t_count,
    pattern_edges, pattern_nonedges, bias, epsilons, seed, output, selftest,
):
    """Evaluate a quantity along a sequence of structures with tail diagnostics."""
    _maybe_selftest(selftest, ["seqlab"])
    if (manifest is None) == (paley_list is None):
        raise click.UsageError("provide exactly one of --manifest or --paley-list")
    try:
        if manifest is not None:
            seq = load_sequence_manifest(manifest)
        else:
            qs = [int(x) for x in paley_list.split(",") if x.strip()]
            seq = paley_sequence(qs)
    except (KeislerLabError, ValueError) as exc:
        raise click.UsageError(str(exc)) from None
    if quantity == "extension":
        quant = ExtensionTruth(s_count, t_count)
    elif quantity == "pattern":
        quant = PatternDensity(pattern_edges, pattern_nonedges)
    else:
        if formula is None:
            raise click.UsageError(f"--formula is required for quantity {quantity!r}")
        pf = _parse_pf(formula, seq.structures[0])
        if quantity == "density":
            quant = CountingDensity(pf)
        elif quantity == "sentence":
            quant = SentenceTruth(pf)
        else:
            quant = MorleyDensity(pf, quantity.removeprefix("morley-"), seed)
    eps_values = [_fraction_option(e, "epsilon") for e in epsilons]
    try:
        report = evaluate_along(seq, quant, epsilons=eps_values)
    except KeislerLabError as exc:
        raise click.UsageError(str(exc)) from None
    data = report.to_json_dict()
    data["seed"] = seed
    lines = [report.to_text()]
    if quantity == "pattern":
        fair = coin_flip_annotation(Fraction(1, 2), pattern_edges, pattern_nonedges)
        data["fair_target"] = fair["target"]
        lines.append(f"  fair-coin target: {fair['target']['exact']} = {fair['target']['decimal']:.6f}")
        if bias is not None:
            annotation = coin_flip_annotation(_fraction_option(bias, "p"), pattern_edges, pattern_nonedges)
            data["biased_coin"] = annotation
            lines.append(
                f"  biased-coin target (p = {annotation['bias']}"
                + (", unfair" if annotation["unfair"] else "")
                + f"): {annotation['target']['exact']} = {annotation['target']['decimal']:.6f}"
            )
            lines.append(f"  ({annotation['note']})")
    _emit(data, output, "\n".join(lines))


@main.command("group")
@click.option("--input", "--table", "input_path", type=click.Path(exists=True), help="group structure JSON")
@click.option("--cyclic", type=int)
@click.option("--dihedral", type=int)
@click.option("--symmetric", type=int)
@click.option("--quaternion", is_flag=True)
@click.option("--classify-idempotents", "classify_flag", is_flag=True, help="list all idempotent measures (Haar on each subgroup)")
@click.option("--measure", "measure_path", type=click.Path(exists=True), help="classify this measure instead")
@output_option
@selftest_option
def group_cmd(input_path, cyclic, dihedral, symmetric, quaternion, classify_flag, measure_path, output, selftest):
    """Subgroup enumeration and idempotent classification on a finite group."""
    _maybe_selftest(selftest, ["groups"])
    g = _load_group_arg(input_path, cyclic, dihedral, symmetric, quaternion)
    try:
        subs = subgroups(g)
    except KeislerLabError as exc:
        raise click.UsageError(str(exc)) from None
    if measure_path is not None:
        mu = _load_measure_arg(measure_path, g, vars=("x",))
        h = classify_idempotent(mu)
        data = {
            "group": g.name,
            "idempotent": h is not None,
            "subgroup": None if h is None else h.sorted_elements(),
            "seed": 0,
        }
        text = (
            f"{g.name}: measure is haar({list(h.sorted_elements())})" if h is not None else f"{g.name}: measure is not idempotent"
        )
        _emit(data, output, text)
        return
    data = {
        "group": g.name,
        "order": g.universe_size,
        "subgroups": [list(s.sorted_elements()) for s in subs],
        "seed": 0,
    }
    lines = [f"{g.name}: {len(subs)} subgroups"]
    if classify_flag:
        idem = []
        for s in subs:
            hm = haar(s)
            assert is_idempotent(hm)
            idem.append({"subgroup": list(s.sorted_elements()), "haar": measure_to_json_dict(hm)})
        data["idempotents"] = idem
        lines.append(f"idempotent measures = haar measures of the {len(subs)} subgroups:")
        lines += [f"  haar({list(s.sorted_elements())})" for s in subs]
    else:
        lines += [f"  {list(s.sorted_elements())}" for s in subs]
    _emit(data, output, "\n".join(lines))


@main.command("dynamics")
@click.option("--input", "--table", "input_path", type=click.Path(exists=True))
@click.option("--cyclic", type=int)
@click.option("--dihedral", type=int)
@click.option("--symmetric", type=int)
@click.option("--quaternion", is_flag=True)
@click.option("--measure", "measure_path", type=click.Path(exists=True), required=False)
@click.option("--max-n", type=int, default=500, show_default=True)
@click.option("--tol", default="1/1000000000", show_default=True)
@click.option("--cesaro", is_flag=True, help="also record running averages")
@output_option
@selftest_option
def dynamics_cmd(input_path, cyclic, dihedral, symmetric, quaternion, measure_path, max_n, tol, cesaro, output, selftest):
    """Convolution-power orbit of a measure: convergence, periodicity, averages."""
    _maybe_selftest(selftest, ["groups"])
    g = _load_group_arg(input_path, cyclic, dihedral, symmetric, quaternion)
    if measure_path is None:
        raise click.UsageError("--measure is required")
    mu = _load_measure_arg(measure_path, g, vars=("x",))
    try:
        orbit = convolution_powers(mu, max_n, _fraction_option(tol, "tol"), cesaro=cesaro)
    except InvariantViolation as exc:
        click.echo(f"orbit verification failed: {exc}", err=True)
        sys.exit(MATH_FAIL)
    except KeislerLabError as exc:
        raise click.UsageError(str(exc)) from None
    data = {
        "group": g.name,
        "status": orbit.status,
        "steps": orbit.steps,
        "period": orbit.period,
        "preperiod": orbit.preperiod,
        "limit": None if orbit.limit is None else measure_to_json_dict(orbit.limit),
        "limit_gap": None if orbit.limit_gap is None else _frac(orbit.limit_gap),
        "cesaro_limit": None if orbit.cesaro_limit is None else measure_to_json_dict(orbit.cesaro_limit),
        "classified_subgroup": None if orbit.classified is None else list(orbit.classified.sorted_elements()),
        "iterates": [measure_to_json_dict(m) for m in orbit.iterates],
        "cesaro_averages": None
        if orbit.cesaro_averages is None
        else [measure_to_json_dict(m) for m in orbit.cesaro_averages],
        "seed": 0,
    }
    lines = [f"{g.name}: orbit {orbit.status} after {orbit.steps} computed powers"]
    if orbit.status == "periodic":
        lines.append(f"  period {orbit.period}, preperiod {orbit.preperiod}; cycle average is haar({list(orbit.classified.sorted_elements())})")
    elif orbit.status == "converged":
        lines.append(f"  limit haar({list(orbit.classified.sorted_elements())}), final gap {fraction_str(orbit.limit_gap)}")
    _emit(data, output, "\n".join(lines))


if __name__ == "__main__":
    main()
