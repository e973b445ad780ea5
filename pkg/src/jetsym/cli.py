"""Batch verification front-end.

A problem file declares one jet space, named objects (expressions,
fields, matrices, twists, equations, sections, chains, expected
prolonged fields) and an ordered list of verification tasks.  The
runner executes the tasks, renders a line-oriented text report or a
deterministic JSON report, and exits 0 only when every task verdict is
proven (probable verdicts pass with --allow-probable).

Exit codes: 0 success, 1 verification failure, 2 usage or parse error.
The file grammar is documented in docs/problem-format.md.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
from dataclasses import dataclass, field

from . import expr as ex
from . import invariants as inv
from . import symcheck as sc
from . import twist as tw
from .jet import JetSpace, Section
from .matrix import MatrixExpr
from .parser import ParseError, parse
from .prolong import (MaurerCartanError, bracket_defect, lambda_prolong,
                      mu_prolong, prolong_combination, sigma_prolong,
                      standard_prolong)
from .vfield import (InvolutionError, ProlongedField, VectorField,
                     involution_coefficients, is_lie_algebra)

TASK_KINDS = {
    "prolong", "mu-prolong", "lambda-prolong", "sigma-prolong",
    "check-symmetry", "check-mc", "gauge-to-mu", "gauge-to-sigma",
    "check-mu-diagram", "check-sigma-diagram", "check-solution",
    "check-invariant-section", "compare-on-sections", "check-chain",
    "ibdp-extend", "prolong-combination", "bracket-defect",
    "check-involution", "check-lie-algebra", "same-distribution",
}

VERDICTS = ("proven", "disproven", "probable", "not-applicable", "error")


class ProblemFileError(Exception):
    def __init__(self, message, line=None):
        self.line = line
        where = f" (line {line})" if line else ""
        super().__init__(f"{message}{where}")


@dataclass
class Task:
    id: str
    kind: str
    args: dict
    line: int


@dataclass
class Problem:
    path: str
    space: JetSpace
    exprs: dict = field(default_factory=dict)
    fields: dict = field(default_factory=dict)
    matrices: dict = field(default_factory=dict)
    twists: dict = field(default_factory=dict)
    equations: dict = field(default_factory=dict)
    sections: dict = field(default_factory=dict)
    chains: dict = field(default_factory=dict)
    prolongeds: dict = field(default_factory=dict)
    tasks: list = field(default_factory=list)


def _split_top(text, sep=","):
    """Split on a separator at bracket depth zero."""
    parts = []
    depth = 0
    cur = []
    for ch in text:
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        if ch == sep and depth == 0:
            parts.append("".join(cur).strip())
            cur = []
        else:
            cur.append(ch)
    tail = "".join(cur).strip()
    if tail:
        parts.append(tail)
    return parts


def _parse_matrix_literal(text, space, line):
    text = text.strip()
    if not (text.startswith("[") and text.endswith("]")):
        raise ProblemFileError("matrix literal must be [[...], ...]", line)
    rows_src = _split_top(text[1:-1])
    rows = []
    for row_src in rows_src:
        row_src = row_src.strip()
        if not (row_src.startswith("[") and row_src.endswith("]")):
            raise ProblemFileError("matrix row must be [...]", line)
        entries = [parse(e, space) for e in _split_top(row_src[1:-1])]
        rows.append(tuple(entries))
    return MatrixExpr(tuple(rows))


class _Lines:
    def __init__(self, text):
        self.lines = text.splitlines()
        self.i = 0

    def next_meaningful(self):
        while self.i < len(self.lines):
            raw = self.lines[self.i]
            self.i += 1
            stripped = raw.split("#", 1)[0].strip()
            if stripped:
                return stripped, self.i
        return None, self.i

    def block(self, lineno):
        """Lines until a bare 'end'."""
        out = []
        while True:
            stripped, n = self.next_meaningful()
            if stripped is None:
                raise ProblemFileError("block is missing its 'end'", lineno)
            if stripped == "end":
                return out
            out.append((stripped, n))


def parse_problem(text, path="<string>"):
    lines = _Lines(text)
    space = None
    problem = None
    declared_at = {}

    def need_space(lineno):
        if problem is None:
            raise ProblemFileError("the space block must come first", lineno)
        return problem

    def check_new(name, lineno):
        if name in declared_at:
            raise ProblemFileError(f"name {name!r} already declared", lineno)
        declared_at[name] = lineno

    while True:
        stripped, lineno = lines.next_meaningful()
        if stripped is None:
            break
        head = stripped.split()
        keyword = head[0]
        if keyword == "space":
            if problem is not None:
                raise ProblemFileError("only one space block is allowed",
                                       lineno)
            independent, dependent, order, params = [], [], None, []
            for entry, n in lines.block(lineno):
                parts = entry.replace(",", " ").split()
                if parts[0] == "independent":
                    independent = parts[1:]
                elif parts[0] == "dependent":
                    dependent = parts[1:]
                elif parts[0] == "order":
                    order = int(parts[1])
                elif parts[0] == "param":
                    params.extend(parts[1:])
                else:
                    raise ProblemFileError(
                        f"unknown space entry {parts[0]!r}", n)
            if not independent or not dependent or order is None:
                raise ProblemFileError("space block is incomplete", lineno)
            space = JetSpace(independent, dependent, order, params)
            problem = Problem(path, space)
        elif keyword == "expr":
            p = need_space(lineno)
            if "=" not in stripped:
                raise ProblemFileError("expr wants: expr NAME = <expression>",
                                       lineno)
            name_part, rhs = stripped.split("=", 1)
            name = name_part.split()[1]
            check_new(name, lineno)
            try:
                p.exprs[name] = parse(rhs.strip(), space)
            except (ParseError, ex.ExprError) as err:
                raise ProblemFileError(str(err), lineno)
        elif keyword == "field":
            p = need_space(lineno)
            name = head[1]
            check_new(name, lineno)
            xi = {n: ex.ZERO for n in space.independent}
            phi = {n: ex.ZERO for n in space.dependent}
            for entry, n in lines.block(lineno):
                parts = entry.split("=", 1)
                if len(parts) != 2:
                    raise ProblemFileError("field entries look like "
                                           "'xi x = ...' or 'phi u = ...'", n)
                target = parts[0].split()
                try:
                    value = parse(parts[1].strip(), space)
                except (ParseError, ex.ExprError) as err:
                    raise ProblemFileError(str(err), n)
                if len(target) != 2 or target[0] not in ("xi", "phi"):
                    raise ProblemFileError("field entries look like "
                                           "'xi x = ...' or 'phi u = ...'", n)
                kind, coord = target
                if kind == "xi":
                    if coord not in xi:
                        raise ProblemFileError(
                            f"{coord!r} is not an independent variable", n)
                    xi[coord] = value
                else:
                    if coord not in phi:
                        raise ProblemFileError(
                            f"{coord!r} is not a dependent variable", n)
                    phi[coord] = value
            p.fields[name] = VectorField(
                space, tuple(xi[c] for c in space.independent),
                tuple(phi[c] for c in space.dependent))
        elif keyword == "matrix":
            p = need_space(lineno)
            name = head[1]
            check_new(name, lineno)
            body = " ".join(entry for entry, _ in lines.block(lineno))
            p.matrices[name] = _parse_matrix_literal(body, space, lineno)
        elif keyword == "twist":
            p = need_space(lineno)
            name = head[1]
            check_new(name, lineno)
            spec = {"kind": None, "lambda": None, "matrices": [],
                    "sigma": None, "enforce-mc": True}
            for entry, n in lines.block(lineno):
                key, _, value = entry.partition("=")
                key = key.strip()
                value = value.strip()
                if not value and len(key.split()) == 2:
                    key, value = key.split()
                if key == "kind":
                    spec["kind"] = value
                elif key == "lambda":
                    spec["lambda"] = parse(value, space)
                elif key == "matrices":
                    spec["matrices"] = [v.strip()
                                        for v in value.split(",") if v.strip()]
                elif key == "sigma":
                    spec["sigma"] = value
                elif key == "enforce-mc":
                    spec["enforce-mc"] = value.lower() not in ("off", "false",
                                                               "0", "no")
                else:
                    raise ProblemFileError(f"unknown twist entry {key!r}", n)
            if spec["kind"] not in ("standard", "lambda", "mu", "sigma"):
                raise ProblemFileError("twist kind must be one of standard, "
                                       "lambda, mu, sigma", lineno)
            p.twists[name] = spec
        elif keyword == "equation":
            p = need_space(lineno)
            name = head[1]
            check_new(name, lineno)
            rules = {}
            for entry, n in lines.block(lineno):
                lhs, _, rhs = entry.partition("=")
                if not rhs:
                    raise ProblemFileError("equation lines look like "
                                           "'u_xx = <expression>'", n)
                try:
                    rules[lhs.strip()] = parse(rhs.strip(), space)
                except (ParseError, ex.ExprError) as err:
                    raise ProblemFileError(str(err), n)
            try:
                p.equations[name] = sc.DiffSystem(space, rules)
            except ex.ExprError as err:
                raise ProblemFileError(str(err), lineno)
        elif keyword == "section":
            p = need_space(lineno)
            name = head[1]
            check_new(name, lineno)
            values = {}
            for entry, n in lines.block(lineno):
                lhs, _, rhs = entry.partition("=")
                try:
                    values[lhs.strip()] = parse(rhs.strip(), space)
                except (ParseError, ex.ExprError) as err:
                    raise ProblemFileError(str(err), n)
            try:
                p.sections[name] = Section(space, values)
            except ValueError as err:
                raise ProblemFileError(str(err), lineno)
        elif keyword == "chain":
            p = need_space(lineno)
            name = head[1]
            check_new(name, lineno)
            levels = {}
            for entry, n in lines.block(lineno):
                if not entry.startswith("order"):
                    raise ProblemFileError("chain lines look like "
                                           "'order 1: e1, e2'", n)
                head_part, _, rhs = entry.partition(":")
                k = int(head_part.split()[1])
                try:
                    levels[k] = [parse(e, space) for e in _split_top(rhs)]
                except (ParseError, ex.ExprError) as err:
                    raise ProblemFileError(str(err), n)
            if sorted(levels) != list(range(len(levels))):
                raise ProblemFileError(
                    "chain orders must be 0, 1, ... without gaps", lineno)
            try:
                p.chains[name] = inv.InvariantChain(
                    space, [levels[k] for k in sorted(levels)])
            except ValueError as err:
                raise ProblemFileError(str(err), lineno)
        elif keyword == "prolonged":
            p = need_space(lineno)
            name = head[1]
            check_new(name, lineno)
            xi = {c: ex.ZERO for c in space.independent}
            psi = {}
            for entry, n in lines.block(lineno):
                lhs, _, rhs = entry.partition("=")
                target = lhs.split()
                try:
                    value = parse(rhs.strip(), space)
                except (ParseError, ex.ExprError) as err:
                    raise ProblemFileError(str(err), n)
                if target[0] == "xi":
                    if target[1] not in xi:
                        raise ProblemFileError(
                            f"{target[1]!r} is not an independent variable", n)
                    xi[target[1]] = value
                elif target[0] == "psi":
                    try:
                        s = space.resolve(target[1])
                        info = space.decode(s)
                    except KeyError as err:
                        raise ProblemFileError(str(err), n)
                    if info[0] != "jet":
                        raise ProblemFileError(
                            f"{target[1]!r} is not a jet coordinate", n)
                    psi[(info[1], info[2])] = value
                else:
                    raise ProblemFileError("prolonged entries look like "
                                           "'xi x = ...' or 'psi u_x = ...'", n)
            order = max((J.order for _, J in psi), default=0)
            from .jet import MultiIndex
            full = {}
            for J in MultiIndex.up_to(space.q, order):
                for a in range(space.p):
                    full[(a, J)] = psi.get((a, J), ex.ZERO)
            p.prolongeds[name] = ProlongedField(
                space, tuple(xi[c] for c in space.independent), full, order,
                "raw")
        elif keyword == "task":
            p = need_space(lineno)
            if len(head) < 3:
                raise ProblemFileError("task lines look like "
                                       "'task ID KIND key=value ...'", lineno)
            task_id, kind = head[1], head[2]
            if kind not in TASK_KINDS:
                raise ProblemFileError(f"unknown task kind {kind!r}", lineno)
            args = {}
            for chunk in head[3:]:
                key, _, value = chunk.partition("=")
                if not value:
                    raise ProblemFileError(
                        f"task argument {chunk!r} is not key=value", lineno)
                args[key] = value
            if any(t.id == task_id for t in p.tasks):
                raise ProblemFileError(f"task id {task_id!r} reused", lineno)
            p.tasks.append(Task(task_id, kind, args, lineno))
        else:
            raise ProblemFileError(f"unknown declaration {keyword!r}", lineno)
    if problem is None:
        raise ProblemFileError("file declares no space", 1)
    _validate_references(problem, declared_at)
    return problem


_TASK_REFS = {
    "field": "fields", "fields": "fields",
    "matrix": "matrices", "matrices": "matrices", "sigma": "matrices",
    "twist": "twists", "equation": "equations", "section": "sections",
    "chain": "chains", "lambda": "exprs", "zeta": "exprs", "eta": "exprs",
    "coeffs": "exprs",
    "prolonged": "prolongeds", "expect": "prolongeds",
    "expect-difference": "prolongeds", "expect-z": "prolongeds",
    "expect-w": "fields", "p1": "prolongeds", "p2": "prolongeds",
    "left": "prolongeds", "right": "prolongeds",
}


_TASK_REF_OVERRIDES = {
    ("gauge-to-mu", "expect"): "matrices",
    ("gauge-to-sigma", "expect"): "matrices",
    ("gauge-to-mu", "expect-matrices"): "matrices",
    ("gauge-to-sigma", "expect-matrix"): "matrices",
}


def _validate_references(problem, declared_at):
    bound = set()
    pools = {
        "fields": set(problem.fields), "matrices": set(problem.matrices),
        "twists": set(problem.twists), "equations": set(problem.equations),
        "sections": set(problem.sections), "chains": set(problem.chains),
        "exprs": set(problem.exprs), "prolongeds": set(problem.prolongeds),
    }
    for task in problem.tasks:
        for key, value in task.args.items():
            pool = _TASK_REF_OVERRIDES.get((task.kind, key),
                                           _TASK_REFS.get(key))
            if pool is None:
                continue
            for name in value.split(","):
                name = name.strip()
                ok = name in pools[pool] and declared_at[name] < task.line
                if pool == "prolongeds":
                    ok = ok or name in bound
                if not ok:
                    raise ProblemFileError(
                        f"task {task.id!r} references the {pool[:-1]} "
                        f"{name!r}, which is not declared before use",
                        task.line)
        if "as" in task.args:
            for name in task.args["as"].split(","):
                name = name.strip()
                if name in declared_at or name in bound:
                    raise ProblemFileError(
                        f"binding name {name!r} already in use", task.line)
                bound.add(name)


# ----------------------------------------------------------------------
# execution
# ----------------------------------------------------------------------

@dataclass
class TaskResult:
    id: str
    kind: str
    verdict: str
    raw_verdict: str = ""
    items: list = field(default_factory=list)  # (label, rendered, verdict)
    notes: list = field(default_factory=list)
    provenance: dict = field(default_factory=dict)
    wall_time: float = 0.0


def _verdict_from_items(items):
    return sc._overall(v for _, _, v in items)


class _Runner:
    def __init__(self, problem, seed, max_order=None):
        self.problem = problem
        self.seed = seed
        self.max_order = max_order
        self.bound = {}

    def rng(self, index):
        return random.Random(self.seed * 100003 + index)

    def get_prolonged(self, name):
        if name in self.bound:
            return self.bound[name]
        return self.problem.prolongeds[name]

    def get_order(self, task):
        n = int(task.args.get("order", self.problem.space.order))
        if self.max_order is not None and n > self.max_order:
            raise ProblemFileError(
                f"order {n} exceeds --max-order {self.max_order}", task.line)
        return n

    def names(self, task, key):
        return [v.strip() for v in task.args.get(key, "").split(",")
                if v.strip()]

    def twist_matrices(self, task):
        """Matrices for a mu twist from twist= or matrices= arguments."""
        if "twist" in task.args:
            spec = self.problem.twists[task.args["twist"]]
            names = spec["matrices"]
            enforce = spec["enforce-mc"]
        else:
            names = self.names(task, "matrices")
            enforce = task.args.get("enforce-mc", "on").lower() not in (
                "off", "false", "0", "no")
        return [self.problem.matrices[n] for n in names], enforce

    def run(self):
        results = []
        for index, task in enumerate(self.problem.tasks):
            start = time.perf_counter()
            rng = self.rng(index)
            try:
                result = self.run_task(task, rng)
            except (ProblemFileError, ex.ExprError, InvolutionError,
                    MaurerCartanError, ValueError, KeyError) as err:
                result = TaskResult(task.id, task.kind, "error",
                                    notes=[str(err)])
            result.wall_time = time.perf_counter() - start
            expected = task.args.get("expect-verdict")
            if expected:
                result.raw_verdict = result.verdict
                result.verdict = ("proven" if result.verdict == expected
                                  else "disproven")
                result.notes.append(
                    f"expected verdict {expected!r}, computed "
                    f"{result.raw_verdict!r}")
            results.append(result)
        return results

    # -- helpers -------------------------------------------------------

    def compare_prolonged(self, computed, expected, rng, prefix=""):
        diff = computed.minus(expected)
        return [(f"{prefix}{label}", ex.render(e), ex.is_zero(e, rng))
                for label, e in diff.coefficients_with_labels()]

    def compare_field(self, computed, expected, rng, prefix=""):
        items = []
        space = computed.space
        for i in range(space.q):
            e = ex.normalize(computed.xi[i] - expected.xi[i])
            items.append((f"{prefix}xi^{space.independent[i]}",
                          ex.render(e), ex.is_zero(e, rng)))
        for a in range(space.p):
            e = ex.normalize(computed.phi[a] - expected.phi[a])
            items.append((f"{prefix}phi^{space.dependent[a]}",
                          ex.render(e), ex.is_zero(e, rng)))
        return items

    def bind(self, task, values):
        names = self.names(task, "as")
        if not names:
            return
        if len(names) != len(values):
            raise ProblemFileError(
                f"task {task.id!r} binds {len(names)} names but produced "
                f"{len(values)} fields", task.line)
        for name, value in zip(names, values):
            self.bound[name] = value

    def report_to_items(self, report):
        return [(label, ex.render(e), v) for label, e, v in report.items]

    # -- task dispatch --------------------------------------------------

    def run_task(self, task, rng):
        method = getattr(self, "task_" + task.kind.replace("-", "_"))
        return method(task, rng)

    def task_prolong(self, task, rng):
        X = self.problem.fields[task.args["field"]]
        n = self.get_order(task)
        P = standard_prolong(X, n)
        return self.finish_prolong(task, rng, [P])

    def task_lambda_prolong(self, task, rng):
        X = self.problem.fields[task.args["field"]]
        n = self.get_order(task)
        if "twist" in task.args:
            lam = self.problem.twists[task.args["twist"]]["lambda"]
        else:
            lam = self.problem.exprs[task.args["lambda"]]
        P = lambda_prolong(X, n, lam)
        return self.finish_prolong(task, rng, [P])

    def task_mu_prolong(self, task, rng):
        X = self.problem.fields[task.args["field"]]
        n = self.get_order(task)
        lams, enforce = self.twist_matrices(task)
        P = mu_prolong(X, n, lams, enforce_mc=enforce, rng=rng)
        return self.finish_prolong(task, rng, [P])

    def task_sigma_prolong(self, task, rng):
        fields = [self.problem.fields[n] for n in self.names(task, "fields")]
        n = self.get_order(task)
        if "twist" in task.args:
            sigma = self.problem.matrices[
                self.problem.twists[task.args["twist"]]["sigma"]]
        else:
            sigma = self.problem.matrices[task.args["sigma"]]
        Ps = sigma_prolong(fields, n, sigma)
        return self.finish_prolong(task, rng, Ps)

    def finish_prolong(self, task, rng, computed):
        self.bind(task, computed)
        items = []
        expect = self.names(task, "expect")
        if expect:
            if len(expect) != len(computed):
                raise ProblemFileError(
                    f"task {task.id!r} expects {len(expect)} fields but "
                    f"computed {len(computed)}", task.line)
            for name, P in zip(expect, computed):
                prefix = f"{name}." if len(computed) > 1 else ""
                items.extend(self.compare_prolonged(
                    P, self.get_prolonged(name), rng, prefix))
            verdict = _verdict_from_items(items)
        else:
            verdict = "proven"
        result = TaskResult(task.id, task.kind, verdict, items=items)
        if not expect:
            result.notes.append("computed without an expected value")
        return result

    def task_check_mc(self, task, rng):
        lams, _ = self.twist_matrices(task)
        items = []
        for pair, defect in tw.mc_defect(lams, self.problem.space):
            for r, row in enumerate(defect.entries):
                for c, e in enumerate(row):
                    items.append((f"pair{pair}[{r}][{c}]", ex.render(e),
                                  ex.is_zero(e, rng)))
        return TaskResult(task.id, task.kind, _verdict_from_items(items),
                          items=items)

    def task_gauge_to_mu(self, task, rng):
        A = self.problem.matrices[task.args["matrix"]]
        space = self.problem.space
        lams = tw.gauge_to_mu(A, space, rng)
        items = []
        expect = self.names(task, "expect-matrices") or \
            self.names(task, "expect")
        notes = []
        if expect:
            expected = [self.problem.matrices[n] for n in expect]
            if len(expected) != len(lams):
                raise ProblemFileError(
                    f"task {task.id!r} expects {len(expected)} matrices",
                    task.line)
            for i, (got, want) in enumerate(zip(lams, expected)):
                d = got.sub(want)
                for r, row in enumerate(d.entries):
                    for c, e in enumerate(row):
                        items.append((
                            f"Lambda_{space.independent[i]}[{r}][{c}]",
                            ex.render(e), ex.is_zero(e, rng)))
            residuals = tw.lai_residual(A, expected, space)
            for i, res in enumerate(residuals):
                notes.append(
                    f"left-form residual D_{space.independent[i]}A - "
                    f"A*Lambda_{space.independent[i]} = {res.render()}")
            verdict = _verdict_from_items(items)
        else:
            verdict = "proven"
            notes.append("computed " + "; ".join(m.render() for m in lams))
        return TaskResult(task.id, task.kind, verdict, items=items,
                          notes=notes)

    def task_gauge_to_sigma(self, task, rng):
        A = self.problem.matrices[task.args["matrix"]]
        space = self.problem.space
        sigma = tw.gauge_to_sigma(A, space, rng)
        items = []
        expect = self.names(task, "expect")
        if "expect-matrix" in task.args:
            expect = [task.args["expect-matrix"]]
        notes = []
        if expect:
            want = self.problem.matrices[expect[0]]
            d = sigma.sub(want)
            for r, row in enumerate(d.entries):
                for c, e in enumerate(row):
                    items.append((f"sigma[{r}][{c}]", ex.render(e),
                                  ex.is_zero(e, rng)))
            verdict = _verdict_from_items(items)
        else:
            verdict = "proven"
            notes.append("computed " + sigma.render())
        return TaskResult(task.id, task.kind, verdict, items=items,
                          notes=notes)

    def task_check_mu_diagram(self, task, rng):
        X = self.problem.fields[task.args["field"]]
        A = self.problem.matrices[task.args["matrix"]]
        n = self.get_order(task)
        report = tw.verify_mu_diagram(X, A, n, rng)
        notes = [report.note] if report.note else []
        if "as" in task.args:
            self.bind(task, [report.gauged])
        if "expect-difference" in task.args:
            expected = self.get_prolonged(task.args["expect-difference"])
            items = self.compare_prolonged(report.difference, expected, rng,
                                           "difference.")
            notes.append(f"diagram commutes: {report.commutes}")
            verdict = _verdict_from_items(items)
        elif "expect-z" in task.args:
            expected = self.get_prolonged(task.args["expect-z"])
            items = self.compare_prolonged(report.gauged, expected, rng, "Z.")
            items.extend(self.report_to_items(report.report))
            verdict = _verdict_from_items(items)
        else:
            items = self.report_to_items(report.report)
            verdict = report.report.verdict
        return TaskResult(task.id, task.kind, verdict, items=items,
                          notes=notes)

    def task_check_sigma_diagram(self, task, rng):
        fields = [self.problem.fields[n] for n in self.names(task, "fields")]
        A = self.problem.matrices[task.args["matrix"]]
        n = self.get_order(task)
        report = tw.verify_sigma_diagram(fields, A, n, rng)
        items = self.report_to_items(report.report)
        notes = []
        for key, got_list in (("expect-w", report.gauged_fields),
                              ("expect-z", report.gauged)):
            names = self.names(task, key)
            if not names:
                continue
            for name, got in zip(names, got_list):
                if key == "expect-w":
                    items.extend(self.compare_field(
                        got, self.problem.fields[name], rng, f"{name}."))
                else:
                    items.extend(self.compare_prolonged(
                        got, self.get_prolonged(name), rng, f"{name}."))
        if "as" in task.args:
            self.bind(task, report.gauged)
        verdict = _verdict_from_items(items)
        return TaskResult(task.id, task.kind, verdict, items=items,
                          notes=notes)

    def task_check_symmetry(self, task, rng):
        P = self.get_prolonged(task.args["prolonged"])
        system = self.problem.equations[task.args["equation"]]
        report = sc.is_symmetry(P, system, rng)
        return TaskResult(task.id, task.kind, report.verdict,
                          items=self.report_to_items(report))

    def task_check_solution(self, task, rng):
        f = self.problem.sections[task.args["section"]]
        system = self.problem.equations[task.args["equation"]]
        report = sc.is_solution(f, system, rng)
        return TaskResult(task.id, task.kind, report.verdict,
                          items=self.report_to_items(report))

    def task_check_invariant_section(self, task, rng):
        X = self.problem.fields[task.args["field"]]
        f = self.problem.sections[task.args["section"]]
        report = sc.is_invariant_section(X, f, rng)
        return TaskResult(task.id, task.kind, report.verdict,
                          items=self.report_to_items(report))

    def task_compare_on_sections(self, task, rng):
        P1 = self.get_prolonged(task.args["p1"])
        P2 = self.get_prolonged(task.args["p2"])
        f = self.problem.sections[task.args["section"]]
        report = sc.compare_on_invariant_sections(P1, P2, f, rng)
        result = TaskResult(task.id, task.kind, report.verdict,
                            items=self.report_to_items(report))
        vanish = report.provenance.get("fields_vanish_on_section")
        if vanish is not None:
            result.provenance["fields_vanish_on_section"] = vanish
        if "reason" in report.provenance:
            result.notes.append(report.provenance["reason"])
        return result

    def task_check_chain(self, task, rng):
        chain = self.problem.chains[task.args["chain"]]
        P = self.get_prolonged(task.args["prolonged"])
        report = inv.verify_chain(chain, P, rng)
        holds = report.provenance["ibdp_holds"]
        result = TaskResult(task.id, task.kind, report.verdict,
                            items=self.report_to_items(report))
        result.provenance["ibdp_holds"] = holds
        result.provenance["ibdp_diagnostic"] = report.provenance[
            "ibdp_diagnostic"]
        expected = task.args.get("expect-ibdp")
        if expected:
            want = expected == "holds"
            if report.verdict == "proven" and holds != want:
                result.verdict = "disproven"
            result.notes.append(
                f"differentiation diagnostic {'holds' if holds else 'fails'}"
                f", expected it to {'hold' if want else 'fail'}")
        return result

    def task_ibdp_extend(self, task, rng):
        space = self.problem.space
        zeta = self.problem.exprs[task.args["zeta"]]
        eta = self.problem.exprs[task.args["eta"]]
        out = inv.ibdp_next(zeta, eta, space, rng)
        result = TaskResult(task.id, task.kind, "proven")
        result.notes.append(f"next invariant candidate: {ex.render(out)}")
        if "prolonged" in task.args:
            P = self.get_prolonged(task.args["prolonged"])
            verdict = inv.is_invariant(out, P, rng)
            result.items.append(("invariance of the candidate",
                                 ex.render(P.apply(out)), verdict))
            result.verdict = _verdict_from_items(result.items)
        return result

    def task_prolong_combination(self, task, rng):
        coeffs = [self.problem.exprs[n] for n in self.names(task, "coeffs")]
        fields = [self.problem.fields[n] for n in self.names(task, "fields")]
        n = self.get_order(task)
        Zn, defect, prolongs = prolong_combination(coeffs, fields, n)
        mix = prolongs[0].scaled(coeffs[0])
        for f, P in zip(coeffs[1:], prolongs[1:]):
            mix = mix.plus(P.scaled(f))
        residual = Zn.minus(mix).minus(defect)
        items = [(label, ex.render(e), ex.is_zero(e, rng))
                 for label, e in residual.coefficients_with_labels()]
        return TaskResult(task.id, task.kind, _verdict_from_items(items),
                          items=items)

    def task_bracket_defect(self, task, rng):
        fields = [self.problem.fields[n] for n in self.names(task, "fields")]
        n = self.get_order(task)
        out = bracket_defect(fields, n, rng)
        items = []
        for (al, be), bd in sorted(out.items()):
            d = bd.gamma_direct.minus(bd.gamma_recursion)
            for label, e in d.coefficients_with_labels():
                items.append((f"pair({al + 1},{be + 1}).{label}",
                              ex.render(e), ex.is_zero(e, rng)))
        return TaskResult(task.id, task.kind, _verdict_from_items(items),
                          items=items)

    def task_check_involution(self, task, rng):
        fields = [self.problem.fields[n] for n in self.names(task, "fields")]
        res = involution_coefficients(fields, rng)
        result = TaskResult(task.id, task.kind, "proven")
        for (al, be), fs in sorted(res.coefficients.items()):
            result.notes.append(
                f"F({al + 1},{be + 1}) = ({', '.join(ex.render(f) for f in fs)})")
        if res.rank_deficient:
            result.notes.append("the set is rank deficient; free "
                                "coefficients were set to zero")
        return result

    def task_check_lie_algebra(self, task, rng):
        fields = [self.problem.fields[n] for n in self.names(task, "fields")]
        ok, payload = is_lie_algebra(fields, rng)
        if ok:
            result = TaskResult(task.id, task.kind, "proven")
            for (al, be), cs in sorted(payload.items()):
                result.notes.append(
                    f"c({al + 1},{be + 1}) = "
                    f"({', '.join(ex.render(c) for c in cs)})")
        else:
            result = TaskResult(task.id, task.kind, "disproven")
            result.notes.append(
                f"non-constant involution coefficient {ex.render(payload)}")
        return result

    def task_same_distribution(self, task, rng):
        left = [self.get_prolonged(n) for n in self.names(task, "left")]
        right = [self.get_prolonged(n) for n in self.names(task, "right")]
        report = sc.same_distribution(left, right, rng)
        result = TaskResult(task.id, task.kind, report.verdict)
        prov = report.provenance
        result.provenance.update({
            "rank_left": prov["rank_left"], "rank_right": prov["rank_right"],
            "rank_union": prov["rank_union"], "certified": prov["certified"]})
        result.notes.append(
            f"ranks: left {prov['rank_left']}, right {prov['rank_right']}, "
            f"union {prov['rank_union']} ({prov['certified']})")
        return result


# ----------------------------------------------------------------------
# reports
# ----------------------------------------------------------------------

def report_text(path, results, show_timings=False):
    lines = [f"== {path}"]
    passed = 0
    for r in results:
        bits = [f"{r.id}: {r.verdict.upper()}", f"[{r.kind}]"]
        if r.raw_verdict:
            bits.append(f"raw={r.raw_verdict}")
        bad = [i for i in r.items if i[2] != ex.PROVEN_ZERO]
        if r.items:
            bits.append(f"residuals={len(r.items) - len(bad)}/{len(r.items)} zero")
        for label, rendered, verdict in bad[:4]:
            bits.append(f"| {label}: {rendered} ({verdict})")
        if show_timings:
            bits.append(f"({r.wall_time * 1000:.0f} ms)")
        lines.append("  " + " ".join(bits))
        for note in r.notes:
            lines.append(f"    note: {note}")
        if r.verdict == "proven":
            passed += 1
    lines.append(f"  passed {passed}/{len(results)}")
    return "\n".join(lines) + "\n"


def report_structured(runs, seed):
    files = []
    for path, results in runs:
        tasks = []
        for r in results:
            tasks.append({
                "id": r.id,
                "kind": r.kind,
                "verdict": r.verdict,
                "raw_verdict": r.raw_verdict,
                "items": [{"label": label, "residual": rendered,
                           "verdict": verdict}
                          for label, rendered, verdict in r.items],
                "notes": r.notes,
                "provenance": r.provenance,
            })
        files.append({"file": path, "tasks": tasks})
    doc = {"format": "jetsym-report", "version": 1, "seed": seed,
           "files": files}
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def parse_structured(text):
    """Round-trip helper: verdicts from a structured report."""
    doc = json.loads(text)
    out = {}
    for f in doc["files"]:
        for t in f["tasks"]:
            if t["verdict"] not in VERDICTS:
                raise ValueError(f"bad verdict {t['verdict']!r}")
            out[(f["file"], t["id"])] = t["verdict"]
    return out


def run_file(path, seed=1, max_order=None, text=None):
    if text is None:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    problem = parse_problem(text, path)
    runner = _Runner(problem, seed, max_order)
    return problem, runner.run()


def main(argv=None):
    ap = argparse.ArgumentParser(
        prog="jetsym",
        description="Batch verification of prolongation and symmetry tasks")
    ap.add_argument("files", nargs="+", help="problem files to run")
    ap.add_argument("--format", choices=("text", "structured"),
                    default="text")
    ap.add_argument("--seed", type=int, default=1,
                    help="seed for randomized probing (default 1)")
    ap.add_argument("--allow-probable", action="store_true",
                    help="treat probable verdicts as passing")
    ap.add_argument("--max-order", type=int, default=None,
                    help="refuse tasks above this prolongation order")
    ap.add_argument("--list-tasks", action="store_true",
                    help="list tasks without running them")
    ap.add_argument("--timings", action="store_true",
                    help="show wall times in the text report")
    args = ap.parse_args(argv)

    runs = []
    try:
        if args.list_tasks:
            for path in args.files:
                with open(path, "r", encoding="utf-8") as fh:
                    problem = parse_problem(fh.read(), path)
                print(f"== {path}")
                for t in problem.tasks:
                    print(f"  {t.id} {t.kind}")
            return 0
        for path in args.files:
            problem, results = run_file(path, args.seed, args.max_order)
            runs.append((path, results))
    except (ProblemFileError, ParseError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2

    if args.format == "structured":
        sys.stdout.write(report_structured(runs, args.seed))
    else:
        for path, results in runs:
            sys.stdout.write(report_text(path, results, args.timings))

    ok_verdicts = {"proven"}
    if args.allow_probable:
        ok_verdicts.add("probable")
    for _, results in runs:
        for r in results:
            if r.verdict not in ok_verdicts:
                return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
