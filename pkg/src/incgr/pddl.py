"""Reader and writer for STRIPS PDDL extended with possible-literal blocks.

Inside an ``:action`` body three extra blocks are accepted next to
``:precondition`` and ``:effect``::

    :poss-precondition (and (r))
    :poss-effect-add   (and (r))
    :poss-effect-del   (and (p))

Each holds a conjunction of positive atoms. Removing the three blocks leaves
a plain STRIPS action. Identifiers are case-insensitive and lowercased.
"""

from __future__ import annotations

from pathlib import Path
from typing import NamedTuple

from incgr.model import (
    ROOT_TYPE,
    Atom,
    Fact,
    IncompleteDomain,
    IncompleteOperator,
    PredicateSchema,
    RecognitionProblem,
)


class ParseError(ValueError):
    pass


class PDDLSyntaxError(ParseError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"line {line}, column {col}: {message}")
        self.line = line
        self.col = col


class PDDLSemanticError(ParseError):
    pass


# --------------------------------------------------------------------------
# s-expressions


class Sym(str):
    line: int = 0
    col: int = 0


class SList(list):
    line: int = 0
    col: int = 0


def _sym(text: str, line: int, col: int) -> Sym:
    s = Sym(text.lower())
    s.line, s.col = line, col
    return s


def tokenize(text: str):
    """Yield ``(token, line, col)`` triples; ``;`` starts a comment."""
    line, line_start = 1, 0
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            line_start = i + 1
            i += 1
        elif ch.isspace():
            i += 1
        elif ch == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif ch in "()":
            yield ch, line, i - line_start + 1
            i += 1
        else:
            start = i
            while i < n and not text[i].isspace() and text[i] not in "();":
                i += 1
            yield text[start:i], line, start - line_start + 1


def parse_sexprs(text: str) -> list:
    stack: list[SList] = []
    top: list = []
    for tok, line, col in tokenize(text):
        if tok == "(":
            lst = SList()
            lst.line, lst.col = line, col
            (stack[-1] if stack else top).append(lst)
            stack.append(lst)
        elif tok == ")":
            if not stack:
                raise PDDLSyntaxError("unbalanced ')'", line, col)
            stack.pop()
        else:
            (stack[-1] if stack else top).append(_sym(tok, line, col))
    if stack:
        raise PDDLSyntaxError("unclosed '('", stack[-1].line, stack[-1].col)
    return top


def _pos(node) -> tuple[int, int]:
    return getattr(node, "line", 0), getattr(node, "col", 0)


def _expect_list(node, what: str) -> SList:
    if not isinstance(node, list):
        raise PDDLSyntaxError(f"expected {what}, got {node!r}", *_pos(node))
    return node


def _expect_sym(node, what: str) -> Sym:
    if isinstance(node, list):
        raise PDDLSyntaxError(f"expected {what}, got a list", *_pos(node))
    return node


def parse_typed_list(items, *, variables: bool) -> list[tuple[str, str]]:
    """Parse ``a b - t c`` into ``[(a, t), (b, t), (c, object)]``."""
    out: list[tuple[str, str]] = []
    pending: list[Sym] = []
    i = 0
    while i < len(items):
        item = _expect_sym(items[i], "name")
        if item == "-":
            if i + 1 >= len(items) or not pending:
                raise PDDLSyntaxError("dangling '-' in typed list", *_pos(item))
            type_node = items[i + 1]
            if isinstance(type_node, list):
                raise PDDLSyntaxError("'either' types are not supported", *_pos(type_node))
            out.extend((p, str(type_node)) for p in pending)
            pending = []
            i += 2
            continue
        if variables and not item.startswith("?"):
            raise PDDLSyntaxError(f"expected a variable, got {item!r}", *_pos(item))
        if not variables and item.startswith("?"):
            raise PDDLSyntaxError(f"unexpected variable {item!r}", *_pos(item))
        pending.append(item)
        i += 1
    out.extend((p, ROOT_TYPE) for p in pending)
    return [(str(a), str(b)) for a, b in out]


def _atom(node) -> Atom:
    lst = _expect_list(node, "an atom")
    if not lst:
        raise PDDLSyntaxError("empty atom", *_pos(lst))
    head = _expect_sym(lst[0], "predicate name")
    if head == "not":
        raise PDDLSemanticError(f"line {lst.line}: negative literals are not supported in STRIPS")
    if head in ("when", "forall", "exists", "or", "imply", "=", "increase"):
        raise PDDLSemanticError(f"line {lst.line}: '{head}' is outside the STRIPS fragment")
    args = tuple(str(_expect_sym(a, "argument")) for a in lst[1:])
    return Atom(str(head), args)


def _conjunction(node, *, allow_negation: bool = False) -> tuple[list[Atom], list[Atom]]:
    """Return (positive, negative) atoms of a conjunction."""
    lst = _expect_list(node, "a formula")
    pos: list[Atom] = []
    neg: list[Atom] = []
    if not lst:
        return pos, neg
    if isinstance(lst[0], Sym) and lst[0] == "and":
        parts = lst[1:]
    else:
        parts = [lst]
    for part in parts:
        part = _expect_list(part, "an atom")
        if part and isinstance(part[0], Sym) and part[0] == "not":
            if not allow_negation:
                raise PDDLSemanticError(
                    f"line {part.line}: negative preconditions are not supported"
                )
            if len(part) != 2:
                raise PDDLSyntaxError("malformed 'not'", *_pos(part))
            neg.append(_atom(part[1]))
        elif part and isinstance(part[0], Sym) and part[0] == "and":
            p, n = _conjunction(part, allow_negation=allow_negation)
            pos.extend(p)
            neg.extend(n)
        else:
            pos.append(_atom(part))
    return pos, neg


# --------------------------------------------------------------------------
# domain

_DOMAIN_SECTIONS = {":requirements", ":types", ":constants", ":predicates", ":action"}
_SUPPORTED_REQUIREMENTS = {":strips", ":typing"}
_ACTION_KEYS = {
    ":parameters",
    ":precondition",
    ":effect",
    ":poss-precondition",
    ":poss-effect-add",
    ":poss-effect-del",
}


def _define_header(tree, kind: str, text_kind: str) -> tuple[SList, str]:
    if len(tree) != 1:
        raise PDDLSyntaxError(f"expected a single (define ...) form", 1, 1)
    root = _expect_list(tree[0], "(define ...)")
    if len(root) < 2 or root[0] != "define":
        raise PDDLSyntaxError("expected (define ...)", *_pos(root))
    header = _expect_list(root[1], f"({kind} name)")
    if len(header) != 2 or header[0] != kind:
        raise PDDLSyntaxError(f"expected ({kind} <name>) in {text_kind}", *_pos(header))
    return root, str(header[1])


def parse_domain(text: str) -> IncompleteDomain:
    root, name = _define_header(parse_sexprs(text), "domain", "domain file")
    types: dict[str, str] = {}
    constants: dict[str, str] = {}
    predicates: list[PredicateSchema] = []
    raw_actions: list[SList] = []

    for section in root[2:]:
        section = _expect_list(section, "a domain section")
        key = _expect_sym(section[0], "section keyword") if section else None
        if key not in _DOMAIN_SECTIONS:
            raise PDDLSyntaxError(f"unknown domain section {key!r}", *_pos(section))
        if key == ":requirements":
            for req in section[1:]:
                if req not in _SUPPORTED_REQUIREMENTS:
                    raise PDDLSemanticError(f"unsupported requirement {req}")
        elif key == ":types":
            for child, parent in parse_typed_list(section[1:], variables=False):
                if child == ROOT_TYPE:
                    continue
                types[child] = parent
        elif key == ":constants":
            constants.update(parse_typed_list(section[1:], variables=False))
        elif key == ":predicates":
            for p in section[1:]:
                p = _expect_list(p, "a predicate declaration")
                pname = str(_expect_sym(p[0], "predicate name"))
                params = tuple(parse_typed_list(p[1:], variables=True))
                if any(s.name == pname for s in predicates):
                    raise PDDLSemanticError(f"predicate {pname} declared twice")
                predicates.append(PredicateSchema(pname, params))
        else:
            raw_actions.append(section)

    known_types = {ROOT_TYPE} | set(types) | set(types.values())
    for t in set(types.values()) - set(types) - {ROOT_TYPE}:
        types[t] = ROOT_TYPE
    for _, t in constants.items():
        if t not in known_types:
            raise PDDLSemanticError(f"undeclared type {t}")

    domain = IncompleteDomain(name, types, tuple(predicates), (), constants)
    operators = []
    for raw in raw_actions:
        op = _parse_action(raw, domain)
        if any(o.name == op.name for o in operators):
            raise PDDLSemanticError(f"duplicate operator {op.name}")
        operators.append(op)
    return IncompleteDomain(name, types, tuple(predicates), tuple(operators), constants)


def _parse_action(node: SList, domain: IncompleteDomain) -> IncompleteOperator:
    if len(node) < 2:
        raise PDDLSyntaxError("action without a name", *_pos(node))
    name = str(_expect_sym(node[1], "action name"))
    body = node[2:]
    if len(body) % 2:
        raise PDDLSyntaxError(f"action {name}: keyword without value", *_pos(node))
    fields: dict[str, object] = {}
    for key, value in zip(body[::2], body[1::2]):
        key = _expect_sym(key, "action keyword")
        if key not in _ACTION_KEYS:
            raise PDDLSyntaxError(f"action {name}: unknown keyword {key}", *_pos(key))
        if key in fields:
            raise PDDLSyntaxError(f"action {name}: repeated {key}", *_pos(key))
        fields[key] = value

    params = tuple(parse_typed_list(_expect_list(fields.get(":parameters", SList()), "parameters"),
                                    variables=True))
    pre, _ = _conjunction(fields.get(":precondition", SList()))
    add, dels = _conjunction(fields.get(":effect", SList()), allow_negation=True)
    poss_pre, _ = _conjunction(fields.get(":poss-precondition", SList()))
    poss_add, _ = _conjunction(fields.get(":poss-effect-add", SList()))
    poss_del, _ = _conjunction(fields.get(":poss-effect-del", SList()))

    op = IncompleteOperator(
        name,
        params,
        frozenset(pre),
        frozenset(poss_pre),
        frozenset(add),
        frozenset(dels),
        frozenset(poss_add),
        frozenset(poss_del),
    )
    ptypes = dict(params)
    for t in ptypes.values():
        if t != ROOT_TYPE and t not in domain.types:
            raise PDDLSemanticError(f"action {name}: undeclared type {t}")
    for lits in op.literal_sets().values():
        for atom in lits:
            _check_atom(atom, domain, ptypes, f"action {name}")
    problems = op.check()
    if problems:
        raise PDDLSemanticError("; ".join(problems))
    return op


def _check_atom(atom: Atom, domain: IncompleteDomain, scope: dict[str, str], where: str):
    schema = domain.predicate(atom.name)
    if schema is None:
        raise PDDLSemanticError(f"{where}: undeclared predicate {atom.name}")
    if len(atom.args) != schema.arity:
        raise PDDLSemanticError(
            f"{where}: {atom} has arity {len(atom.args)}, expected {schema.arity}"
        )
    for arg, (_, ptype) in zip(atom.args, schema.parameters):
        if arg.startswith("?"):
            if arg not in scope:
                raise PDDLSemanticError(f"{where}: {atom} uses undeclared variable {arg}")
            atype = scope[arg]
        else:
            atype = scope.get(arg, domain.constants.get(arg))
            if atype is None:
                raise PDDLSemanticError(f"{where}: unknown object {arg} in {atom}")
        if not domain.is_subtype(atype, ptype):
            raise PDDLSemanticError(f"{where}: {arg} of type {atype} does not fit {ptype} in {atom}")


def _fmt_typed(items) -> str:
    if all(t == ROOT_TYPE for _, t in items):
        return " ".join(v for v, _ in items)
    return " ".join(f"{v} - {t}" for v, t in items)


def _fmt_conj(atoms, negate: frozenset = frozenset()) -> str:
    parts = [str(a) for a in sorted(atoms)] + [f"(not {a})" for a in sorted(negate)]
    if not parts:
        return "()"
    if len(parts) == 1:
        return parts[0]
    return "(and " + " ".join(parts) + ")"


def serialize_domain(domain: IncompleteDomain, *, annotations: bool = True) -> str:
    """Render a domain as text; ``annotations=False`` drops the possible blocks."""
    lines = [f"(define (domain {domain.name})"]
    reqs = ":strips :typing" if domain.types or _uses_types(domain) else ":strips"
    lines.append(f"  (:requirements {reqs})")
    if domain.types:
        by_parent: dict[str, list[str]] = {}
        for child, parent in sorted(domain.types.items()):
            by_parent.setdefault(parent, []).append(child)
        parts = [f"{' '.join(ch)} - {p}" for p, ch in sorted(by_parent.items())]
        lines.append(f"  (:types {' '.join(parts)})")
    if domain.constants:
        lines.append(f"  (:constants {_fmt_typed(sorted(domain.constants.items()))})")
    preds = " ".join(
        f"({p.name}{' ' if p.parameters else ''}{_fmt_typed(p.parameters)})"
        for p in domain.predicates
    )
    lines.append(f"  (:predicates {preds})")
    for op in domain.operators:
        lines.append(f"  (:action {op.name}")
        lines.append(f"    :parameters ({_fmt_typed(op.parameters)})")
        lines.append(f"    :precondition {_fmt_conj(op.pre)}")
        lines.append(f"    :effect {_fmt_conj(op.add, op.dels)}")
        if annotations:
            if op.poss_pre:
                lines.append(f"    :poss-precondition {_fmt_conj(op.poss_pre)}")
            if op.poss_add:
                lines.append(f"    :poss-effect-add {_fmt_conj(op.poss_add)}")
            if op.poss_del:
                lines.append(f"    :poss-effect-del {_fmt_conj(op.poss_del)}")
        lines.append("  )")
    lines.append(")")
    return "\n".join(lines) + "\n"


def _uses_types(domain: IncompleteDomain) -> bool:
    for p in domain.predicates:
        if any(t != ROOT_TYPE for _, t in p.parameters):
            return True
    return any(t != ROOT_TYPE for op in domain.operators for _, t in op.parameters)


# --------------------------------------------------------------------------
# problems, hypotheses, observations


class ProblemData(NamedTuple):
    objects: dict[str, str]
    init: frozenset[Fact]
    hypotheses: tuple[frozenset[Fact], ...]
    hidden_goal: int | None


def _ground_check(fact: Fact, domain: IncompleteDomain, objects: dict[str, str], where: str):
    for arg in fact.args:
        if arg.startswith("?"):
            raise PDDLSemanticError(f"{where}: variable {arg} in ground atom {fact}")
        if arg not in objects:
            raise PDDLSemanticError(f"{where}: undeclared object {arg} in {fact}")
    _check_atom(fact, domain, objects, where)


def parse_goal_list(text: str, domain: IncompleteDomain, objects: dict[str, str]) -> list[frozenset[Fact]]:
    """One goal per non-empty line: ``(and (on a b) (on b c))`` or ``(on a b), (on b c)``."""
    goals = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split(";", 1)[0].replace(",", " ").strip()
        if not line:
            continue
        forms = parse_sexprs(line)
        atoms: list[Atom] = []
        for form in forms:
            pos, _ = _conjunction(form)
            atoms.extend(pos)
        if not atoms:
            raise PDDLSemanticError(f"line {lineno}: empty goal")
        for a in atoms:
            _ground_check(a, domain, objects, f"goal line {lineno}")
        goals.append(frozenset(atoms))
    return goals


def parse_problem(
    text: str,
    domain: IncompleteDomain,
    hypotheses: str | None = None,
    hidden_goal: str | None = None,
) -> ProblemData:
    """Parse a problem file plus optional hypotheses / hidden-goal texts.

    Without a hypotheses text the problem's own ``:goal`` is the single
    candidate.
    """
    root, _ = _define_header(parse_sexprs(text), "problem", "problem file")
    objects = dict(domain.constants)
    init: list[Fact] = []
    goal: list[Fact] | None = None
    for section in root[2:]:
        section = _expect_list(section, "a problem section")
        key = _expect_sym(section[0], "section keyword") if section else None
        if key == ":domain":
            if len(section) != 2 or section[1] != domain.name:
                raise PDDLSemanticError(f"problem refers to domain {section[1:]}, not {domain.name}")
        elif key == ":objects":
            for obj, t in parse_typed_list(section[1:], variables=False):
                if t != ROOT_TYPE and t not in domain.types:
                    raise PDDLSemanticError(f"object {obj}: undeclared type {t}")
                objects[obj] = t
        elif key == ":init":
            init.extend(_atom(a) for a in section[1:])
        elif key == ":goal":
            if len(section) != 2:
                raise PDDLSyntaxError("malformed :goal", *_pos(section))
            goal, _ = _conjunction(section[1])
        elif key == ":requirements":
            continue
        else:
            raise PDDLSyntaxError(f"unknown problem section {key!r}", *_pos(section))
    for f in init:
        _ground_check(f, domain, objects, "init")

    if hypotheses is not None:
        hyps = parse_goal_list(hypotheses, domain, objects)
    elif goal:
        for f in goal:
            _ground_check(f, domain, objects, "goal")
        hyps = [frozenset(goal)]
    else:
        hyps = []
    if not hyps:
        raise PDDLSemanticError("recognition needs at least one candidate goal")

    hidden = None
    if hidden_goal is not None:
        real = parse_goal_list(hidden_goal, domain, objects)
        if len(real) != 1:
            raise PDDLSemanticError("the hidden-goal text must hold exactly one goal")
        if real[0] not in hyps:
            raise PDDLSemanticError("hidden goal is not among the hypotheses")
        hidden = hyps.index(real[0])
    return ProblemData(objects, frozenset(init), tuple(hyps), hidden)


def parse_observation_signatures(text: str) -> list[Atom]:
    """Action signatures, one per line; ``;`` lines are comments."""
    sigs = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split(";", 1)[0].strip()
        if not line:
            continue
        forms = parse_sexprs(line)
        if len(forms) != 1 or not isinstance(forms[0], list) or not forms[0]:
            raise PDDLSyntaxError("expected one action signature per line", lineno, 1)
        form = forms[0]
        sigs.append(Atom(str(form[0]), tuple(str(_expect_sym(a, "object")) for a in form[1:])))
    return sigs


def parse_observations(text: str, task) -> list:
    """Resolve observed signatures against the grounded task's actions."""
    out = []
    for sig in parse_observation_signatures(text):
        out.append(task.resolve(sig))
    return out


def load_problem(
    domain_path,
    problem_path,
    hypotheses_path=None,
    observations_path=None,
    hidden_goal_path=None,
) -> RecognitionProblem:
    """Read the file set of one recognition problem from disk."""
    domain = parse_domain(Path(domain_path).read_text(encoding="utf-8"))
    hyps = Path(hypotheses_path).read_text(encoding="utf-8") if hypotheses_path else None
    real = Path(hidden_goal_path).read_text(encoding="utf-8") if hidden_goal_path else None
    data = parse_problem(Path(problem_path).read_text(encoding="utf-8"), domain, hyps, real)
    obs = ()
    if observations_path:
        obs = tuple(parse_observation_signatures(Path(observations_path).read_text(encoding="utf-8")))
    return RecognitionProblem(domain, data.objects, data.init, data.hypotheses, obs, data.hidden_goal)
