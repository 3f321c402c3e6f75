"""Problem files and the built-in example corpus.

A problem file is line oriented::

    # comment
    vars x y z
    minimize x^2 + y^2 + z^2
    eq  (x+z+1)*(y+z) - (x+y)^2
    geq 1 - x^2 - y^2 - z^2
"""

from __future__ import annotations

from pathlib import Path

from .constraints import ProblemInstance
from .polycore import VariableSpace, parse_polynomial


class ProblemFormatError(ValueError):
    pass


def parse_problem(text: str, name: str = "") -> ProblemInstance:
    names: list[str] | None = None
    objective = None
    eqs: list[str] = []
    geqs: list[str] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition(" ")
        rest = rest.strip()
        if head == "vars":
            if names is not None:
                raise ProblemFormatError(f"line {lineno}: duplicate 'vars'")
            names = rest.replace(",", " ").split()
            if not names:
                raise ProblemFormatError(f"line {lineno}: no variables declared")
        elif head == "minimize":
            if objective is not None:
                raise ProblemFormatError(f"line {lineno}: duplicate 'minimize'")
            objective = rest
        elif head == "eq":
            eqs.append(rest)
        elif head == "geq":
            geqs.append(rest)
        elif head == "name":
            name = rest
        else:
            raise ProblemFormatError(f"line {lineno}: unknown keyword {head!r}")
    if names is None:
        raise ProblemFormatError("missing 'vars' line")
    if objective is None:
        raise ProblemFormatError("missing 'minimize' line")
    space = VariableSpace.of(names)
    parse = lambda s: parse_polynomial(s, names)  # noqa: E731
    return ProblemInstance(space, parse(objective), tuple(map(parse, eqs)),
                           tuple(map(parse, geqs)), name)


def load_problem(path: str | Path) -> ProblemInstance:
    path = Path(path)
    return parse_problem(path.read_text(), name=path.stem)


def format_problem(p: ProblemInstance) -> str:
    names = p.names
    lines = [f"vars {' '.join(names)}", f"minimize {p.objective.to_str(names)}"]
    lines += [f"eq {g.to_str(names)}" for g in p.equalities]
    lines += [f"geq {g.to_str(names)}" for g in p.inequalities]
    return "\n".join(lines) + "\n"


EXAMPLES: dict[str, str] = {
    "ill-posed": """
        vars x
        minimize x
        geq x^3
    """,
    "twisted-cubic": """
        vars x y z
        minimize x^2 + y^2 + z^2
        eq (x+z+1)*(y+z) - (x+y)^2
        eq (x+z+1)^2 - (y+z)*(x+y)
        eq (x+z+1)*(x+y) - (y+z)^2
    """,
    "motzkin": """
        vars x y
        minimize 1 + x^4*y^2 + x^2*y^4 - 3*x^2*y^2
    """,
    "robinson": """
        vars x y
        minimize 1 + x^6 - x^4 - x^2 + y^6 - y^4 - y^2 - x^4*y^2 - x^2*y^4 + 3*x^2*y^2
    """,
    # the perturbation is sextic: that is what the listed minor equations encode
    "perturbed-motzkin-ball": """
        vars x y z
        minimize x^4*y^2 + x^2*y^4 - 3*x^2*y^2*z^2 + z^6 + 0.005*(x^6 + y^6 + z^6)
        geq 1 - x^2 - y^2 - z^2
    """,
    "motzkin-ball": """
        vars x y z
        minimize x^4*y^2 + x^2*y^4 - 3*x^2*y^2*z^2 + z^6
        geq 1 - x^2 - y^2 - z^2
    """,
    "torus": """
        vars x y z
        minimize z
        eq 9 - 10*x^2 - 10*y^2 + 6*z^2 + x^4 + 2*x^2*y^2 + 2*x^2*z^2 + 2*y^2*z^2 + y^4 + z^4
    """,
}


def example(name: str) -> ProblemInstance:
    try:
        text = EXAMPLES[name]
    except KeyError:
        raise KeyError(f"unknown example {name!r}; known: {', '.join(EXAMPLES)}") from None
    return parse_problem(text, name=name)
