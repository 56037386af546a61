"""Typed lambda-calculus over turtle graphics.

Programs are closed, recursion-free terms of type ``turtle -> turtle``.
Running one transforms an initial turtle pose into a final pose while
emitting line strokes.  The surface syntax is fully parenthesised and
lowercase, with de Bruijn variables written ``$0``, ``$1``::

    (loop 4 (lam (rtfwint 4 2)))     draw a square of side 2
    (penup (lam (rtfwint 1 3)))      move 3 east without drawing

Base primitives:

``rtfwint k m``
    rotate counterclockwise by 360/k degrees (negative k turns clockwise,
    k = 0 keeps the heading), then move m units forward, drawing a stroke
    iff the pen is down and m is nonzero.
``penup body`` / ``embed body``
    run ``body`` (a one-argument lambda, applied to 1) with the pen lifted,
    respectively restoring the pose afterwards while keeping strokes.
``loop n body``
    run ``body`` n times, passing the 1-based iteration index.
``seq a b``
    run ``a`` then ``b``.

Integer constants range over -9..9; there is no other arithmetic and no
recursion, so every program terminates.  A library adds invented
primitives ``f0, f1, ...`` whose bodies are closed lambda terms over the
same grammar, and assigns every production a weight in bits; the cost of
a term is the sum of the weights of the choices in its derivation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

MAX_PRIM_STEPS = 10000

DEFAULT_CONSTANTS = tuple(range(-9, 10))


class DslError(Exception):
    pass


class DslSyntaxError(DslError):
    def __init__(self, msg, line, col):
        super().__init__("%s (line %d, col %d)" % (msg, line, col))
        self.line = line
        self.col = col


class DslTypeError(DslError):
    def __init__(self, msg, path=()):
        super().__init__("%s at path %s" % (msg, list(path)))
        self.path = tuple(path)


class DslEvalError(DslError):
    pass


class StepBudgetError(DslEvalError):
    pass


class DslCostError(DslError):
    """Raised when a term has no derivation under a library's grammar."""


# ==================== types ====================


@dataclass(frozen=True)
class TCon:
    name: str

    def __repr__(self):
        return self.name


@dataclass(frozen=True)
class TArrow:
    arg: "Type"
    res: "Type"

    def __repr__(self):
        a = repr(self.arg)
        if isinstance(self.arg, TArrow):
            a = "(%s)" % a
        return "%s -> %s" % (a, repr(self.res))


Type = "TCon | TArrow"

INT = TCon("int")
TURTLE = TCon("turtle")
ACTION = TArrow(TURTLE, TURTLE)
INT_ACTION = TArrow(INT, ACTION)


def format_type(t) -> str:
    return repr(t)


def parse_type(text: str):
    """Inverse of format_type for the library file."""
    toks = text.replace("(", " ( ").replace(")", " ) ").split()
    pos = 0

    def atom():
        nonlocal pos
        if pos >= len(toks):
            raise DslError("bad type: %r" % text)
        t = toks[pos]
        pos += 1
        if t == "(":
            inner = arrow()
            if pos >= len(toks) or toks[pos] != ")":
                raise DslError("bad type: %r" % text)
            pos += 1
            return inner
        if t == "int":
            return INT
        if t == "turtle":
            return TURTLE
        raise DslError("bad type atom %r in %r" % (t, text))

    def arrow():
        nonlocal pos
        left = atom()
        if pos < len(toks) and toks[pos] == "->":
            pos += 1
            return TArrow(left, arrow())
        return left

    t = arrow()
    if pos != len(toks):
        raise DslError("bad type: %r" % text)
    return t


# ==================== terms ====================


@dataclass(frozen=True)
class Var:
    index: int


@dataclass(frozen=True)
class Abs:
    body: "Term"


@dataclass(frozen=True)
class App:
    fn: "Term"
    arg: "Term"


@dataclass(frozen=True)
class Prim:
    name: str


@dataclass(frozen=True)
class Inv:
    index: int

    @property
    def name(self):
        return "f%d" % self.index


@dataclass(frozen=True)
class IntConst:
    value: int


Term = "Var | Abs | App | Prim | Inv | IntConst"

# name -> type; argument counts follow from the arrows
PRIM_TYPES = {
    "rtfwint": TArrow(INT, TArrow(INT, ACTION)),
    "penup": TArrow(INT_ACTION, ACTION),
    "embed": TArrow(INT_ACTION, ACTION),
    "loop": TArrow(INT, TArrow(INT_ACTION, ACTION)),
    "seq": TArrow(ACTION, TArrow(ACTION, ACTION)),
}

BASE_PRIM_ORDER = ("rtfwint", "penup", "embed", "loop", "seq")


def arg_types(t):
    out = []
    while isinstance(t, TArrow) and t != ACTION:
        out.append(t.arg)
        t = t.res
    return out, t


def spine(term):
    """Flatten nested applications into (head, [args])."""
    args = []
    while isinstance(term, App):
        args.append(term.arg)
        term = term.fn
    args.reverse()
    return term, args


def apply_spine(head, args):
    for a in args:
        head = App(head, a)
    return head


def subterms(term):
    yield term
    if isinstance(term, Abs):
        yield from subterms(term.body)
    elif isinstance(term, App):
        yield from subterms(term.fn)
        yield from subterms(term.arg)


def term_size(term) -> int:
    return sum(1 for _ in subterms(term))


def free_vars(term, depth=0):
    """Indices of free de Bruijn variables, relative to the term root."""
    out = set()
    if isinstance(term, Var):
        if term.index >= depth:
            out.add(term.index - depth)
    elif isinstance(term, Abs):
        out |= free_vars(term.body, depth + 1)
    elif isinstance(term, App):
        out |= free_vars(term.fn, depth)
        out |= free_vars(term.arg, depth)
    return out


def shift(term, d, cutoff=0):
    if isinstance(term, Var):
        return Var(term.index + d) if term.index >= cutoff else term
    if isinstance(term, Abs):
        return Abs(shift(term.body, d, cutoff + 1))
    if isinstance(term, App):
        return App(shift(term.fn, d, cutoff), shift(term.arg, d, cutoff))
    return term


def substitute(term, j, s):
    """Replace Var(j) with s (capture-avoiding)."""
    if isinstance(term, Var):
        if term.index == j:
            return s
        return Var(term.index - 1) if term.index > j else term
    if isinstance(term, Abs):
        return Abs(substitute(term.body, j + 1, shift(s, 1)))
    if isinstance(term, App):
        return App(substitute(term.fn, j, s), substitute(term.arg, j, s))
    return term


def beta_normalize(term):
    if isinstance(term, Abs):
        return Abs(beta_normalize(term.body))
    if isinstance(term, App):
        fn = beta_normalize(term.fn)
        arg = beta_normalize(term.arg)
        if isinstance(fn, Abs):
            return beta_normalize(substitute(fn.body, 0, arg))
        return App(fn, arg)
    return term


def inline_inventions(term, library):
    """Expand every invention call into base primitives."""
    def expand(t):
        if isinstance(t, Inv):
            return expand_body(library.inventions[t.index].body)
        if isinstance(t, Abs):
            return Abs(expand(t.body))
        if isinstance(t, App):
            return App(expand(t.fn), expand(t.arg))
        return t

    def expand_body(b):
        return expand(b)

    return beta_normalize(expand(term))


# ==================== printing ====================


def print_term(term) -> str:
    if isinstance(term, Var):
        return "$%d" % term.index
    if isinstance(term, IntConst):
        return str(term.value)
    if isinstance(term, Prim):
        return term.name
    if isinstance(term, Inv):
        return term.name
    if isinstance(term, Abs):
        return "(lam %s)" % print_term(term.body)
    head, args = spine(term)
    parts = [print_term(head)] + [print_term(a) for a in args]
    return "(%s)" % " ".join(parts)


# ==================== parsing ====================


_SYMBOL_CHARS = set("abcdefghijklmnopqrstuvwxyz0123456789_")


def _tokenize(text):
    toks = []
    line, col = 1, 1
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if c in " \t\r":
            col += 1
            i += 1
            continue
        if c in "()":
            toks.append((c, line, col))
            col += 1
            i += 1
            continue
        if c == "$":
            j = i + 1
            while j < n and text[j].isdigit():
                j += 1
            if j == i + 1:
                raise DslSyntaxError("expected digits after $", line, col)
            toks.append((text[i:j], line, col))
            col += j - i
            i = j
            continue
        if c == "-" or c.isdigit():
            j = i + 1
            while j < n and text[j].isdigit():
                j += 1
            if text[i:j] == "-":
                raise DslSyntaxError("lone '-'", line, col)
            toks.append((text[i:j], line, col))
            col += j - i
            i = j
            continue
        if c in _SYMBOL_CHARS:
            j = i
            while j < n and text[j] in _SYMBOL_CHARS:
                j += 1
            toks.append((text[i:j], line, col))
            col += j - i
            i = j
            continue
        raise DslSyntaxError("unexpected character %r" % c, line, col)
    return toks


def parse(text: str, library=None):
    """Parse surface syntax into a Term.  Inventions resolve as f<k>."""
    toks = _tokenize(text)
    pos = 0

    def peek():
        return toks[pos] if pos < len(toks) else (None, -1, -1)

    def fail(msg, tok):
        raise DslSyntaxError(msg, tok[1], tok[2])

    def parse_one():
        nonlocal pos
        tok = peek()
        if tok[0] is None:
            raise DslSyntaxError("unexpected end of input", 0, 0)
        if tok[0] == ")":
            fail("unexpected ')'", tok)
        if tok[0] == "(":
            pos += 1
            inner = peek()
            if inner[0] == "lam":
                pos += 1
                body = parse_one()
                close = peek()
                if close[0] != ")":
                    fail("expected ')' after lam body", close)
                pos += 1
                return Abs(body)
            items = []
            while peek()[0] not in (")", None):
                items.append(parse_one())
            close = peek()
            if close[0] != ")":
                fail("unclosed '('", close)
            pos += 1
            if not items:
                fail("empty application", tok)
            return apply_spine(items[0], items[1:])
        pos += 1
        return parse_atom(tok)

    def parse_atom(tok):
        s = tok[0]
        if s.startswith("$"):
            return Var(int(s[1:]))
        if s.lstrip("-").isdigit():
            return IntConst(int(s))
        if s in PRIM_TYPES:
            return Prim(s)
        if library is not None and s in library.extra_action_prims:
            return Prim(s)
        if s == "lam":
            fail("lam outside '('", tok)
        if s.startswith("f") and s[1:].isdigit():
            idx = int(s[1:])
            if library is None or idx >= len(library.inventions):
                fail("unknown invention %r" % s, tok)
            return Inv(idx)
        fail("unknown symbol %r" % s, tok)

    term = parse_one()
    if pos != len(toks):
        fail("trailing input", peek())
    return term


# ==================== type inference ====================


class _TMeta:
    __slots__ = ("ref",)

    def __init__(self):
        self.ref = None


def _resolve(t):
    while isinstance(t, _TMeta) and t.ref is not None:
        t = t.ref
    return t


def _unify(a, b, path):
    a = _resolve(a)
    b = _resolve(b)
    if a is b or a == b:
        return
    if isinstance(a, _TMeta):
        a.ref = b
        return
    if isinstance(b, _TMeta):
        b.ref = a
        return
    if isinstance(a, TArrow) and isinstance(b, TArrow):
        _unify(a.arg, b.arg, path)
        _unify(a.res, b.res, path)
        return
    raise DslTypeError("cannot unify %s with %s" % (_show(a), _show(b)), path)


def _show(t):
    t = _resolve(t)
    if isinstance(t, _TMeta):
        return "?"
    if isinstance(t, TArrow):
        return "(%s -> %s)" % (_show(t.arg), _show(t.res))
    return t.name


def _freeze(t, path):
    t = _resolve(t)
    if isinstance(t, _TMeta):
        raise DslTypeError("ambiguous type", path)
    if isinstance(t, TArrow):
        return TArrow(_freeze(t.arg, path), _freeze(t.res, path))
    return t


def infer_type(term, library=None, expected=None):
    """Infer the simple type of a closed term; raises DslTypeError."""

    def walk(t, env, path):
        if isinstance(t, Var):
            if t.index >= len(env):
                raise DslTypeError("unbound variable $%d" % t.index, path)
            return env[t.index]
        if isinstance(t, IntConst):
            return INT
        if isinstance(t, Prim):
            if t.name not in PRIM_TYPES:
                raise DslTypeError("unknown primitive %s" % t.name, path)
            return PRIM_TYPES[t.name]
        if isinstance(t, Inv):
            if library is None or t.index >= len(library.inventions):
                raise DslTypeError("unknown invention f%d" % t.index, path)
            return library.inventions[t.index].type
        if isinstance(t, Abs):
            a = _TMeta()
            r = walk(t.body, [a] + env, path + (0,))
            return TArrow(a, r)
        if isinstance(t, App):
            ft = _resolve(walk(t.fn, env, path + (0,)))
            at = walk(t.arg, env, path + (1,))
            if isinstance(ft, _TMeta):
                res = _TMeta()
                _unify(ft, TArrow(at, res), path)
                return res
            if not isinstance(ft, TArrow):
                raise DslTypeError("applied non-function of type %s" % _show(ft), path + (0,))
            _unify(ft.arg, at, path + (1,))
            return ft.res
        raise DslTypeError("bad term node %r" % (t,), path)

    got = walk(term, [], ())
    if expected is not None:
        _unify(got, expected, ())
    return _freeze(got, ())


def typecheck_program(term, library=None):
    """Require type turtle -> turtle."""
    return infer_type(term, library, ACTION)


# ==================== library ====================


@dataclass(frozen=True)
class Invention:
    name: str
    arity: int
    body: "Term"  # arity leading Abs wrapping an action-typed body

    @property
    def type(self):
        t = ACTION
        for _ in range(self.arity):
            t = TArrow(INT, t)
        return t


def _prod_sort_key(key, library):
    """Order productions the way their prints compare lexicographically."""
    kind = key[0]
    if kind == "prim":
        return "(" + key[1] + " "
    if kind == "inv":
        return "(f%d " % key[1]
    if kind == "const":
        return str(key[1])
    return "$"  # variables print as $<i>


@dataclass
class Library:
    """Base grammar plus inventions plus per-production weights in bits.

    Production keys: ("prim", name), ("inv", index), ("const", value),
    ("var",).  Action-typed requests choose among primitives and
    inventions; int-typed requests choose among constants and (when in
    scope) a variable, with the variable choice costing an extra
    log2(scope size) bits.
    """

    constants: tuple = DEFAULT_CONSTANTS
    inventions: list = field(default_factory=list)
    weights: dict = field(default_factory=dict)

    @classmethod
    def uniform(cls, constants=DEFAULT_CONSTANTS, extra_action_prims=()):
        """Initial library: uniform weights within each request class."""
        lib = cls(constants=tuple(constants), inventions=[], weights={})
        lib._extra = tuple(extra_action_prims)
        n_action = len(lib.action_keys())
        n_int = len(constants) + 1  # constants plus the variable production
        for key in lib.action_keys():
            lib.weights[key] = math.log2(n_action)
        for c in constants:
            lib.weights[("const", c)] = math.log2(n_int)
        lib.weights[("var",)] = math.log2(n_int)
        return lib

    # Extra action primitives exist only for tests that want a particular
    # grammar size; real pipelines never set them.
    @property
    def extra_action_prims(self):
        return getattr(self, "_extra", ())

    def action_keys(self):
        keys = [("prim", n) for n in BASE_PRIM_ORDER]
        keys += [("prim", n) for n in self.extra_action_prims]
        keys += [("inv", i) for i in range(len(self.inventions))]
        return keys

    def int_keys(self):
        return [("const", c) for c in self.constants] + [("var",)]

    def prim_type(self, name):
        if name in PRIM_TYPES:
            return PRIM_TYPES[name]
        if name in self.extra_action_prims:
            return ACTION
        raise DslError("unknown primitive %r" % name)

    def key_type(self, key):
        kind = key[0]
        if kind == "prim":
            return self.prim_type(key[1])
        if kind == "inv":
            return self.inventions[key[1]].type
        if kind == "const":
            return INT
        return INT

    def weight(self, key):
        return self.weights[key]

    def action_productions(self):
        """(key, head term, argument types) sorted in canonical print order."""
        out = []
        for key in self.action_keys():
            if key[0] == "prim":
                head = Prim(key[1])
            else:
                head = Inv(key[1])
            params, _ = arg_types(self.key_type(key))
            out.append((key, head, tuple(params)))
        out.sort(key=lambda e: _prod_sort_key(e[0], self))
        return out

    def int_constant_productions(self):
        out = [(("const", c), IntConst(c), ()) for c in self.constants]
        out.sort(key=lambda e: _prod_sort_key(e[0], self))
        return out

    def normalization_check(self, tol=1e-6):
        """Per request class the production probabilities must sum to 1."""
        s_action = sum(2.0 ** -self.weights[k] for k in self.action_keys())
        s_int = sum(2.0 ** -self.weights[k] for k in self.int_keys())
        return abs(s_action - 1.0) <= tol and abs(s_int - 1.0) <= tol

    def with_invention(self, body_term):
        """Adopt a closed lambda body as the next invention.

        The new production gets probability 1/(N+1) in the action class
        and existing action weights are renormalized to keep the class
        summing to one.
        """
        t = infer_type(body_term, self)
        arity = 0
        tt = t
        while isinstance(tt, TArrow) and tt != ACTION:
            if tt.arg != INT:
                raise DslError("invention parameters must be ints")
            arity += 1
            tt = tt.res
        if tt != ACTION:
            raise DslError("invention body must produce an action")
        if free_vars(body_term):
            raise DslError("invention body must be closed")
        idx = len(self.inventions)
        inv = Invention(name="f%d" % idx, arity=arity, body=body_term)
        new = Library(constants=self.constants,
                      inventions=self.inventions + [inv],
                      weights=dict(self.weights))
        new._extra = self.extra_action_prims
        n_after = len(new.action_keys())
        w_new = math.log2(n_after)
        p_new = 2.0 ** -w_new
        # scale the old action productions by (1 - p_new)
        bump = -math.log2(1.0 - p_new)
        for key in self.action_keys():
            new.weights[key] = new.weights[key] + bump
        new.weights[("inv", idx)] = w_new
        return new

    def reweighted(self, usage_counts):
        """Laplace add-1 reweighting per request class from usage counts."""
        new = Library(constants=self.constants,
                      inventions=list(self.inventions),
                      weights={})
        new._extra = self.extra_action_prims
        for keys in (self.action_keys(), self.int_keys()):
            total = sum(usage_counts.get(k, 0) for k in keys)
            denom = total + len(keys)
            for k in keys:
                new.weights[k] = -math.log2((usage_counts.get(k, 0) + 1) / denom)
        return new

    # ---------- cost ----------

    def cost(self, term, request=ACTION, scope=0) -> float:
        """Bits of the term's derivation; raises DslCostError if underivable."""
        request = request if not isinstance(request, _TMeta) else _resolve(request)
        if isinstance(request, TArrow) and request != ACTION:
            if request.arg != INT:
                raise DslCostError("underivable request %s" % format_type(request))
            if not isinstance(term, Abs):
                raise DslCostError("expected lambda for %s, got %s"
                                   % (format_type(request), print_term(term)))
            return self.cost(term.body, request.res, scope + 1)
        if request == INT:
            if isinstance(term, IntConst):
                key = ("const", term.value)
                if key not in self.weights:
                    raise DslCostError("constant %d outside grammar" % term.value)
                return self.weights[key]
            if isinstance(term, Var):
                if term.index >= scope:
                    raise DslCostError("unbound variable $%d" % term.index)
                return self.weights[("var",)] + math.log2(scope)
            raise DslCostError("expected int, got %s" % print_term(term))
        if request == ACTION:
            head, args = spine(term)
            if isinstance(head, Prim):
                key = ("prim", head.name)
            elif isinstance(head, Inv):
                key = ("inv", head.index)
            else:
                raise DslCostError("expected action, got %s" % print_term(term))
            if key not in self.weights:
                raise DslCostError("production %r outside grammar" % (key,))
            params, res = arg_types(self.key_type(key))
            if len(args) != len(params) or res != ACTION:
                raise DslCostError("wrong arity in %s" % print_term(term))
            bits = self.weights[key]
            for a, p in zip(args, params):
                bits += self.cost(a, p, scope)
            return bits
        raise DslCostError("underivable request %s" % format_type(request))

    # ---------- persistence ----------

    def save(self, path):
        lines = ["library v1"]
        for key in self.action_keys():
            if key[0] == "prim":
                name = key[1]
                body = ""
                t = self.prim_type(name)
            else:
                inv = self.inventions[key[1]]
                name = inv.name
                body = print_term(inv.body)
                t = inv.type
            cols = [name, format_type(t), "%.6f" % self.weights[key]]
            if body:
                cols.append(body)
            lines.append("\t".join(cols))
        for c in self.constants:
            lines.append("\t".join([str(c), "int", "%.6f" % self.weights[("const", c)]]))
        lines.append("\t".join(["var", "int", "%.6f" % self.weights[("var",)]]))
        with open(path, "w") as fh:
            fh.write("\n".join(lines) + "\n")

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
        if not lines or lines[0] != "library v1":
            raise DslError("not a library file: %s" % path)
        lib = cls(constants=(), inventions=[], weights={})
        constants = []
        inv_rows = []
        for ln in lines[1:]:
            cols = ln.split("\t")
            name, tstr, wstr = cols[0], cols[1], cols[2]
            w = float(wstr)
            if name == "var":
                lib.weights[("var",)] = w
            elif name.lstrip("-").isdigit():
                constants.append(int(name))
                lib.weights[("const", int(name))] = w
            elif name in PRIM_TYPES:
                lib.weights[("prim", name)] = w
            elif name.startswith("f") and name[1:].isdigit():
                inv_rows.append((int(name[1:]), cols[3], w, tstr))
            else:
                raise DslError("unknown production %r in %s" % (name, path))
        lib.constants = tuple(constants)
        inv_rows.sort()
        for idx, body_text, w, tstr in inv_rows:
            if idx != len(lib.inventions):
                raise DslError("invention gap in %s" % path)
            body = parse(body_text, lib)
            t = parse_type(tstr)
            params, _ = arg_types(t)
            lib.inventions.append(Invention("f%d" % idx, len(params), body))
            lib.weights[("inv", idx)] = w
        return lib


# ==================== evaluation ====================


@dataclass(frozen=True)
class TurtleState:
    x: float = 0.0
    y: float = 0.0
    heading: float = 0.0  # degrees, [0, 360)
    pen: bool = True


@dataclass(frozen=True)
class Step:
    """One top-level transition: a primitive or invention application."""
    name: str
    args: tuple
    post: TurtleState


@dataclass
class EvalResult:
    strokes: list
    steps: list
    final: TurtleState


class _Ctx:
    __slots__ = ("strokes", "steps", "budget", "tracing")

    def __init__(self, budget):
        self.strokes = []
        self.steps = []
        self.budget = budget
        self.tracing = True


class _Action:
    __slots__ = ("run",)

    def __init__(self, run):
        self.run = run


def _norm_heading(h):
    h = math.fmod(h, 360.0)
    if h < 0.0:
        h += 360.0
    return h


def _move_action(k, m):
    def run(state, ctx):
        if ctx.budget <= 0:
            raise StepBudgetError("primitive step budget exceeded")
        ctx.budget -= 1
        turn = 360.0 / k if k != 0 else 0.0
        h = _norm_heading(state.heading + turn)
        if m != 0:
            rad = math.radians(h)
            nx = state.x + m * math.cos(rad)
            ny = state.y + m * math.sin(rad)
            if state.pen:
                ctx.strokes.append((state.x, state.y, nx, ny))
        else:
            nx, ny = state.x, state.y
        new = TurtleState(nx, ny, h, state.pen)
        if ctx.tracing:
            ctx.steps.append(Step("rtfwint", (k, m), new))
        return new
    return _Action(run)


def _penup_action(body_fn):
    def run(state, ctx):
        inner = body_fn(1)
        lifted = TurtleState(state.x, state.y, state.heading, False)
        out = inner.run(lifted, ctx)
        return TurtleState(out.x, out.y, out.heading, state.pen)
    return _Action(run)


def _embed_action(body_fn):
    def run(state, ctx):
        inner = body_fn(1)
        out = inner.run(state, ctx)
        return TurtleState(state.x, state.y, state.heading, out.pen)
    return _Action(run)


def _loop_action(n, body_fn):
    def run(state, ctx):
        for i in range(1, n + 1):
            state = body_fn(i).run(state, ctx)
        return state
    return _Action(run)


def _seq_action(a, b):
    def run(state, ctx):
        return b.run(a.run(state, ctx), ctx)
    return _Action(run)


def _inv_action(name, int_args, inner):
    def run(state, ctx):
        was_tracing = ctx.tracing
        ctx.tracing = False
        try:
            out = inner.run(state, ctx)
        finally:
            ctx.tracing = was_tracing
        if was_tracing:
            ctx.steps.append(Step(name, tuple(int_args), out))
        return out
    return _Action(run)


class _Closure:
    __slots__ = ("body", "env")

    def __init__(self, body, env):
        self.body = body
        self.env = env


class _PartialPrim:
    __slots__ = ("name", "args", "needed")

    def __init__(self, name, args, needed):
        self.name = name
        self.args = args
        self.needed = needed


class _PartialInv:
    __slots__ = ("index", "args", "needed", "library")

    def __init__(self, index, args, needed, library):
        self.index = index
        self.args = args
        self.needed = needed
        self.library = library


def _finish_prim(name, args):
    if name == "rtfwint":
        return _move_action(args[0], args[1])
    if name == "penup":
        return _penup_action(args[0])
    if name == "embed":
        return _embed_action(args[0])
    if name == "loop":
        return _loop_action(args[0], args[1])
    if name == "seq":
        return _seq_action(args[0], args[1])
    raise DslEvalError("primitive %s is not runnable" % name)


def _as_fn(value):
    """Coerce an int->action value into a Python callable."""
    if callable(value):
        return value
    raise DslEvalError("expected a function value")


def _eval(term, env, library):
    if isinstance(term, IntConst):
        return term.value
    if isinstance(term, Var):
        return env[term.index]
    if isinstance(term, Abs):
        clo = _Closure(term.body, env)
        return lambda v: _eval(clo.body, [v] + clo.env, library)
    if isinstance(term, Prim):
        params, _ = arg_types(PRIM_TYPES[term.name])
        if not params:
            return _finish_prim(term.name, [])
        return _PartialPrim(term.name, [], len(params))
    if isinstance(term, Inv):
        if library is None or term.index >= len(library.inventions):
            raise DslEvalError("unknown invention f%d" % term.index)
        inv = library.inventions[term.index]
        if inv.arity == 0:
            inner = _eval(inv.body, [], library)
            return _inv_action(inv.name, (), inner)
        return _PartialInv(term.index, [], inv.arity, library)
    if isinstance(term, App):
        fn = _eval(term.fn, env, library)
        arg = _eval(term.arg, env, library)
        return _apply(fn, arg, library)
    raise DslEvalError("cannot evaluate %r" % (term,))


def _apply(fn, arg, library):
    if isinstance(fn, _PartialPrim):
        args = fn.args + [arg]
        if len(args) == fn.needed:
            # function-valued parameters arrive as callables
            name = fn.name
            if name in ("penup", "embed"):
                return _finish_prim(name, [_as_fn(args[0])])
            if name == "loop":
                return _finish_prim(name, [args[0], _as_fn(args[1])])
            return _finish_prim(name, args)
        return _PartialPrim(fn.name, args, fn.needed)
    if isinstance(fn, _PartialInv):
        args = fn.args + [arg]
        if len(args) == fn.needed:
            inv = fn.library.inventions[fn.index]
            inner = _eval(inv.body, [], fn.library)
            for a in args:
                inner = _apply(inner, a, fn.library)
            return _inv_action(inv.name, tuple(args), inner)
        return _PartialInv(fn.index, args, fn.needed, fn.library)
    if callable(fn):
        return fn(arg)
    if isinstance(fn, _Action):
        raise DslEvalError("applied an action to an argument")
    raise DslEvalError("applied a non-function")


def evaluate(term, library=None, initial=None, budget=MAX_PRIM_STEPS):
    """Run a turtle->turtle term.

    Returns an EvalResult whose steps list one entry per top-level
    primitive or invention application in execution order; invention
    applications are atomic.  Raises StepBudgetError after `budget`
    primitive executions.
    """
    typecheck_program(term, library)
    if initial is None:
        initial = TurtleState()
    # identity at the root is the one lambda inhabiting turtle -> turtle
    if isinstance(term, Abs) and term.body == Var(0):
        return EvalResult(strokes=[], steps=[], final=initial)
    action = _eval(term, [], library)
    if not isinstance(action, _Action):
        raise DslEvalError("program did not evaluate to an action")
    ctx = _Ctx(budget)
    final = action.run(initial, ctx)
    return EvalResult(strokes=ctx.strokes, steps=ctx.steps, final=final)
