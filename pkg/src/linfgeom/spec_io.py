"""Geometric input: parsing, validation and derived tensors.

File format (UTF-8, one statement per line, ``#`` starts a comment)::

    dim = 2
    rank = 1
    cutoff = 5
    deg_cap = 2
    gauge = "delta-inverse"
    action_algebroid = false

    [gamma]            # Gamma^i_{jk}, symmetric in (j,k)
    (1,2,2) = "x1"
    [gamma_prime]      # Gamma'^a_{ib}: nabla'_i v_b = Gamma'^a_{ib} v_a
    [rho]              # rho^i_a: rho(v_a) = rho^i_a d/dx^i
    [mu]               # mu^a_{bc}, antisymmetric; or [bracket] for C^a_{bc}
    [phi.3]            # (i, j1, j2, j3), symmetric in the j's
    [psi.3]            # (a, b, j1, j2), symmetric in the j's
    [metric]           # g_{ab}, symmetric

Indices are 1-based.  Entries not listed are zero.  Values are polynomial
strings in ``x1..x<dim>``.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .poly import Poly, PolySyntaxError, format_poly, parse_poly

Index = Tuple[int, ...]


class SpecError(ValueError):
    """Input error with a source location (1-based line and column)."""

    def __init__(self, message: str, line: int = 0, col: int = 0, source: str = "<spec>"):
        self.message = message
        self.line = line
        self.col = col
        self.source = source
        loc = f"{source}:{line}:{col}: " if line else f"{source}: "
        super().__init__(loc + message)


@dataclass
class GeometrySpec:
    """Connection, anchor and torsion data on one chart (0-based indices).

    ``nvars`` is the number of base variables of the coefficient polynomials;
    it equals ``d`` except for interpolated families, which carry ``t`` last.
    """

    d: int
    r: int
    gamma: Dict[Index, Poly] = field(default_factory=dict)        # (i, j, k)
    gamma_prime: Dict[Index, Poly] = field(default_factory=dict)  # (a, i, b)
    rho: Dict[Index, Poly] = field(default_factory=dict)          # (i, a)
    mu: Dict[Index, Poly] = field(default_factory=dict)           # (a, b, c)
    phi: Dict[int, Dict[Index, Poly]] = field(default_factory=dict)  # n -> (i, j1..jn)
    psi: Dict[int, Dict[Index, Poly]] = field(default_factory=dict)  # n -> (a, b, j1..j_{n-1})
    metric: Optional[Dict[Index, Poly]] = None                    # (a, b)
    cutoff: int = 4
    deg_cap: int = 2
    action_algebroid: bool = False
    name: str = ""
    nvars: int = 0

    def __post_init__(self):
        if not self.nvars:
            self.nvars = self.d

    # component access (zero default) -----------------------------------
    def zero(self) -> Poly:
        return Poly(self.nvars)

    def G(self, i, j, k) -> Poly:
        return self.gamma.get((i, j, k)) or self.zero()

    def Gp(self, a, i, b) -> Poly:
        return self.gamma_prime.get((a, i, b)) or self.zero()

    def R(self, i, a) -> Poly:
        return self.rho.get((i, a)) or self.zero()

    def M(self, a, b, c) -> Poly:
        return self.mu.get((a, b, c)) or self.zero()

    def C(self, a, b, c) -> Poly:
        """Structure functions of the bracket: [v_b, v_c] = C^a_{bc} v_a."""
        out = -self.M(a, b, c)
        for i in range(self.d):
            out = out + self.Gp(a, i, c) * self.R(i, b) - self.Gp(a, i, b) * self.R(i, c)
        return out

    def g(self, a, b) -> Poly:
        if self.metric is None:
            raise ValueError("no metric supplied")
        return self.metric.get((a, b)) or self.zero()

    @property
    def gauge(self) -> str:
        return "explicit" if (any(self.phi.values()) or any(self.psi.values())) else "delta-inverse"

    def phi_at(self, n: int, idx: Index) -> Poly:
        return self.phi.get(n, {}).get(idx) or self.zero()

    def psi_at(self, n: int, idx: Index) -> Poly:
        return self.psi.get(n, {}).get(idx) or self.zero()

    def diff(self, p: Poly, i: int) -> Poly:
        return p.diff(i)

    def same_algebroid(self, other: "GeometrySpec") -> List[str]:
        """Differences in (rho, C) between two specs, as readable strings."""
        out = []
        if (self.d, self.r) != (other.d, other.r):
            return [f"dimension mismatch ({self.d},{self.r}) vs ({other.d},{other.r})"]
        for i in range(self.d):
            for a in range(self.r):
                if self.R(i, a) != other.R(i, a):
                    out.append(f"rho({i + 1},{a + 1})")
        for a, b, c in itertools.product(range(self.r), repeat=3):
            if self.C(a, b, c) != other.C(a, b, c):
                out.append(f"bracket({a + 1},{b + 1},{c + 1})")
        return out

    def with_gauge(self, phi=None, psi=None) -> "GeometrySpec":
        import copy
        s = copy.copy(self)
        s.phi = phi if phi is not None else {}
        s.psi = psi if psi is not None else {}
        return s


def mu_from_bracket(d, r, gamma_prime, rho, C, nvars) -> Dict[Index, Poly]:
    """Invert the structure-function relation: mu = Gamma'rho - Gamma'rho - C."""
    zero = Poly(nvars)
    out = {}
    for a, b, c in itertools.product(range(r), repeat=3):
        val = -(C.get((a, b, c)) or zero)
        for i in range(d):
            gc = gamma_prime.get((a, i, c))
            gb = gamma_prime.get((a, i, b))
            rb = rho.get((i, b))
            rc = rho.get((i, c))
            if gc is not None and rb is not None:
                val = val + gc * rb
            if gb is not None and rc is not None:
                val = val - gb * rc
        if val:
            out[(a, b, c)] = val
    return out


# parsing --------------------------------------------------------------------

_SECTION_RE = re.compile(r"^\[\s*([A-Za-z_]+)(?:\.(\d+))?\s*\]$")
_SCALAR_RE = re.compile(r"^([A-Za-z_]+)\s*=\s*(.+)$")
_ENTRY_RE = re.compile(r"^\(\s*([0-9\s,]*)\)\s*=\s*(.+)$")

_SCALAR_KEYS = {"dim", "rank", "cutoff", "deg_cap", "gauge", "action_algebroid", "name"}
_SECTIONS = {"gamma", "gamma_prime", "rho", "mu", "bracket", "phi", "psi", "metric"}


def _strip_comment(line: str) -> str:
    out = []
    in_str = False
    for ch in line:
        if ch == '"':
            in_str = not in_str
        if ch == "#" and not in_str:
            break
        out.append(ch)
    return "".join(out).rstrip()


def _unquote(val: str, lineno: int, col: int, source: str) -> Tuple[str, int]:
    val = val.strip()
    if len(val) >= 2 and val[0] == '"' and val[-1] == '"':
        return val[1:-1], col + 1
    raise SpecError("expected a double-quoted string", lineno, col, source)


def parse_spec(text: str, source: str = "<spec>") -> GeometrySpec:
    """Parse and validate a spec document; raises :class:`SpecError` on any problem."""
    scalars: Dict[str, Tuple[str, int, int]] = {}
    sections: Dict[Tuple[str, int], List[Tuple[Index, str, int, int]]] = {}
    current: Optional[Tuple[str, int]] = None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        stripped = line.strip()
        if not stripped:
            continue
        col0 = len(line) - len(line.lstrip()) + 1
        m = _SECTION_RE.match(stripped)
        if m:
            name, num = m.group(1), m.group(2)
            if name not in _SECTIONS:
                raise SpecError(f"unknown section [{name}]", lineno, col0, source)
            if name in ("phi", "psi"):
                if num is None:
                    raise SpecError(f"section [{name}] needs an order, e.g. [{name}.3]", lineno, col0, source)
                order = int(num)
                if order < 3:
                    raise SpecError(f"gauge order must be >= 3, got {order}", lineno, col0, source)
            elif num is not None:
                raise SpecError(f"section [{name}] takes no order", lineno, col0, source)
            else:
                order = 0
            current = (name, order)
            if current in sections:
                raise SpecError(f"duplicate section [{stripped[1:-1].strip()}]", lineno, col0, source)
            sections[current] = []
            continue
        m = _ENTRY_RE.match(stripped)
        if m:
            if current is None:
                raise SpecError("tensor entry outside of a section", lineno, col0, source)
            idx_txt = m.group(1)
            try:
                idx = tuple(int(t) for t in idx_txt.split(",")) if idx_txt.strip() else ()
            except ValueError:
                raise SpecError(f"malformed index tuple ({idx_txt})", lineno, col0, source) from None
            vcol = col0 + m.start(2)
            val, vcol = _unquote(m.group(2), lineno, vcol, source)
            sections[current].append((idx, val, lineno, vcol))
            continue
        m = _SCALAR_RE.match(stripped)
        if m:
            key = m.group(1)
            if current is not None:
                raise SpecError(f"scalar key '{key}' must appear before any section", lineno, col0, source)
            if key not in _SCALAR_KEYS:
                raise SpecError(f"unknown key '{key}'", lineno, col0, source)
            if key in scalars:
                raise SpecError(f"duplicate key '{key}'", lineno, col0, source)
            scalars[key] = (m.group(2).strip(), lineno, col0 + m.start(2))
            continue
        raise SpecError(f"cannot parse line: {stripped!r}", lineno, col0, source)

    def get_int(key, default=None, minimum=0):
        if key not in scalars:
            if default is None:
                raise SpecError(f"missing required key '{key}'", 0, 0, source)
            return default
        val, ln, col = scalars[key]
        if not re.fullmatch(r"\d+", val):
            raise SpecError(f"'{key}' must be a non-negative integer, got {val!r}", ln, col, source)
        v = int(val)
        if v < minimum:
            raise SpecError(f"'{key}' must be >= {minimum}", ln, col, source)
        return v

    d = get_int("dim", minimum=1)
    r = get_int("rank", minimum=0)
    cutoff = get_int("cutoff", 4, minimum=1)
    deg_cap = get_int("deg_cap", 2, minimum=1)
    action = False
    if "action_algebroid" in scalars:
        val, ln, col = scalars["action_algebroid"]
        if val not in ("true", "false"):
            raise SpecError("action_algebroid must be true or false", ln, col, source)
        action = val == "true"
    gauge_decl = "delta-inverse"
    if "gauge" in scalars:
        val, ln, col = scalars["gauge"]
        gauge_decl, _ = _unquote(val, ln, col, source)
        if gauge_decl not in ("delta-inverse", "explicit"):
            raise SpecError(f"gauge must be \"delta-inverse\" or \"explicit\", got {gauge_decl!r}", ln, col, source)
    spec_name = ""
    if "name" in scalars:
        val, ln, col = scalars["name"]
        spec_name, _ = _unquote(val, ln, col, source)

    names = [f"x{i + 1}" for i in range(d)]

    def poly(val, ln, col):
        try:
            return parse_poly(val, names=names)
        except PolySyntaxError as exc:
            raise SpecError(f"{exc.args[0].split(' at column')[0]}", ln, col + exc.pos, source) from None

    def bounds_for(name, order):
        if name == "gamma":
            return [d, d, d]
        if name == "gamma_prime":
            return [r, d, r]
        if name == "rho":
            return [d, r]
        if name in ("mu", "bracket"):
            return [r, r, r]
        if name == "metric":
            return [r, r]
        if name == "phi":
            return [d] + [d] * order
        if name == "psi":
            return [r, r] + [d] * (order - 1)
        raise AssertionError(name)

    def letters(name, order):
        return {
            "gamma": "(i,j,k)", "gamma_prime": "(a,i,b)", "rho": "(i,a)",
            "mu": "(a,b,c)", "bracket": "(a,b,c)", "metric": "(a,b)",
            "phi": f"(i,j1..j{order})", "psi": f"(a,b,j1..j{order - 1})",
        }[name]

    def read_tensor(key) -> Dict[Index, Tuple[Poly, int, int]]:
        name, order = key
        bounds = bounds_for(name, order)
        out: Dict[Index, Tuple[Poly, int, int]] = {}
        for idx, val, ln, col in sections.get(key, []):
            if len(idx) != len(bounds):
                raise SpecError(
                    f"[{name}] entries take {len(bounds)} indices {letters(name, order)}, got {len(idx)}",
                    ln, col, source)
            for pos, (k, b) in enumerate(zip(idx, bounds)):
                if not 1 <= k <= b:
                    raise SpecError(f"index out of range in [{name}] entry {idx}: position {pos + 1} must be in 1..{b}",
                                    ln, col, source)
            z = tuple(k - 1 for k in idx)
            if z in out:
                raise SpecError(f"duplicate entry {idx} in [{name}]", ln, col, source)
            out[z] = (poly(val, ln, col), ln, col)
        return out

    def symmetrize(raw, name, sym_positions, sign=+1):
        """Fill a tensor symmetric (sign=+1) or antisymmetric (sign=-1) in the
        given index positions; conflicting entries are symmetry violations."""
        out: Dict[Index, Poly] = {}
        origin: Dict[Index, Index] = {}
        for idx, (p, ln, col) in raw.items():
            sub = [idx[k] for k in sym_positions]
            if sign < 0 and len(set(sub)) < len(sub):
                if p:
                    one = tuple(k + 1 for k in idx)
                    raise SpecError(f"symmetry violation in [{name}]: entry {one} must vanish (antisymmetric indices)",
                                    ln, col, source)
                continue
            for perm in itertools.permutations(range(len(sym_positions))):
                new = list(idx)
                for dst, src in zip(sym_positions, perm):
                    new[dst] = idx[sym_positions[src]]
                new = tuple(new)
                s = _perm_sign(perm) if sign < 0 else 1
                val = p * s
                if new in out and out[new] != val:
                    a = tuple(k + 1 for k in origin[new])
                    b = tuple(k + 1 for k in idx)
                    raise SpecError(f"symmetry violation in [{name}]: entries {a} and {b} disagree", ln, col, source)
                if new not in out:
                    out[new] = val
                    origin[new] = idx
        return {k: v for k, v in out.items() if v}

    gamma = symmetrize(read_tensor(("gamma", 0)), "gamma", [1, 2])
    gamma_prime = {k: v[0] for k, v in read_tensor(("gamma_prime", 0)).items() if v[0]}
    rho = {k: v[0] for k, v in read_tensor(("rho", 0)).items() if v[0]}

    has_mu = ("mu", 0) in sections
    has_br = ("bracket", 0) in sections
    mu = symmetrize(read_tensor(("mu", 0)), "mu", [1, 2], sign=-1) if has_mu else {}
    if has_br:
        C = symmetrize(read_tensor(("bracket", 0)), "bracket", [1, 2], sign=-1)
        derived = mu_from_bracket(d, r, gamma_prime, rho, C, d)
        if has_mu:
            for key in set(derived) | set(mu):
                if (derived.get(key) or Poly(d)) != (mu.get(key) or Poly(d)):
                    one = tuple(k + 1 for k in key)
                    raise SpecError(f"[mu] and [bracket] are inconsistent at {one}", 0, 0, source)
        mu = derived

    phi: Dict[int, Dict[Index, Poly]] = {}
    psi: Dict[int, Dict[Index, Poly]] = {}
    for (name, order) in sorted(sections):
        if name == "phi":
            t = symmetrize(read_tensor((name, order)), f"phi.{order}", list(range(1, order + 1)))
            if t:
                phi[order] = t
        elif name == "psi":
            t = symmetrize(read_tensor((name, order)), f"psi.{order}", list(range(2, order + 1)))
            if t:
                psi[order] = t
    if gauge_decl == "delta-inverse" and (phi or psi):
        ln = scalars["gauge"][1] if "gauge" in scalars else 0
        raise SpecError("gauge tensors given but gauge is \"delta-inverse\"; use gauge = \"explicit\"", ln, 1, source)

    metric = None
    if ("metric", 0) in sections:
        metric = symmetrize(read_tensor(("metric", 0)), "metric", [0, 1])

    spec = GeometrySpec(d=d, r=r, gamma=gamma, gamma_prime=gamma_prime, rho=rho, mu=mu,
                        phi=phi, psi=psi, metric=metric, cutoff=cutoff, deg_cap=deg_cap,
                        action_algebroid=action, name=spec_name)
    if metric is not None:
        bad = metric_incompatibility(spec)
        if bad is not None:
            i, a, b = bad
            raise SpecError(f"metric incompatibility at (i,a,b) = ({i + 1},{a + 1},{b + 1}): "
                            f"d_i g_ab != Gamma'^c_ia g_cb + Gamma'^c_ib g_ac", 0, 0, source)
    if action:
        problems = action_violations(spec)
        if problems:
            raise SpecError("action_algebroid = true requires " + "; ".join(problems), 0, 0, source)
    return spec


def _perm_sign(perm) -> int:
    s = 1
    p = list(perm)
    for i in range(len(p)):
        for j in range(i + 1, len(p)):
            if p[i] > p[j]:
                s = -s
    return s


def metric_incompatibility(spec: GeometrySpec) -> Optional[Tuple[int, int, int]]:
    """First (i, a, b) where nabla' fails to preserve the fiber metric, else None."""
    for i in range(spec.d):
        for a in range(spec.r):
            for b in range(spec.r):
                lhs = spec.g(a, b).diff(i)
                rhs = spec.zero()
                for c in range(spec.r):
                    rhs = rhs + spec.Gp(c, i, a) * spec.g(c, b) + spec.Gp(c, i, b) * spec.g(a, c)
                if lhs != rhs:
                    return (i, a, b)
    return None


def action_violations(spec: GeometrySpec) -> List[str]:
    out = []
    if spec.gamma_prime:
        out.append("a flat trivial connection on V (no [gamma_prime] entries)")
    for key in itertools.product(range(spec.r), repeat=3):
        if not spec.C(*key).is_constant():
            out.append("constant structure constants")
            break
    return out


# printing --------------------------------------------------------------------

def _fmt_idx(idx: Index) -> str:
    return "(" + ",".join(str(k + 1) for k in idx) + ")"


def format_spec(spec: GeometrySpec) -> str:
    """Canonical text form; ``parse_spec(format_spec(s))`` reproduces ``s``."""
    if spec.nvars != spec.d:
        raise ValueError("parameter families have no file form")
    names = [f"x{i + 1}" for i in range(spec.d)]
    lines = []
    if spec.name:
        lines.append(f'name = "{spec.name}"')
    lines += [f"dim = {spec.d}", f"rank = {spec.r}", f"cutoff = {spec.cutoff}", f"deg_cap = {spec.deg_cap}",
              f'gauge = "{spec.gauge}"', f"action_algebroid = {'true' if spec.action_algebroid else 'false'}"]

    def section(title, tensor, keep=lambda idx: True):
        items = [(k, v) for k, v in sorted(tensor.items()) if v and keep(k)]
        if not items:
            return
        lines.append("")
        lines.append(f"[{title}]")
        for k, v in items:
            lines.append(f'{_fmt_idx(k)} = "{format_poly(v, names)}"')

    section("gamma", spec.gamma, lambda k: k[1] <= k[2])
    section("gamma_prime", spec.gamma_prime)
    section("rho", spec.rho)
    section("mu", spec.mu, lambda k: k[1] < k[2])
    for n in sorted(spec.phi):
        section(f"phi.{n}", spec.phi[n], lambda k: list(k[1:]) == sorted(k[1:]))
    for n in sorted(spec.psi):
        section(f"psi.{n}", spec.psi[n], lambda k: list(k[2:]) == sorted(k[2:]))
    if spec.metric is not None:
        lines.append("")
        lines.append("[metric]")
        for k, v in sorted(spec.metric.items()):
            if v and k[0] <= k[1]:
                lines.append(f'{_fmt_idx(k)} = "{format_poly(v, names)}"')
    return "\n".join(lines) + "\n"


def load_spec(path: str) -> GeometrySpec:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise SpecError(f"cannot read file: {exc.strerror}", 0, 0, path) from None
    except UnicodeDecodeError:
        raise SpecError("file is not valid UTF-8", 0, 0, path) from None
    return parse_spec(text, source=path)


# families ----------------------------------------------------------------------

def _lift(p: Poly, extra: int = 1) -> Poly:
    return Poly(p.nvars + extra, {e + (0,) * extra: c for e, c in p.terms.items()})


def interpolate(A: GeometrySpec, B: GeometrySpec) -> GeometrySpec:
    """Straight-line family between two specs: connections and gauges move
    linearly in t (t last base variable); anchor and bracket are shared, so mu(t)
    is re-derived from C with the interpolated nabla'."""
    diffs = A.same_algebroid(B)
    if diffs:
        raise ValueError("endpoints carry different algebroid data: " + ", ".join(diffs))
    d, r = A.d, A.r
    n = d + 1
    t = Poly.var(n, d)
    one = Poly.const(n, 1)

    def mix(ta: Dict, tb: Dict) -> Dict:
        out = {}
        for k in set(ta) | set(tb):
            a = _lift(ta[k]) if k in ta else Poly(n)
            b = _lift(tb[k]) if k in tb else Poly(n)
            v = a * (one - t) + b * t
            if v:
                out[k] = v
        return out

    gamma = mix(A.gamma, B.gamma)
    gp = mix(A.gamma_prime, B.gamma_prime)
    rho = {k: _lift(v) for k, v in A.rho.items()}
    C = {}
    for key in itertools.product(range(r), repeat=3):
        c = A.C(*key)
        if c:
            C[key] = _lift(c)
    mu = mu_from_bracket(d, r, gp, rho, C, n)
    phi = {m: mix(A.phi.get(m, {}), B.phi.get(m, {})) for m in set(A.phi) | set(B.phi)}
    psi = {m: mix(A.psi.get(m, {}), B.psi.get(m, {})) for m in set(A.psi) | set(B.psi)}
    return GeometrySpec(d=d, r=r, gamma=gamma, gamma_prime=gp, rho=rho, mu=mu, phi=phi, psi=psi,
                        cutoff=min(A.cutoff, B.cutoff), deg_cap=A.deg_cap, name=f"{A.name}->{B.name}", nvars=n)
