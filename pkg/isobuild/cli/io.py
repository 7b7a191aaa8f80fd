"""Reading instances and writing reports."""

from __future__ import annotations

import hashlib
import json
import re
import sys
from fractions import Fraction
from pathlib import Path

import jq

from isobuild.building import CrystalLattice, Norm
from isobuild.core.exceptions import InputError, InvalidParams
from isobuild.core.types import (
    SCHEMA_VERSION,
    FieldElementModel,
    InstanceModel,
    IsocrystalModel,
    LatticeModel,
    MatrixEntry,
    NormModel,
    RunConfig,
)
from isobuild.core.util import parse_rational
from isobuild.crystals import Isocrystal, NewtonPoint, newton_point, standard_form
from isobuild.padic import FieldContext, FieldElement, Matrix, make_field

# Split before a sign that starts a new term, not one inside an exponent.
_TERMS = re.compile(r"(?<=[^\^*/])(?=[+-])")
_NUMBER = re.compile(r"(\d+)(?:/(\d+))?")
_POWER = re.compile(r"([pz])(?:\^(-?\d+))?")


def _parse_factor(ctx: FieldContext, factor: str, entry: str) -> FieldElement:
    if match := _NUMBER.fullmatch(factor):
        num, den = match.groups()
        return ctx.from_fraction(Fraction(int(num), int(den or 1)))
    if match := _POWER.fullmatch(factor):
        base, exp = match.groups()
        k = int(exp) if exp is not None else 1
        if base == "p":
            return ctx.p_power(k)
        return ctx.gen() ** k
    raise InputError(f"cannot parse {factor!r} in matrix entry {entry!r}")


def parse_entry(ctx: FieldContext, entry: MatrixEntry) -> FieldElement:
    """An int, a field element dict, or a sum of products of numbers, p^k and z^k."""
    if isinstance(entry, bool):
        raise InputError(f"matrix entry {entry!r} is not a number")
    if isinstance(entry, int):
        return ctx.from_int(entry)
    if isinstance(entry, FieldElementModel):
        return ctx.from_json(entry.model_dump())
    if isinstance(entry, dict):
        return ctx.from_json(FieldElementModel.model_validate(entry).model_dump())

    text = entry.replace(" ", "")
    if not text:
        raise InputError("empty matrix entry")
    total = ctx.zero()
    for term in _TERMS.split(text):
        sign = 1
        while term[:1] in ("+", "-"):
            sign = -sign if term[0] == "-" else sign
            term = term[1:]
        if not term:
            raise InputError(f"dangling sign in matrix entry {entry!r}")
        value = ctx.one()
        for factor in term.split("*"):
            value = value * _parse_factor(ctx, factor, entry)
        total = total + value if sign > 0 else total - value
    return total


def parse_matrix(ctx: FieldContext, rows: list[list[MatrixEntry]]) -> Matrix:
    if not rows or any(len(row) != len(rows[0]) for row in rows):
        raise InputError("matrix rows must be non-empty and of equal length")
    return Matrix.from_rows(ctx, [[parse_entry(ctx, e) for e in row] for row in rows])


def read_text(path: str | None) -> str:
    if path is None or path == "-":
        return sys.stdin.read()
    return Path(path).read_text()


def load_instance(path: str | None) -> InstanceModel:
    """Parse an instance file; a bare isocrystal object is accepted too."""
    data = json.loads(read_text(path))
    if isinstance(data, dict) and "isocrystal" not in data:
        data = {"isocrystal": data}
    return InstanceModel.model_validate(data)


def build_context(model: IsocrystalModel, config: RunConfig) -> FieldContext:
    p = config.prime or model.p
    m = config.degree or model.m or model.s
    if m % model.s:
        raise InvalidParams(f"degree m={m} is not a multiple of s={model.s}")
    return make_field(p, m, model.N or config.precision)


def build_isocrystal(model: IsocrystalModel, config: RunConfig) -> Isocrystal:
    ctx = build_context(model, config)
    if model.slopes is not None:
        np = NewtonPoint.from_pairs([(Fraction(s.num, s.den), s.mult) for s in model.slopes])
        return standard_form(np, ctx)

    b = parse_matrix(ctx, model.b)
    ic = Isocrystal(ctx, b, s=model.s)
    if model.frame is None:
        return ic
    frame = parse_matrix(ctx, model.frame)
    std = standard_form(newton_point(ic), ctx).b
    if frame @ std != b @ frame.frobenius():
        raise InvalidParams("frame g does not satisfy b = g b_std sigma(g)^-1")
    return ic.with_frame(frame)


def build_norm(ctx: FieldContext, model: NormModel, n: int) -> Norm:
    exponents = tuple(parse_rational(c) for c in model.exponents)
    if model.basis is None:
        return Norm(Matrix.identity(ctx, n), exponents)
    return Norm(parse_matrix(ctx, model.basis), exponents)


def build_lattice(ctx: FieldContext, model: LatticeModel) -> CrystalLattice:
    return CrystalLattice(parse_matrix(ctx, model.basis), model.provenance or "input")


def instance_hash(model: InstanceModel) -> str:
    canonical = json.dumps(model.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()


def envelope(payload: dict, config: RunConfig) -> dict:
    """Stamp a payload with the schema version and the run configuration."""
    return {"schema_version": SCHEMA_VERSION, **payload, "config": config.model_dump(mode="json")}


def jq_filter(data: dict, filter: str):
    return jq.compile(filter).input(data).first()


def write_output(data: dict, config: RunConfig) -> None:
    text = json.dumps(jq_filter(data, config.filter), indent=2, sort_keys=True)
    if config.output is None or config.output == "-":
        print(text, flush=True)
    else:
        Path(config.output).write_text(text + "\n")
