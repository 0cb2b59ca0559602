"""
Atlas runs: enumerate every CM type on a datum, check the main theorem for
each, and persist the records as CSV or JSON.
"""
import itertools
import logging
import math
import os
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Tuple

import pandas as pd

import settings
from cm_structures import CmType, is_primitive
from finite_group import (
    CmFieldDatum,
    FiniteGroup,
    all_subgroups,
    central_involutions,
    cyclic,
    dihedral,
    make_group,
    trivial_subgroup,
    validate_cm_datum,
)
from mumford_tate import CapExceeded, check_main_theorem

logger = logging.getLogger(__name__)

FAMILIES = ("cyclic", "abelian-products", "dihedral", "explicit")
CSV_COLUMNS = ["group", "order", "g", "phi", "mt_rank", "degenerate", "reflex_degree",
               "primitive", "theorem", "factorization", "error"]


@dataclass(frozen=True)
class AtlasRecord:
    group: str
    order: int
    g_dim: int
    phi: Tuple[int, ...]
    mt_rank: Optional[int] = None
    degenerate: Optional[bool] = None
    reflex_degree: Optional[int] = None
    primitive: Optional[bool] = None
    theorem_holds: Optional[bool] = None
    factorization_holds: Optional[bool] = None
    columns_hold: Optional[bool] = None
    error: str = ""

    @property
    def ok(self) -> bool:
        return (not self.error and bool(self.theorem_holds) and bool(self.factorization_holds)
                and bool(self.columns_hold))


def conjugate_pairs(datum: CmFieldDatum) -> List[Tuple[int, int]]:
    pairs = {tuple(sorted((j, datum.conjugate_coset(j)))) for j in range(datum.sigma.coset_count)}
    return sorted(pairs)


def enumerate_cm_types(datum: CmFieldDatum, dedupe: bool = False,
                       g_cap: Optional[int] = None) -> List[CmType]:
    """
    All CM types on the datum in lexicographic order of phi.

    With dedupe, keep the lexicographically least member of each orbit
    under left translation phi -> sigma phi.
    """
    cap = settings.G_DIM_CAP if g_cap is None else g_cap
    if datum.g_dim > cap:
        raise CapExceeded(f"g = {datum.g_dim} exceeds the enumeration cap {cap}")
    choices = sorted(tuple(sorted(pick)) for pick in itertools.product(*conjugate_pairs(datum)))
    types = [CmType(datum, phi) for phi in choices]
    if not dedupe:
        return types

    space = datum.sigma
    seen = set()
    representatives = []
    for t in types:
        if t.phi in seen:
            continue
        representatives.append(t)
        for s in datum.group.elements():
            seen.add(tuple(sorted(space.act(s, j) for j in t.phi)))
    return representatives


def _invariant_factor_lists(bound: int, smallest: int = 2, product: int = 1) -> Iterable[Tuple[int, ...]]:
    # n1 | n2 | ... with every factor >= 2 and product <= bound
    for n in range(smallest, bound // product + 1):
        yield (n,)
        for rest in _invariant_factor_lists(bound, n, product * n):
            if rest[0] % n == 0:
                yield (n,) + rest


def family_groups(family: str, bound: int, groups: Optional[Sequence[dict]] = None,
                  order_cap: Optional[int] = None) -> List[FiniteGroup]:
    cap = settings.ORDER_CAP if order_cap is None else order_cap
    if bound > cap:
        raise CapExceeded(f"order bound {bound} exceeds the order cap {cap}")
    if family == "cyclic":
        return [cyclic(n, order_cap=cap) for n in range(1, bound + 1)]
    if family == "abelian-products":
        factor_lists = sorted(
            (f for f in _invariant_factor_lists(bound) if len(f) >= 2),
            key=lambda f: (math.prod(f), f),
        )
        return [make_group({"product": [{"cyclic": n} for n in f]}, order_cap=cap) for f in factor_lists]
    if family == "dihedral":
        return [dihedral(n, order_cap=cap) for n in range(3, bound // 2 + 1)]
    if family == "explicit":
        built = [make_group(spec, order_cap=cap) for spec in (groups or [])]
        return [g for g in built if g.order <= bound]
    raise ValueError(f"unknown family {family!r}; expected one of {FAMILIES}")


def admissible_data(group: FiniteGroup, all_subfields: bool = False) -> List[CmFieldDatum]:
    """Every (G, H, c) with c a central involution and H avoiding c."""
    subgroups = all_subgroups(group) if all_subfields else [trivial_subgroup(group)]
    data = []
    for c in central_involutions(group):
        for h in subgroups:
            if c not in h:
                data.append(validate_cm_datum(group, h, c))
    return data


def describe_datum(datum: CmFieldDatum) -> str:
    h = ".".join(str(x) for x in datum.h.elements)
    return f"{datum.group.name}[H={h};c={datum.c}]"


def evaluate_type(task: Tuple[str, CmType]) -> AtlasRecord:
    description, t = task
    base = dict(group=description, order=t.group.order, g_dim=t.g_dim, phi=t.phi)
    try:
        report = check_main_theorem(t)
        return AtlasRecord(
            **base,
            mt_rank=report.mt_rank,
            degenerate=report.degenerate,
            reflex_degree=report.reflex.reflex_degree,
            primitive=is_primitive(t),
            theorem_holds=report.theorem_holds,
            factorization_holds=report.factorization_holds,
            columns_hold=not report.column_violations,
        )
    except Exception as e:
        logger.warning(f"Record {description} phi={list(t.phi)} failed: {str(e)}")
        return AtlasRecord(**base, error=f"{type(e).__name__}: {str(e)}")


def _run(tasks: List[Tuple[str, CmType]], workers: int) -> List[AtlasRecord]:
    if workers <= 1 or len(tasks) < 2:
        return [evaluate_type(task) for task in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        # map yields in submission order
        return list(pool.map(evaluate_type, tasks, chunksize=max(1, len(tasks) // (4 * workers))))


def _sort_records(records: List[AtlasRecord]) -> List[AtlasRecord]:
    return sorted(records, key=lambda rec: (rec.group, rec.phi))


def tabulate_datum(datum: CmFieldDatum, dedupe: bool = False, workers: int = 1) -> List[AtlasRecord]:
    description = describe_datum(datum)
    tasks = [(description, t) for t in enumerate_cm_types(datum, dedupe=dedupe)]
    return _sort_records(_run(tasks, workers))


def tabulate_family(family: str, bound: int, all_subfields: bool = False, dedupe: bool = False,
                    workers: int = 1, groups: Optional[Sequence[dict]] = None) -> List[AtlasRecord]:
    tasks = []
    skipped = []
    for group in family_groups(family, bound, groups=groups):
        for datum in admissible_data(group, all_subfields=all_subfields):
            description = describe_datum(datum)
            try:
                types = enumerate_cm_types(datum, dedupe=dedupe)
            except CapExceeded as e:
                logger.warning(f"Skipping {description}: {str(e)}")
                skipped.append(AtlasRecord(group=description, order=group.order, g_dim=datum.g_dim,
                                           phi=(), error=str(e)))
                continue
            logger.info(f"{description}: g={datum.g_dim}, {len(types)} CM types")
            tasks.extend((description, t) for t in types)
    records = _sort_records(_run(tasks, workers) + skipped)
    failed = sum(1 for rec in records if not rec.ok)
    logger.info(f"Family {family} up to order {bound}: {len(records)} records, {failed} not verified")
    return records


def _flag(value: Optional[bool]) -> str:
    if value is None:
        return ""
    return "true" if value else "false"


def _number(value: Optional[int]) -> str:
    return "" if value is None else str(int(value))


def _theorem_cell(rec: AtlasRecord) -> Optional[bool]:
    # lattice equality and the column identity for psi together
    if rec.theorem_holds is None or rec.columns_hold is None:
        return None
    return rec.theorem_holds and rec.columns_hold


def records_frame(records: Sequence[AtlasRecord]) -> pd.DataFrame:
    """CSV view: every cell rendered as text, phi as plus-separated indices."""
    rows = [
        [rec.group, str(rec.order), str(rec.g_dim), "+".join(str(j) for j in rec.phi),
         _number(rec.mt_rank), _flag(rec.degenerate), _number(rec.reflex_degree),
         _flag(rec.primitive), _flag(_theorem_cell(rec)), _flag(rec.factorization_holds), rec.error]
        for rec in records
    ]
    return pd.DataFrame(rows, columns=CSV_COLUMNS, dtype=object)


def _atomic_write(path: Path, write) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    os.close(fd)
    try:
        write(tmp)
        os.replace(tmp, path)
    except Exception:
        if os.path.exists(tmp):
            os.remove(tmp)
        raise
    return path


def write_frame_csv(df: pd.DataFrame, path) -> Path:
    return _atomic_write(path, lambda tmp: df.to_csv(tmp, index=False, lineterminator="\n"))


def write_atlas_csv(records: Sequence[AtlasRecord], path) -> Path:
    return write_frame_csv(records_frame(records), path)


def write_atlas_json(records: Sequence[AtlasRecord], path) -> Path:
    rows = []
    for rec in records:
        row = asdict(rec)
        row["phi"] = list(rec.phi)
        rows.append(row)
    df = pd.DataFrame(rows, columns=[f for f in AtlasRecord.__dataclass_fields__], dtype=object)

    def write(tmp):
        with open(tmp, "w") as fh:
            fh.write(df.to_json(orient="records", indent=2))
            fh.write("\n")

    return _atomic_write(path, write)


def read_atlas_csv(path) -> pd.DataFrame:
    return pd.read_csv(path, dtype=str, keep_default_na=False)
