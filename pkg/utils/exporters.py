import json
import sys
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from algebra.multivector import Multivector, blade_name

AXES = ("x", "y", "z")
AXES4 = ("w", "x", "y", "z")


def _clean(value: Any) -> Any:
    """Plain JSON types; -0.0 becomes 0.0 so repeated runs print identically"""
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if isinstance(value, np.ndarray):
        return _clean(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value) + 0.0
    if isinstance(value, Multivector):
        return _clean(value.to_dict())
    return value


def _axes(dimension: int) -> Tuple[str, ...]:
    return AXES4 if dimension == 4 else AXES[:dimension]


class ResultExporter:
    """
    Converts engine results into JSON-ready records and pandas frames for
    CSV output
    """

    def __init__(self, float_format: str = "%.12g"):
        self.float_format = float_format

    # ========== SERIALIZATION ==========

    def to_json(self, record: Dict) -> str:
        return json.dumps(_clean(record), indent=2) + "\n"

    def to_csv(self, frame: pd.DataFrame) -> str:
        return frame.to_csv(index=False, float_format=self.float_format, lineterminator="\n")

    def render(self, record: Dict, frame: pd.DataFrame, fmt: str) -> str:
        """JSON of the record, or CSV of the frame"""
        if fmt == "csv":
            return self.to_csv(frame)
        return self.to_json(record)

    @staticmethod
    def write(text: str, out: Optional[str] = None):
        if out is None:
            sys.stdout.write(text)
            return
        with open(out, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)

    # ========== ROOT SYSTEMS ==========

    def root_system_record(self, rs) -> Dict:
        return {
            "group": rs.group,
            "rank": rs.rank,
            "count": len(rs),
            "simple_roots": [mv.vector_part() for mv in rs.simple_roots],
            "roots": rs.roots,
            "length_classes": {repr(k): v for k, v in rs.length_classes().items()},
        }

    def root_system_frame(self, rs) -> pd.DataFrame:
        frame = pd.DataFrame(rs.roots, columns=list(_axes(rs.roots.shape[1])))
        frame["length"] = rs.lengths
        return frame

    def cartan_record(self, group: str, matrix: np.ndarray) -> Dict:
        return {"group": group, "cartan": matrix}

    def cartan_frame(self, matrix: np.ndarray) -> pd.DataFrame:
        return pd.DataFrame(matrix, columns=[f"a{j + 1}" for j in range(matrix.shape[1])])

    # ========== GROUPS ==========

    def group_record(self, vg, report: Optional[Dict] = None,
                     realized: Optional[Dict] = None) -> Dict:
        record = {
            "source": vg.source,
            "parity": vg.parity_class,
            "order": len(vg),
            "elements": [vg.versor(i).mv for i in range(len(vg))],
        }
        if realized is not None:
            record["realized"] = realized
        if report is not None:
            record["verification"] = report
        return record

    def group_frame(self, vg) -> pd.DataFrame:
        frame = pd.DataFrame(vg.elements, columns=[blade_name(m) for m in range(vg.sig.size)])
        frame.insert(0, "parity", vg.parities)
        return frame

    def binary_record(self, report: Dict) -> Dict:
        keys = ("source", "order", "label", "order_spectrum", "center_size",
                "passed", "associativity", "expected_order", "scope", "failures")
        return {k: report.get(k) for k in keys}

    def multiplication_table_frame(self, table: np.ndarray) -> pd.DataFrame:
        return pd.DataFrame(table, columns=[str(j) for j in range(table.shape[1])])

    # ========== INDUCED ROOT SYSTEMS ==========

    def root_system4_record(self, induced) -> Dict:
        return {
            "group": induced.label,
            "source": induced.source,
            "rank": induced.dimension,
            "count": len(induced),
            "roots": induced.roots,
        }

    def root_system4_frame(self, induced) -> pd.DataFrame:
        return pd.DataFrame(induced.roots, columns=list(_axes(induced.dimension)))

    # ========== COXETER PLANE ==========

    def coxeter_record(self, group: str, descriptor, orbit: Optional[Dict] = None,
                       axis: Optional[Dict] = None) -> Dict:
        record = {
            "group": group,
            "order": list(descriptor.order),
            "versor": descriptor.versor.mv,
            "h": descriptor.h,
            "versor_power": descriptor.power,
            "plane": descriptor.plane,
            "normal": descriptor.normal.vector_part() if descriptor.normal is not None else None,
            "exponents": descriptor.exponents,
        }
        if axis is not None:
            record["axis_roots"] = axis
        if orbit is not None:
            record["orbit"] = self.orbit_record(orbit)
        return record

    def orbit_record(self, orbit: Dict) -> Dict:
        return {
            "orbit_size": orbit["orbit_size"],
            "points": orbit["points"],
            "in_plane": orbit["in_plane"],
            "normal": orbit["normal"],
        }

    def projection_record(self, group: str, coords: np.ndarray, symmetry: int) -> Dict:
        return {"group": group, "count": len(coords), "symmetry_order": symmetry, "points": coords}

    def projection_frame(self, coords: np.ndarray) -> pd.DataFrame:
        return pd.DataFrame(coords, columns=["x", "y"])

    # ========== POINT ARRAYS ==========

    def point_array_record(self, arr, report: Dict, meta: Optional[Dict] = None,
                           raw: Optional[List[Multivector]] = None) -> Dict:
        record = dict(meta or {})
        record.update({
            "count": len(arr),
            "candidate_count": arr.candidate_count,
            "points": [
                {"coords": point, "multiplicity": len(sources),
                 "provenance": [list(pair) for pair in sources]}
                for point, sources in zip(arr.points, arr.provenance)
            ],
            "degeneracy": report,
        })
        if raw is not None:
            record["raw"] = raw
        return record

    def point_array_frame(self, arr) -> pd.DataFrame:
        frame = pd.DataFrame(arr.points, columns=list(_axes(arr.points.shape[1])))
        frame["multiplicity"] = arr.multiplicities
        return frame

    def sweep_record(self, sweep: Sequence[Tuple[float, int]], distinguished: List[float],
                     meta: Optional[Dict] = None) -> Dict:
        record = dict(meta or {})
        record["sweep"] = [{"length": length, "cardinality": count} for length, count in sweep]
        record["distinguished"] = distinguished
        return record

    def sweep_frame(self, sweep: Sequence[Tuple[float, int]]) -> pd.DataFrame:
        return pd.DataFrame(list(sweep), columns=["length", "cardinality"])
