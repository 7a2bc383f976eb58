"""
JSON reader for pair instances and result files.

Instance layout:
    {"field": "Q" | "GF(p)", "a": [["0", "1"], ["-1", "0"]], "b": [...]}

Scalars are strings (integers or fractions) so exact values survive JSON.
"""

import json
import logging
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from algebra.field import FieldSpec
from algebra.matrix import Matrix, MatrixPair
from algebra.poly import Polynomial
from core.errors import InstanceFormatError, SkewPairError
from reduction.blocks import BlockKind, CanonicalBlock


class InstanceReader:
    """Reads and validates instance and result files."""

    def __init__(self):
        self.logger = logging.getLogger(__name__)

    def _load_json(self, file_path: str) -> Dict:
        try:
            with open(file_path, "r", encoding="utf-8") as f:
                data = json.load(f)
        except FileNotFoundError:
            raise InstanceFormatError(f"file not found: {file_path}")
        except json.JSONDecodeError as e:
            raise InstanceFormatError(f"{file_path} is not valid JSON: {e}")
        except UnicodeDecodeError as e:
            raise InstanceFormatError(f"{file_path} is not valid UTF-8: {e}")
        if not isinstance(data, dict):
            raise InstanceFormatError(f"{file_path}: top level must be an object")
        return data

    def parse_field(self, data: Dict) -> FieldSpec:
        try:
            return FieldSpec.parse(str(data.get("field", "")))
        except SkewPairError as e:
            raise InstanceFormatError(f"invalid field: {e}")

    def parse_matrix(self, field: FieldSpec, rows, name: str, size: Optional[int] = None) -> Matrix:
        if not isinstance(rows, list) or any(not isinstance(r, list) for r in rows):
            raise InstanceFormatError(f"'{name}' must be a list of rows")
        n = len(rows) if size is None else size
        if any(len(r) != n for r in rows):
            raise InstanceFormatError(f"'{name}' must be square")
        try:
            return Matrix.from_rows(field, [[str(x) for x in r] for r in rows], cols=n)
        except SkewPairError as e:
            raise InstanceFormatError(f"'{name}': {e}")

    def parse_pair(self, field: FieldSpec, a_rows, b_rows) -> MatrixPair:
        a = self.parse_matrix(field, a_rows, "a")
        b = self.parse_matrix(field, b_rows, "b")
        try:
            return MatrixPair(a, b)
        except SkewPairError as e:
            raise InstanceFormatError(str(e))

    def read_instance(self, file_path: str) -> MatrixPair:
        """
        Read an instance file.

        Args:
            file_path: Path to the JSON instance

        Returns:
            The validated skew pair
        """
        data = self._load_json(file_path)
        for key in ("field", "a", "b"):
            if key not in data:
                raise InstanceFormatError(f"{file_path}: missing key '{key}'")
        field = self.parse_field(data)
        pair = self.parse_pair(field, data["a"], data["b"])
        self.logger.info(f"Read {pair.size}x{pair.size} pair over {field} from {file_path}")
        return pair

    def parse_block(self, field: FieldSpec, record: Dict) -> CanonicalBlock:
        try:
            kind = BlockKind(record["kind"])
            n = int(record["n"])
            if kind != BlockKind.J:
                return CanonicalBlock(kind, n)
            if "eigenvalue" in record:
                return CanonicalBlock.j_block(n, field.parse_scalar(str(record["eigenvalue"])))
            polynomial = Polynomial(field, [field.parse_scalar(str(c)) for c in record["polynomial"]])
            return CanonicalBlock.j_poly_block(polynomial, bool(record.get("fully_decomposed", True)))
        except (KeyError, ValueError, TypeError) as e:
            raise InstanceFormatError(f"invalid block record {record}: {e}")
        except SkewPairError as e:
            raise InstanceFormatError(f"invalid block record {record}: {e}")

    def read_result(self, file_path: str) -> Tuple[FieldSpec, List[CanonicalBlock], Optional[Matrix], Dict]:
        """
        Read a result file written by canonicalize or regularize.

        Returns:
            (field, blocks in witness order, witness or None, raw record)
        """
        data = self._load_json(file_path)
        field = self.parse_field(data)
        blocks = [self.parse_block(field, r) for r in data.get("blocks", [])]
        witness = None
        if data.get("witness") is not None:
            witness = self.parse_matrix(field, data["witness"], "witness")
        return field, blocks, witness, data

    def read_block_list(self, field: FieldSpec, spec: str) -> List[CanonicalBlock]:
        """Parse 'J:2:3,K:1,L:2' (kind:n[:eigenvalue])."""
        blocks = []
        for item in filter(None, (s.strip() for s in spec.split(","))):
            parts = item.split(":")
            try:
                kind = BlockKind(parts[0].upper())
                n = int(parts[1])
            except (IndexError, ValueError):
                raise InstanceFormatError(f"malformed block '{item}', expected kind:n[:eigenvalue]")
            try:
                if kind == BlockKind.J:
                    if len(parts) != 3:
                        raise InstanceFormatError(f"J block '{item}' needs an eigenvalue")
                    blocks.append(CanonicalBlock.j_block(n, field.parse_scalar(parts[2])))
                elif len(parts) != 2:
                    raise InstanceFormatError(f"{kind.value} block '{item}' takes no eigenvalue")
                else:
                    blocks.append(CanonicalBlock(kind, n))
            except InstanceFormatError:
                raise
            except SkewPairError as e:
                raise InstanceFormatError(f"malformed block '{item}': {e}")
        if not blocks:
            raise InstanceFormatError("empty block specification")
        return blocks


def pair_to_dict(pair: MatrixPair) -> Dict:
    return {"field": str(pair.field), "a": pair.a.to_strings(), "b": pair.b.to_strings()}


def write_json(record: Dict, file_path: Optional[str] = None, indent: int = 2) -> str:
    """Serialize deterministically; write to file_path when given."""
    text = json.dumps(record, indent=indent, sort_keys=True) + "\n"
    if file_path:
        path = Path(file_path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    return text
