"""
Verify processor - checks a result file against its instance by
recomputing S*A*S^T and S*B*S^T.
"""

from typing import Dict, Optional

from algebra.matrix import congruence_by, direct_sum, is_nonsingular
from core.base_processor import BaseProcessor
from core.errors import InstanceFormatError, WitnessMismatchError
from readers.instance_reader import InstanceReader
from reduction.blocks import realize


class VerifyProcessor(BaseProcessor):
    """Independent witness check for canonicalize and regularize results."""

    def __init__(self, config_path: Optional[str] = None):
        super().__init__(config_path)
        self.reader = InstanceReader()

    def verify(self, instance_path: str, result_path: str) -> Dict:
        """
        Verify a result file.

        Args:
            instance_path: Original instance
            result_path: Output of canonicalize or regularize

        Returns:
            Summary dictionary with the checked block count

        Raises:
            WitnessMismatchError: when the witness is missing, singular or wrong
        """
        pair = self.reader.read_instance(instance_path)
        field, blocks, witness, data = self.reader.read_result(result_path)
        if field != pair.field:
            raise InstanceFormatError(f"result is over {field}, instance over {pair.field}")
        if witness is None:
            raise WitnessMismatchError("result carries no witness to verify")
        if witness.rows != pair.size:
            raise WitnessMismatchError(f"witness is {witness.rows}x{witness.cols}, pair has size {pair.size}")
        if not is_nonsingular(witness):
            raise WitnessMismatchError("witness is singular")

        parts = []
        if data.get("regular_part") is not None:
            regular = data["regular_part"]
            parts.append(self.reader.parse_pair(field, regular.get("a", []), regular.get("b", [])))
        parts.extend(realize(b, field) for b in blocks)
        expected = direct_sum(parts, field)
        if expected.size != pair.size:
            raise WitnessMismatchError(f"blocks cover {expected.size} of {pair.size} rows")

        if congruence_by(pair, witness) != expected:
            self.stats["failed"] += 1
            raise WitnessMismatchError("S*A*S^T, S*B*S^T do not match the reported form")
        self.stats["processed"] += 1
        self.logger.info(f"Witness verified for {len(blocks)} blocks over {field}")
        return {"verified": True, "size": pair.size, "blocks": len(blocks),
                "command": data.get("command", "canonicalize")}
