"""
Generate processor - random instances with a known canonical form.

The instance is T * C * T^T for the realized block sum C and a random
nonsingular T = L * U * P built from unit triangular factors with small
entries and a permutation.
"""

import random
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional

from algebra.field import FieldElement, FieldSpec
from algebra.matrix import Matrix, MatrixPair, congruence_unchecked, is_nonsingular, permutation_matrix
from core.base_processor import BaseProcessor
from core.errors import ReductionError
from readers.instance_reader import InstanceReader, pair_to_dict, write_json
from reduction.blocks import CanonicalBlock, realize_sum


def random_scalar(field: FieldSpec, rng: random.Random, max_height: int) -> FieldElement:
    """Rational with numerator and denominator bounded by max_height, or a random residue."""
    if field.is_rational:
        return field(Fraction(rng.randint(-max_height, max_height), rng.randint(1, max_height)))
    return field(rng.randrange(field.characteristic))


def random_congruence(field: FieldSpec, n: int, rng: random.Random, max_height: int = 9,
                      max_retries: int = 5) -> Matrix:
    """
    Random nonsingular n x n matrix as L * U * P.

    Unit triangular factors are always invertible; the retry loop only
    guards the product.
    """
    for _ in range(max_retries):
        lower = Matrix.identity(field, n)
        upper = Matrix.identity(field, n)
        for i in range(n):
            for j in range(i):
                lower.entries[i][j] = random_scalar(field, rng, max_height)
                upper.entries[j][i] = random_scalar(field, rng, max_height)
        order = list(range(n))
        rng.shuffle(order)
        t = lower * upper * permutation_matrix(field, order)
        if is_nonsingular(t):
            return t
    raise ReductionError(f"no nonsingular congruence after {max_retries} attempts", step="generate")


class GenerateProcessor(BaseProcessor):
    """Builds scrambled instances from block lists."""

    def __init__(self, config_path: Optional[str] = None):
        super().__init__(config_path)
        self.reader = InstanceReader()
        self.max_height = int(self.setting('generator', 'max_height', 9))
        self.max_retries = int(self.setting('generator', 'max_retries', 5))

    def build(self, field: FieldSpec, blocks: List[CanonicalBlock], seed: Optional[int] = None,
              congruence: str = "random") -> Dict:
        """
        Scramble the realized block sum.

        Args:
            field: Target field
            blocks: Canonical blocks in the order they are realized
            seed: Seed for the random congruence
            congruence: 'random' or 'identity'

        Returns:
            {"instance": MatrixPair, "scrambling": Matrix}
        """
        canonical = realize_sum(blocks, field)
        n = canonical.size
        if congruence == "identity":
            t = Matrix.identity(field, n)
        elif congruence == "random":
            t = random_congruence(field, n, random.Random(seed), self.max_height, self.max_retries)
        else:
            raise ValueError(f"unknown congruence mode '{congruence}'")
        instance: MatrixPair = congruence_unchecked(canonical, t)
        self.logger.debug(f"Generated pair of size {n} from {[str(b) for b in blocks]}")
        return {"instance": instance, "scrambling": t}

    def generate(self, field_text: str, block_spec: str, output_path: Optional[str] = None,
                 seed: Optional[int] = None, congruence: str = "random") -> Dict:
        """
        Generate an instance file and its answer sidecar.

        Returns:
            Instance record; when output_path is set the sidecar
            <output>.answer.json holds the blocks and the scrambling matrix
        """
        field = FieldSpec.parse(field_text)
        blocks = self.reader.read_block_list(field, block_spec)
        built = self.build(field, blocks, seed, congruence)
        record = pair_to_dict(built["instance"])
        if output_path:
            write_json(record, output_path, self.json_indent)
            answer = {
                "field": str(field),
                "blocks": [b.to_dict() for b in sorted(blocks, key=lambda b: b.sort_key())],
                "scrambling": built["scrambling"].to_strings(),
                "seed": seed,
                "congruence": congruence,
            }
            answer_path = str(Path(output_path).with_suffix("")) + ".answer.json"
            write_json(answer, answer_path, self.json_indent)
            self.logger.info(f"Instance written to {output_path}, answer to {answer_path}")
        self.stats["processed"] += 1
        return record
