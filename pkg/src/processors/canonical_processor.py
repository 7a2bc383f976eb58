"""
Canonical processor - canonical forms, regularization and pencil invariants
for instance files, singly or in batches.
"""

from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Dict, List, Optional

import pandas as pd

from algebra.matrix import MatrixPair, congruence_by, direct_sum
from core.base_processor import BaseProcessor
from core.errors import OracleMismatchError, SkewPairError, WitnessMismatchError
from readers.instance_reader import InstanceReader, pair_to_dict, write_json
from reduction.blocks import realize
from reduction.canon import CanonicalForm, canonicalize
from reduction.kronecker import expected_invariants, pencil_invariants, skew_symmetry_checks
from reduction.regcore import regularize


class CanonicalProcessor(BaseProcessor):
    """Runs the reduction pipeline on instance files and builds result records."""

    def __init__(self, config_path: Optional[str] = None):
        super().__init__(config_path)
        self.reader = InstanceReader()
        self.workers = int(self.setting('batch', 'workers', 4))

    def _invariant_options(self) -> Dict:
        options = self.factor_options
        return {"degree_bound": options.degree_bound, "max_prime": options.max_prime,
                "max_candidates": options.max_candidates}

    def check_oracle(self, pair: MatrixPair, form: CanonicalForm) -> Dict:
        """
        Compare the blocks with independently computed pencil invariants.

        Raises:
            OracleMismatchError: when they disagree or the skew pairing fails
        """
        options = self._invariant_options()
        observed = pencil_invariants(pair, **options)
        expected = expected_invariants(form.blocks, pair.field, **options)
        if observed != expected:
            raise OracleMismatchError(f"pencil invariants {observed.to_dict()} "
                                      f"differ from block invariants {expected.to_dict()}")
        if not skew_symmetry_checks(observed):
            raise OracleMismatchError("pencil invariants of a skew pair are not paired")
        if observed.dimension != pair.size:
            raise OracleMismatchError(f"invariants account for {observed.dimension} of {pair.size} columns")
        return observed.to_dict()

    def canonicalize_pair(self, pair: MatrixPair, witness: bool = True, verify: bool = False,
                          oracle: bool = False) -> Dict:
        """
        Canonical form of a pair as a result record.

        Args:
            pair: Skew pair
            witness: Include the witness matrix
            verify: Re-multiply the witness and record the outcome
            oracle: Cross-check against pencil invariants

        Returns:
            Result dictionary
        """
        form = canonicalize(pair, self.factor_options)
        record = {
            "command": "canonicalize",
            "field": str(pair.field),
            "size": pair.size,
            "blocks": [b.to_dict() for b in form.blocks],
            "witness_complete": form.witness_complete,
            "verified": False,
        }
        if witness:
            record["witness"] = form.witness.s.to_strings() if form.witness else None
        if verify and form.witness is not None:
            if congruence_by(pair, form.witness.s) != form.realized():
                raise WitnessMismatchError("witness does not reproduce the canonical form")
            record["verified"] = True
        if oracle:
            record["invariants"] = self.check_oracle(pair, form)
        self.stats["processed"] += 1
        self.logger.info(f"Canonical form over {pair.field}: {' + '.join(str(b) for b in form.blocks) or 'empty'}")
        return record

    def canonicalize_file(self, input_path: str, witness: bool = True, verify: bool = False,
                          oracle: bool = False) -> Dict:
        return self.canonicalize_pair(self.reader.read_instance(input_path), witness, verify, oracle)

    def regularize_file(self, input_path: str, verify: bool = False) -> Dict:
        """Regularization decomposition: regular part plus singular summands."""
        pair = self.reader.read_instance(input_path)
        result = regularize(pair)
        record = {
            "command": "regularize",
            "field": str(pair.field),
            "size": pair.size,
            "regular_part": pair_to_dict(result.regular),
            "blocks": [b.to_dict() for b in result.singular_summands],
            "t": result.t,
            "witness": result.witness.s.to_strings(),
            "witness_complete": True,
            "verified": False,
        }
        if verify:
            expected = direct_sum([result.regular] + [realize(b, pair.field) for b in result.singular_summands],
                                  pair.field)
            if congruence_by(pair, result.witness.s) != expected:
                raise WitnessMismatchError("witness does not reproduce the regularization")
            record["verified"] = True
        self.stats["processed"] += 1
        self.logger.info(f"Regular part of size {result.regular.size}, {result.t} singular summands")
        return record

    def invariants_file(self, input_path: str) -> Dict:
        pair = self.reader.read_instance(input_path)
        invariants = pencil_invariants(pair, **self._invariant_options())
        self.stats["processed"] += 1
        return {
            "command": "invariants",
            "field": str(pair.field),
            "size": pair.size,
            "invariants": invariants.to_dict(),
            "paired": skew_symmetry_checks(invariants),
        }

    def process_batch(self, input_paths: List[str], output_dir: str, verify: bool = False,
                      oracle: bool = False, summary_path: Optional[str] = None) -> pd.DataFrame:
        """
        Canonicalize many files on a process pool.

        Args:
            input_paths: Instance files
            output_dir: Directory for <stem>.result.json files
            verify: Verify each witness
            oracle: Cross-check each result
            summary_path: Optional CSV summary

        Returns:
            One summary row per input file
        """
        jobs = [(self.config_path, path, str(Path(output_dir) / f"{Path(path).stem}.result.json"),
                 verify, oracle) for path in input_paths]
        self.logger.info(f"Canonicalizing {len(jobs)} files with {self.workers} workers")
        rows = []
        with ProcessPoolExecutor(max_workers=self.workers) as pool:
            for i, row in enumerate(pool.map(_canonicalize_job, jobs), 1):
                rows.append(row)
                self.stats["processed" if row["status"] == "ok" else "failed"] += 1
                self._log_progress(i, len(jobs), "Canonicalizing")
        summary = pd.DataFrame(rows, columns=["input", "output", "status", "exit_code", "size",
                                              "blocks", "witness_complete", "verified", "error"])
        if summary_path:
            Path(summary_path).parent.mkdir(parents=True, exist_ok=True)
            summary.to_csv(summary_path, index=False)
            self.logger.info(f"Batch summary written to {summary_path}")
        return summary


def _canonicalize_job(job) -> Dict:
    """Worker entry point; each task builds its own processor."""
    config_path, input_path, output_path, verify, oracle = job
    processor = CanonicalProcessor(config_path)
    row = {"input": input_path, "output": output_path, "status": "ok", "exit_code": 0,
           "size": None, "blocks": "", "witness_complete": None, "verified": None, "error": ""}
    try:
        record = processor.canonicalize_file(input_path, witness=True, verify=verify, oracle=oracle)
        write_json(record, output_path, processor.json_indent)
        row.update(size=record["size"], witness_complete=record["witness_complete"],
                   verified=record["verified"],
                   blocks=" ".join(f"{b['kind']}{b['n']}" for b in record["blocks"]))
    except SkewPairError as e:
        row.update(status="failed", exit_code=e.exit_code, error=str(e))
    return row
