#!/usr/bin/env python3
"""
Main entry point for skewpair.
Congruence canonical forms of skew-symmetric matrix pairs over Q and GF(p).
"""

import sys
import argparse
import logging
from pathlib import Path
from typing import List, Optional

import colorlog
import yaml
from dotenv import load_dotenv

# Add src directory to Python path
sys.path.insert(0, str(Path(__file__).parent / "src"))

from core import settings
from core.errors import SkewPairError
from processors.canonical_processor import CanonicalProcessor
from processors.generate_processor import GenerateProcessor
from processors.verify_processor import VerifyProcessor
from readers.instance_reader import write_json

EXIT_OK = 0
EXIT_FAILURE = 1
DEFAULT_LOG_FILE = "logs/skewpair.log"


def setup_logging(verbose: bool = False, log_file: str = DEFAULT_LOG_FILE):
    """Setup global logging configuration."""
    level = logging.DEBUG if verbose else logging.WARNING

    # Create logs directory if it doesn't exist
    Path(log_file).parent.mkdir(parents=True, exist_ok=True)

    stream = logging.StreamHandler(sys.stderr)
    stream.setFormatter(colorlog.ColoredFormatter(
        '%(log_color)s%(levelname)-8s%(reset)s %(name)s - %(message)s'
    ))
    file_handler = logging.FileHandler(log_file)
    file_handler.setFormatter(logging.Formatter('%(asctime)s - %(name)s - %(levelname)s - %(message)s'))

    logging.basicConfig(level=level, handlers=[file_handler, stream], force=True)


def configured_log_file(config_path: Optional[str]) -> str:
    """logging.file from the YAML config, if any."""
    path = Path(config_path or settings.config_path())
    if not path.exists():
        return DEFAULT_LOG_FILE
    with open(path, 'r') as f:
        config = yaml.safe_load(f) or {}
    return (config.get('logging') or {}).get('file', DEFAULT_LOG_FILE)


def status(message: str):
    """Human-facing progress line; stdout is kept for JSON."""
    print(message, file=sys.stderr)


def emit(record, output: Optional[str], indent: int):
    text = write_json(record, output, indent)
    if output:
        status(f"💾 Result written to {output}")
    else:
        sys.stdout.write(text)


def canonicalize(args) -> int:
    """Canonical form of one instance, or a batch of instances."""
    processor = CanonicalProcessor(args.config)

    if len(args.input) > 1 or args.output_dir:
        output_dir = args.output_dir or "results"
        status(f"🔄 Canonicalizing {len(args.input)} instances into {output_dir}")
        summary = processor.process_batch(args.input, output_dir, verify=args.verify,
                                          oracle=args.oracle, summary_path=args.summary)
        failed = summary[summary["status"] != "ok"]
        stats = processor.get_processing_stats()
        status(f"📊 {stats['processed']} succeeded, {stats['failed']} failed")
        for _, row in failed.iterrows():
            status(f"  ❌ {row['input']}: {row['error']}")
        return int(failed["exit_code"].max()) if len(failed) else EXIT_OK

    status(f"🔍 Canonicalizing {args.input[0]}")
    record = processor.canonicalize_file(args.input[0], witness=args.witness or args.verify,
                                         verify=args.verify, oracle=args.oracle)
    blocks = " + ".join(f"{b['kind']}{b['n']}" for b in record["blocks"]) or "(empty)"
    status(f"✅ Blocks: {blocks}")
    if not record["witness_complete"]:
        status("ℹ️  Characteristic polynomial does not split; no witness")
    if record["verified"]:
        status("✅ Witness verified")
    if "invariants" in record:
        status("✅ Pencil invariants agree")
    emit(record, args.output, processor.json_indent)
    return EXIT_OK


def regularize(args) -> int:
    """Split off the singular summands of an instance."""
    processor = CanonicalProcessor(args.config)
    status(f"🔍 Regularizing {args.input}")
    record = processor.regularize_file(args.input, verify=args.verify)
    status(f"📊 Regular part of size {len(record['regular_part']['a'])}, "
           f"{record['t']} singular summands")
    emit(record, args.output, processor.json_indent)
    return EXIT_OK


def invariants(args) -> int:
    """Kronecker invariants of the pencil xA - B."""
    processor = CanonicalProcessor(args.config)
    status(f"🔍 Computing pencil invariants of {args.input}")
    record = processor.invariants_file(args.input)
    if not record["paired"]:
        status("⚠️ Invariants are not paired as a skew pair requires")
    emit(record, args.output, processor.json_indent)
    return EXIT_OK


def verify(args) -> int:
    """Check a result file against its instance."""
    processor = VerifyProcessor(args.config)
    status(f"🔍 Verifying {args.result} against {args.input}")
    summary = processor.verify(args.input, args.result)
    status(f"✅ Witness reproduces {summary['blocks']} blocks exactly")
    return EXIT_OK


def generate(args) -> int:
    """Random instance with a known canonical form."""
    processor = GenerateProcessor(args.config)
    status(f"🎲 Generating {args.blocks} over {args.field} (seed {args.seed}, {args.congruence})")
    record = processor.generate(args.field, args.blocks, args.output, args.seed, args.congruence)
    if not args.output:
        sys.stdout.write(write_json(record, None, processor.json_indent))
    return EXIT_OK


COMMANDS = {
    'canonicalize': canonicalize,
    'regularize': regularize,
    'invariants': invariants,
    'verify': verify,
    'generate': generate,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='skewpair',
        description='Canonical forms of skew-symmetric matrix pairs under congruence',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  %(prog)s generate --blocks J:2:3,K:1,L:2 --field "GF(7)" --seed 1 -o pair.json
  %(prog)s canonicalize pair.json --witness --verify -o pair.result.json
  %(prog)s verify pair.json pair.result.json
  %(prog)s regularize pair.json
  %(prog)s invariants pair.json
  %(prog)s canonicalize data/*.json --output-dir results --summary results/summary.csv
        """
    )

    parser.add_argument('-v', '--verbose', action='store_true',
                        help='Enable verbose logging')
    parser.add_argument('--config', default=None,
                        help='Path to YAML config (default: $SKEWPAIR_CONFIG or config/skewpair_config.yaml)')

    subparsers = parser.add_subparsers(dest='command', help='Available commands')

    # Canonicalize command
    canon_parser = subparsers.add_parser('canonicalize', help='Congruence canonical form')
    canon_parser.add_argument('input', nargs='+', help='Instance JSON file(s)')
    canon_parser.add_argument('--witness', action='store_true', help='Include the witness matrix')
    canon_parser.add_argument('--verify', action='store_true', help='Re-multiply the witness')
    canon_parser.add_argument('--oracle', action='store_true',
                              help='Cross-check against pencil invariants')
    canon_parser.add_argument('-o', '--output', help='Result file (default: stdout)')
    canon_parser.add_argument('--output-dir', help='Batch mode: directory for result files')
    canon_parser.add_argument('--summary', help='Batch mode: CSV summary path')

    # Regularize command
    reg_parser = subparsers.add_parser('regularize', help='Regular part plus singular summands')
    reg_parser.add_argument('input', help='Instance JSON file')
    reg_parser.add_argument('--verify', action='store_true', help='Re-multiply the witness')
    reg_parser.add_argument('-o', '--output', help='Result file (default: stdout)')

    # Invariants command
    inv_parser = subparsers.add_parser('invariants', help='Kronecker invariants of xA - B')
    inv_parser.add_argument('input', help='Instance JSON file')
    inv_parser.add_argument('-o', '--output', help='Result file (default: stdout)')

    # Verify command
    verify_parser = subparsers.add_parser('verify', help='Check a result file against its instance')
    verify_parser.add_argument('input', help='Instance JSON file')
    verify_parser.add_argument('result', help='Result JSON file')

    # Generate command
    gen_parser = subparsers.add_parser('generate', help='Random instance with known canonical form')
    gen_parser.add_argument('--blocks', required=True, help='Block list, e.g. J:2:3,K:1,L:2')
    gen_parser.add_argument('--field', default='Q', help='Q or GF(p)')
    gen_parser.add_argument('--seed', type=int, required=True, help='Random seed')
    gen_parser.add_argument('--congruence', choices=['random', 'identity'], default='random',
                            help='Scrambling congruence')
    gen_parser.add_argument('-o', '--output', help='Instance file; the answer goes next to it')

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Main CLI entry point; returns the process exit code."""
    load_dotenv()
    parser = build_parser()
    args = parser.parse_args(argv)

    if not args.command:
        parser.print_help()
        return EXIT_FAILURE

    # Setup logging
    setup_logging(args.verbose, configured_log_file(args.config))

    # Execute command
    try:
        code = COMMANDS[args.command](args)
        if code == EXIT_OK:
            status(f"\n✅ {args.command.upper()} operation completed successfully!")
        else:
            status(f"\n❌ {args.command.upper()} operation failed!")
        return code

    except SkewPairError as e:
        logging.getLogger("skewpair").error(str(e))
        status(f"\n❌ {args.command.upper()} failed: {e}")
        return e.exit_code
    except KeyboardInterrupt:
        status("\n\n⚠️ Operation interrupted by user")
        return EXIT_FAILURE
    except Exception as e:
        status(f"\n❌ Unexpected error: {e}")
        if args.verbose:
            import traceback
            traceback.print_exc()
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
