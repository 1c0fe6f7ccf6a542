"""Command line: serve the HTTP summarizer or run a checkpoint sweep."""

import argparse
import json
import sys

from . import ModelServerError, __version__
from .config import ServerConfig
from .finetune import finetune


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="model-server")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="subcommand", metavar="subcommand")

    p = sub.add_parser("serve", help="run the HTTP summarizer backend")
    p.add_argument("--model", default="stub",
                   help="'stub', a checkpoint file, or a pre-trained model name")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8008)
    p.add_argument("--max-input-tokens", type=int, default=1024,
                   dest="max_input_tokens")
    p.add_argument("--beam-size", type=int, default=1, dest="beam_size")
    p.add_argument("--max-output-tokens", type=int, default=256,
                   dest="max_output_tokens")

    p = sub.add_parser("finetune", help="sweep checkpoints over a converted dataset")
    p.add_argument("--train", required=True, nargs="+", help="train dataset files")
    p.add_argument("--validation", required=True, nargs="+",
                   help="validation dataset files")
    p.add_argument("--out-dir", required=True, dest="out_dir")
    p.add_argument("--model", default="stub")
    p.add_argument("--epochs", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not args.subcommand:
        parser.print_usage(sys.stderr)
        return 2
    try:
        if args.subcommand == "serve":
            import uvicorn

            from .app import create_app

            config = ServerConfig(model=args.model, host=args.host, port=args.port,
                                  max_input_tokens=args.max_input_tokens,
                                  beam_size=args.beam_size,
                                  max_output_tokens=args.max_output_tokens)
            uvicorn.run(create_app(config), host=config.host, port=config.port)
            return 0
        config = ServerConfig(model=args.model, seed=args.seed)
        best = finetune(args.train, args.validation, args.out_dir, config,
                        epochs=args.epochs)
        print(f"best checkpoint -> {best}")
        return 0
    except (ModelServerError, ValueError, OSError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}),
              file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
