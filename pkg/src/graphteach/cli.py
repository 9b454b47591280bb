"""Command-line umbrella: gen-stimuli, run-llm, simulate, fit, analyze, serve."""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

from . import analysis, fitting, llm, service, stimuli, teachers


def _add_gen_stimuli(sub):
    p = sub.add_parser("gen-stimuli", help="generate a screened stimulus pool")
    p.add_argument("--layers", default="1,3,3,3")
    p.add_argument("--reward-max", type=int, default=3)
    p.add_argument("--pool-size", type=int, required=True)
    p.add_argument("--congruency", choices=stimuli.CONGRUENCY, default=None)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)


def _add_run_llm(sub):
    p = sub.add_parser("run-llm", help="run chat-model teachers through an experiment")
    p.add_argument("--endpoint", required=True,
                   help="endpoint name from --config, or 'mock:REPLY' for a dry run")
    p.add_argument("--config", help="JSON endpoint registry")
    p.add_argument("--experiment", choices=service.EXPERIMENTS, required=True)
    p.add_argument("--condition", default="none",
                   help="scaffolding condition: none|inference|reward")
    p.add_argument("--training", choices=["congruent", "incongruent"],
                   help="training pool for the scaffold experiment")
    p.add_argument("--teachers", type=int, default=1)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--pools", help="directory of stimulus pool files")
    p.add_argument("--min-interval", type=float, default=0.0,
                   help="seconds between requests (rate limit)")
    p.add_argument("--out", required=True, help="output directory")


def _add_simulate(sub):
    p = sub.add_parser("simulate", help="simulate cognitive-model teachers")
    p.add_argument("--model", required=True)
    p.add_argument("--beta", default="3.0", help="inverse temperature, or 'inf' for argmax")
    p.add_argument("--w-reward", type=float, default=1.0)
    p.add_argument("--w-depth", type=float, default=0.0)
    p.add_argument("--experiment", choices=service.EXPERIMENTS, default="baseline")
    p.add_argument("--condition", default="none")
    p.add_argument("--training", choices=["congruent", "incongruent"], default="incongruent")
    p.add_argument("--subjects", type=int, default=1)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--pools", help="directory of stimulus pool files")
    p.add_argument("--out", required=True)


def _add_fit(sub):
    p = sub.add_parser("fit", help="fit models per subject and write JSONL results")
    p.add_argument("--data", required=True)
    p.add_argument("--models", default="bot,reward",
                   help="comma-separated model names")
    p.add_argument("--phase", choices=["train", "test"], default=None)
    p.add_argument("--out", required=True)


def _add_analyze(sub):
    p = sub.add_parser("analyze", help="write plot-ready report tables")
    p.add_argument("--data", required=True)
    p.add_argument("--report", required=True)
    p.add_argument("--models", default=",".join(analysis.DEFAULT_FIT_MODELS))
    p.add_argument("--fit-phase", choices=["train", "test"], default=None)


def _add_serve(sub):
    p = sub.add_parser("serve", help="run the interactive session service")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--data", required=True)
    p.add_argument("--static", default=None, help="directory of built UI assets")
    p.add_argument("--host", default="127.0.0.1")


def _library(pool_dir):
    pool_dir = pool_dir or os.path.join(os.getcwd(), "pools")
    return service.StimulusLibrary.load_or_generate(pool_dir)


def _sequences(args, n):
    lib = _library(args.pools)
    condition = {"scaffolding": args.condition}
    if args.experiment == "scaffold":
        condition["training"] = args.training or "incongruent"
    return [lib.build_sequence(args.experiment, condition, args.seed + i)
            for i in range(n)], condition


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="graphteach")
    sub = parser.add_subparsers(dest="command", required=True)
    for add in (_add_gen_stimuli, _add_run_llm, _add_simulate, _add_fit,
                _add_analyze, _add_serve):
        add(sub)
    args = parser.parse_args(argv)

    if args.command == "gen-stimuli":
        layers = tuple(int(x) for x in args.layers.split(","))
        pool = stimuli.generate_pool(args.pool_size, args.seed,
                                     congruency=args.congruency,
                                     layer_sizes=layers,
                                     reward_range=(0, args.reward_max))
        stimuli.save_stimuli(pool, args.out)
        print(f"wrote {len(pool)} stimuli to {args.out}")

    elif args.command == "run-llm":
        if args.endpoint.startswith("mock:"):
            endpoint = llm.MockEndpoint(replies=[args.endpoint[5:]])
        else:
            if not args.config:
                parser.error("--config required for non-mock endpoints")
            registry = llm.load_endpoints(args.config)
            if args.endpoint not in registry:
                parser.error(f"endpoint {args.endpoint!r} not in {sorted(registry)}")
            endpoint = registry[args.endpoint]
        sequences, condition = _sequences(args, args.teachers)
        os.makedirs(args.out, exist_ok=True)
        limiter = llm.RateLimiter(args.min_interval)
        datasets = []
        for i, seq in enumerate(sequences):
            tid = f"{args.endpoint}-{args.seed + i}"
            ds = llm.run_teacher(endpoint, seq, condition, teacher_id=tid,
                                 limiter=limiter,
                                 log_path=os.path.join(args.out, f"{tid}.log.jsonl"))
            datasets.append(ds)
            print(f"teacher {tid}: {len(ds.usable())}/{len(ds.trials)} usable trials")
        fitting.save_datasets(datasets, os.path.join(args.out, "datasets.json"))
        print(f"wrote {len(datasets)} datasets to {args.out}/datasets.json")

    elif args.command == "simulate":
        model = teachers.normalize_model(args.model)
        beta = math.inf if args.beta in ("inf", "argmax") else float(args.beta)
        params = {"beta": beta}
        if model == "reward_depth":
            params = {"w_reward": args.w_reward, "w_depth": args.w_depth}
        sequences, condition = _sequences(args, args.subjects)
        datasets = [fitting.simulate_subject(seq, model, params, args.seed + i,
                                             subject_id=f"{model}-{args.seed + i}",
                                             condition=condition)
                    for i, seq in enumerate(sequences)]
        fitting.save_datasets(datasets, args.out)
        print(f"wrote {len(datasets)} simulated subjects to {args.out}")

    elif args.command == "fit":
        datasets = fitting.load_datasets(args.data)
        models = [m for m in args.models.split(",") if m]
        results = []
        for ds in datasets:
            comp = fitting.compare(ds, models, phase=args.phase)
            results.extend(comp.results)
            print(f"{ds.subject_id}: best={comp.best_model}"
                  + (f" delta_bic={comp.delta_bic:.2f}" if comp.delta_bic is not None else ""))
        fitting.write_fit_results(results, args.out)
        print(f"wrote {len(results)} fits to {args.out}")

    elif args.command == "analyze":
        datasets = fitting.load_datasets(args.data)
        models = [m for m in args.models.split(",") if m]
        summary = analysis.write_report(datasets, args.report, fit_models=models,
                                        fit_phase=args.fit_phase)
        print(json.dumps(summary, indent=1, sort_keys=True))

    elif args.command == "serve":
        service.serve(args.port, args.data, static_dir=args.static, host=args.host)

    return 0


if __name__ == "__main__":
    sys.exit(main())
