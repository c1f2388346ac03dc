"""
Command line entry point::

    normsim simulate --society nest --seeds 5 --steps 2000 --out runs
    normsim compare --experimental runs/nest --controls runs/tell runs/penalty
"""
import argparse
import logging
import os
import sys

import normsim
from normsim.base import NormsimException
from normsim.config import ExperimentConfig
from normsim.social import PRESETS

log = logging.getLogger(__name__)


def _parser():
    parser = argparse.ArgumentParser(
        prog='normsim',
        description='Norm emergence under sanctions, tells and hints.')
    parser.add_argument('--version', action='version',
                        version='%(prog)s ' + normsim.__version__)
    parser.add_argument('--log-level', default='WARNING',
                        choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'])
    commands = parser.add_subparsers(dest='command')
    commands.required = True

    simulate = commands.add_parser(
        'simulate', help='train and record runs for one or more societies')
    simulate.add_argument('--society', action='append',
                          choices=list(PRESETS),
                          help='may be repeated; defaults to the config')
    simulate.add_argument('--seeds', type=int)
    simulate.add_argument('--base-seed', type=int)
    simulate.add_argument('--steps', type=int,
                          help='steps per episode')
    simulate.add_argument('--train-steps', type=int)
    simulate.add_argument('--population', type=int)
    simulate.add_argument('--out')
    simulate.add_argument('--jobs', type=int)
    simulate.add_argument('--config',
                          help='INI file, defaults to $NORMSIM_CONFIG')
    simulate.add_argument('--norms',
                          help='listing file replacing the enforced norms')
    simulate.add_argument('--async', dest='use_async', action='store_true',
                          help='run through the asyncio process pool')

    compare = commands.add_parser(
        'compare', help='compare converged metrics between societies')
    compare.add_argument('--experimental',
                         help='runs of one society, defaults to '
                              '<out>/<experimental> from the config')
    compare.add_argument('--controls', required=True, nargs='+')
    compare.add_argument('--out', help='CSV report path')
    compare.add_argument('--metrics', nargs='+')
    compare.add_argument('--window', type=int)
    compare.add_argument('--config',
                         help='INI file, defaults to $NORMSIM_CONFIG')
    return parser


def simulate(args):
    overrides = {
        ('experiment', 'societies'):
            ','.join(args.society) if args.society else None,
        ('experiment', 'seeds'): args.seeds,
        ('experiment', 'base_seed'): args.base_seed,
        ('experiment', 'out'): args.out,
        ('experiment', 'jobs'): args.jobs,
        ('experiment', 'norms'): args.norms,
        ('world', 'episode_steps'): args.steps,
        ('world', 'population'): args.population,
        ('learning', 'training_steps'): args.train_steps,
    }
    config = ExperimentConfig.load(args.config, overrides)
    if args.use_async:
        import asyncio

        from normsim import aio

        loop = asyncio.new_event_loop()
        try:
            manifests = loop.run_until_complete(
                aio.Experiment(config, loop=loop).run())
        finally:
            loop.close()
    else:
        manifests = normsim.Experiment(config).run()
    for manifest in manifests:
        print(os.path.dirname(manifest.outputs['manifest']))
    return 0


def compare(args):
    overrides = {('experiment', 'convergence_window'): args.window}
    config = ExperimentConfig.load(args.config, overrides)
    experimental = args.experimental or os.path.join(
        config.get('experiment', 'out'), config.experimental)
    report = normsim.Experiment(config).compare(
        experimental, args.controls, metrics=args.metrics)
    if args.out:
        report.to_csv(args.out)
    print(report.to_string())
    return 0


def main(argv=None):
    args = _parser().parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, args.log_level),
        format='%(asctime)s %(levelname)s %(name)s: %(message)s')
    command = simulate if args.command == 'simulate' else compare
    try:
        return command(args)
    except NormsimException as e:
        sys.stderr.write('error: %s: %s\n' % (type(e).__name__, e))
        return 2


if __name__ == '__main__':
    sys.exit(main())
