import argparse
import sys

from lib.core import COMMANDS, RUNNERS, build_run_config
from lib.error_handler import RunMonitor, configure_logging, exit_code_for


def parse_args(argv=None):
	parser = argparse.ArgumentParser(
		prog='wavelet-asym',
		description='Large-scale asymptotics of the continuous wavelet transform')
	parser.add_argument('command', choices=COMMANDS, help='what to run')
	parser.add_argument('--profile', type=str, help='test spectrum (built-in or [profile.NAME] in the config)')
	parser.add_argument('--wavelet', type=str, help='morlet:OMEGA0, mexican or haar')
	parser.add_argument('--b', type=str, help='translation b')
	parser.add_argument('--a', type=str, help='scale a (eval)')
	parser.add_argument('--a-grid', dest='a_grid', type=str, help='START:STOP:POINTS, log-spaced (converge)')
	parser.add_argument('--n', type=str, help='number of expansion terms')
	parser.add_argument('--lambda', dest='lam', type=str, help='origin exponent lambda of the profile')
	parser.add_argument('--m', type=str, help='smoothness index m')
	parser.add_argument('--negative-axis', dest='negative_axis', type=str,
	                    help='reflected or principal_branch')
	parser.add_argument('--workers', type=str, help='concurrent grid evaluations')
	parser.add_argument('--config', type=str, help='configuration file (default: config.txt if present)')
	parser.add_argument('--csv', type=str, help='CSV output path (converge)')
	parser.add_argument('--json', type=str, help='JSON output path')
	parser.add_argument('--report', type=str, help='markdown output path (adjudicate)')
	parser.add_argument('--golden-dir', dest='golden_dir', type=str, help='golden record directory')
	parser.add_argument('--log-dir', dest='log_dir', type=str, help='also log to a file here')
	parser.add_argument('--verbose', action='store_true', help='debug logging')
	return parser.parse_args(argv)


def main(argv=None):
	args = parse_args(argv)
	log = configure_logging(args.log_dir, args.verbose)
	monitor = RunMonitor(log)
	monitor.start_monitoring(args.command)

	flags = {
		'profile': args.profile,
		'wavelet': args.wavelet,
		'b': args.b,
		'a': args.a,
		'a_grid': args.a_grid,
		'n': args.n,
		'lambda': args.lam,
		'm': args.m,
		'negative_axis': args.negative_axis,
		'workers': args.workers,
		'csv': args.csv,
		'json': args.json,
		'report': args.report,
		'golden_dir': args.golden_dir,
	}
	try:
		cfg = build_run_config(args.command, flags, args.config)
		RUNNERS[args.command](cfg, monitor)
	except Exception as e:
		monitor.record_error(args.command, e)
		return exit_code_for(e)
	return 0


if __name__ == '__main__':
	sys.exit(main())
