from equitangent import main
import argparse

if __name__ == '__main__':
    arg_parser = argparse.ArgumentParser()
    arg_parser.add_argument('--n', type=int, nargs='+', default=[4, 5, 6, 7, 8])
    arg_parser.add_argument('--count', type=int, default=50)
    arg_parser.add_argument('--seed', type=int, default=0)
    arg_parser.add_argument('--step', type=float, default=1e-4)
    args = arg_parser.parse_args()

    codes = []
    for n in args.n:
        codes.append(main(['rank', '--n', str(n), '--count', str(args.count),
                           '--seed', str(args.seed), '--step', str(args.step)]))
    raise SystemExit(max(codes))
