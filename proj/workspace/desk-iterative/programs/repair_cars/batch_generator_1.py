import json
import random
import sys


def gen_input(rng, max_len):
    n = rng.randint(1, max_len)
    ranks = [rng.randint(1, 10) for _ in range(n)]
    cars = rng.randint(1, max_len)
    return [ranks, cars]


def main():
    count, seed, max_len = map(int, sys.stdin.read().split())
    rng = random.Random(seed)
    for _ in range(count):
        print(json.dumps(gen_input(rng, max_len), separators=(",", ":")))


main()
