import json
import random
import sys


def gen_input(rng, max_len):
    n = rng.randint(max(1, max_len // 2), max_len)
    return "".join(rng.choice("abc") for _ in range(n)) + "\n"


count, seed, max_len = map(int, sys.stdin.read().split())
rng = random.Random(seed)
for _ in range(count):
    print(json.dumps(gen_input(rng, max_len)))
