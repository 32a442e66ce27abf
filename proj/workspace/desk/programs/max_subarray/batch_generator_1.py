import json
import random
import sys


def gen_input(rng, max_len):
    n = rng.randint(1, max_len)
    a = [rng.randint(-10, 10) for _ in range(n)]
    return f"{n}\n{' '.join(map(str, a))}\n"


count, seed, max_len = map(int, sys.stdin.read().split())
rng = random.Random(seed)
for _ in range(count):
    print(json.dumps(gen_input(rng, max_len)))
