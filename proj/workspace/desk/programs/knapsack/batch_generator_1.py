import json
import random
import sys


def gen_input(rng, max_len):
    n = rng.randint(1, max_len)
    cap = rng.randint(1, 3 * max_len)
    lines = [f"{n} {cap}"]
    for _ in range(n):
        lines.append(f"{rng.randint(1, 10)} {rng.randint(1, 10)}")
    return "\n".join(lines) + "\n"


count, seed, max_len = map(int, sys.stdin.read().split())
rng = random.Random(seed)
for _ in range(count):
    print(json.dumps(gen_input(rng, max_len)))
