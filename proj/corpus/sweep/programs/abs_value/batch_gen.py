import json
import random
import sys

count, seed, max_len = map(int, sys.stdin.read().split())
rng = random.Random(seed)
for _ in range(count):
    print(json.dumps(f"{rng.randint(-99, 99)}\n"))
