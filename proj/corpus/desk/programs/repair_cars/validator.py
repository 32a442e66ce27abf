import json
import sys


def validate(args):
    if not isinstance(args, list) or len(args) != 2:
        return False
    ranks, cars = args
    if not isinstance(ranks, list) or not 1 <= len(ranks) <= 100000:
        return False
    if not all(isinstance(r, int) and 1 <= r <= 100 for r in ranks):
        return False
    return isinstance(cars, int) and 1 <= cars <= 1000000


try:
    print(validate(json.loads(sys.stdin.read())))
except ValueError:
    print(False)
