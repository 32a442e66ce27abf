import json
import sys


def validate(args):
    if not isinstance(args, list) or len(args) != 2:
        return False
    coins, amount = args
    if not isinstance(coins, list) or not 1 <= len(coins) <= 12:
        return False
    if len(set(coins)) != len(coins):
        return False
    if not all(isinstance(c, int) and 1 <= c <= 2**31 - 1 for c in coins):
        return False
    return isinstance(amount, int) and 0 <= amount <= 10000


try:
    print(validate(json.loads(sys.stdin.read())))
except ValueError:
    print(False)
