import sys


def validate(text):
    lines = text.strip().split("\n")
    if len(lines) != 2:
        return False
    try:
        n = int(lines[0])
        a = list(map(int, lines[1].split()))
    except ValueError:
        return False
    return 1 <= n <= 2500 and len(a) == n and all(-10**4 <= x <= 10**4 for x in a)


print(validate(sys.stdin.read()))
