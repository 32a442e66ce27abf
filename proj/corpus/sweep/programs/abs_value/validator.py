import sys

try:
    x = int(sys.stdin.read())
    print(-99 <= x <= 99)
except ValueError:
    print(False)
