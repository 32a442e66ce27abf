import sys


def main():
    data = sys.stdin.read().split()
    n = int(data[0])
    a = list(map(int, data[1:1 + n]))
    # best prefix sum
    best = cur = a[0]
    for x in a[1:]:
        cur += x
        best = max(best, cur)
    print(best)


main()
