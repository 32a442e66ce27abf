import sys

data = sys.stdin.read().split()
n, cap = int(data[0]), int(data[1])
items = [(int(data[2 + 2 * i]), int(data[3 + 2 * i])) for i in range(n)]
best = 0
for mask in range(1 << n):
    w = v = 0
    for i in range(n):
        if mask >> i & 1:
            w += items[i][0]
            v += items[i][1]
    if w <= cap and v > best:
        best = v
print(best)
