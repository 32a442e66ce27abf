import sys

data = sys.stdin.read().split()
n, cap = int(data[0]), int(data[1])
total = 0
for i in range(n):
    w, v = int(data[2 + 2 * i]), int(data[3 + 2 * i])
    if w <= cap:
        total += v
print(total)
