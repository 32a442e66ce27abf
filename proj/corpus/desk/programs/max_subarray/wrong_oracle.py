n = int(input())
a = list(map(int, input().split()))
best = None
for i in range(n):
    for j in range(i + 1, n):
        s = sum(a[i:j + 1])
        if best is None or s > best:
            best = s
print(best)
