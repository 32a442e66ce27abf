s = input().strip()
best = 0
for center in range(2 * len(s) - 1):
    lo, hi = center // 2, (center + 1) // 2
    while lo >= 0 and hi < len(s) and s[lo] == s[hi]:
        lo -= 1
        hi += 1
    best = max(best, hi - lo - 1)
print(best)
