s = input().strip()
best = 0
for i in range(len(s)):
    for j in range(i + 1, len(s) + 1):
        t = s[i:j]
        if t == t[::-1] and j - i > best:
            best = j - i
print(best)
