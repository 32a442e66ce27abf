x = int(input())
print(x if x >= 0 else -x)
