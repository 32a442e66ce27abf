import sys


def validate(text):
    s = text.rstrip("\n")
    return 1 <= len(s) <= 1000 and "\n" not in s and s.isalpha() and s.islower()


print(validate(sys.stdin.read()))
