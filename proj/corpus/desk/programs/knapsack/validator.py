import sys


def validate(text):
    try:
        nums = list(map(int, text.split()))
    except ValueError:
        return False
    if len(nums) < 2:
        return False
    n, cap = nums[0], nums[1]
    if not (1 <= n <= 100 and 1 <= cap <= 10000) or len(nums) != 2 + 2 * n:
        return False
    return all(1 <= x <= 1000 for x in nums[2:])


print(validate(sys.stdin.read()))
