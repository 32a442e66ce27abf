import math


class Solution:
    def repairCars(self, ranks, cars):
        lo, hi = 1, min(ranks) * cars * cars
        while lo < hi:
            mid = (lo + hi) // 2
            done = sum(math.isqrt(mid // r) for r in ranks)
            if done >= cars:
                hi = mid
            else:
                lo = mid + 1
        return lo
